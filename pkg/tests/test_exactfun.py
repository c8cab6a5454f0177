import json
import mpmath
import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from extremal_weight.exactfun import (
    FieldMismatchError,
    PeriodicFn,
    PiecewiseFn,
    QuadField,
    QuadScalar,
)

K3_FIELD = QuadField(mpq(858, 49))


def w0_unit():
    # base weight for omega = 1, p = 9/5
    return PiecewiseFn((0, mpq(1, 2), 1), (mpq(5, 3), mpq(1, 3)))


class TestQuadScalar:
    def test_reciprocal_of_one(self):
        one = K3_FIELD(1)
        assert one.reciprocal() == one

    def test_perfect_square_normalizes(self):
        x = QuadScalar(1, 1, mpq(36, 25))
        assert x.b == 0 and x.a == mpq(11, 5)

    def test_exact_sign_k3(self):
        x = K3_FIELD(1, mpq(-7, 33))
        # squaring: (7/33)^2 * 858/49 = 858/1089 < 1, so the value is positive
        assert mpq(7, 33) ** 2 * mpq(858, 49) == mpq(858, 1089)
        assert x.sign() > 0
        assert (-x).sign() < 0
        assert K3_FIELD(1, mpq(-1, 4)).sign() < 0

    def test_reciprocal_formula(self):
        x = K3_FIELD(mpq(2, 3), mpq(1, 5))
        r = x.reciprocal()
        n = x.a**2 - x.b**2 * x.D
        assert r.a == x.a / n and r.b == -x.b / n

    def test_zero_division(self):
        with pytest.raises(ZeroDivisionError):
            K3_FIELD(0).reciprocal()
        with pytest.raises(ZeroDivisionError):
            K3_FIELD(1, 1) / 0

    def test_field_mismatch(self):
        with pytest.raises(FieldMismatchError):
            QuadScalar(1, 1, 2) + QuadScalar(1, 1, 3)

    def test_rational_mixes_with_any_field(self):
        assert QuadScalar(1, 1, 2) + QuadScalar(2, 0, 3) == QuadScalar(3, 1, 2)

    def test_json_round_trip(self):
        x = K3_FIELD(mpq(-3, 7), mpq(11, 13))
        y = QuadScalar.from_json(json.loads(json.dumps(x.to_json())))
        assert y == x and y.D == x.D


rationals = st.fractions(min_value=-50, max_value=50, max_denominator=60).map(
    lambda f: mpq(f.numerator, f.denominator)
)
scalars = st.builds(lambda a, b: K3_FIELD(a, b), rationals, rationals)


@settings(max_examples=300, deadline=None)
@given(scalars)
def test_times_reciprocal_is_one(x):
    if x:
        assert x * x.reciprocal() == 1


@settings(max_examples=1000, deadline=None)
@given(scalars, scalars)
def test_compare_agrees_with_high_precision(x, y):
    mpmath.mp.dps = 200
    r = mpmath.sqrt(mpmath.mpf(858) / 49)

    def val(z):
        a = mpmath.mpf(int(z.a.numerator)) / int(z.a.denominator)
        b = mpmath.mpf(int(z.b.numerator)) / int(z.b.denominator)
        return a + b * r

    d = val(x) - val(y)
    expected = (d > 0) - (d < 0) if abs(d) > mpmath.mpf(10) ** -150 else 0
    assert (x - y).sign() == expected
    assert (x < y) == (expected < 0)


@settings(max_examples=200, deadline=None)
@given(scalars, scalars, scalars)
def test_field_axioms(x, y, z):
    assert (x + y) * z == x * z + y * z
    assert x * y == y * x


def random_pcf(draw, lo=0, hi=1):
    n = draw(st.integers(1, 6))
    cuts = draw(st.lists(st.fractions(min_value=lo, max_value=hi, max_denominator=30), min_size=n - 1, max_size=n - 1, unique=True))
    edges = sorted({mpq(lo), mpq(hi)} | {mpq(c.numerator, c.denominator) for c in cuts})
    vals = [draw(scalars) for _ in range(len(edges) - 1)]
    return PiecewiseFn(edges, vals, K3_FIELD)


@st.composite
def pcfs(draw):
    return random_pcf(draw)


@st.composite
def positive_pcfs(draw):
    f = random_pcf(draw)
    vals = [v if v.sign() > 0 else (1 - v if v.sign() < 0 else K3_FIELD(1)) for v in f.values]
    return PiecewiseFn(f.edges, vals, K3_FIELD)


class TestPiecewise:
    def test_integrate_w0(self):
        assert w0_unit().integrate(0, 1) == 1

    def test_integrate_constant(self):
        c = mpq(7, 3)
        assert PiecewiseFn.constant(c).integrate(0, mpq(2, 5)) == c * mpq(2, 5)

    def test_integrate_sigma_w0(self):
        assert w0_unit().reciprocal().integrate() == mpq(9, 5)

    def test_range_outside_domain(self):
        with pytest.raises(ValueError):
            w0_unit().integrate(0, 2)

    def test_reciprocal_two_piece(self):
        assert w0_unit().reciprocal().values == (mpq(3, 5), 3)

    def test_zero_reciprocal(self):
        with pytest.raises(ZeroDivisionError):
            PiecewiseFn((0, 1), (0,)).reciprocal()

    def test_square_constant(self):
        assert PiecewiseFn.constant(2).square() == PiecewiseFn.constant(4)

    def test_multiply_merges_breakpoints(self):
        f = PiecewiseFn((0, mpq(1, 3), 1), (1, 2))
        g = PiecewiseFn((0, mpq(1, 2), 1), (3, 5))
        h = f.multiply(g)
        assert h.edges == (0, mpq(1, 3), mpq(1, 2), 1)
        assert h.values == (3, 6, 10)

    def test_multiply_domain_mismatch(self):
        with pytest.raises(ValueError):
            PiecewiseFn.constant(1).multiply(PiecewiseFn.constant(1, 0, 2))

    def test_w_tilde_sq_sigma_k2(self, cw2, k2_fix):
        val = cw2.w_tilde.square().multiply(cw2.sigma).integrate()
        assert val.sign() > 0
        assert val == mpq(k2_fix["w_tilde_sq_sigma"])

    def test_restrict_k2_last_third(self, cw2):
        r = cw2.w.restrict(mpq(2, 3), 1)
        got = [r(mpq(2, 3) + mpq(2 * i + 1, 18)) for i in range(3)]
        assert got == [mpq(5, 9), mpq(5, 9), mpq(2, 9)]

    def test_affine_constant(self):
        f = PiecewiseFn.constant(mpq(3, 2)).affine_to(mpq(1, 3), mpq(4, 9))
        assert f.values == (mpq(3, 2),) and f.domain == (mpq(1, 3), mpq(4, 9))

    def test_affine_two_piece(self):
        f = w0_unit().affine_to(mpq(1, 3), mpq(4, 9))
        assert f.breakpoints == (mpq(1, 3) + mpq(1, 9) / 2,)

    def test_empty_target(self):
        with pytest.raises(ValueError):
            w0_unit().restrict(mpq(1, 2), mpq(1, 2))
        with pytest.raises(ValueError):
            w0_unit().affine_to(1, 1)

    def test_merged_keeps_raw(self):
        f = PiecewiseFn((0, mpq(1, 3), mpq(1, 2), 1), (2, 2, 5))
        m = f.merged()
        assert m.edges == (0, mpq(1, 2), 1) and m.values == (2, 5)
        assert len(f) == 3 and m.integrate() == f.integrate()

    def test_json_round_trip(self, cw3):
        f = cw3.w
        g = PiecewiseFn.from_json(json.loads(json.dumps(f.to_json())))
        assert g == f

    def test_bad_breakpoints(self):
        with pytest.raises(ValueError):
            PiecewiseFn((0, mpq(1, 2), mpq(1, 2), 1), (1, 2, 3))


@settings(max_examples=200, deadline=None)
@given(pcfs(), pcfs(), st.fractions(0, 1, max_denominator=40))
def test_integration_additive(f, g, c):
    c = mpq(c.numerator, c.denominator)
    assert (f + g).integrate() == f.integrate() + g.integrate()
    assert f.integrate(0, c) + f.integrate(c, 1) == f.integrate()


@settings(max_examples=200, deadline=None)
@given(positive_pcfs())
def test_reciprocal_involution(f):
    assert f.reciprocal().reciprocal() == f


class TestPeriodic:
    def test_integral_five_periods(self, cw2):
        assert cw2.periodic.integrate(0, 5) == 5

    def test_wraps(self, cw2):
        assert cw2.periodic(1 + mpq(1, 18)) == cw2.periodic(mpq(1, 18))
        assert cw2.periodic(mpq(-1, 18)) == cw2.periodic(mpq(17, 18))

    def test_straddling_integral(self, cw2, k2_fix):
        val = cw2.periodic.integrate(mpq(-1, 9), mpq(1, 9))
        assert val == mpq(7, 81) == mpq(k2_fix["periodic_integral_m19_19"])

    def test_restrict_matches_integral(self, cw3):
        lo, hi = mpq(-5, 4), mpq(7, 3)
        assert cw3.periodic.restrict(lo, hi).integrate() == cw3.periodic.integrate(lo, hi)

    def test_base_domain(self):
        with pytest.raises(ValueError):
            PeriodicFn(PiecewiseFn.constant(1, 0, 2))
