from gmpy2 import mpq

from extremal_weight.exactfun import PeriodicFn, PiecewiseFn
from extremal_weight.ops.diagnostics import a1_a2_diagnostics, default_scale_floor, fine_scale_ratio_cap


def test_constant_weight():
    rep = a1_a2_diagnostics(PeriodicFn(PiecewiseFn.constant(3)))
    assert rep.a1_lower == rep.a1_upper == 1
    assert rep.a2_triadic == 1


def test_k2_a1_from_tail(cw2):
    rep = a1_a2_diagnostics(cw2.periodic)
    assert rep.a1_upper >= mpq(27, 4)
    assert rep.a1_lower <= rep.a1_upper
    assert rep.a2_triadic >= rep.a2_coarse == mpq(9, 5)


def test_k2_a2_exhaustive(cw2):
    rep = a1_a2_diagnostics(cw2.periodic, scale_floor=6)
    w = cw2.periodic
    s = PeriodicFn(cw2.sigma)
    best = mpq(9, 5)
    for m in range(1, 7):
        N = 3**m
        for n in range(N):
            for L in (1, 2):
                a, b = mpq(n, N), mpq(n + L, N)
                best = max(best, w.integrate(a, b) * s.integrate(a, b) / (b - a) ** 2)
    assert rep.a2_triadic == best


def test_json(cw2):
    js = a1_a2_diagnostics(cw2.periodic).to_json()
    assert "a2_triadic" in js and js["a1"]["upper_float"] >= 27 / 4


def test_scale_floor_and_cap():
    assert default_scale_floor(mpq(1, 81)) >= 4
    f = PeriodicFn(PiecewiseFn((0, mpq(1, 2), 1), (1, 4)))
    assert fine_scale_ratio_cap(f) == 16
