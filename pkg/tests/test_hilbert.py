import math

import mpmath
import numpy as np
import pytest
from gmpy2 import mpq

from extremal_weight.exactfun import PiecewiseFn
from extremal_weight.ops.hilbert import HilbertEvaluator, hilbert_at, hilbert_float, hilbert_symbolic


def test_unit_box_at_two():
    h = hilbert_at(hilbert_symbolic(PiecewiseFn.constant(1)), 2)
    assert abs(h.value - math.log(2)) <= h.error + 1e-15
    assert h.error < 1e-40


def test_symmetric_box_center():
    h = hilbert_symbolic(PiecewiseFn.constant(1, -1, 1)).evaluate(0)
    assert h.ball.contains(0)


def test_k2_fixture(cw2, k2_fix):
    h = hilbert_at(hilbert_symbolic(cw2.w), mpq(17, 18), digits=50)
    ref = mpmath.mpf(k2_fix["hilbert_17_18"])
    assert h.value > 0
    assert abs(mpmath.mpf(h.ball.mid().str(40, radius=False)) - ref) < mpmath.mpf(10) ** -35


def test_terms_follow_pieces(cw3):
    terms = hilbert_symbolic(cw3.w)
    assert len(terms) == len(cw3.w) and terms.edges == cw3.w.edges


def test_breakpoint_undefined(cw2):
    with pytest.raises(ValueError, match="undefined"):
        hilbert_at(hilbert_symbolic(cw2.w), mpq(1, 3))
    with pytest.raises(ValueError):
        HilbertEvaluator(cw2.w).at(mpq(8, 9))


def test_antisymmetry(cw2):
    f = cw2.w
    reflected = PiecewiseFn(tuple(-e for e in reversed(f.edges)), tuple(reversed(f.values)))
    ev, er = HilbertEvaluator(f), HilbertEvaluator(reflected)
    for x in (mpq(1, 10), mpq(5, 7), mpq(17, 18), mpq(3, 2), mpq(-2, 5)):
        s = ev.ball(x) + er.ball(-x)
        assert s.contains(0)


def test_sign_change_at_center():
    f = PiecewiseFn.constant(1, mpq(1, 3), mpq(4, 5))
    c = (f.lo + f.hi) / 2
    terms = hilbert_symbolic(f)
    for d in (mpq(1, 10**6), mpq(1, 100), mpq(1, 10), 3):
        assert terms.evaluate(c - d).value < 0 < terms.evaluate(c + d).value
    assert terms.evaluate(c).ball.contains(0)


def test_float_matches_ball(cw3):
    ev = HilbertEvaluator(cw3.w)
    e, v = cw3.w.float_arrays()
    xs = [mpq(2 * i + 1, 2 * 98) for i in range(98)]
    fast = hilbert_float(e, v, np.array([float(x) for x in xs]))
    for x, y in zip(xs, fast):
        assert abs(ev.at(x).value - y) < 1e-9 * max(1.0, abs(y))


def test_range_ball_matches_direct(cw2):
    ev = HilbertEvaluator(cw2.w)
    x = mpq(17, 18)
    a, b = ev.range_ball(x, 2, 7), ev.range_direct(x, 2, 7)
    assert (a - b).contains(0)
