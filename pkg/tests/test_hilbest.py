import math

from gmpy2 import mpq

from extremal_weight.norms.hilbest import MAX_RADIUS, _components, hilbest_report, sample_offsets
from extremal_weight.ops.hilbert import HilbertEvaluator


def test_offsets_inside_half():
    for n in (1, 3, 5, 8):
        offs = sample_offsets(n)
        assert len(offs) == n
        assert all(-mpq(1, 4) < o < mpq(1, 4) for o in offs)
    assert sample_offsets(5) == [0, mpq(-1, 8), mpq(1, 8), mpq(-3, 16), mpq(3, 16)]


def test_k2_root_components(cw2):
    ev = HilbertEvaluator(cw2.w)
    root = cw2.nodes[0]
    x = mpq(17, 18)
    A, shells, C, D, E = _components(ev, cw2, root, x)
    assert A.contains(0) and E.contains(0)
    assert D.contains(0) and D.rad() < 1e-40
    assert C > 0
    assert sum(shells) > mpq(23, 27).__float__()
    total = A + sum(shells) + C + D + E
    assert (total - ev.ball(x)).contains(0)


def test_k2_b_lower_on_half(cw2):
    ev = HilbertEvaluator(cw2.w)
    root = cw2.nodes[0]
    for o in sample_offsets(9):
        x = mpq(17, 18) + o * mpq(1, 9)
        _, shells, _, _, _ = _components(ev, cw2, root, x)
        assert sum(shells) > float(mpq(23, 27))


def _check(rep, k):
    assert rep.passes
    assert rep.max_radius <= MAX_RADIUS
    assert not rep.checkpoint_failures
    for lv in rep.levels:
        s = 2**lv.level
        assert all(lv.checks.values()), lv.checks
        assert lv.min_A >= 0 and lv.min_C > 0 and lv.min_B > 2 * (k - 1) * s / 3
        assert lv.max_abs_D <= 4 * math.log(3) * s
        assert lv.max_abs_E <= 13 * s


def test_k2_report(hilbest2):
    assert len(hilbest2.levels) == 3
    _check(hilbest2, 2)
    assert hilbest2.levels[0].max_abs_E == 0


def test_k3_report(hilbest3):
    assert len(hilbest3.levels) == 9
    _check(hilbest3, 3)
    for l, (v, bound, _) in hilbest3.checkpoints.items():
        assert v <= bound


def test_nu_zero(cw2):
    from extremal_weight import build_weight, derive_params

    rep = hilbest_report(build_weight(derive_params(2, nu=0)))
    assert rep.levels == [] and rep.passes


def test_lower_bound_consistent(hilbest2):
    for lv in hilbest2.levels:
        assert lv.certified_min_abs_H <= lv.min_abs_H
