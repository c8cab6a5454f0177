import pytest
from gmpy2 import mpq

from extremal_weight.weightlab import (
    PLATEAU,
    TAIL,
    W0_LEFT,
    W0_RIGHT,
    ConstructedWeight,
    build_w_nu,
    build_weight,
    derive_params,
    expected_tail_measure,
    piece_count,
    running_average_sups,
    tail_sets,
)


class TestParams:
    def test_k2(self):
        pr = derive_params(2)
        assert (pr.eps, pr.p, pr.D, pr.n, pr.nu) == (mpq(1, 9), mpq(9, 5), mpq(36, 25), 3, 3)

    def test_k3(self):
        pr = derive_params(3)
        assert (pr.eps, pr.p, pr.D, pr.n, pr.nu) == (mpq(1, 27), mpq(33, 7), mpq(858, 49), 9, 9)

    def test_from_t(self):
        pr = derive_params(t=10)
        assert pr.k == 3 and pr.t <= 3**pr.k <= 3 * pr.t

    @pytest.mark.parametrize("t", [1, 2, 3, 4, 9, 10, 26, 27, 28, 100, 1000])
    def test_t_bracket(self, t):
        pr = derive_params(t=t)
        assert pr.k >= 2
        if t >= 3:
            assert t <= 3**pr.k <= 3 * t

    @pytest.mark.parametrize("k", range(2, 9))
    def test_p_bounds(self, k):
        pr = derive_params(k, nu=0)
        assert 1 / (6 * pr.eps) <= pr.p <= 2 / pr.eps

    def test_rejects_small_k(self):
        with pytest.raises(ValueError, match="k must be >= 2"):
            derive_params(1)

    def test_rejects_nothing(self):
        with pytest.raises(ValueError):
            derive_params()


class TestBuild:
    def test_k2_depth_one(self):
        pr = derive_params(2, nu=1)
        f, tags, tails, _ = build_w_nu(0, 0, 1, 1, pr)
        assert f.edges == (0, mpq(1, 3), mpq(1, 2), mpq(2, 3), mpq(8, 9), 1)
        assert f.values == (mpq(5, 9), mpq(10, 3), mpq(2, 3), mpq(5, 9), mpq(2, 9))
        assert [t.kind for t in tags] == [PLATEAU, W0_LEFT, W0_RIGHT, PLATEAU, TAIL]
        assert [(t.lo, t.hi) for t in tails] == [(mpq(8, 9), 1)]

    @pytest.mark.parametrize("k,nu,count", [(2, 3, 11), (3, 9, 3068), (2, 0, 2), (4, 2, 38)])
    def test_piece_count(self, k, nu, count):
        assert piece_count(k, nu) == count
        if k <= 3:
            assert len(build_weight(derive_params(k, nu=nu)).w) == count

    def test_k2_masses(self, cw2):
        assert len(cw2.w) == 11
        assert cw2.w.integrate() == 1
        assert cw2.sigma.integrate() == mpq(9, 5)

    def test_k3_masses(self, cw3):
        assert len(cw3.w) == 3068
        assert cw3.w.integrate() == 1
        assert cw3.sigma.integrate() == mpq(33, 7)

    def test_k2_matches_oracle(self, cw2, k2_fix):
        assert [str(e) for e in cw2.w.edges] == k2_fix["edges"]
        assert [str(v) for v in cw2.w.values] == k2_fix["values"]
        assert [t.level for t in cw2.tags] == k2_fix["levels"]
        assert [t.kind for t in cw2.tags] == k2_fix["kinds"]

    @pytest.mark.parametrize("k", [2, 3])
    def test_av_every_depth(self, k):
        pr0 = derive_params(k)
        for nu in range(pr0.n + 1):
            pr = derive_params(k, nu=nu)
            f, _, _, nodes = build_w_nu(0, 0, 1, nu, pr)
            s = f.reciprocal()
            for nd in nodes:
                scale = mpq(2) ** nd.level
                assert f.mass(nd.lo, nd.hi) / nd.length == scale
                assert s.mass(nd.lo, nd.hi) / nd.length == pr.p / scale

    def test_w_tilde_k2(self, cw2):
        wt = cw2.w_tilde
        assert wt(mpq(1, 6)) == 2
        assert wt(mpq(44, 81) + mpq(1, 1000)) == 8
        for (a, _, v), tag in zip(wt.pieces(), cw2.tags):
            if tag.kind in (W0_LEFT, W0_RIGHT):
                assert v == 16

    @pytest.mark.parametrize("name", ["cw2", "cw3"])
    def test_w_bounded(self, name, request):
        cw = request.getfixturevalue(name)
        cap = 2 ** (cw.params.nu + 1)
        assert all(v <= cap for v in cw.w.values)

    @pytest.mark.parametrize("name", ["cw2", "cw3"])
    def test_w_tilde_plateau(self, name, request):
        cw = request.getfixturevalue(name)
        p = cw.params.p
        for v, wt, tag in zip(cw.w.values, cw.w_tilde.values, cw.tags):
            assert wt >= 2
            if tag.kind == PLATEAU:
                assert wt == 2 * p * v

    def test_json_round_trip(self, cw2):
        back = ConstructedWeight.from_json(cw2.to_json())
        assert back.w == cw2.w and back.tags == cw2.tags and back.tails == cw2.tails
        assert back.sigma == cw2.sigma and len(back.nodes) == len(cw2.nodes)

    def test_schema_checked(self, cw2):
        obj = cw2.to_json()
        obj["schema"] = "other"
        with pytest.raises(ValueError):
            ConstructedWeight.from_json(obj)


class TestTails:
    def test_k2_measures(self, cw2):
        ts = tail_sets(cw2)
        assert [ts[l].measure for l in range(3)] == [mpq(1, 9), mpq(1, 27), mpq(1, 81)]

    def test_k2_level0(self, cw2):
        ts = tail_sets(cw2)[0]
        assert ts.intervals == ((mpq(8, 9), 1),)
        assert ts.halves == ((mpq(33, 36), mpq(35, 36)),)

    @pytest.mark.parametrize("name", ["cw2", "cw3"])
    def test_half_measure(self, name, request):
        cw = request.getfixturevalue(name)
        for level, ts in tail_sets(cw).items():
            want = expected_tail_measure(cw.params, level)
            assert ts.measure == want
            assert ts.half_measure == want / 2

    def test_level_out_of_range(self, cw2):
        with pytest.raises(ValueError):
            expected_tail_measure(cw2.params, 3)

    @pytest.mark.parametrize("name", ["cw2", "cw3"])
    def test_relative_bookkeeping(self, name, request):
        cw = request.getfixturevalue(name)
        k = cw.params.k
        ratio = mpq(1, 2) * (1 - mpq(1, 3 ** (k - 1)))
        for nd in cw.nodes[:40]:
            for j in range(cw.params.nu - nd.level):
                got = sum(
                    (r.hi - r.lo for r in cw.tails if r.level == nd.level + j and nd.lo <= r.lo and r.hi <= nd.hi),
                    mpq(0),
                )
                assert got == ratio**j * cw.params.eps * nd.length


class TestAvest:
    def test_k2_root_fixture(self, cw2, k2_fix):
        ps, _, ss, _ = running_average_sups(cw2.w)
        assert ps == mpq(k2_fix["root_prefix_sup"])
        assert ss == mpq(k2_fix["root_suffix_sup"])
        assert ps >= 1

    def test_constant(self):
        from extremal_weight.exactfun import PiecewiseFn

        ps, _, ss, _ = running_average_sups(PiecewiseFn.constant(mpq(7, 4)))
        assert ps == ss == mpq(7, 4)

    @pytest.mark.parametrize("name", ["cw2", "cw3"])
    def test_every_node(self, name, request):
        cw = request.getfixturevalue(name)
        for nd in cw.nodes:
            scale = mpq(2) ** nd.level
            ps, _, ss, _ = running_average_sups(cw.node_fn(nd))
            assert ps <= 3 * scale and ss <= mpq(9, 2) * scale
