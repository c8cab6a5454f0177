"""Freeze k=2 fixtures with exact Fraction arithmetic and exhaustive searches.

Run from the repository root: ``python3 tests/oracles/freeze_k2.py``.
"""

from __future__ import annotations

import json
import sys
from fractions import Fraction as F
from pathlib import Path

import mpmath

sys.path.insert(0, str(Path(__file__).parent))
from oracle_lib import brute_piece_sup, construct, periodic_restrict, testing_value  # noqa: E402

OUT = Path(__file__).parents[1] / "fixtures" / "k2.json"


def main():
    edges, vals, levels, kinds = construct(2, 3)
    fix = {"pieces": len(vals), "edges": [str(e) for e in edges], "values": [v.exact() for v in vals]}
    fix["levels"] = levels
    fix["kinds"] = kinds

    # w_tilde^2 sigma integral, piece by piece
    wt = [F(2 ** (l + 1)) if k != "w0_left" and k != "w0_right" else F(2 ** 4) for l, k in zip(levels, kinds)]
    total = F(0)
    for i, v in enumerate(vals):
        total += wt[i] ** 2 * (edges[i + 1] - edges[i]) / v.a
    fix["w_tilde_sq_sigma"] = str(total)

    # maximal sup on the level-0 tail [8/9, 1) of w restricted to [0, 1)
    sups = brute_piece_sup(edges, vals)
    fix["piece_sups"] = [str(s.a) for s in sups]

    # prefix and suffix running-average sups at the root
    run = F(0)
    pbest = vals[0].a
    for i, v in enumerate(vals):
        run += v.a * (edges[i + 1] - edges[i])
        pbest = max(pbest, run / edges[i + 1])
    run = F(0)
    sbest = vals[-1].a
    for i in range(len(vals) - 1, -1, -1):
        run += vals[i].a * (edges[i + 1] - edges[i])
        sbest = max(sbest, run / (1 - edges[i]))
    fix["root_prefix_sup"] = str(pbest)
    fix["root_suffix_sup"] = str(sbest)

    # testing values: every JPair at scales 1..4 over one period, no pruning
    per_scale = {}
    best = None
    for m in range(1, 5):
        N = 3**m
        smax = None
        for n in range(N):
            lo, hi = F(n, N), F(n + 2, N)
            val = testing_value(edges, vals, lo, hi).a
            if smax is None or val > smax[0]:
                smax = (val, str(lo), str(hi))
        per_scale[str(m)] = {"max": str(smax[0]), "lo": smax[1], "hi": smax[2]}
        if best is None or smax[0] > best[0]:
            best = smax
    coarse = {}
    for L in (2, 6, 18):
        val = testing_value(edges, vals, F(0), F(L)).a
        coarse[str(L)] = str(val)
        if val > best[0]:
            best = (val, "0", str(L))
    fix["testing_per_scale"] = per_scale
    fix["testing_coarse"] = coarse
    fix["testing_measured_sup"] = {"value": str(best[0]), "lo": best[1], "hi": best[2]}

    # H(w chi_[0,1))(17/18) by 100-digit summation of the closed-form terms
    mpmath.mp.dps = 100
    x = mpmath.mpf(17) / 18
    h = mpmath.mpf(0)
    for i, v in enumerate(vals):
        a = mpmath.mpf(edges[i].numerator) / edges[i].denominator
        b = mpmath.mpf(edges[i + 1].numerator) / edges[i + 1].denominator
        c = mpmath.mpf(v.a.numerator) / v.a.denominator
        h += c * (mpmath.log(abs(x - a)) - mpmath.log(abs(x - b)))
    fix["hilbert_17_18"] = mpmath.nstr(h, 40)

    # periodic integral over [-1/9, 1/9)
    e, v = periodic_restrict(edges, vals, F(-1, 9), F(1, 9))
    fix["periodic_integral_m19_19"] = str(sum((v[i].a * (e[i + 1] - e[i]) for i in range(len(v))), F(0)))

    OUT.write_text(json.dumps(fix, indent=2) + "\n")
    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
