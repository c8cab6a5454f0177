"""Freeze the k=2 Rubio de Francia grid report with plain loops.

Run from the repository root: ``python3 tests/oracles/freeze_rubio.py``.
"""

from __future__ import annotations

import json
import math
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))
from oracle_lib import construct  # noqa: E402

OUT = Path(__file__).parents[1] / "fixtures" / "rubio_k2.json"
SIZE, K, M_BOUND = 54, 3, 144.0


def sample(edges, vals, x):
    for i in range(len(vals)):
        if edges[i] <= x < edges[i + 1]:
            return float(vals[i])
    raise ValueError(x)


def grid_max(g):
    """Max average over windows of the three-period extension containing each middle cell."""
    n = len(g)
    ext = g * 3
    out = []
    for i in range(n, 2 * n):
        best = -math.inf
        for s in range(0, i + 1):
            total = sum(ext[s:i])
            for e in range(i, 3 * n):
                total += ext[e]
                best = max(best, total / (e - s + 1))
        out.append(best)
    return out


def main():
    edges, vals, _, _ = construct(2, 3)
    xs = [(i + 0.5) / SIZE for i in range(SIZE)]
    sig = [1 / sample(edges, vals, x) for x in xs]
    bump = [1.0 if 1 / 3 <= x < 2 / 3 else 0.0 for x in xs]
    norm = math.sqrt(sum(b * b * s for b, s in zip(bump, sig)) / SIZE)
    g = [b / norm for b in bump]
    term, rg = g[:], g[:]
    for _ in range(K):
        term = [t / (2 * M_BOUND) for t in grid_max(term)]
        rg = [a + b for a, b in zip(rg, term)]
    tail = grid_max(term)
    mrg = grid_max(rg)
    ratio = max(m / r for m, r in zip(mrg, rg) if r > 0)
    slack = max(t / r for t, r in zip(tail, rg) if r > 0)
    fix = {
        "size": SIZE,
        "K": K,
        "m_bound": M_BOUND,
        "norm_g": math.sqrt(sum(x * x * s for x, s in zip(g, sig)) / SIZE),
        "norm_rg": math.sqrt(sum(x * x * s for x, s in zip(rg, sig)) / SIZE),
        "max_ratio": ratio,
        "truncation_slack": slack,
    }
    OUT.write_text(json.dumps(fix, indent=2) + "\n")
    print(fix)


if __name__ == "__main__":
    main()
