"""Lower bounds for ``|H(w chi_[0,1))|`` on the concentric halves of tail intervals.

At a point ``x`` in the half of the tail of a block ``J = [a, b)`` with
exponent ``l`` the transform splits into five parts: the mass left of
``J`` (A), the shells ``J_m \\ J_{m+1}`` (B), the plateau just before the
tail (C), the tail itself (D) and the mass right of ``J`` (E).  Each part
is a sum over a contiguous range of pieces, so one pass of logarithms per
sample point serves all of them.  Comparisons are made on arb balls.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from flint import arb, ctx
from gmpy2 import mpq

from ..ops.hilbert import HilbertEvaluator
from ..weightlab import ConstructedWeight, Node

__all__ = ["LevelReport", "HilbestReport", "hilbest_report", "sample_offsets", "MAX_RADIUS"]

MAX_RADIUS = 1e-20
DEFAULT_MAX_INTERVALS = 200


def sample_offsets(samples: int) -> list[mpq]:
    """Offsets from the tail center, as fractions of the tail length.

    Five samples are the center, the quartiles of the concentric half and
    its outermost octiles; other counts spread points evenly inside the half.
    """
    if samples == 5:
        return [mpq(0), mpq(-1, 8), mpq(1, 8), mpq(-3, 16), mpq(3, 16)]
    if samples < 1:
        raise ValueError("need at least one sample per interval")
    return [mpq(-1, 4) + mpq(2 * i + 1, 4 * samples) for i in range(samples)]


def _max_gap(offsets) -> mpq:
    """Largest distance from a point of the half to the nearest sample, in tail lengths."""
    pts = sorted(offsets)
    gaps = [pts[0] + mpq(1, 4), mpq(1, 4) - pts[-1]]
    gaps += [(b - a) / 2 for a, b in zip(pts, pts[1:])]
    return max(gaps)


@dataclass
class LevelReport:
    level: int
    tails_total: int
    tails_sampled: int
    samples: int = 0
    min_A: float = math.inf
    min_B: float = math.inf
    min_B_term: float = math.inf
    min_C: float = math.inf
    max_abs_D: float = 0.0
    max_abs_E: float = 0.0
    min_abs_H: float = math.inf
    certified_min_abs_H: float = math.inf
    lower_bound_sampled: float = 0.0
    half_measure: mpq = mpq(0)
    sigma_tail: float = 0.0
    checks: dict = field(default_factory=dict)
    witnesses: list = field(default_factory=list)

    @property
    def scale(self) -> int:
        return 2**self.level

    def bounds(self, k: int) -> dict:
        s = self.scale
        return {
            "B": 2 * (k - 1) * s / 3,
            "D": 4 * math.log(3) * s,
            "E": 13 * s,
        }

    def to_json(self, k: int) -> dict:
        b = self.bounds(k)
        return {
            "level": self.level,
            "tails_total": self.tails_total,
            "tails_sampled": self.tails_sampled,
            "samples": self.samples,
            "min_A": self.min_A,
            "min_B": self.min_B,
            "B_bound": b["B"],
            "min_B_shell": self.min_B_term,
            "min_C": self.min_C,
            "max_abs_D": self.max_abs_D,
            "D_bound": b["D"],
            "max_abs_E": self.max_abs_E,
            "E_bound": b["E"],
            "min_abs_H": self.min_abs_H,
            "min_abs_H_over_2l": self.min_abs_H / self.scale,
            "certified_min_abs_H": self.certified_min_abs_H,
            "lower_bound_sampled": self.lower_bound_sampled,
            "half_measure": str(self.half_measure),
            "checks": self.checks,
            "witnesses": self.witnesses[:5],
        }


@dataclass
class HilbestReport:
    k: int
    nu: int
    levels: list
    checkpoints: dict  # parent level -> (max value, bound, count)
    checkpoint_failures: list
    max_radius: float
    lower_bound_total: float

    @property
    def passes(self) -> bool:
        ok = all(all(lv.checks.values()) for lv in self.levels)
        return ok and not self.checkpoint_failures and self.max_radius <= MAX_RADIUS

    def to_json(self) -> dict:
        return {
            "levels": [lv.to_json(self.k) for lv in self.levels],
            "checkpoints": {
                str(l): {"max": v, "bound": b, "count": c}
                for l, (v, b, c) in sorted(self.checkpoints.items())
            },
            "checkpoint_failures": self.checkpoint_failures[:5],
            "max_radius": self.max_radius,
            "lower_bound_total": self.lower_bound_total,
            "passes": self.passes,
        }


def _components(ev: HilbertEvaluator, cw: ConstructedWeight, node: Node, x):
    """Balls ``(A, [B_m], C, D, E)`` at ``x`` for the block ``node``."""
    nodes = cw.nodes
    N = len(cw.w)
    A = ev.range_ball(x, 0, node.first_piece)
    shells = []
    for ci in node.children:
        ch = nodes[ci]
        shells.append(ev.range_ball(x, ch.first_piece - 1, ch.last_piece))
    last = node.last_piece
    C = ev.range_ball(x, last - 2, last - 1)
    D = ev.range_ball(x, last - 1, last)
    E = ev.range_ball(x, last, N)
    return A, shells, C, D, E


class _SlopeBound:
    """Upper bound for ``|d/dx H(w chi_[0,1))|`` on a subinterval of one piece.

    A piece ``[a, b)`` not containing ``x`` contributes
    ``-v (b - a) / ((x - a)(x - b))``; all such terms share one sign, so
    their absolute values add without cancellation.
    """

    def __init__(self, cw: ConstructedWeight):
        e = cw.w.edges
        self.a = np.array([float(x) for x in e[:-1]])
        self.b = np.array([float(x) for x in e[1:]])
        self.mass = np.array([float(v) * float(y - x) for x, y, v in cw.w.pieces()])
        self.vals = np.array([float(v) for v in cw.w.values])

    def __call__(self, q: int, lo: mpq, hi: mpq) -> float:
        lf, hf = float(lo), float(hi)
        a, b = self.a, self.b
        left = b <= lf
        prod = np.where(left, (lf - a) * (lf - b), (a - hf) * (b - hf))
        prod[q] = np.inf
        others = float(np.sum(self.mass / prod))
        own = self.vals[q] * (1 / (lf - a[q]) + 1 / (b[q] - hf))
        return max(others, own) * (1 + 1e-9)


def _checkpoints(ev: HilbertEvaluator, cw: ConstructedWeight):
    """``|H(w chi_[b_N, b_P))(b_N - |N| / (4 3^k))| <= 13 * 2**level(P)`` for every non-root node."""
    k = cw.params.k
    table: dict = {}
    failures = []
    radius = 0.0
    for nd in cw.nodes:
        if nd.parent is None:
            continue
        par = cw.nodes[nd.parent]
        x = nd.hi - nd.length / (4 * 3**k)
        ball = ev.range_direct(x, nd.last_piece, par.last_piece)
        radius = max(radius, float(ball.rad()))
        bound = 13 * 2**par.level
        with ctx.workprec(ev.bits):
            ok = bool(abs(ball) <= arb(bound))
        val = float(abs(ball).mid())
        m, b, c = table.get(par.level, (0.0, bound, 0))
        table[par.level] = (max(m, val), b, c + 1)
        if not ok:
            failures.append({"node": [str(nd.lo), str(nd.hi)], "x": str(x), "value": val, "bound": bound})
    return table, failures, radius


def hilbest_report(
    cw: ConstructedWeight,
    samples_per_interval: int = 5,
    max_intervals: int = DEFAULT_MAX_INTERVALS,
    digits: int = 50,
    evaluator: HilbertEvaluator | None = None,
) -> HilbestReport:
    params = cw.params
    k = params.k
    if params.nu < 1:
        return HilbestReport(k, params.nu, [], {}, [], 0.0, 0.0)
    ev = evaluator or HilbertEvaluator(cw.w, digits)
    offsets = sample_offsets(samples_per_interval)
    gap = _max_gap(offsets)
    slope_bound = _SlopeBound(cw)
    radius = 0.0
    levels = []
    total_lb = 0.0
    for level in range(params.nu):
        blocks = sorted((nd for nd in cw.nodes if nd.level == level and nd.depth >= 1), key=lambda n: n.lo)
        rep = LevelReport(level, len(blocks), min(len(blocks), max_intervals))
        s = 2**level
        B_bound = arb(2 * (k - 1) * s) / 3
        D_bound = 4 * arb(3).log() * s
        E_bound = arb(13 * s)
        ok = {"A_nonneg": True, "A_pos": True, "B_pos": True, "C_pos": True,
              "B_lower": True, "D_upper": True, "E_upper": True}
        for nd in blocks[:max_intervals]:
            t_lo, t_hi = nd.tail(k)
            tl = t_hi - t_lo
            center = (t_lo + t_hi) / 2
            h_lo, h_hi = t_lo + tl / 4, t_hi - tl / 4
            rep.half_measure += h_hi - h_lo
            sig = params.tail_value(level).reciprocal()
            rep.sigma_tail = float(sig)
            interval_min = math.inf
            for off in offsets:
                x = center + off * tl
                A, shells, C, D, E = _components(ev, cw, nd, x)
                H = ev.ball(x)
                with ctx.workprec(ev.bits):
                    B = sum(shells, arb(0))
                    checks = {
                        "A_nonneg": bool(A >= 0),
                        "A_pos": bool(A > 0) if nd.first_piece > 0 else True,
                        "B_pos": bool(B > 0),
                        "C_pos": bool(C > 0),
                        "B_lower": bool(B > B_bound),
                        "D_upper": bool(abs(D) <= D_bound),
                        "E_upper": bool(abs(E) <= E_bound),
                    }
                for name, good in checks.items():
                    if not good:
                        ok[name] = False
                        rep.witnesses.append({"check": name, "x": str(x), "block": [str(nd.lo), str(nd.hi)]})
                for ball in (A, C, D, E, H, *shells):
                    radius = max(radius, float(ball.rad()))
                rep.samples += 1
                rep.min_A = min(rep.min_A, float(A.mid()))
                rep.min_B = min(rep.min_B, float(B.mid()))
                rep.min_B_term = min(rep.min_B_term, min(float(b.mid()) for b in shells) / s)
                rep.min_C = min(rep.min_C, float(C.mid()))
                rep.max_abs_D = max(rep.max_abs_D, float(abs(D).mid()))
                rep.max_abs_E = max(rep.max_abs_E, float(abs(E).mid()))
                absH = float(abs(H).lower())
                rep.min_abs_H = min(rep.min_abs_H, float(abs(H).mid()))
                interval_min = min(interval_min, absH)
            slope = slope_bound(nd.last_piece - 1, h_lo, h_hi)
            cert = max(0.0, interval_min - slope * float(gap * tl))
            rep.certified_min_abs_H = min(rep.certified_min_abs_H, cert)
            rep.lower_bound_sampled += cert * cert * float(sig) * float(h_hi - h_lo)
        ok["half_measure"] = (
            rep.tails_sampled < rep.tails_total
            or rep.half_measure == sum((r.hi - r.lo for r in cw.tails if r.level == level), mpq(0)) / 2
        )
        rep.checks = ok
        total_lb += rep.lower_bound_sampled
        levels.append(rep)
    table, failures, crad = _checkpoints(ev, cw)
    return HilbestReport(k, params.nu, levels, table, failures, max(radius, crad), total_lb)
