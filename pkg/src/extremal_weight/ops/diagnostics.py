"""A1 and lattice-restricted A2 diagnostics of a periodic weight."""

from __future__ import annotations

from dataclasses import dataclass

from gmpy2 import mpq

from ..exactfun import PeriodicFn, QuadScalar
from ..lattice import JPair, TriadicInterval, periodic_positions_splitting
from .maximal import maximal_periodic

__all__ = ["DiagnosticsReport", "a1_a2_diagnostics", "default_scale_floor", "fine_scale_ratio_cap"]


def default_scale_floor(min_spacing) -> int:
    """Smallest ``m`` such that JPairs one scale finer hold at most one breakpoint."""
    s = mpq(min_spacing)
    m = 0
    while 2 / mpq(3) ** (m + 1) > s:
        m += 1
    return max(m, 1)


def fine_scale_ratio_cap(w: PeriodicFn) -> QuadScalar:
    """Largest squared ratio of adjacent values, wrap-around included."""
    m = w.base.merged()
    vals = list(m.values)
    if len(vals) == 1:
        return vals[0] / vals[0]
    pairs = list(zip(vals, vals[1:]))
    if vals[0] != vals[-1]:
        pairs.append((vals[-1], vals[0]))
    best = None
    for u, v in pairs:
        r = u / v if u > v else v / u
        r = r * r
        if best is None or r > best:
            best = r
    return best


@dataclass(frozen=True)
class DiagnosticsReport:
    a1_lower: QuadScalar
    a1_upper: QuadScalar
    a1_argmax_piece: int
    a2_triadic: QuadScalar
    a2_argmax: object
    a2_coarse: QuadScalar
    scale_floor: int
    fine_scale_cap: QuadScalar

    def to_json(self) -> dict:
        return {
            "a1": {"lower": str(self.a1_lower), "upper": str(self.a1_upper),
                   "lower_float": float(self.a1_lower), "upper_float": float(self.a1_upper)},
            "a2_triadic": str(self.a2_triadic),
            "a2_triadic_float": float(self.a2_triadic),
            "a2_argmax": str(self.a2_argmax),
            "a2_coarse": str(self.a2_coarse),
            "scale_floor": self.scale_floor,
            "fine_scale_cap": float(self.fine_scale_cap),
            "note": "a2_triadic is restricted to triadic intervals and JPairs down to scale_floor",
        }


def a1_a2_diagnostics(w: PeriodicFn, window: int = 3, scale_floor: int | None = None) -> DiagnosticsReport:
    base = w.base
    maj = maximal_periodic(w, window)
    lo_best = hi_best = None
    arg = 0
    for q, v in enumerate(base.values):
        up = maj.upper[q] / v
        lo = maj.lower[q] / v
        if hi_best is None or up > hi_best:
            hi_best, arg = up, q
        if lo_best is None or lo > lo_best:
            lo_best = lo

    sigma = PeriodicFn(base.reciprocal())
    # whole periods: every lattice cell of length >= 1 is a union of periods
    coarse = w.period_integral() * sigma.period_integral()
    best, best_at = coarse, "length >= 1"
    if scale_floor is None:
        scale_floor = default_scale_floor(min(base.merged().lengths()))
    pts = w.jump_points()
    for m in range(1, scale_floor + 1):
        for pairs in (False, True):
            for n in periodic_positions_splitting(pts, m, pairs):
                cell = JPair(-m, n) if pairs else TriadicInterval(-m, n)
                a, b = cell.lo, cell.hi
                r = w.integrate(a, b) * sigma.integrate(a, b) / ((b - a) * (b - a))
                if r > best:
                    best, best_at = r, cell
    return DiagnosticsReport(
        a1_lower=lo_best,
        a1_upper=hi_best,
        a1_argmax_piece=arg,
        a2_triadic=best,
        a2_argmax=best_at,
        a2_coarse=coarse,
        scale_floor=scale_floor,
        fine_scale_cap=fine_scale_ratio_cap(w),
    )
