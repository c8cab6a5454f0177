"""Exact Hardy-Littlewood maximal function of non-negative step functions.

For ``f >= 0`` supported on its domain, the supremum of ``Mf`` over a piece
``[c, d)`` is the largest of the piece value, the best average of an
interval ending at ``c`` and the best average of an interval starting at
``d``: any interval containing the piece averages a convex combination of
those three.  Averages ending at a fixed point are maximized at a vertex of
the lower convex hull of the cumulative integral, so one monotone-chain
sweep per direction suffices.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass

from gmpy2 import mpq

from ..exactfun import PeriodicFn, PiecewiseFn, QuadScalar
from ..lattice import STANDARD, TriadicLattice

__all__ = [
    "MaximalMajorant",
    "PeriodicMajorant",
    "maximal_majorant",
    "maximal_periodic",
    "maximal_at",
    "triadic_maximal",
    "lattice_maximal_at",
    "finest_grid_scale",
]


def _sign(a, b, D) -> int:
    if not b:
        return (a > 0) - (a < 0)
    sb = 1 if b > 0 else -1
    if not a:
        return sb
    sa = 1 if a > 0 else -1
    if sa == sb:
        return sa
    lhs, rhs = a * a, b * b * D
    if lhs > rhs:
        return sa
    if lhs < rhs:
        return sb
    return 0


def _best_ending(xs, fa, fb, D):
    """For each ``e >= 1`` the index ``i < e`` maximizing the slope from ``i`` to ``e``.

    ``xs`` strictly increasing rationals, ``fa + fb*sqrt(D)`` the cumulative
    values.  Returns a list with ``None`` at index 0.
    """
    n = len(xs)
    best = [None] * n
    hull: list = [0]
    for e in range(1, n):
        xe, ae, be = xs[e], fa[e], fb[e]
        lo, hi = 0, len(hull) - 1
        while lo < hi:
            mid = (lo + hi) // 2
            A, B = hull[mid], hull[mid + 1]
            # slope(B, e) >= slope(A, e)
            dxa, dxb = xe - xs[A], xe - xs[B]
            s = _sign(
                (ae - fa[B]) * dxa - (ae - fa[A]) * dxb,
                (be - fb[B]) * dxa - (be - fb[A]) * dxb,
                D,
            )
            if s >= 0:
                lo = mid + 1
            else:
                hi = mid
        best[e] = hull[lo]
        while len(hull) >= 2:
            O, A = hull[-2], hull[-1]
            dxa, dxe = xs[A] - xs[O], xe - xs[O]
            s = _sign(
                dxa * (ae - fa[O]) - (fa[A] - fa[O]) * dxe,
                dxa * (be - fb[O]) - (fb[A] - fb[O]) * dxe,
                D,
            )
            if s <= 0:
                hull.pop()
            else:
                break
        hull.append(e)
    return best


@dataclass(frozen=True)
class MaximalMajorant:
    """Per-piece bounds on ``Mf``.

    ``upper[q]`` is the exact supremum of ``Mf`` over piece ``q``;
    ``lower[q]`` is a value that ``Mf`` exceeds everywhere on the piece
    (attained by intervals covering the whole piece); ``witness[q]`` is an
    interval whose average equals ``upper[q]``.
    """

    f: PiecewiseFn
    upper: tuple
    lower: tuple
    witness: tuple

    def upper_fn(self) -> PiecewiseFn:
        return PiecewiseFn._raw(self.f.edges, self.upper, self.f.field)

    def lower_fn(self) -> PiecewiseFn:
        return PiecewiseFn._raw(self.f.edges, self.lower, self.f.field)

    def __len__(self):
        return len(self.upper)


def maximal_majorant(f: PiecewiseFn) -> MaximalMajorant:
    """Exact per-piece supremum of the maximal function of ``f`` (zero outside its domain)."""
    for v in f.values:
        if v.sign() < 0:
            raise ValueError("maximal majorant needs a non-negative function")
    xs = f.edges
    P = f.prefix
    D = f.field.D
    fa = [c.a for c in P]
    fb = [c.b for c in P]
    n = len(xs)
    left = _best_ending(xs, fa, fb, D)
    rx = [-x for x in reversed(xs)]
    ra = [-a for a in reversed(fa)]
    rb = [-b for b in reversed(fb)]
    rbest = _best_ending(rx, ra, rb, D)
    right = [None] * n
    for e in range(1, n):
        # reflected index e is original index n-1-e; partner likewise
        right[n - 1 - e] = n - 1 - rbest[e]

    def avg(i, j):
        return (P[j] - P[i]) / (xs[j] - xs[i])

    upper, lower, witness = [], [], []
    for q, v in enumerate(f.values):
        best, wit = v, (xs[q], xs[q + 1])
        if q >= 1:
            i = left[q]
            cand = avg(i, q)
            if cand > best:
                best, wit = cand, (xs[i], xs[q])
        if q + 1 <= n - 2:
            j = right[q + 1]
            cand = avg(q + 1, j)
            if cand > best:
                best, wit = cand, (xs[q + 1], xs[j])
        low = v
        for cand in (avg(left[q + 1], q + 1), avg(q, right[q])):
            if cand > low:
                low = cand
        upper.append(best)
        lower.append(low)
        witness.append(wit)
    return MaximalMajorant(f, tuple(upper), tuple(lower), tuple(witness))


def maximal_at(f: PiecewiseFn, x) -> QuadScalar:
    """Exact ``Mf(x)`` for a non-negative ``f`` that vanishes off its domain."""
    x = mpq(x)
    xs = f.edges
    best = None
    for e in xs:
        if e < x:
            cand = f.mass(e, x) / (x - e)
        elif e > x:
            cand = f.mass(x, e) / (e - x)
        else:
            continue
        if best is None or cand > best:
            best = cand
    lo, hi = f.domain
    i = bisect.bisect_right(xs, x) - 1
    if lo <= x < hi:
        if best is None or f.values[i] > best:
            best = f.values[i]
    if lo < x <= hi and x == xs[i if x < hi else len(xs) - 1]:
        prev = f.values[(i if x < hi else len(xs) - 1) - 1]
        if prev > best:
            best = prev
    return best


@dataclass(frozen=True)
class PeriodicMajorant:
    """Brackets on ``Mw`` over each piece of one period.

    ``lower[q]`` is the exact supremum over the piece of the maximal function
    of ``w`` restricted to the window; ``upper[q]`` is that value or the
    long-interval cap, whichever is larger.
    """

    base: PiecewiseFn
    window_periods: int
    upper: tuple
    lower: tuple
    witness: tuple
    cap: QuadScalar

    def upper_fn(self) -> PiecewiseFn:
        return PiecewiseFn._raw(self.base.edges, self.upper, self.base.field)


def maximal_periodic(f: PeriodicFn, window: int = 3) -> PeriodicMajorant:
    """Certified per-piece bracket on the maximal function of a periodic step function.

    Intervals shorter than ``L = window - 1`` that meet ``[0, 1)`` lie in
    ``[-L, 1 + L)`` and are evaluated exactly.  Longer intervals contain
    whole periods plus one partial period, so their average is at most
    ``mean + (max G - min G) / L`` with ``G(x) = int_0^x f - mean * x``.
    """
    if window < 2:
        raise ValueError("window must be >= 2")
    lam = window - 1
    base = f.base
    win = f.restrict(-lam, 1 + lam)
    maj = maximal_majorant(win)
    off = lam * len(base)
    mean = base.prefix[-1]
    g = [c - mean * x for c, x in zip(base.prefix, base.edges)]
    cap = mean + (max(g) - min(g)) / lam
    lower = maj.upper[off : off + len(base)]
    upper = tuple(c if c > cap else cap for c in lower)
    return PeriodicMajorant(base, window, upper, lower, maj.witness[off : off + len(base)], cap)


def finest_grid_scale(f: PiecewiseFn, lattice: TriadicLattice = STANDARD, coarsest: int = 12, finest: int = -80) -> int:
    """Coarsest scale whose lattice grid contains every edge of ``f``."""
    for j in range(coarsest, finest - 1, -1):
        if all(lattice.on_grid(x, j) for x in f.edges):
            return j
    raise ValueError("breakpoints do not lie on the lattice grid")


def _ancestor_sup(f: PiecewiseFn, x, j0: int, lattice: TriadicLattice):
    lo, hi = f.domain
    reach = 3 * (hi - lo) + abs(lo) + abs(hi)
    best = None
    j = j0
    while True:
        a, b = lattice.cell(x, j)
        cand = f.mass(a, b) / (b - a)
        if best is None or cand > best:
            best = cand
        if (a <= lo and b >= hi) or (b - a) > reach:
            return best
        j += 1


def triadic_maximal(f: PiecewiseFn, lattice: TriadicLattice = STANDARD) -> PiecewiseFn:
    """Exact lattice maximal function on the cells of the finest grid scale covering the domain."""
    for v in f.values:
        if v.sign() < 0:
            raise ValueError("triadic maximal needs a non-negative function")
    j0 = finest_grid_scale(f, lattice)
    lo, hi = f.domain
    edges, vals = [lo], []
    x = lo
    while x < hi:
        a, b = lattice.cell(x, j0)
        vals.append(_ancestor_sup(f, x, j0, lattice))
        x = min(b, hi)
        edges.append(x)
    return PiecewiseFn._raw(tuple(edges), tuple(vals), f.field)


def lattice_maximal_at(f: PiecewiseFn, x, lattice: TriadicLattice = STANDARD) -> QuadScalar:
    """Exact pointwise lattice maximal function for any step ``f``."""
    x = mpq(x)
    lo, hi = f.domain
    # descend until the cell sits inside one piece of f (or outside the domain)
    j = 0
    top = max(abs(lo), abs(hi), hi - lo)
    while lattice.cell_length(j) < top:
        j += 1
    best = None
    jj = j
    while True:
        a, b = lattice.cell(x, jj)
        cand = f.mass(a, b) / (b - a)
        if best is None or cand > best:
            best = cand
        i = bisect.bisect_right(f.edges, a)
        inside_piece = b <= f.edges[i] if i < len(f.edges) else True
        if inside_piece or b <= lo or a >= hi:
            break
        jj -= 1
    up = _ancestor_sup(f, x, j, lattice)
    return up if up > best else best
