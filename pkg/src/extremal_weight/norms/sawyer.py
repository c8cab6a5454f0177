"""Exact stopping-time verification for the triadic maximal operator on ``L^2(sigma)``.

The lattice is truncated to the triadic subintervals of a top interval
``X`` holding both inputs, which makes every level set finite.  With
``Omega_k = {M f > a**k}`` split into maximal cells ``I_j^k``,
``E_j^k = I_j^k \\ Omega_{k+1}`` and
``alpha_{j,k} = (w(I_j^k) / |I_j^k|)**2 sigma(E_j^k)``, the verifier checks
the packing inequality, the level-set chain and the final norm bound.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from gmpy2 import mpq

from ..exactfun import PiecewiseFn
from ..lattice import TriadicInterval
from ..ops.maximal import finest_grid_scale

__all__ = ["StoppingCell", "SawyerReport", "sawyer_verify", "random_triadic_pair"]


@dataclass(frozen=True)
class StoppingCell:
    k: int
    cell: TriadicInterval
    avg_f: object
    sigma_E: object
    alpha: object


@dataclass
class SawyerReport:
    a: mpq
    top: TriadicInterval
    finest_scale: int
    generations: dict  # k -> list of TriadicInterval
    stops: list
    packing: list = field(default_factory=list)  # (cell, lhs, rhs, is_stop)
    chain_lhs: object = None
    chain_rhs: object = None
    testing_sup: object = None  # N^2
    norm_f_sq: object = None
    final_rhs: object = None
    firstpart_identity: bool = True
    disjoint: bool = True
    nested: bool = True
    exceptional_partition: bool = True

    @property
    def packing_ok(self) -> bool:
        return all(lhs <= rhs for _, lhs, rhs, _ in self.packing)

    @property
    def chain_ok(self) -> bool:
        return self.chain_lhs <= self.chain_rhs

    @property
    def final_ok(self) -> bool:
        return self.chain_lhs <= self.final_rhs

    @property
    def passes(self) -> bool:
        return (
            self.packing_ok
            and self.chain_ok
            and self.final_ok
            and self.firstpart_identity
            and self.disjoint
            and self.nested
            and self.exceptional_partition
        )

    def worst_packing(self):
        best = None
        for cell, lhs, rhs, stop in self.packing:
            if rhs and (best is None or lhs / rhs > best[0]):
                best = (lhs / rhs, cell, stop)
        return best

    def to_json(self) -> dict:
        worst = self.worst_packing()
        return {
            "a": str(self.a),
            "top": [str(self.top.lo), str(self.top.hi)],
            "finest_scale": self.finest_scale,
            "generations": {str(k): len(v) for k, v in sorted(self.generations.items())},
            "stopping_cells": len(self.stops),
            "packing_checked": len(self.packing),
            "packing_ok": self.packing_ok,
            "worst_packing_ratio": None if worst is None else float(worst[0]),
            "chain_lhs": str(self.chain_lhs),
            "chain_rhs": str(self.chain_rhs),
            "chain_ok": self.chain_ok,
            "testing_sup": str(self.testing_sup),
            "final_rhs": str(self.final_rhs),
            "final_ok": self.final_ok,
            "firstpart_identity": self.firstpart_identity,
            "disjoint": self.disjoint,
            "nested": self.nested,
            "passes": self.passes,
        }


class _CellTree:
    """Masses of ``f``, ``w`` and ``sigma`` on every triadic subcell of the top interval."""

    def __init__(self, f: PiecewiseFn, w: PiecewiseFn, top: TriadicInterval, j0: int):
        self.top, self.j0 = top, j0
        sigma = w.reciprocal()
        self.f, self.w, self.sigma = f, w, sigma
        self.mf, self.mw, self.ms = {}, {}, {}
        self._fill(top)

    def _fill(self, c: TriadicInterval):
        if c.j == self.j0:
            lo, hi = c.lo, c.hi
            self.mf[c] = self.f.integrate(lo, hi)
            self.mw[c] = self.w.integrate(lo, hi)
            self.ms[c] = self.sigma.integrate(lo, hi)
            return
        kids = c.children()
        for ch in kids:
            self._fill(ch)
        self.mf[c] = sum((self.mf[ch] for ch in kids[1:]), self.mf[kids[0]])
        self.mw[c] = sum((self.mw[ch] for ch in kids[1:]), self.mw[kids[0]])
        self.ms[c] = sum((self.ms[ch] for ch in kids[1:]), self.ms[kids[0]])

    def avg_f(self, c):
        return self.mf[c] / c.length

    def avg_w(self, c):
        return self.mw[c] / c.length

    def leaves(self, c: TriadicInterval):
        if c.j == self.j0:
            yield c
            return
        for ch in c.children():
            yield from self.leaves(ch)

    def cells(self):
        return self.mf.keys()

    def maximal_f(self):
        """``M f`` on every finest cell."""
        out = {}

        def walk(c, run):
            a = self.avg_f(c)
            run = a if run is None or a > run else run
            if c.j == self.j0:
                out[c] = run
                return
            for ch in c.children():
                walk(ch, run)

        walk(self.top, None)
        return out

    def testing_integral(self, R: TriadicInterval):
        """``int_R (M(w chi_R))^2 sigma`` with the lattice restricted to cells inside ``R``."""
        total = None

        def walk(c, run):
            nonlocal total
            a = self.avg_w(c)
            run = a if run is None or a > run else run
            if c.j == self.j0:
                term = run * run * self.ms[c]
                total = term if total is None else total + term
                return
            for ch in c.children():
                walk(ch, run)

        walk(R, None)
        return total


def _top_interval(f: PiecewiseFn, w: PiecewiseFn) -> TriadicInterval:
    if f.domain != w.domain:
        raise ValueError("f and w must share one triadic domain")
    lo, hi = f.domain
    try:
        return TriadicInterval.from_bounds(lo, hi)
    except ValueError:
        raise ValueError("the common domain must be a triadic interval") from None


def sawyer_verify(f: PiecewiseFn, w: PiecewiseFn, a=2) -> SawyerReport:
    """Stopping-time decomposition of ``M f`` and the exact inequalities of the norm bound."""
    a = mpq(a)
    if a <= 1:
        raise ValueError("a must exceed 1")
    for v in f.values:
        if v.sign() < 0:
            raise ValueError("f must be non-negative")
    if not w.is_positive():
        raise ValueError("w must be positive")
    top = _top_interval(f, w)
    j0 = min(finest_grid_scale(f, coarsest=top.j), finest_grid_scale(w, coarsest=top.j))
    tree = _CellTree(f, w, top, j0)
    mf = tree.maximal_f()

    gens: dict = {}
    avg_top = tree.avg_f(top)
    fmax = max(f.values)
    if avg_top.sign() > 0:
        k = 0
        while a**k >= avg_top:
            k -= 1
        while a ** (k + 1) < avg_top:
            k += 1
        k_min = k
        while a ** (k + 1) < fmax:
            k += 1
        k_max = k
        for k in range(k_min, k_max + 2):
            thr = a**k
            found = []

            def walk(c):
                if tree.avg_f(c) > thr:
                    found.append(c)
                elif c.j > j0:
                    for ch in c.children():
                        walk(ch)

            walk(top)
            gens[k] = found

    rep = SawyerReport(a, top, j0, gens, [])
    ks = sorted(gens)
    for k in ks:
        cells = sorted(gens[k], key=lambda c: c.lo)
        for c1, c2 in zip(cells, cells[1:]):
            if c1.hi > c2.lo:
                rep.disjoint = False
        nxt = gens.get(k + 1, [])
        for c in nxt:
            if not any(I.contains(c) for I in cells):
                rep.nested = False
        for I in cells:
            inner = [c for c in nxt if I.contains(c)]
            sE = tree.ms[I]
            for c in inner:
                sE = sE - tree.ms[c]
            avg = tree.avg_f(I)
            aw = tree.avg_w(I)
            alpha = aw * aw * sE
            rep.stops.append(StoppingCell(k, I, avg, sE, alpha))
            # firstpart identity: (avg f)^2 sigma(E) == ((1/w(I)) int f sigma w)^2 alpha
            lhs = avg * avg * sE
            weighted = tree.mf[I] / tree.mw[I]
            if lhs != weighted * weighted * alpha:
                rep.firstpart_identity = False
            # E_j^k must coincide with the leaves of I where M f <= a^(k+1)
            thr = a ** (k + 1)
            leaf_sigma = None
            for leaf in tree.leaves(I):
                if not mf[leaf] > thr:
                    s = tree.ms[leaf]
                    leaf_sigma = s if leaf_sigma is None else leaf_sigma + s
            if (leaf_sigma if leaf_sigma is not None else sE * 0) != sE:
                rep.exceptional_partition = False

    stop_cells = {s.cell for s in rep.stops}
    N2 = None
    zero = avg_top * 0
    for R in tree.cells():
        rhs = tree.testing_integral(R)
        ratio = rhs / tree.mw[R]
        if N2 is None or ratio > N2:
            N2 = ratio
        lhs = zero
        for s in rep.stops:
            if R.contains(s.cell):
                lhs = lhs + s.alpha
        rep.packing.append((R, lhs, rhs, R in stop_cells))

    chain_lhs = zero
    norm_f = zero
    for leaf in tree.leaves(top):
        m = mf[leaf]
        chain_lhs = chain_lhs + m * m * tree.ms[leaf]
        fv = tree.mf[leaf] / leaf.length
        norm_f = norm_f + fv * fv * tree.ms[leaf]
    chain_rhs = zero
    for s in rep.stops:
        chain_rhs = chain_rhs + s.avg_f * s.avg_f * s.sigma_E
    rep.chain_lhs = chain_lhs
    rep.chain_rhs = a * a * chain_rhs
    rep.testing_sup = N2
    rep.norm_f_sq = norm_f
    rep.final_rhs = 4 * a * a * N2 * norm_f
    return rep


def random_triadic_pair(rng: random.Random, depth: int = 3, zero_prob: float = 0.3, top=(0, 1)):
    """Seeded random ``(f, w)`` on a triadic interval, constant on cells ``depth`` levels down."""
    lo, hi = mpq(top[0]), mpq(top[1])
    TriadicInterval.from_bounds(lo, hi)
    cells = 3**depth
    h = (hi - lo) / cells
    edges = [lo + i * h for i in range(cells + 1)]
    fv, wv = [], []
    for _ in range(cells):
        fv.append(mpq(0) if rng.random() < zero_prob else mpq(rng.randint(1, 40), rng.randint(1, 9)))
        wv.append(mpq(rng.randint(1, 40), rng.randint(1, 9)))
    f = PiecewiseFn(edges, fv).merged()
    w = PiecewiseFn(edges, wv).merged()
    return f, w

