"""Hilbert transform of step functions in closed form, evaluated in ball arithmetic.

For a constant ``c`` on ``[a, b)`` the principal value integral is
``c * (ln|x - a| - ln|x - b|)``.  Sums run in arb balls so every value comes
with a rigorous radius; coefficients stay exact until the final conversion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from flint import arb, ctx, fmpq
from gmpy2 import mpq

from ..exactfun import PiecewiseFn

__all__ = [
    "HilbertSymbolic",
    "HilbertValue",
    "HilbertEvaluator",
    "hilbert_symbolic",
    "hilbert_at",
    "hilbert_float",
    "digits_to_bits",
]

GUARD_BITS = 20


def digits_to_bits(digits: int) -> int:
    return int(math.ceil(digits * math.log2(10))) + GUARD_BITS


def _fmpq(x) -> fmpq:
    x = mpq(x)
    return fmpq(int(x.numerator), int(x.denominator))


@dataclass(frozen=True)
class HilbertValue:
    """Midpoint and rigorous radius of a Hilbert transform value."""

    value: float
    error: float
    ball: object

    def __float__(self):
        return self.value


@dataclass(frozen=True)
class HilbertSymbolic:
    """``sum_j c_j (ln|x - a_j| - ln|x - b_j|)``, one term per piece."""

    terms: tuple

    @property
    def edges(self) -> tuple:
        if not self.terms:
            return ()
        return tuple(t[1] for t in self.terms) + (self.terms[-1][2],)

    def __len__(self):
        return len(self.terms)

    def evaluate(self, x, digits: int = 50) -> HilbertValue:
        return hilbert_at(self, x, digits)


def hilbert_symbolic(f: PiecewiseFn) -> HilbertSymbolic:
    return HilbertSymbolic(tuple((v, a, b) for a, b, v in f.pieces()))


def _check_off_breakpoints(x, edges):
    for e in edges:
        if x == e:
            raise ValueError(f"Hilbert transform undefined at breakpoint {x}")


def hilbert_at(terms: HilbertSymbolic, x, digits: int = 50) -> HilbertValue:
    """Value of the symbolic transform at a rational ``x`` with a certified radius."""
    x = mpq(x)
    edges = terms.edges
    _check_off_breakpoints(x, edges)
    with ctx.workprec(digits_to_bits(digits)):
        total = arb(0)
        for c, a, b in terms.terms:
            la = abs(arb(_fmpq(x - a))).log()
            lb = abs(arb(_fmpq(x - b))).log()
            total += c.to_arb() * (la - lb)
        return HilbertValue(float(total.mid()), float(total.rad()), total)


class HilbertEvaluator:
    """Repeated ball evaluation of ``H f`` and of ``H(f chi_range)`` for piece ranges.

    Per-point logarithms of ``|x - e_i|`` are cached, so sums over any
    contiguous range of pieces cost two lookups after one pass.
    """

    def __init__(self, f: PiecewiseFn, digits: int = 50):
        self.f = f
        self.digits = digits
        self.bits = digits_to_bits(digits)
        self._edges_q = [_fmpq(e) for e in f.edges]
        with ctx.workprec(self.bits):
            self._coef = [v.to_arb() for v in f.values]
        self._edge_set = set(f.edges)
        self._cache_x = None
        self._cache_prefix = None

    def _prefix(self, x: mpq):
        if self._cache_x == x:
            return self._cache_prefix
        if x in self._edge_set:
            raise ValueError(f"Hilbert transform undefined at breakpoint {x}")
        xq = _fmpq(x)
        with ctx.workprec(self.bits):
            logs = [abs(arb(xq - e)).log() for e in self._edges_q]
            acc = arb(0)
            out = [acc]
            for i, c in enumerate(self._coef):
                acc = acc + c * (logs[i] - logs[i + 1])
                out.append(acc)
        self._cache_x, self._cache_prefix = x, out
        return out

    def range_ball(self, x, i0: int, i1: int):
        """Ball for ``H(f chi_[e_i0, e_i1))(x)``."""
        if i1 <= i0:
            return arb(0)
        P = self._prefix(mpq(x))
        with ctx.workprec(self.bits):
            return P[i1] - P[i0]

    def ball(self, x):
        return self.range_ball(x, 0, len(self.f))

    def at(self, x) -> HilbertValue:
        b = self.ball(x)
        return HilbertValue(float(b.mid()), float(b.rad()), b)

    def range_direct(self, x, i0: int, i1: int):
        """Ball for a piece range without touching the per-point cache."""
        x = mpq(x)
        if i1 <= i0:
            return arb(0)
        e = self.f.edges
        if x in e[i0 : i1 + 1]:
            raise ValueError(f"Hilbert transform undefined at breakpoint {x}")
        xq = _fmpq(x)
        with ctx.workprec(self.bits):
            prev = abs(arb(xq - self._edges_q[i0])).log()
            acc = arb(0)
            for i in range(i0, i1):
                cur = abs(arb(xq - self._edges_q[i + 1])).log()
                acc += self._coef[i] * (prev - cur)
                prev = cur
            return acc

    def profile(self, xs):
        return [self.at(x) for x in xs]


def hilbert_float(edges: np.ndarray, values: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Float64 ``H f`` at many points via the jump form ``sum_i jump_i ln|x - e_i|``."""
    jumps = np.diff(np.concatenate(([0.0], values, [0.0])))
    x = np.asarray(x, dtype=float)
    return np.log(np.abs(x[..., None] - edges)) @ jumps
