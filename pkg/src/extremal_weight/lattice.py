"""Triadic intervals, unions of adjacent triadic pairs, and the covering lemma."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

from gmpy2 import mpq

from .exactfun import rational_to_str

__all__ = [
    "TriadicInterval",
    "JPair",
    "TriadicLattice",
    "STANDARD",
    "J_LATTICE_1",
    "J_LATTICE_2",
    "cover_with_j",
    "classify_j",
    "j_trisect",
    "enumerate_j",
    "scale_of_length",
    "periodic_positions_splitting",
]


def _pow3(j: int) -> mpq:
    return mpq(3) ** j if j >= 0 else mpq(1, 3 ** (-j))


def _floor(x: mpq) -> int:
    return int(x.numerator // x.denominator)


def scale_of_length(h) -> int:
    """The ``j`` with ``3**(j-1) <= h < 3**j``."""
    h = mpq(h)
    if h <= 0:
        raise ValueError("length must be positive")
    j = 0
    while _pow3(j) <= h:
        j += 1
    while _pow3(j - 1) > h:
        j -= 1
    return j


@dataclass(frozen=True, order=True)
class TriadicInterval:
    """``[3**j * n, 3**j * (n + 1))``."""

    j: int
    n: int

    @property
    def lo(self) -> mpq:
        return _pow3(self.j) * self.n

    @property
    def hi(self) -> mpq:
        return _pow3(self.j) * (self.n + 1)

    @property
    def length(self) -> mpq:
        return _pow3(self.j)

    def child(self, i: int) -> TriadicInterval:
        """``i``-th child from the left, ``i`` in ``{1, 2, 3}``."""
        if i not in (1, 2, 3):
            raise ValueError("child index must be 1, 2 or 3")
        return TriadicInterval(self.j - 1, 3 * self.n + i - 1)

    def children(self) -> tuple[TriadicInterval, TriadicInterval, TriadicInterval]:
        return self.child(1), self.child(2), self.child(3)

    def parent(self) -> TriadicInterval:
        return TriadicInterval(self.j + 1, self.n // 3)

    def contains(self, other: TriadicInterval) -> bool:
        if other.j > self.j:
            return False
        return other.n // 3 ** (self.j - other.j) == self.n

    @classmethod
    def from_bounds(cls, lo, hi) -> TriadicInterval:
        lo, hi = mpq(lo), mpq(hi)
        h = hi - lo
        j = scale_of_length(h) - 1
        if _pow3(j) != h:
            raise ValueError(f"[{lo}, {hi}) is not triadic")
        n = lo / h
        if n.denominator != 1:
            raise ValueError(f"[{lo}, {hi}) is not triadic")
        return cls(j, int(n))

    @classmethod
    def containing(cls, x, j: int) -> TriadicInterval:
        return cls(j, _floor(mpq(x) / _pow3(j)))

    def to_json(self) -> dict:
        return {"j": self.j, "n": self.n}


@dataclass(frozen=True, order=True)
class JPair:
    """``[3**j * n, 3**j * (n + 2))``, the union of two adjacent triadic intervals."""

    j: int
    n: int

    @property
    def lo(self) -> mpq:
        return _pow3(self.j) * self.n

    @property
    def hi(self) -> mpq:
        return _pow3(self.j) * (self.n + 2)

    @property
    def length(self) -> mpq:
        return 2 * _pow3(self.j)

    @property
    def left(self) -> TriadicInterval:
        return TriadicInterval(self.j, self.n)

    @property
    def right(self) -> TriadicInterval:
        return TriadicInterval(self.j, self.n + 1)

    @property
    def lattice_id(self) -> int:
        return classify_j(self)

    def contains_interval(self, lo, hi) -> bool:
        return self.lo <= mpq(lo) and mpq(hi) <= self.hi

    def to_json(self) -> dict:
        return {"j": self.j, "n": self.n}

    def __str__(self):
        return f"[{rational_to_str(self.lo)}, {rational_to_str(self.hi)})"


def cover_with_j(lo, hi, minimal: bool = False) -> JPair:
    """A JPair containing ``[lo, hi)`` with at most six times its length.

    The default follows the classical recipe: the scale ``j`` with
    ``3**(j-1) <= |I| < 3**j`` and the position whose left triadic half holds
    ``lo``.  With ``minimal=True`` finer scales are tried first and the
    shortest covering pair is returned.
    """
    lo, hi = mpq(lo), mpq(hi)
    if not lo < hi:
        raise ValueError("degenerate interval")
    j = scale_of_length(hi - lo)
    J = JPair(j, _floor(lo / _pow3(j)))
    if minimal:
        jj = j - 1
        while 2 * _pow3(jj) >= hi - lo:
            n = _floor(lo / _pow3(jj))
            cand = [JPair(jj, m) for m in (n, n - 1) if JPair(jj, m).contains_interval(lo, hi)]
            if cand:
                J = cand[0]
            jj -= 1
    return J


def classify_j(J: JPair) -> int:
    """Lattice id: 1 for even positions, 2 for odd positions."""
    return 1 if J.n % 2 == 0 else 2


def j_trisect(J: JPair) -> tuple[JPair, JPair, JPair]:
    return JPair(J.j - 1, 3 * J.n), JPair(J.j - 1, 3 * J.n + 2), JPair(J.j - 1, 3 * J.n + 4)


def enumerate_j(scales: Iterable[int], window) -> Iterator[JPair]:
    """Every JPair at the given scale exponents meeting the half-open window."""
    a, b = (mpq(x) for x in window)
    for j in scales:
        s = _pow3(j)
        # 3^j (n+2) > a and 3^j n < b
        n_min = _floor(a / s) - 1
        if s * (n_min + 2) <= a:
            n_min += 1
        q = b / s
        n_max = _floor(q) if q.denominator != 1 else int(q) - 1
        for n in range(n_min, n_max + 1):
            yield JPair(j, n)


def periodic_positions_splitting(points: Iterable, m: int, pairs: bool = True) -> list[int]:
    """Positions ``n`` mod ``3**m`` whose cell at scale ``3**-m`` has a point strictly inside.

    Cells are JPairs ``[n, n + 2) / 3**m`` when ``pairs`` is true, triadic
    intervals ``[n, n + 1) / 3**m`` otherwise; points are taken mod 1.
    """
    N = 3**m
    out = set()
    for e in points:
        s = mpq(e) * N
        f = _floor(s)
        exact = s.denominator == 1
        if pairs:
            cand = (f - 1,) if exact else (f - 1, f)
        else:
            cand = () if exact else (f,)
        for n in cand:
            out.add(n % N)
    return sorted(out)


class TriadicLattice:
    """A nested family where every interval splits into three equal children.

    ``kind`` is ``"T"`` for the standard lattice ``[3^j n, 3^j (n+1))`` or
    ``1``/``2`` for the two sub-lattices of JPairs of matching parity.  A
    cell at scale ``j`` has length ``3**j`` (``T``) or ``2 * 3**j`` (JPairs).
    """

    def __init__(self, kind="T"):
        if kind not in ("T", 1, 2):
            raise ValueError("kind must be 'T', 1 or 2")
        self.kind = kind

    def cell(self, x, j: int) -> tuple[mpq, mpq]:
        x = mpq(x)
        s = _pow3(j)
        if self.kind == "T":
            n = _floor(x / s)
            return s * n, s * (n + 1)
        par = 0 if self.kind == 1 else 1
        n = par + 2 * _floor((x / s - par) / 2)
        return s * n, s * (n + 2)

    def cell_length(self, j: int) -> mpq:
        return _pow3(j) if self.kind == "T" else 2 * _pow3(j)

    def on_grid(self, x, j: int) -> bool:
        """Whether ``x`` is an endpoint of a cell at scale ``j``."""
        lo, _ = self.cell(x, j)
        return lo == mpq(x)

    def __repr__(self):
        return f"TriadicLattice({self.kind!r})"


STANDARD = TriadicLattice("T")
J_LATTICE_1 = TriadicLattice(1)
J_LATTICE_2 = TriadicLattice(2)
