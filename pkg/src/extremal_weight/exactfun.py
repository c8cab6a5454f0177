"""Exact scalars in a real quadratic field and piecewise-constant functions.

Rationals are ``gmpy2.mpq``.  A :class:`QuadScalar` is ``a + b*sqrt(D)`` with
rational ``a``, ``b`` and a discriminant ``D`` shared by every value built from
the same :class:`QuadField`.  :class:`PiecewiseFn` stores exact rational
breakpoints with one scalar per piece and answers integrals through cached
prefix sums.
"""

from __future__ import annotations

import bisect
import math
from typing import Iterator, Sequence

import gmpy2
from gmpy2 import mpq, mpz

__all__ = [
    "Q",
    "as_rational",
    "rational_to_str",
    "QuadField",
    "QuadScalar",
    "RATIONALS",
    "PiecewiseFn",
    "PeriodicFn",
    "FieldMismatchError",
]

Q = mpq


class FieldMismatchError(ValueError):
    """Two irrational values from different quadratic fields were combined."""


def as_rational(x) -> mpq:
    """Coerce ints, strings like ``"3/7"``, Fractions and mpq to ``mpq``."""
    if isinstance(x, QuadScalar):
        if x.b:
            raise ValueError(f"{x} is not rational")
        return x.a
    if isinstance(x, float):
        raise TypeError("floats are not accepted as exact rationals")
    return mpq(x)


def rational_to_str(x) -> str:
    x = mpq(x)
    return f"{x.numerator}/{x.denominator}"


def _floor(x: mpq) -> int:
    return int(x.numerator // x.denominator)


def _rational_sqrt(x: mpq) -> mpq | None:
    if x < 0:
        return None
    num, den = mpz(x.numerator), mpz(x.denominator)
    if gmpy2.is_square(num) and gmpy2.is_square(den):
        return mpq(gmpy2.isqrt(num), gmpy2.isqrt(den))
    return None


class QuadField:
    """The field Q(sqrt(D)); perfect-square ``D`` collapses to the rationals."""

    __slots__ = ("D", "root", "_sqrt_float")

    def __init__(self, D=0):
        D = as_rational(D)
        if D < 0:
            raise ValueError("discriminant must be non-negative")
        self.D = D
        self.root = _rational_sqrt(D)
        self._sqrt_float = math.sqrt(D) if self.root is None else float(self.root)

    @property
    def is_rational(self) -> bool:
        return self.root is not None

    def __call__(self, a=0, b=0) -> QuadScalar:
        a, b = mpq(a), mpq(b)
        if self.root is not None and b:
            a, b = a + b * self.root, mpq(0)
        return QuadScalar._new(a, b, self)

    def sqrt_d(self) -> QuadScalar:
        return self(0, 1)

    def __eq__(self, other):
        return isinstance(other, QuadField) and other.D == self.D

    def __hash__(self):
        return hash(("QuadField", self.D))

    def __repr__(self):
        return f"QuadField({rational_to_str(self.D)})"


class QuadScalar:
    """Immutable exact element ``a + b*sqrt(D)``."""

    __slots__ = ("a", "b", "field")

    def __init__(self, a=0, b=0, D=0):
        field = D if isinstance(D, QuadField) else QuadField(D)
        v = field(a, b)
        self.a, self.b, self.field = v.a, v.b, v.field

    @classmethod
    def _new(cls, a, b, field):
        obj = object.__new__(cls)
        obj.a = a
        obj.b = b
        obj.field = field
        return obj

    @property
    def D(self) -> mpq:
        return self.field.D

    # coercion -------------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, QuadScalar):
            if other.field is self.field or other.field.D == self.field.D:
                return other, self.field
            if not other.b:
                return other, self.field
            if not self.b:
                return other, other.field
            raise FieldMismatchError(
                f"cannot combine values over D={self.D} and D={other.D}"
            )
        if isinstance(other, (int, mpz, mpq)) or type(other).__name__ == "Fraction":
            return QuadScalar._new(mpq(other), mpq(0), self.field), self.field
        return None, None

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        o, f = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadScalar._new(self.a + o.a, self.b + o.b, f)

    __radd__ = __add__

    def __sub__(self, other):
        o, f = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadScalar._new(self.a - o.a, self.b - o.b, f)

    def __rsub__(self, other):
        o, f = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadScalar._new(o.a - self.a, o.b - self.b, f)

    def __neg__(self):
        return QuadScalar._new(-self.a, -self.b, self.field)

    def __mul__(self, other):
        if isinstance(other, (int, mpz, mpq)):
            other = mpq(other)
            return QuadScalar._new(self.a * other, self.b * other, self.field)
        o, f = self._coerce(other)
        if o is None:
            return NotImplemented
        if not o.b:
            return QuadScalar._new(self.a * o.a, self.b * o.a, f)
        if not self.b:
            return QuadScalar._new(self.a * o.a, self.a * o.b, f)
        return QuadScalar._new(
            self.a * o.a + self.b * o.b * f.D, self.a * o.b + self.b * o.a, f
        )

    __rmul__ = __mul__

    def norm(self) -> mpq:
        """Field norm ``a^2 - b^2 D``."""
        return self.a * self.a - self.b * self.b * self.field.D

    def conjugate(self) -> QuadScalar:
        return QuadScalar._new(self.a, -self.b, self.field)

    def reciprocal(self) -> QuadScalar:
        if not self.b:
            if not self.a:
                raise ZeroDivisionError("reciprocal of exact zero")
            return QuadScalar._new(1 / self.a, mpq(0), self.field)
        n = self.norm()
        if not n:
            raise ZeroDivisionError("reciprocal of exact zero")
        return QuadScalar._new(self.a / n, -self.b / n, self.field)

    def __truediv__(self, other):
        if isinstance(other, (int, mpz, mpq)):
            if not other:
                raise ZeroDivisionError("division by exact zero")
            other = mpq(other)
            return QuadScalar._new(self.a / other, self.b / other, self.field)
        o, _ = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.reciprocal()

    def __rtruediv__(self, other):
        o, _ = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.reciprocal()

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return self.reciprocal() ** (-e)
        out = QuadScalar._new(mpq(1), mpq(0), self.field)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    # ordering -------------------------------------------------------------
    def sign(self) -> int:
        a, b = self.a, self.b
        if not b:
            return (a > 0) - (a < 0)
        sb = 1 if b > 0 else -1
        if not a:
            return sb
        sa = 1 if a > 0 else -1
        if sa == sb:
            return sa
        lhs, rhs = a * a, b * b * self.field.D
        if lhs > rhs:
            return sa
        if lhs < rhs:
            return sb
        return 0

    def _cmp(self, other) -> int:
        if isinstance(other, (int, mpz, mpq)) and not self.b:
            return (self.a > other) - (self.a < other)
        d = self - other
        if d is NotImplemented:
            raise TypeError(f"cannot compare QuadScalar with {type(other).__name__}")
        return d.sign()

    def __eq__(self, other):
        if isinstance(other, QuadScalar):
            if self.b or other.b:
                return self.a == other.a and self.b == other.b and self.D == other.D
            return self.a == other.a
        if isinstance(other, (int, mpz, mpq)) or type(other).__name__ == "Fraction":
            return not self.b and self.a == other
        return NotImplemented

    def __hash__(self):
        if not self.b:
            return hash(self.a)
        return hash((self.a, self.b, self.D))

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def __abs__(self):
        return -self if self.sign() < 0 else self

    # conversion -----------------------------------------------------------
    def is_rational(self) -> bool:
        return not self.b

    def __float__(self):
        a, b = self.a, self.b
        if not b:
            return float(a)
        r = self.field._sqrt_float
        if (a > 0) != (b > 0) and a:
            # cancellation: go through the conjugate
            return float(self.norm()) / (float(a) - float(b) * r)
        return float(a) + float(b) * r

    def to_arb(self):
        from flint import arb, fmpq

        a = arb(fmpq(int(self.a.numerator), int(self.a.denominator)))
        if not self.b:
            return a
        b = arb(fmpq(int(self.b.numerator), int(self.b.denominator)))
        D = arb(fmpq(int(self.D.numerator), int(self.D.denominator)))
        return a + b * D.sqrt()

    def to_json(self) -> dict:
        return {
            "a": rational_to_str(self.a),
            "b": rational_to_str(self.b),
            "D": rational_to_str(self.D),
        }

    @classmethod
    def from_json(cls, obj, field: QuadField | None = None) -> QuadScalar:
        if field is None or field.D != mpq(obj["D"]):
            field = QuadField(mpq(obj["D"]))
        return QuadScalar._new(mpq(obj["a"]), mpq(obj["b"]), field)

    def __repr__(self):
        if not self.b:
            return f"QuadScalar({rational_to_str(self.a)})"
        return (
            f"QuadScalar({rational_to_str(self.a)} + {rational_to_str(self.b)}"
            f"*sqrt({rational_to_str(self.D)}))"
        )

    def __str__(self):
        if not self.b:
            return str(self.a)
        return f"{self.a}{'+' if self.b > 0 else '-'}{abs(self.b)}*sqrt({self.D})"


RATIONALS = QuadField(0)


def _scalar(v, field: QuadField) -> QuadScalar:
    if isinstance(v, QuadScalar):
        return v
    return QuadScalar._new(mpq(v), mpq(0), field)


class PiecewiseFn:
    """Piecewise-constant function on ``[lo, hi)`` with value zero outside.

    ``edges`` holds ``lo``, the interior breakpoints and ``hi``; piece ``i``
    is ``[edges[i], edges[i+1])`` with value ``values[i]``.
    """

    __slots__ = ("edges", "values", "field", "_prefix")

    def __init__(self, edges: Sequence, values: Sequence, field: QuadField | None = None):
        edges = tuple(mpq(e) for e in edges)
        if len(edges) < 2:
            raise ValueError("need at least one piece")
        if len(values) != len(edges) - 1:
            raise ValueError("one value per piece required")
        for x, y in zip(edges, edges[1:]):
            if not x < y:
                raise ValueError("breakpoints must be strictly increasing")
        if field is None:
            field = next(
                (v.field for v in values if isinstance(v, QuadScalar) and v.b),
                next((v.field for v in values if isinstance(v, QuadScalar)), RATIONALS),
            )
        self.edges = edges
        self.values = tuple(_scalar(v, field) for v in values)
        self.field = field
        self._prefix = None

    @classmethod
    def _raw(cls, edges, values, field):
        obj = object.__new__(cls)
        obj.edges = edges
        obj.values = values
        obj.field = field
        obj._prefix = None
        return obj

    @classmethod
    def constant(cls, value, lo=0, hi=1, field: QuadField | None = None) -> PiecewiseFn:
        return cls((lo, hi), (value,), field)

    # basic shape ----------------------------------------------------------
    @property
    def lo(self) -> mpq:
        return self.edges[0]

    @property
    def hi(self) -> mpq:
        return self.edges[-1]

    @property
    def domain(self) -> tuple[mpq, mpq]:
        return self.edges[0], self.edges[-1]

    @property
    def breakpoints(self) -> tuple[mpq, ...]:
        return self.edges[1:-1]

    def __len__(self):
        return len(self.values)

    def pieces(self) -> Iterator[tuple[mpq, mpq, QuadScalar]]:
        e = self.edges
        for i, v in enumerate(self.values):
            yield e[i], e[i + 1], v

    def lengths(self) -> list[mpq]:
        e = self.edges
        return [e[i + 1] - e[i] for i in range(len(self.values))]

    def piece_index(self, x) -> int:
        """Index of the piece containing ``x``; raises outside the domain."""
        x = mpq(x)
        if not self.lo <= x < self.hi:
            raise ValueError(f"{x} outside domain [{self.lo}, {self.hi})")
        return bisect.bisect_right(self.edges, x) - 1

    def __call__(self, x) -> QuadScalar:
        x = mpq(x)
        if not self.lo <= x < self.hi:
            return QuadScalar._new(mpq(0), mpq(0), self.field)
        return self.values[bisect.bisect_right(self.edges, x) - 1]

    # integration ----------------------------------------------------------
    @property
    def prefix(self) -> list[QuadScalar]:
        """Cumulative integrals at each edge (``prefix[0] == 0``)."""
        if self._prefix is None:
            zero = QuadScalar._new(mpq(0), mpq(0), self.field)
            acc, out, e = zero, [zero], self.edges
            for i, v in enumerate(self.values):
                acc = acc + v * (e[i + 1] - e[i])
                out.append(acc)
            self._prefix = out
        return self._prefix

    def cumulative(self, x) -> QuadScalar:
        """Integral over ``[lo, x]`` with ``x`` clipped into the domain."""
        x = mpq(x)
        e = self.edges
        if x <= e[0]:
            return self.prefix[0]
        if x >= e[-1]:
            return self.prefix[-1]
        i = bisect.bisect_right(e, x) - 1
        return self.prefix[i] + self.values[i] * (x - e[i])

    def integrate(self, lo=None, hi=None) -> QuadScalar:
        lo = self.lo if lo is None else mpq(lo)
        hi = self.hi if hi is None else mpq(hi)
        if lo > hi:
            raise ValueError("empty or reversed range")
        if lo < self.lo or hi > self.hi:
            raise ValueError(f"range [{lo}, {hi}) outside domain [{self.lo}, {self.hi})")
        return self.cumulative(hi) - self.cumulative(lo)

    def mass(self, lo, hi) -> QuadScalar:
        """Integral over ``[lo, hi)`` treating the function as zero outside its domain."""
        return self.cumulative(hi) - self.cumulative(lo)

    def average(self, lo=None, hi=None) -> QuadScalar:
        lo = self.lo if lo is None else mpq(lo)
        hi = self.hi if hi is None else mpq(hi)
        return self.integrate(lo, hi) / (hi - lo)

    # pointwise algebra ----------------------------------------------------
    def _map(self, fn) -> PiecewiseFn:
        return PiecewiseFn._raw(self.edges, tuple(fn(v) for v in self.values), self.field)

    def reciprocal(self) -> PiecewiseFn:
        for v in self.values:
            if not v:
                raise ZeroDivisionError("reciprocal of a zero piece")
        return self._map(QuadScalar.reciprocal)

    def scale(self, c) -> PiecewiseFn:
        return self._map(lambda v: v * c)

    def square(self) -> PiecewiseFn:
        return self._map(lambda v: v * v)

    def _refine(self, other: PiecewiseFn):
        if self.domain != other.domain:
            raise ValueError("domains differ")
        if self.edges == other.edges:
            return self.edges, self.values, other.values
        edges = tuple(sorted(set(self.edges) | set(other.edges)))
        va, vb = [], []
        i = j = 0
        for x in edges[:-1]:
            while self.edges[i + 1] <= x:
                i += 1
            while other.edges[j + 1] <= x:
                j += 1
            va.append(self.values[i])
            vb.append(other.values[j])
        return edges, va, vb

    def multiply(self, other: PiecewiseFn) -> PiecewiseFn:
        edges, va, vb = self._refine(other)
        vals = tuple(x * y for x, y in zip(va, vb))
        return PiecewiseFn._raw(edges, vals, vals[0].field if vals else self.field)

    def __add__(self, other: PiecewiseFn) -> PiecewiseFn:
        edges, va, vb = self._refine(other)
        vals = tuple(x + y for x, y in zip(va, vb))
        return PiecewiseFn._raw(edges, vals, vals[0].field)

    def __mul__(self, other):
        if isinstance(other, PiecewiseFn):
            return self.multiply(other)
        return self.scale(other)

    # geometry -------------------------------------------------------------
    def restrict(self, lo, hi) -> PiecewiseFn:
        lo, hi = mpq(lo), mpq(hi)
        if not lo < hi:
            raise ValueError("empty target interval")
        if lo < self.lo or hi > self.hi:
            raise ValueError(f"[{lo}, {hi}) not inside [{self.lo}, {self.hi})")
        e = self.edges
        i = bisect.bisect_right(e, lo) - 1
        j = bisect.bisect_left(e, hi)
        edges = (lo,) + e[i + 1 : j] + (hi,)
        return PiecewiseFn._raw(edges, self.values[i:j], self.field)

    def affine_to(self, lo, hi) -> PiecewiseFn:
        """Reparametrize the domain affinely onto ``[lo, hi)``; values unchanged."""
        lo, hi = mpq(lo), mpq(hi)
        if not lo < hi:
            raise ValueError("empty target interval")
        s = (hi - lo) / (self.hi - self.lo)
        base = self.lo
        edges = tuple(lo + (x - base) * s for x in self.edges[:-1]) + (hi,)
        return PiecewiseFn._raw(edges, self.values, self.field)

    def merged(self) -> PiecewiseFn:
        """Coalesce adjacent pieces with equal values."""
        edges, vals = [self.edges[0]], []
        for x, v in zip(self.edges[1:], self.values):
            if vals and vals[-1] == v:
                edges[-1] = x
            else:
                vals.append(v)
                edges.append(x)
        return PiecewiseFn._raw(tuple(edges), tuple(vals), self.field)

    def is_positive(self) -> bool:
        return all(v.sign() > 0 for v in self.values)

    def __eq__(self, other):
        if not isinstance(other, PiecewiseFn):
            return NotImplemented
        return self.edges == other.edges and self.values == other.values

    def __hash__(self):
        return hash((self.edges, self.values))

    def __repr__(self):
        return f"PiecewiseFn(domain=[{self.lo}, {self.hi}), pieces={len(self.values)})"

    # serialization --------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "domain": [rational_to_str(self.lo), rational_to_str(self.hi)],
            "breakpoints": [rational_to_str(x) for x in self.breakpoints],
            "values": [v.to_json() for v in self.values],
        }

    @classmethod
    def from_json(cls, obj) -> PiecewiseFn:
        lo, hi = (mpq(x) for x in obj["domain"])
        edges = (lo,) + tuple(mpq(x) for x in obj["breakpoints"]) + (hi,)
        fields: dict = {}
        vals = []
        for v in obj["values"]:
            D = mpq(v["D"])
            f = fields.setdefault(D, QuadField(D))
            vals.append(QuadScalar._new(mpq(v["a"]), mpq(v["b"]), f))
        return cls(edges, vals)

    def float_arrays(self):
        import numpy as np

        return (
            np.array([float(x) for x in self.edges]),
            np.array([float(v) for v in self.values]),
        )


class PeriodicFn:
    """Period-1 extension of a :class:`PiecewiseFn` defined on ``[0, 1)``."""

    __slots__ = ("base",)

    def __init__(self, base: PiecewiseFn):
        if base.domain != (mpq(0), mpq(1)):
            raise ValueError("periodic base must live on [0, 1)")
        self.base = base

    @property
    def field(self) -> QuadField:
        return self.base.field

    def __call__(self, x) -> QuadScalar:
        x = mpq(x)
        return self.base(x - _floor(x))

    def _primitive(self, x: mpq) -> QuadScalar:
        n = _floor(x)
        return self.base.prefix[-1] * n + self.base.cumulative(x - n)

    def integrate(self, lo, hi) -> QuadScalar:
        lo, hi = mpq(lo), mpq(hi)
        if lo > hi:
            raise ValueError("reversed range")
        return self._primitive(hi) - self._primitive(lo)

    def period_integral(self) -> QuadScalar:
        return self.base.prefix[-1]

    def restrict(self, lo, hi) -> PiecewiseFn:
        """The periodic function on ``[lo, hi)`` as a compactly supported PiecewiseFn."""
        lo, hi = mpq(lo), mpq(hi)
        if not lo < hi:
            raise ValueError("empty target interval")
        b = self.base
        be, bv = b.edges, b.values
        edges: list = [lo]
        vals: list = []
        n = _floor(lo)
        while n < hi:
            s, t = max(lo - n, be[0]), min(hi - n, be[-1])
            if s < t:
                i = bisect.bisect_right(be, s) - 1
                j = bisect.bisect_left(be, t)
                edges.extend(x + n for x in be[i + 1 : j])
                edges.append(t + n)
                vals.extend(bv[i:j])
            n += 1
        return PiecewiseFn._raw(tuple(edges), tuple(vals), b.field)

    def jump_points(self) -> tuple[mpq, ...]:
        """Points of ``[0, 1)`` where the periodic function changes value."""
        m = self.base.merged()
        wrap = (mpq(0),) if m.values[0] != m.values[-1] else ()
        return wrap + m.breakpoints

    def window(self, periods_left: int, periods_right: int) -> PiecewiseFn:
        return self.restrict(-periods_left, 1 + periods_right)

    def __repr__(self):
        return f"PeriodicFn({self.base!r})"
