"""Recursive construction of the extremal weight and its bookkeeping.

A block ``w_nu(2**l, p / 2**l, I)`` is built over an interval ``I``: plateaus
of height ``2**l / p`` on the left thirds of the nested right-aligned
intervals ``I_m``, one depressed tail value on the last third of ``I_{k-1}``,
and recursive blocks with exponent ``l + 1`` on the middle thirds.  Depth-0
blocks split into two halves with values ``2**l * (1 +/- sqrt(D) / p)`` where
``D = p (p - 1)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

from gmpy2 import mpq

from .exactfun import (
    PeriodicFn,
    PiecewiseFn,
    QuadField,
    QuadScalar,
    rational_to_str,
)

__all__ = [
    "WeightParams",
    "RegionTag",
    "TailRecord",
    "Node",
    "ConstructedWeight",
    "TailSet",
    "derive_params",
    "piece_count",
    "build_w_nu",
    "build_weight",
    "tail_sets",
    "running_average_sups",
    "prefix_suffix_sup",
    "SCHEMA_VERSION",
]

SCHEMA_VERSION = "extremal-weight/1"

PLATEAU, TAIL, W0_LEFT, W0_RIGHT = "plateau", "tail", "w0_left", "w0_right"
KINDS = (PLATEAU, TAIL, W0_LEFT, W0_RIGHT)

# full depth is only materialized up to this k
FULL_DEPTH_MAX_K = 3


@dataclass(frozen=True)
class WeightParams:
    k: int
    nu: int
    t: mpq | None = None

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("k must be >= 2")
        if self.nu < 0:
            raise ValueError("nu must be >= 0")

    @cached_property
    def eps(self) -> mpq:
        return mpq(1, 3**self.k)

    @cached_property
    def p(self) -> mpq:
        e = self.eps
        return (1 / (3 * e)) * ((1 + e) / 2 + 4 * e * e / (1 + e))

    @cached_property
    def D(self) -> mpq:
        return self.p * (self.p - 1)

    @property
    def n(self) -> int:
        return 3 ** (self.k - 1)

    @cached_property
    def field(self) -> QuadField:
        return QuadField(self.D)

    @cached_property
    def tail_factor(self) -> mpq:
        """``4 eps / (1 + eps)``, the depressed tail relative to the plateau."""
        return 4 * self.eps / (1 + self.eps)

    def plateau_value(self, level: int) -> QuadScalar:
        return self.field(mpq(2**level) / self.p)

    def tail_value(self, level: int) -> QuadScalar:
        return self.field(self.tail_factor * 2**level / self.p)

    def w0_values(self, level: int) -> tuple[QuadScalar, QuadScalar]:
        s = mpq(2**level)
        return self.field(s, s / self.p), self.field(s, -s / self.p)

    def truncation_factor(self) -> mpq:
        return 1 - (1 - mpq(1, 3 ** (self.k - 1))) ** self.nu

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "nu": self.nu,
            "t": None if self.t is None else rational_to_str(self.t),
            "eps": rational_to_str(self.eps),
            "p": rational_to_str(self.p),
            "D": rational_to_str(self.D),
            "n": self.n,
        }

    @classmethod
    def from_json(cls, obj) -> WeightParams:
        t = obj.get("t")
        return cls(k=int(obj["k"]), nu=int(obj["nu"]), t=None if t is None else mpq(t))


def derive_params(k: int | None = None, t=None, nu: int | None = None) -> WeightParams:
    """Parameters for a target ``t`` (smallest ``k`` with ``3**k >= t``, at least 2) or an explicit ``k``."""
    if k is None and t is None:
        raise ValueError("give k or t")
    if t is not None:
        t = mpq(t)
        if t < 1:
            raise ValueError("t must be >= 1")
    if k is None:
        k = 0
        while 3**k < t:
            k += 1
        k = max(2, k)
    if k < 2:
        raise ValueError("k must be >= 2")
    if nu is None:
        nu = 3 ** (k - 1)
    return WeightParams(k=int(k), nu=int(nu), t=t)


def piece_count(k: int, nu: int) -> int:
    P = 2
    for _ in range(nu):
        P = (k + 1) + (k - 1) * P
    return P


@dataclass(frozen=True)
class RegionTag:
    kind: str
    level: int


@dataclass(frozen=True)
class TailRecord:
    lo: mpq
    hi: mpq
    level: int

    @property
    def center(self) -> mpq:
        return (self.lo + self.hi) / 2

    def half(self) -> tuple[mpq, mpq]:
        """The concentric half of the tail interval."""
        q = (self.hi - self.lo) / 4
        return self.lo + q, self.hi - q


@dataclass
class Node:
    """An interval carrying a block ``w_depth(2**level, p / 2**level, [lo, hi))``."""

    index: int
    lo: mpq
    hi: mpq
    level: int
    depth: int
    parent: int | None
    slot: int | None  # m such that this node is I_m^(2) of its parent
    first_piece: int = 0
    last_piece: int = 0
    children: list = field(default_factory=list)

    @property
    def length(self) -> mpq:
        return self.hi - self.lo

    def sub(self, m: int, k: int) -> tuple[mpq, mpq]:
        """``I_m``: the right-aligned subinterval of length ``3**-m |I|``."""
        return self.hi - self.length / 3**m, self.hi

    def tail(self, k: int) -> tuple[mpq, mpq] | None:
        if self.depth == 0:
            return None
        return self.hi - self.length / 3**k, self.hi


def build_w_nu(level: int, lo, hi, nu: int, params: WeightParams):
    """Construct the block with exponent ``level`` and depth ``nu`` on ``[lo, hi)``.

    Returns ``(fn, tags, tails, nodes)`` with the raw construction
    segmentation preserved.
    """
    lo, hi = mpq(lo), mpq(hi)
    if not lo < hi:
        raise ValueError("empty interval")
    if nu < 0:
        raise ValueError("nu must be >= 0")
    k = params.k
    edges: list = [lo]
    values: list = []
    tags: list = []
    tails: list = []
    nodes: list = []

    def emit(right, value, tag):
        edges.append(right)
        values.append(value)
        tags.append(tag)

    def rec(l, a, b, depth, parent, slot):
        node = Node(len(nodes), a, b, l, depth, parent, slot, first_piece=len(values))
        nodes.append(node)
        if parent is not None:
            nodes[parent].children.append(node.index)
        h = b - a
        if depth == 0:
            left, right = params.w0_values(l)
            emit(a + h / 2, left, RegionTag(W0_LEFT, l))
            emit(b, right, RegionTag(W0_RIGHT, l))
        else:
            plateau = params.plateau_value(l)
            for m in range(k - 1):
                third = h / 3 ** (m + 1)
                s = b - 3 * third
                emit(s + third, plateau, RegionTag(PLATEAU, l))
                rec(l + 1, s + third, s + 2 * third, depth - 1, node.index, m)
            third = h / 3**k
            emit(b - third, plateau, RegionTag(PLATEAU, l))
            emit(b, params.tail_value(l), RegionTag(TAIL, l))
            tails.append(TailRecord(b - third, b, l))
        node.last_piece = len(values)

    rec(level, lo, hi, nu, None, None)
    fn = PiecewiseFn._raw(tuple(edges), tuple(values), params.field)
    return fn, tuple(tags), tuple(tails), nodes


@dataclass
class ConstructedWeight:
    params: WeightParams
    w: PiecewiseFn
    tags: tuple
    tails: tuple
    nodes: list
    w_tilde: PiecewiseFn
    sigma: PiecewiseFn

    @property
    def periodic(self) -> PeriodicFn:
        return PeriodicFn(self.w)

    @property
    def periodic_sigma(self) -> PeriodicFn:
        return PeriodicFn(self.sigma)

    @property
    def periodic_w_tilde(self) -> PeriodicFn:
        return PeriodicFn(self.w_tilde)

    def __len__(self):
        return len(self.w)

    def node_fn(self, node: Node) -> PiecewiseFn:
        return self.w.restrict(node.lo, node.hi)

    def min_spacing(self) -> mpq:
        return min(self.w.lengths())

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "params": self.params.to_json(),
            "w": self.w.to_json(),
            "tags": [[t.kind, t.level] for t in self.tags],
            "tails": [
                {"lo": rational_to_str(r.lo), "hi": rational_to_str(r.hi), "level": r.level}
                for r in self.tails
            ],
            "w_tilde": self.w_tilde.to_json(),
            "sigma": self.sigma.to_json(),
        }

    @classmethod
    def from_json(cls, obj) -> ConstructedWeight:
        if obj.get("schema") != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema {obj.get('schema')!r}")
        params = WeightParams.from_json(obj["params"])
        w = PiecewiseFn.from_json(obj["w"])
        tags = tuple(RegionTag(kind, int(level)) for kind, level in obj["tags"])
        tails = tuple(
            TailRecord(mpq(r["lo"]), mpq(r["hi"]), int(r["level"])) for r in obj["tails"]
        )
        # node geometry depends only on the parameters
        _, _, _, nodes = build_w_nu(0, 0, 1, params.nu, params)
        return cls(
            params=params,
            w=w,
            tags=tags,
            tails=tails,
            nodes=nodes,
            w_tilde=PiecewiseFn.from_json(obj["w_tilde"]),
            sigma=PiecewiseFn.from_json(obj["sigma"]),
        )


def w_tilde_values(tags, field: QuadField) -> tuple:
    return tuple(field(mpq(2 ** (t.level + 1))) for t in tags)


def build_weight(params: WeightParams) -> ConstructedWeight:
    """The period-one weight built from ``w_nu(1, p, [0, 1))`` with ``w_tilde`` and ``sigma``."""
    w, tags, tails, nodes = build_w_nu(0, 0, 1, params.nu, params)
    w_tilde = PiecewiseFn._raw(w.edges, w_tilde_values(tags, params.field), params.field)
    return ConstructedWeight(
        params=params,
        w=w,
        tags=tags,
        tails=tails,
        nodes=nodes,
        w_tilde=w_tilde,
        sigma=w.reciprocal(),
    )


@dataclass(frozen=True)
class TailSet:
    level: int
    intervals: tuple  # (lo, hi) pairs, sorted
    halves: tuple  # concentric halves

    @property
    def measure(self) -> mpq:
        return sum((b - a for a, b in self.intervals), mpq(0))

    @property
    def half_measure(self) -> mpq:
        return sum((b - a for a, b in self.halves), mpq(0))


def tail_sets(cw: ConstructedWeight) -> dict[int, TailSet]:
    """Union of tail intervals per level, with their concentric halves."""
    out: dict = {}
    for level in range(cw.params.nu):
        recs = sorted((r for r in cw.tails if r.level == level), key=lambda r: r.lo)
        out[level] = TailSet(
            level,
            tuple((r.lo, r.hi) for r in recs),
            tuple(r.half() for r in recs),
        )
    return out


def expected_tail_measure(params: WeightParams, level: int) -> mpq:
    """Closed form ``(1/2 (1 - 3**(1-k)))**level * 3**-k``."""
    if not 0 <= level < params.nu:
        raise ValueError(f"level must lie in [0, {params.nu})")
    return (mpq(1, 2) * (1 - mpq(1, 3 ** (params.k - 1)))) ** level * params.eps


def running_average_sups(f: PiecewiseFn):
    """Exact ``sup`` of prefix and suffix running averages over ``0 < tau < |domain|``.

    On each piece the running average moves monotonically toward the piece
    value, so the supremum is the first piece value or an average ending at
    an edge.  Returns ``(prefix_sup, prefix_tau, suffix_sup, suffix_tau)``;
    ``tau == 0`` marks the small-tau limit.
    """
    e, v, P = f.edges, f.values, f.prefix
    lo, hi = e[0], e[-1]
    best, arg = v[0], mpq(0)
    for i in range(1, len(e)):
        avg = P[i] / (e[i] - lo)
        if avg > best:
            best, arg = avg, e[i] - lo
    sbest, sarg = v[-1], mpq(0)
    total = P[-1]
    for i in range(len(e) - 2, -1, -1):
        avg = (total - P[i]) / (hi - e[i])
        if avg > sbest:
            sbest, sarg = avg, hi - e[i]
    return best, arg, sbest, sarg


def prefix_suffix_sup(cw: ConstructedWeight, node: Node) -> tuple[QuadScalar, QuadScalar]:
    ps, _, ss, _ = running_average_sups(cw.node_fn(node))
    return ps, ss
