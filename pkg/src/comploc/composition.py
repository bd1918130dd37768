"""Compositions f = h(g_1,...,g_m) with k-local inner functions.

The inner functions are explicit truth tables over declared supports; the
outer function is a partial map defined only on inner-output vectors that are
actually reachable. "Lexicographically least" witnesses throughout mean least
integer encoding (coordinate 1 = least-significant bit).
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping

import numpy as np

from . import _kernels
from .boolfn import (
    BitVector,
    Domain,
    SizingError,
    TruthTable,
    _check_arity,
    embed_indices,
)

MAX_VECTOR_M = 64  # patterns are packed into uint64 for bulk evaluation


class UnmappedPatternError(LookupError):
    """The outer function was queried on an inner-output vector it does not map."""

    def __init__(self, x: int | None, pattern: int, m: int) -> None:
        self.x = x
        self.pattern = pattern
        self.m = m
        where = f" at input {x}" if x is not None else ""
        super().__init__(
            f"outer function undefined on inner-output vector "
            f"{pattern_string(pattern, m)}{where}"
        )


def pattern_string(pattern: int, m: int) -> str:
    """Render an m-bit inner-output vector, inner 1 leftmost."""
    return "".join(str((pattern >> j) & 1) for j in range(m))


def thread_count() -> int:
    """Worker cap from COMPLOC_THREADS (default 1 = sequential)."""
    raw = os.environ.get("COMPLOC_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


@dataclass(frozen=True)
class LocalFunction:
    """A boolean function depending only on the coordinates in `support`.

    The table is indexed by the packed values of the support coordinates
    in sorted order (lowest coordinate = bit 0 of the index). An empty
    support (a constant) only arises from restrictions.
    """

    support: tuple[int, ...]
    table: np.ndarray

    def __post_init__(self) -> None:
        support = tuple(int(v) for v in self.support)
        if any(b >= a for a, b in zip(support[1:], support)):
            raise ValueError(f"support {support} must be strictly increasing")
        if support and support[0] < 1:
            raise ValueError(f"support {support} has coordinates below 1")
        table = np.asarray(self.table, dtype=np.uint8)
        if table.shape != (1 << len(support),):
            raise ValueError(
                f"table must have length 2^{len(support)}, got {table.shape}"
            )
        if table.size and int(table.max()) > 1:
            raise ValueError("inner-function tables must be 0/1 valued")
        table.flags.writeable = False
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "table", table)

    @classmethod
    def from_values(cls, support: Iterable[int], values: Iterable[int]) -> "LocalFunction":
        return cls(tuple(support), np.fromiter(values, dtype=np.uint8))

    def evaluate(self, x: BitVector | int) -> int:
        v = x.value if isinstance(x, BitVector) else int(x)
        idx = 0
        for b, c in enumerate(self.support):
            idx |= ((v >> (c - 1)) & 1) << b
        return int(self.table[idx])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LocalFunction):
            return NotImplemented
        return self.support == other.support and np.array_equal(self.table, other.table)

    def __hash__(self) -> int:
        return hash((self.support, self.table.tobytes()))


@dataclass(frozen=True)
class OuterFunction:
    """Partial map from reachable m-bit inner-output vectors to output values.

    Unmapped vectors are a hard error on lookup, never a default.
    """

    m: int
    codomain_size: int
    entries: Mapping[int, int]

    def __post_init__(self) -> None:
        if self.m < 0:
            raise ValueError("m must be nonnegative")
        if self.codomain_size < 2:
            raise ValueError("codomain_size must be >= 2")
        entries = dict(self.entries)
        limit = 1 << self.m
        for key, val in entries.items():
            if not 0 <= key < limit:
                raise ValueError(f"outer key {key} is not an {self.m}-bit vector")
            if not 0 <= val < self.codomain_size:
                raise ValueError(f"outer value {val} outside the codomain")
        object.__setattr__(self, "entries", entries)

    def evaluate(self, pattern: int, x: int | None = None) -> int:
        try:
            return self.entries[pattern]
        except KeyError:
            raise UnmappedPatternError(x, pattern, self.m) from None

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, OuterFunction):
            return NotImplemented
        return (
            self.m == other.m
            and self.codomain_size == other.codomain_size
            and self.entries == other.entries
        )


@dataclass(frozen=True)
class Composition:
    """f = h(g_1,...,g_m) on n variables with every inner support of size <= k."""

    n: int
    k: int
    inners: tuple[LocalFunction, ...]
    outer: OuterFunction

    def __post_init__(self) -> None:
        _check_arity(self.n)
        if self.k < 1:
            raise ValueError("locality bound k must be >= 1")
        inners = tuple(self.inners)
        for j, g in enumerate(inners):
            if len(g.support) > self.k:
                raise ValueError(
                    f"inner {j + 1} has support size {len(g.support)} > k={self.k}"
                )
            if g.support and g.support[-1] > self.n:
                raise ValueError(f"inner {j + 1} support exceeds n={self.n}")
        if self.outer.m != len(inners):
            raise ValueError(
                f"outer expects {self.outer.m} inners, composition has {len(inners)}"
            )
        object.__setattr__(self, "inners", inners)

    @property
    def m(self) -> int:
        return len(self.inners)

    @property
    def codomain_size(self) -> int:
        return self.outer.codomain_size

    def pattern_of(self, x: BitVector | int) -> int:
        v = x.value if isinstance(x, BitVector) else int(x)
        pattern = 0
        for j, g in enumerate(self.inners):
            pattern |= g.evaluate(v) << j
        return pattern

    def evaluate(self, x: BitVector | int) -> int:
        v = x.value if isinstance(x, BitVector) else int(x)
        return self.outer.evaluate(self.pattern_of(v), x=v)

    @cached_property
    def _kernel_args(self):
        supp_flat = np.fromiter(
            (c - 1 for g in self.inners for c in g.support), dtype=np.int32
        )
        supp_off = np.zeros(self.m + 1, dtype=np.int64)
        tab_off = np.zeros(self.m + 1, dtype=np.int64)
        for j, g in enumerate(self.inners):
            supp_off[j + 1] = supp_off[j] + len(g.support)
            tab_off[j + 1] = tab_off[j] + len(g.table)
        tab_flat = (
            np.concatenate([g.table for g in self.inners])
            if self.inners
            else np.zeros(0, dtype=np.uint8)
        )
        return supp_flat, supp_off, np.ascontiguousarray(tab_flat), tab_off

    @cached_property
    def cube_patterns(self) -> np.ndarray:
        """Inner-output pattern of every input, as a uint64 array of length 2^n."""
        if self.m > MAX_VECTOR_M:
            raise SizingError(
                f"bulk evaluation supports m <= {MAX_VECTOR_M}, composition has m={self.m}"
            )
        size = 1 << self.n
        supp_flat, supp_off, tab_flat, tab_off = self._kernel_args
        workers = thread_count()
        if workers == 1 or size < (1 << 16):
            return _kernels.inner_patterns(0, size, supp_flat, supp_off, tab_flat, tab_off)
        chunk = -(-size // workers)
        ranges = [(lo, min(lo + chunk, size)) for lo in range(0, size, chunk)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(
                pool.map(
                    lambda r: _kernels.inner_patterns(
                        r[0], r[1], supp_flat, supp_off, tab_flat, tab_off
                    ),
                    ranges,
                )
            )
        return np.concatenate(parts)


@dataclass(frozen=True)
class QueryProfile:
    """Per-variable query counts q_i and the overhead ratio m*k/n."""

    q: tuple[int, ...]
    q_max: int
    overhead: Fraction


def query_profile(c: Composition) -> QueryProfile:
    counts = [0] * c.n
    for g in c.inners:
        for v in g.support:
            counts[v - 1] += 1
    q = tuple(counts)
    return QueryProfile(q=q, q_max=max(q), overhead=Fraction(c.m * c.k, c.n))


@dataclass(frozen=True)
class Counterexample:
    """Least input where the composition disagrees with (or is undefined on) the target."""

    x: BitVector
    expected: int
    actual: int | None

    def __str__(self) -> str:
        got = "undefined" if self.actual is None else str(self.actual)
        return f"counterexample x={self.x} expected={self.expected} got={got}"


def _outer_values_on(c: Composition, patterns: np.ndarray) -> np.ndarray:
    """Outer value of each unique pattern (-1 where unmapped)."""
    entries = c.outer.entries
    return np.fromiter(
        (entries.get(int(p), -1) for p in patterns), dtype=np.int64, count=len(patterns)
    )


def verify_against(c: Composition, f: TruthTable, domain: Domain) -> Counterexample | None:
    """None iff evaluate(c, x) == f(x) for every x in the domain.

    An undefined outer lookup inside the domain is itself a counterexample.
    """
    if f.n != c.n or domain.n != c.n:
        raise ValueError(
            f"arity mismatch: composition n={c.n}, target n={f.n}, domain n={domain.n}"
        )
    idx = domain.indices()
    pats = c.cube_patterns[idx]
    uniq, inverse = np.unique(pats, return_inverse=True)
    got = _outer_values_on(c, uniq)[inverse]
    want = f.values[idx].astype(np.int64)
    bad = np.flatnonzero(got != want)
    if bad.size == 0:
        return None
    i = int(bad[0])  # idx ascending, so this is the least encoding
    actual = int(got[i])
    return Counterexample(
        x=BitVector(c.n, int(idx[i])),
        expected=int(want[i]),
        actual=None if actual < 0 else actual,
    )


@dataclass(frozen=True)
class ConflictWitness:
    """Pair with equal inner outputs but different target values: no outer exists."""

    x: BitVector
    y: BitVector
    fx: int
    fy: int

    def __str__(self) -> str:
        return (
            f"conflict: inputs {self.x} and {self.y} share all inner outputs "
            f"but target values differ ({self.fx} vs {self.fy})"
        )


def induce_outer(
    f: TruthTable, inners: Iterable[LocalFunction], domain: Domain, k: int | None = None
) -> OuterFunction | ConflictWitness:
    """The unique minimal partial outer map, if the inners refine f on the domain.

    Returns the least ConflictWitness (min x, then min y) otherwise.
    """
    inners = tuple(inners)
    k_eff = k if k is not None else max((len(g.support) for g in inners), default=1)
    probe = Composition(
        n=f.n,
        k=max(1, k_eff),
        inners=inners,
        outer=OuterFunction(m=len(inners), codomain_size=max(2, f.codomain_size), entries={}),
    )
    idx = domain.indices()
    pats = probe.cube_patterns[idx]
    vals = f.values[idx]
    uniq, first, inverse = np.unique(pats, return_index=True, return_inverse=True)
    rep_vals = vals[first]
    bad = np.flatnonzero(vals != rep_vals[inverse])
    if bad.size:
        # least x over conflicting fibers, then least y in that fiber
        groups: dict[int, int] = {}
        for pos in bad:
            g = int(inverse[pos])
            groups.setdefault(g, int(pos))
        g_best = min(groups, key=lambda g: idx[first[g]])
        x = int(idx[first[g_best]])
        y = int(idx[groups[g_best]])
        return ConflictWitness(
            x=BitVector(f.n, x),
            y=BitVector(f.n, y),
            fx=int(f.values[x]),
            fy=int(f.values[y]),
        )
    entries = {int(p): int(v) for p, v in zip(uniq, rep_vals)}
    return OuterFunction(m=len(inners), codomain_size=f.codomain_size, entries=entries)


class RestrictionError(ValueError):
    """Restricting hit an input on which the source composition is undefined."""


def _restrict_inner(g: LocalFunction, kept: tuple[int, ...], base: int) -> LocalFunction:
    """Restrict g to the coordinates in `kept` (renumbered by rank), with the
    dropped support coordinates read from `base`."""
    kept_set = set(kept)
    rank = {c: r + 1 for r, c in enumerate(kept)}
    new_support = tuple(rank[c] for c in g.support if c in kept_set)
    size = 1 << len(new_support)
    table = np.zeros(size, dtype=np.uint8)
    for y in range(size):
        idx = 0
        b_new = 0
        for b, c in enumerate(g.support):
            if c in kept_set:
                bit = (y >> b_new) & 1
                b_new += 1
            else:
                bit = (base >> (c - 1)) & 1
            idx |= bit << b
        table[y] = g.table[idx]
    return LocalFunction(new_support, table)


def restrict_composition(
    c: Composition, coords: Iterable[int], fixing: Mapping[int, int]
) -> Composition:
    """Composition on the kept coordinates with the rest fixed.

    Every inner is kept (restricted to its surviving support, possibly
    becoming a constant); the outer is re-induced as the minimal partial map
    over patterns reachable from the restricted cube.
    """
    kept = tuple(sorted(set(coords)))
    if not kept:
        raise ValueError("coordinate set must be nonempty")
    expected = set(range(1, c.n + 1)) - set(kept)
    if set(fixing) != expected:
        raise ValueError(
            f"fixing must cover exactly the complement {sorted(expected)}, "
            f"got {sorted(fixing)}"
        )
    base = 0
    for coord, b in fixing.items():
        if b not in (0, 1):
            raise ValueError(f"fixing bit {b!r} is not 0/1")
        base |= b << (coord - 1)

    new_inners = tuple(_restrict_inner(g, kept, base) for g in c.inners)
    embedded = embed_indices(c.n, kept, base)
    source_patterns = np.unique(c.cube_patterns[embedded])
    entries: dict[int, int] = {}
    for p in source_patterns:
        p = int(p)
        if p not in c.outer.entries:
            raise RestrictionError(
                f"source composition undefined on reachable inner-output vector "
                f"{pattern_string(p, c.m)} under this restriction"
            )
        entries[p] = c.outer.entries[p]
    outer = OuterFunction(m=c.m, codomain_size=c.codomain_size, entries=entries)
    return Composition(n=len(kept), k=c.k, inners=new_inners, outer=outer)


class InfeasibleRestrictionError(ValueError):
    """The requested fixing weight cannot be realized."""


def low_query_restriction(c: Composition, family: str) -> Composition:
    """Halve the arity, keeping the least-queried variables.

    For a composition computing the family member on 2n variables, selects the
    n variables with the lowest query counts (ties to the lower index), fixes
    the rest (zeros for hw; weight floor(n/2) for maj, which shifts the
    majority threshold to the ceil(n/2) of the target), and restricts. Every
    surviving variable is queried at most floor(m*k/n) times.
    """
    if family not in ("hw", "maj"):
        raise ValueError(f"family {family!r} not supported (expected hw|maj)")
    if c.n % 2 != 0:
        raise ValueError(f"source arity n={c.n} must be even")
    half = c.n // 2
    q = query_profile(c).q
    order = sorted(range(1, c.n + 1), key=lambda v: (q[v - 1], v))
    kept = tuple(sorted(order[:half]))
    dropped = sorted(set(range(1, c.n + 1)) - set(kept))
    if family == "hw":
        fixing = {v: 0 for v in dropped}
    else:
        weight = half - (half + 1) // 2  # floor(half/2): threshold shift for maj
        if not 0 <= weight <= len(dropped):
            raise InfeasibleRestrictionError(
                f"cannot place fixing weight {weight} on {len(dropped)} dropped variables"
            )
        fixing = {v: (1 if i < weight else 0) for i, v in enumerate(dropped)}
    return restrict_composition(c, kept, fixing)
