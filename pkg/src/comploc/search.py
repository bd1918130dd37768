"""Exhaustive exact-CC oracle for tiny instances.

Enumerates multisets of candidate inner functions in a canonical order
(supports by size then lexicographic, tables ascending) with symmetry
pruning: constant tables, tables not depending on their whole support, and
one representative per negation pair (the outer map absorbs negations) are
all skipped, duplicates never appear, and prefixes that cannot cover all
variables are cut. Feasibility of a full multiset is a fiber-refinement
check run by the kernel backend.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np

from . import _kernels
from .boolfn import Domain, SizingError, TruthTable, popcount_table
from .composition import (
    Composition,
    LocalFunction,
    OuterFunction,
    induce_outer,
    verify_against,
)

SEARCH_MAX_N = 6
SEARCH_MAX_K = 3


@dataclass(frozen=True)
class SearchBudget:
    m_max: int = 8
    node_limit: int = 5_000_000
    time_limit: float = 60.0

    def __post_init__(self) -> None:
        if self.m_max < 1 or self.m_max > 20:
            raise ValueError("m_max must be in 1..20")
        if self.node_limit < 1 or self.time_limit <= 0:
            raise ValueError("budgets must be positive")


@dataclass(frozen=True)
class Candidate:
    support: tuple[int, ...]
    table_bits: int  # bit y = value on the support assignment encoded by y
    column: int  # bit x = value on full-cube input x
    var_mask: int  # 0-based variable bitmask

    def to_local_function(self) -> LocalFunction:
        size = 1 << len(self.support)
        table = np.fromiter(
            (((self.table_bits >> y) & 1) for y in range(size)), dtype=np.uint8, count=size
        )
        return LocalFunction(self.support, table)


def _depends_on_all(table_bits: int, size_log: int) -> bool:
    size = 1 << size_log
    for pos in range(size_log):
        step = 1 << pos
        if all(
            ((table_bits >> y) & 1) == ((table_bits >> (y ^ step)) & 1)
            for y in range(size)
        ):
            return False
    return True


def _column_of(n: int, support: tuple[int, ...], table_bits: int) -> int:
    col = 0
    for x in range(1 << n):
        idx = 0
        for b, c in enumerate(support):
            idx |= ((x >> (c - 1)) & 1) << b
        col |= ((table_bits >> idx) & 1) << x
    return col


def candidate_pool(n: int, k: int) -> list[Candidate]:
    """All canonical inner candidates, in the deterministic search order."""
    pool: list[Candidate] = []
    for size in range(1, k + 1):
        for support in combinations(range(1, n + 1), size):
            var_mask = 0
            for c in support:
                var_mask |= 1 << (c - 1)
            for table_bits in range(1 << (1 << size)):
                if table_bits & 1:
                    continue  # negation representative: 0 on the all-zeros row
                if table_bits == 0:
                    continue  # constant
                if not _depends_on_all(table_bits, size):
                    continue  # same function appears with a smaller support
                pool.append(
                    Candidate(
                        support=support,
                        table_bits=table_bits,
                        column=_column_of(n, support, table_bits),
                        var_mask=var_mask,
                    )
                )
    return pool


def is_hamming_weight(f: TruthTable) -> bool:
    return np.array_equal(f.values, popcount_table(f.n))


def lower_bound_refinement(f: TruthTable, k: int, m: int) -> str:
    """Fast necessary-condition filter: "refuted" means no m-inner composition
    can exist, "possible" means the filter cannot rule it out.

    Always applies the coverage bound m*k >= n; for the Hamming weight target
    it adds the subset-counting bound (every r-set must be touched by at least
    log2(r+1) inners) averaged over all r-sets.
    """
    n = f.n
    if m < 1 or m * k < n:
        return "refuted"
    if is_hamming_weight(f):
        for r in range(1, n + 1):
            per_set = r.bit_length()  # ceil(log2(r+1))
            touch_max = comb(n, r) - comb(max(n - k, 0), r)
            needed = -(-comb(n, r) * per_set // touch_max)
            if m < needed:
                return "refuted"
    return "possible"


@dataclass(frozen=True)
class ExactCCResult:
    status: str  # "found" | "inconclusive"
    m_star: int | None
    witness: Composition | None
    proven_lower_bound: int  # CC_k(f) >= this, by exhaustion/refutation
    nodes: int
    elapsed: float


class _BudgetExceeded(Exception):
    pass


class _Searcher:
    def __init__(self, f: TruthTable, k: int, budget: SearchBudget) -> None:
        self.f = f
        self.k = k
        self.budget = budget
        self.n = f.n
        self.full_mask = (1 << f.n) - 1
        self.pool = candidate_pool(f.n, k)
        self.suffix_mask = [0] * (len(self.pool) + 1)
        for i in range(len(self.pool) - 1, -1, -1):
            self.suffix_mask[i] = self.suffix_mask[i + 1] | self.pool[i].var_mask
        self.checker = _kernels.feasibility_checker(
            np.ascontiguousarray(f.values, dtype=np.uint8), 1 << f.n, budget.m_max
        )
        self.nodes = 0
        self.start = time.monotonic()

    def _tick(self) -> None:
        self.nodes += 1
        if self.nodes > self.budget.node_limit:
            raise _BudgetExceeded
        if self.nodes % 1024 == 0 and time.monotonic() - self.start > self.budget.time_limit:
            raise _BudgetExceeded

    def find_at(self, m: int) -> list[Candidate] | None:
        """First feasible m-combination in lexicographic pool order, or None."""
        chosen: list[Candidate] = []
        columns: list[int] = []

        def dfs(start_idx: int, cover: int) -> list[Candidate] | None:
            self._tick()
            depth_left = m - len(chosen)
            if depth_left == 0:
                if cover == self.full_mask and self.checker.feasible(columns):
                    return list(chosen)
                return None
            missing = self.full_mask & ~cover
            if bin(missing).count("1") > depth_left * self.k:
                return None
            if missing & ~(cover | self.suffix_mask[start_idx]):
                return None
            for idx in range(start_idx, len(self.pool) - depth_left + 1):
                cand = self.pool[idx]
                chosen.append(cand)
                columns.append(cand.column)
                got = dfs(idx + 1, cover | cand.var_mask)
                chosen.pop()
                columns.pop()
                if got is not None:
                    return got
            return None

        return dfs(0, 0)


def exact_cc(f: TruthTable, k: int, budget: SearchBudget | None = None) -> ExactCCResult:
    """Least m such that f is a composition of m k-local inners, by exhaustion.

    Iterates m upward from ceil(n/k); every level below the answer is either
    refuted by lower_bound_refinement or exhausted, so the reported
    proven_lower_bound never has a silent gap. The witness is the
    lexicographically least feasible multiset, assembled and re-verified.
    """
    budget = budget or SearchBudget()
    if f.n > SEARCH_MAX_N:
        raise SizingError(f"search supports n <= {SEARCH_MAX_N}, got {f.n}")
    if not 1 <= k <= SEARCH_MAX_K:
        raise SizingError(f"search supports k in 1..{SEARCH_MAX_K}, got {k}")
    for i in range(1, f.n + 1):
        if not f.depends_on(i):
            raise ValueError(f"target does not depend on variable {i}")

    searcher = _Searcher(f, k, budget)
    m_start = -(-f.n // k)  # coverage: every variable must be queried
    proven = m_start
    try:
        for m in range(m_start, budget.m_max + 1):
            if lower_bound_refinement(f, k, m) == "refuted":
                proven = m + 1
                continue
            found = searcher.find_at(m)
            if found is None:
                proven = m + 1
                continue
            inners = tuple(cand.to_local_function() for cand in found)
            outer = induce_outer(f, inners, Domain.full_cube(f.n), k=k)
            if not isinstance(outer, OuterFunction):
                raise AssertionError("feasibility check and outer induction disagree")
            witness = Composition(n=f.n, k=k, inners=inners, outer=outer)
            if verify_against(witness, f, Domain.full_cube(f.n)) is not None:
                raise AssertionError("witness failed re-verification")
            return ExactCCResult(
                status="found",
                m_star=m,
                witness=witness,
                proven_lower_bound=m,
                nodes=searcher.nodes,
                elapsed=time.monotonic() - searcher.start,
            )
    except _BudgetExceeded:
        pass
    return ExactCCResult(
        status="inconclusive",
        m_star=None,
        witness=None,
        proven_lower_bound=proven,
        nodes=searcher.nodes,
        elapsed=time.monotonic() - searcher.start,
    )
