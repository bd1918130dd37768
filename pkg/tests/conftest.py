"""Shared generators for the test corpus."""

from __future__ import annotations

import numpy as np
import pytest

from comploc.boolfn import Domain, named_function, popcount_table
from comploc.composition import Composition, LocalFunction, OuterFunction, induce_outer


def random_hw_composition(rng: np.random.Generator, n: int | None = None, k: int | None = None) -> Composition:
    """A random feasible Hamming-weight composition.

    Variables are shuffled into blocks of size <= k whose (possibly negated)
    sum digits always refine the weight; optional extra random inners only
    refine further, so outer induction is guaranteed to succeed.
    """
    n = n if n is not None else int(rng.integers(2, 9))
    k = k if k is not None else int(rng.integers(1, min(n, 4) + 1))
    perm = [int(v) for v in rng.permutation(np.arange(1, n + 1))]
    blocks = []
    i = 0
    while i < n:
        size = int(rng.integers(1, k + 1))
        blocks.append(tuple(sorted(perm[i : i + size])))
        i += size
    inners: list[LocalFunction] = []
    for block in blocks:
        s = len(block)
        pc = popcount_table(s)
        for b in range(max(1, s.bit_length())):
            digits = ((pc >> b) & 1).astype(np.uint8)
            if rng.random() < 0.5:
                digits = (1 - digits).astype(np.uint8)
            inners.append(LocalFunction(block, digits))
    for _ in range(int(rng.integers(0, 3))):
        size = int(rng.integers(1, k + 1))
        support = tuple(
            sorted(int(v) for v in rng.choice(np.arange(1, n + 1), size=size, replace=False))
        )
        table = rng.integers(0, 2, size=1 << size).astype(np.uint8)
        inners.append(LocalFunction(support, table))
    order = rng.permutation(len(inners))
    inners = [inners[int(i)] for i in order]
    target = named_function("hw", n)
    outer = induce_outer(target, inners, Domain.full_cube(n), k=k)
    assert isinstance(outer, OuterFunction), "generator produced an infeasible corpus entry"
    return Composition(n=n, k=k, inners=tuple(inners), outer=outer)


def random_binary_composition(
    rng: np.random.Generator, n: int | None = None, k: int | None = None, m: int | None = None
) -> Composition:
    """A random composition with a binary codomain, total on reachable patterns."""
    n = n if n is not None else int(rng.integers(2, 9))
    k = k if k is not None else int(rng.integers(1, min(n, 4) + 1))
    m = m if m is not None else int(rng.integers(1, 11))
    inners = []
    for _ in range(m):
        size = int(rng.integers(1, k + 1))
        support = tuple(
            sorted(int(v) for v in rng.choice(np.arange(1, n + 1), size=size, replace=False))
        )
        table = rng.integers(0, 2, size=1 << size).astype(np.uint8)
        inners.append(LocalFunction(support, table))
    probe = Composition(
        n=n, k=k, inners=tuple(inners), outer=OuterFunction(m=m, codomain_size=2, entries={})
    )
    reachable = np.unique(probe.cube_patterns)
    entries = {int(p): int(rng.integers(0, 2)) for p in reachable}
    return Composition(
        n=n, k=k, inners=tuple(inners), outer=OuterFunction(m=m, codomain_size=2, entries=entries)
    )


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240811)
