"""Block constructions for parity, Hamming weight, and majority.

Variables are split into consecutive blocks of size <= k; each block
contributes either its parity (one inner) or the binary digits of its sum
(ceil(log2(s+1)) inners, least-significant digit first).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .boolfn import _check_arity, popcount_table
from .composition import Composition, LocalFunction, OuterFunction


@dataclass(frozen=True)
class GroupSplit:
    """Partition of [n] into consecutive blocks of size <= k (last one smaller)."""

    groups: tuple[tuple[int, ...], ...]

    @classmethod
    def consecutive(cls, n: int, k: int) -> "GroupSplit":
        _check_arity(n)
        if not 1 <= k <= n:
            raise ValueError(f"block size k={k} not in 1..{n}")
        groups = tuple(
            tuple(range(lo, min(lo + k, n + 1))) for lo in range(1, n + 1, k)
        )
        return cls(groups)


def digit_count(s: int) -> int:
    """Bits needed for a block sum in 0..s, i.e. ceil(log2(s+1))."""
    return max(1, s.bit_length())


def _sum_digit_inners(block: tuple[int, ...]) -> list[LocalFunction]:
    s = len(block)
    pc = popcount_table(s)
    return [
        LocalFunction(block, (pc >> b) & 1) for b in range(digit_count(s))
    ]


def build_parity(n: int, k: int) -> Composition:
    """Parity as an XOR of per-block XORs; m = ceil(n/k)."""
    split = GroupSplit.consecutive(n, k)
    inners = tuple(
        LocalFunction(block, popcount_table(len(block)) & 1)
        for block in split.groups
    )
    m = len(inners)
    entries = {p: bin(p).count("1") & 1 for p in range(1 << m)}
    return Composition(
        n=n, k=k, inners=inners, outer=OuterFunction(m=m, codomain_size=2, entries=entries)
    )


def _digit_layout(split: GroupSplit) -> tuple[tuple[LocalFunction, ...], list[int]]:
    """Sum-digit inners for every block plus each block's bit offset."""
    inners: list[LocalFunction] = []
    offsets: list[int] = []
    for block in split.groups:
        offsets.append(len(inners))
        inners.extend(_sum_digit_inners(block))
    return tuple(inners), offsets


def _sum_outer_entries(split: GroupSplit, offsets: list[int]) -> dict[int, int]:
    """Map each reachable digit pattern to the total sum it encodes."""
    entries: dict[int, int] = {}
    sizes = [len(block) for block in split.groups]
    for sums in product(*(range(s + 1) for s in sizes)):
        pattern = 0
        for block_sum, offset in zip(sums, offsets):
            pattern |= block_sum << offset
        entries[pattern] = sum(sums)
    return entries


def build_hw(n: int, k: int) -> Composition:
    """Hamming weight via per-block sum digits; m = sum of ceil(log2(s+1))."""
    split = GroupSplit.consecutive(n, k)
    inners, offsets = _digit_layout(split)
    entries = _sum_outer_entries(split, offsets)
    return Composition(
        n=n,
        k=k,
        inners=inners,
        outer=OuterFunction(m=len(inners), codomain_size=n + 1, entries=entries),
    )


def build_maj(n: int, k: int) -> Composition:
    """Majority: the hw inners with the decoded sum thresholded at n/2 (tie -> 1)."""
    split = GroupSplit.consecutive(n, k)
    inners, offsets = _digit_layout(split)
    entries = {
        p: int(2 * total >= n) for p, total in _sum_outer_entries(split, offsets).items()
    }
    return Composition(
        n=n,
        k=k,
        inners=inners,
        outer=OuterFunction(m=len(inners), codomain_size=2, entries=entries),
    )
