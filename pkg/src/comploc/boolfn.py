"""Explicit boolean and multi-output functions on the hypercube.

Conventions shared by every module: coordinates are 1-based, and coordinate 1
is the least-significant bit of the integer encoding of an input.  Bit strings
are displayed with coordinate 1 leftmost.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping

import numpy as np

MAX_N = 24


class SizingError(ValueError):
    """Requested arity is outside the exhaustively enumerable range."""


def _check_arity(n: int) -> None:
    if not 1 <= n <= MAX_N:
        raise SizingError(f"arity n={n} not in 1..{MAX_N}")


@lru_cache(maxsize=None)
def popcount_table(n: int) -> np.ndarray:
    """Hamming weight of every x < 2**n, as a read-only uint8 array."""
    table = np.zeros(1, dtype=np.uint8)
    for _ in range(n):
        table = np.concatenate([table, table + 1])
    table.flags.writeable = False
    return table


@dataclass(frozen=True)
class BitVector:
    """An element of {0,1}^n, packed into an int (coordinate 1 = bit 0)."""

    n: int
    value: int

    def __post_init__(self) -> None:
        _check_arity(self.n)
        if not 0 <= self.value < (1 << self.n):
            raise ValueError(f"value {self.value} not representable on {self.n} bits")

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "BitVector":
        bits = list(bits)
        value = 0
        for i, b in enumerate(bits):
            if b not in (0, 1):
                raise ValueError(f"bit {b!r} is not 0/1")
            value |= b << i
        return cls(len(bits), value)

    @classmethod
    def from_string(cls, s: str) -> "BitVector":
        """Parse a 0/1 string with coordinate 1 leftmost."""
        return cls.from_bits(int(c) for c in s)

    def bit(self, i: int) -> int:
        self._check_coord(i)
        return (self.value >> (i - 1)) & 1

    def bits(self) -> tuple[int, ...]:
        return tuple((self.value >> i) & 1 for i in range(self.n))

    def _check_coord(self, i: int) -> None:
        if not 1 <= i <= self.n:
            raise ValueError(f"coordinate {i} out of range 1..{self.n}")

    def __str__(self) -> str:
        return "".join(str(b) for b in self.bits())


def flip_bit(x: BitVector, i: int) -> BitVector:
    """x with coordinate i flipped."""
    x._check_coord(i)
    return BitVector(x.n, x.value ^ (1 << (i - 1)))


def set_bit(x: BitVector, i: int, b: int) -> BitVector:
    """x with coordinate i forced to b."""
    x._check_coord(i)
    if b not in (0, 1):
        raise ValueError(f"bit {b!r} is not 0/1")
    mask = 1 << (i - 1)
    return BitVector(x.n, (x.value & ~mask) | (b * mask))


def hamming_weight(x: BitVector) -> int:
    """Number of 1-coordinates of x."""
    return bin(x.value).count("1")


def complement(x: BitVector) -> BitVector:
    return BitVector(x.n, x.value ^ ((1 << x.n) - 1))


@dataclass(frozen=True)
class TruthTable:
    """A function {0,1}^n -> {0,...,codomain_size-1}, stored exhaustively.

    values[v] is the output on the input whose integer encoding is v.
    """

    n: int
    codomain_size: int
    values: np.ndarray

    def __post_init__(self) -> None:
        _check_arity(self.n)
        if self.codomain_size < 2:
            raise ValueError("codomain_size must be >= 2")
        values = np.asarray(self.values, dtype=np.uint16)
        if values.shape != (1 << self.n,):
            raise ValueError(
                f"values must have length 2^{self.n}, got {values.shape}"
            )
        if values.size and int(values.max()) >= self.codomain_size:
            raise ValueError("table entry outside the codomain")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    def evaluate(self, x: BitVector | int) -> int:
        v = x.value if isinstance(x, BitVector) else int(x)
        return int(self.values[v])

    def depends_on(self, i: int) -> bool:
        """Whether flipping coordinate i can ever change the output."""
        if not 1 <= i <= self.n:
            raise ValueError(f"coordinate {i} out of range 1..{self.n}")
        idx = np.arange(1 << self.n)
        return bool(np.any(self.values != self.values[idx ^ (1 << (i - 1))]))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TruthTable):
            return NotImplemented
        return (
            self.n == other.n
            and self.codomain_size == other.codomain_size
            and np.array_equal(self.values, other.values)
        )

    def __hash__(self) -> int:  # frozen dataclass would otherwise try the array
        return hash((self.n, self.codomain_size, self.values.tobytes()))


def named_function(name: str, n: int) -> TruthTable:
    """One of the stock targets: parity, full Hamming weight, or majority.

    Majority maps the tie |x| = n/2 to 1.
    """
    _check_arity(n)
    pc = popcount_table(n)
    if name == "parity":
        return TruthTable(n, 2, pc & 1)
    if name == "hw":
        return TruthTable(n, n + 1, pc)
    if name == "maj":
        return TruthTable(n, 2, (2 * pc.astype(np.int32) >= n).astype(np.uint8))
    raise ValueError(f"unknown function name {name!r} (expected parity|hw|maj)")


def embed_indices(n: int, coords: tuple[int, ...], base: int) -> np.ndarray:
    """Integer encodings of all inputs obtained by writing every assignment of
    `coords` (in sorted order, low coordinate = low bit) on top of `base`."""
    size = 1 << len(coords)
    y = np.arange(size, dtype=np.int64)
    x = np.full(size, base, dtype=np.int64)
    for pos, c in enumerate(coords):
        x |= ((y >> pos) & 1) << (c - 1)
    return x


def restrict(f: TruthTable, coords: Iterable[int], fixing: Mapping[int, int]) -> TruthTable:
    """Subfunction of f on `coords`, with all other coordinates fixed.

    The kept coordinates keep their relative order; the codomain is unchanged.
    """
    kept = tuple(sorted(set(coords)))
    if not kept:
        raise ValueError("coordinate set must be nonempty")
    for c in kept:
        if not 1 <= c <= f.n:
            raise ValueError(f"coordinate {c} out of range 1..{f.n}")
    expected = set(range(1, f.n + 1)) - set(kept)
    if set(fixing) != expected:
        raise ValueError(
            f"fixing must cover exactly the complement {sorted(expected)}, "
            f"got {sorted(fixing)}"
        )
    base = 0
    for c, b in fixing.items():
        if b not in (0, 1):
            raise ValueError(f"fixing bit {b!r} is not 0/1")
        base |= b << (c - 1)
    idx = embed_indices(f.n, kept, base)
    return TruthTable(len(kept), f.codomain_size, f.values[idx])


@dataclass(frozen=True)
class Domain:
    """A nonempty subset of {0,1}^n, as a membership mask over all 2^n points."""

    n: int
    mask: np.ndarray

    def __post_init__(self) -> None:
        _check_arity(self.n)
        mask = np.asarray(self.mask, dtype=bool)
        if mask.shape != (1 << self.n,):
            raise ValueError(f"mask must have length 2^{self.n}")
        if not mask.any():
            raise ValueError("domain must be nonempty")
        mask.flags.writeable = False
        object.__setattr__(self, "mask", mask)

    @classmethod
    def full_cube(cls, n: int) -> "Domain":
        return cls(n, np.ones(1 << n, dtype=bool))

    @classmethod
    def weight_band(cls, n: int, lo: int, hi: int) -> "Domain":
        """All inputs whose Hamming weight lies in [lo, hi]."""
        if not 0 <= lo <= hi <= n:
            raise ValueError(f"weight band [{lo},{hi}] not within 0..{n}")
        pc = popcount_table(n)
        return cls(n, (pc >= lo) & (pc <= hi))

    @property
    def size(self) -> int:
        return int(self.mask.sum())

    def indices(self) -> np.ndarray:
        """Member encodings in ascending order."""
        return np.flatnonzero(self.mask)

    def contains(self, x: BitVector | int) -> bool:
        v = x.value if isinstance(x, BitVector) else int(x)
        return bool(self.mask[v])

    def is_full(self) -> bool:
        return bool(self.mask.all())
