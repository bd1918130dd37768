"""Bounded-width layered branching programs and their reduction to compositions.

A program of width w and length L reads one variable per layer and threads a
state in {0,...,w-1} through per-layer transition maps. Cutting the layers
into segments of at most k layers turns it into a composition: for each
segment and each possible entry state, ceil(log2 w) inner functions encode
the exit state in binary, and the outer function chains the decoded segment
maps from the start state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .boolfn import BitVector, TruthTable, _check_arity
from .composition import Composition, LocalFunction, OuterFunction


@dataclass(frozen=True)
class Layer:
    var: int
    delta0: tuple[int, ...]
    delta1: tuple[int, ...]


@dataclass(frozen=True)
class BranchingProgram:
    n: int
    width: int
    layers: tuple[Layer, ...]
    start: int
    accept: frozenset[int]

    def __post_init__(self) -> None:
        _check_arity(self.n)
        if self.width < 2:
            raise ValueError("width must be >= 2")
        if not self.layers:
            raise ValueError("program must have at least one layer")
        for t, layer in enumerate(self.layers, start=1):
            if not 1 <= layer.var <= self.n:
                raise ValueError(f"layer {t} reads variable {layer.var} outside 1..{self.n}")
            for delta in (layer.delta0, layer.delta1):
                if len(delta) != self.width:
                    raise ValueError(f"layer {t} transition map must have {self.width} entries")
                if any(not 0 <= s < self.width for s in delta):
                    raise ValueError(f"layer {t} transition leaves the state set")
        if not 0 <= self.start < self.width:
            raise ValueError("start state outside the state set")
        if any(not 0 <= s < self.width for s in self.accept):
            raise ValueError("accept state outside the state set")
        object.__setattr__(self, "accept", frozenset(self.accept))

    @property
    def length(self) -> int:
        return len(self.layers)


def bp_evaluate(bp: BranchingProgram, x: BitVector | int) -> int:
    v = x.value if isinstance(x, BitVector) else int(x)
    state = bp.start
    for layer in bp.layers:
        bit = (v >> (layer.var - 1)) & 1
        state = (layer.delta1 if bit else layer.delta0)[state]
    return int(state in bp.accept)


def bp_truth_table(bp: BranchingProgram) -> TruthTable:
    """Exhaustive 0/1 table of the program, vectorized over the cube."""
    size = 1 << bp.n
    x = np.arange(size, dtype=np.int64)
    state = np.full(size, bp.start, dtype=np.int64)
    for layer in bp.layers:
        bit = (x >> (layer.var - 1)) & 1
        d0 = np.asarray(layer.delta0, dtype=np.int64)
        d1 = np.asarray(layer.delta1, dtype=np.int64)
        state = np.where(bit == 1, d1[state], d0[state])
    accept = np.zeros(bp.width, dtype=np.uint8)
    for s in bp.accept:
        accept[s] = 1
    return TruthTable(bp.n, 2, accept[state])


def parity_program(n: int) -> BranchingProgram:
    """Width-2 program: layer i reads x_i, a 1 swaps the state; accept {1}."""
    layers = tuple(Layer(var=i, delta0=(0, 1), delta1=(1, 0)) for i in range(1, n + 1))
    return BranchingProgram(n=n, width=2, layers=layers, start=0, accept=frozenset({1}))


def mod_counter_program(n: int, modulus: int, accept_residues: frozenset[int] | set[int]) -> BranchingProgram:
    """Width-`modulus` counter of ones, accepting the given residues of |x|."""
    ident = tuple(range(modulus))
    step = tuple((s + 1) % modulus for s in range(modulus))
    layers = tuple(Layer(var=i, delta0=ident, delta1=step) for i in range(1, n + 1))
    return BranchingProgram(
        n=n, width=modulus, layers=layers, start=0, accept=frozenset(accept_residues)
    )


def _segment_end_states(
    bp: BranchingProgram, segment: tuple[Layer, ...], sigma: int, support: tuple[int, ...]
) -> np.ndarray:
    """Exit state from entry state sigma, for every assignment of the support."""
    size = 1 << len(support)
    pos = {c: b for b, c in enumerate(support)}
    y = np.arange(size, dtype=np.int64)
    state = np.full(size, sigma, dtype=np.int64)
    for layer in segment:
        bit = (y >> pos[layer.var]) & 1
        d0 = np.asarray(layer.delta0, dtype=np.int64)
        d1 = np.asarray(layer.delta1, dtype=np.int64)
        state = np.where(bit == 1, d1[state], d0[state])
    return state


def bp_to_composition(bp: BranchingProgram, k: int) -> Composition:
    """Cut into ceil(L/k) segments of <= k layers; emit, per segment and entry
    state, the binary digits of the exit state; m = ceil(L/k)*w*ceil(log2 w).

    The outer function chains the decoded per-segment maps from the start
    state and tests acceptance, so it is defined exactly on the reachable
    inner-output vectors.
    """
    if k < 1:
        raise ValueError("segment length bound k must be >= 1")
    w = bp.width
    bits = max(1, (w - 1).bit_length())  # ceil(log2 w)
    segments = [
        tuple(bp.layers[lo : lo + k]) for lo in range(0, bp.length, k)
    ]
    inners: list[LocalFunction] = []
    for segment in segments:
        support = tuple(sorted({layer.var for layer in segment}))
        for sigma in range(w):
            end = _segment_end_states(bp, segment, sigma, support)
            for b in range(bits):
                inners.append(LocalFunction(support, ((end >> b) & 1).astype(np.uint8)))

    per_segment = w * bits

    def chain(pattern: int) -> int:
        state = bp.start
        for si in range(len(segments)):
            base = si * per_segment + state * bits
            state = (pattern >> base) & ((1 << bits) - 1)
        return int(state in bp.accept)

    probe = Composition(
        n=bp.n,
        k=max(k, 1),
        inners=tuple(inners),
        outer=OuterFunction(m=len(inners), codomain_size=2, entries={}),
    )
    reachable = np.unique(probe.cube_patterns)
    entries = {int(p): chain(int(p)) for p in reachable}
    return Composition(
        n=bp.n,
        k=k,
        inners=tuple(inners),
        outer=OuterFunction(m=len(inners), codomain_size=2, entries=entries),
    )
