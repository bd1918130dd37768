"""Lowering a binary-codomain composition to a depth-3 circuit.

Sigma3 (OR-AND-OR): one AND term per accepted inner-output vector, collecting
clause-form constraints that pin every inner to the vector's bits; bottom OR
clauses are deduplicated and shared across terms, which is what keeps the
gate count additive (2^m + m*2^k) instead of multiplicative. Pi3 is the dual.
Literals are signed 1-based variable indices; width-1 clauses are wired as
raw literals on the middle gates rather than materialized as gates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .boolfn import BitVector, SizingError
from .composition import Composition, LocalFunction

MAX_DEPTH3_N = 12
MAX_DEPTH3_M = 14

POLARITIES = ("sigma3", "pi3")


@dataclass(frozen=True)
class MiddleGate:
    """AND term (sigma3) or OR term (pi3): bottom-gate indices plus raw literals."""

    bottom: tuple[int, ...]
    literals: tuple[int, ...]


@dataclass(frozen=True)
class Depth3Circuit:
    polarity: str
    n: int
    bottom_fanin: int
    bottom: tuple[tuple[int, ...], ...]
    middle: tuple[MiddleGate, ...]
    top: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.polarity not in POLARITIES:
            raise ValueError(f"polarity {self.polarity!r} not in {POLARITIES}")


def depth3_size(circuit: Depth3Circuit) -> tuple[int, int, int]:
    """(gate count including the root, bottom fan-in, top fan-in)."""
    gate_count = len(circuit.bottom) + len(circuit.middle) + 1
    return gate_count, circuit.bottom_fanin, len(circuit.top)


def _row_clause(support: tuple[int, ...], row: int, falsify: bool) -> tuple[int, ...]:
    """Clause anchored at one support assignment.

    falsify=True: OR clause that is false exactly on the row (CNF building
    block). falsify=False: AND clause true exactly on the row (DNF minterm).
    """
    lits = []
    for b, var in enumerate(support):
        bit = (row >> b) & 1
        if falsify:
            lits.append(var if bit == 0 else -var)
        else:
            lits.append(var if bit == 1 else -var)
    return tuple(sorted(lits, key=lambda lit: (abs(lit), lit < 0)))


def _inner_clauses(g: LocalFunction, target: int, falsify: bool) -> list[tuple[int, ...]]:
    """Clauses expressing [g == target] for a nonempty support.

    falsify=True gives the CNF (one OR clause per wrong row); falsify=False
    gives the DNF minterms (one AND clause per matching row).
    """
    rows = np.flatnonzero(g.table != target) if falsify else np.flatnonzero(g.table == target)
    return [_row_clause(g.support, int(r), falsify) for r in rows]


def composition_to_depth3(c: Composition, polarity: str) -> Depth3Circuit:
    if polarity not in POLARITIES:
        raise ValueError(f"polarity {polarity!r} not in {POLARITIES}")
    if c.codomain_size != 2:
        raise ValueError("depth-3 lowering requires a binary codomain")
    if c.n > MAX_DEPTH3_N or c.m > MAX_DEPTH3_M:
        raise SizingError(
            f"lowering supports n <= {MAX_DEPTH3_N} and m <= {MAX_DEPTH3_M}, "
            f"got n={c.n}, m={c.m}"
        )
    sigma = polarity == "sigma3"
    # sigma3 keeps accepted vectors and pins inners via falsifying-row OR
    # clauses; pi3 keeps rejected vectors and uses matching-row AND minterms.
    pick_value = 1 if sigma else 0
    patterns = sorted(p for p, v in c.outer.entries.items() if v == pick_value)

    bottom_index: dict[tuple[int, ...], int] = {}
    middles: list[MiddleGate] = []
    for p in patterns:
        clauses: set[tuple[int, ...]] = set()
        dead = False
        for j, g in enumerate(c.inners):
            bit = (p >> j) & 1
            target = bit if sigma else 1 - bit
            if not g.support:
                # Constant inner: the whole term collapses when it contradicts
                # the target (sigma3: term false, drop from the OR) or
                # trivially satisfies it (pi3: term true, drop from the AND).
                const = int(g.table[0])
                if (const != target) if sigma else (const == target):
                    dead = True
                    break
                continue
            clauses.update(_inner_clauses(g, target, falsify=sigma))
        if dead:
            continue
        gate_refs: list[int] = []
        literals: list[int] = []
        for clause in sorted(clauses):
            if len(clause) == 1:
                literals.append(clause[0])
            else:
                idx = bottom_index.setdefault(clause, len(bottom_index))
                gate_refs.append(idx)
        middles.append(MiddleGate(bottom=tuple(sorted(gate_refs)), literals=tuple(literals)))

    bottom = tuple(sorted(bottom_index, key=bottom_index.get))
    fanin = max((len(cl) for cl in bottom), default=0)
    fanin = max(fanin, 1 if any(mg.literals for mg in middles) else 0)
    return Depth3Circuit(
        polarity=polarity,
        n=c.n,
        bottom_fanin=fanin,
        bottom=bottom,
        middle=tuple(middles),
        top=tuple(range(len(middles))),
    )


def _literal_holds(lit: int, x: int) -> bool:
    bit = (x >> (abs(lit) - 1)) & 1
    return bit == (1 if lit > 0 else 0)


def depth3_evaluate(circuit: Depth3Circuit, x: BitVector | int) -> int:
    v = x.value if isinstance(x, BitVector) else int(x)
    sigma = circuit.polarity == "sigma3"

    def clause_value(clause: tuple[int, ...]) -> bool:
        hits = (_literal_holds(lit, v) for lit in clause)
        return any(hits) if sigma else all(hits)

    def middle_value(mg: MiddleGate) -> bool:
        parts = [clause_value(circuit.bottom[i]) for i in mg.bottom]
        parts += [_literal_holds(lit, v) for lit in mg.literals]
        return all(parts) if sigma else any(parts)

    outs = (middle_value(circuit.middle[i]) for i in circuit.top)
    return int(any(outs)) if sigma else int(all(outs))


def depth3_cube(circuit: Depth3Circuit) -> np.ndarray:
    """Circuit output on every input of the cube, as a uint8 array."""
    size = 1 << circuit.n
    x = np.arange(size, dtype=np.int64)
    sigma = circuit.polarity == "sigma3"

    def lit_col(lit: int) -> np.ndarray:
        col = ((x >> (abs(lit) - 1)) & 1).astype(bool)
        return col if lit > 0 else ~col

    bottom_cols = []
    for clause in circuit.bottom:
        cols = [lit_col(lit) for lit in clause]
        acc = np.zeros(size, dtype=bool) if sigma else np.ones(size, dtype=bool)
        for col in cols:
            acc = (acc | col) if sigma else (acc & col)
        bottom_cols.append(acc)

    out = np.zeros(size, dtype=bool) if sigma else np.ones(size, dtype=bool)
    for mg in circuit.middle:
        acc = np.ones(size, dtype=bool) if sigma else np.zeros(size, dtype=bool)
        for i in mg.bottom:
            acc = (acc & bottom_cols[i]) if sigma else (acc | bottom_cols[i])
        for lit in mg.literals:
            acc = (acc & lit_col(lit)) if sigma else (acc | lit_col(lit))
        out = (out | acc) if sigma else (out & acc)
    return out.astype(np.uint8)


def negate_composition(c: Composition) -> Composition:
    """Same inners, output bit flipped (binary codomain only)."""
    if c.codomain_size != 2:
        raise ValueError("can only negate a binary-codomain composition")
    from .composition import OuterFunction

    flipped = {p: 1 - v for p, v in c.outer.entries.items()}
    return Composition(
        n=c.n,
        k=c.k,
        inners=c.inners,
        outer=OuterFunction(m=c.m, codomain_size=2, entries=flipped),
    )
