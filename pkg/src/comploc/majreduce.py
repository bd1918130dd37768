"""From a majority composition to a Hamming-weight composition on a band.

Control variables are replayed over all weights to squeeze a multi-valued
weight readout from the binary majority output; buffer variables isolate the
controls so no inner function straddles the free and control sets. The free
parameter t is the control-set size; s = floor(t/2) plays the role of the
band half-width.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .boolfn import Domain, named_function
from .composition import (
    Composition,
    OuterFunction,
    RestrictionError,
    _restrict_inner,
)
from .infoflow import InfoReport, KeyLemmaReport, check_key_lemma, info_report


class InfeasibleReductionError(ValueError):
    """The reduction cannot be instantiated at this control size."""


@dataclass(frozen=True)
class VariableSplit:
    """Disjoint free/buffer/control coordinate sets covering [n].

    No inner function of the source composition touches both i_free and
    i_control; inners touching the controls have support inside
    i_buffer | i_control.
    """

    i_free: tuple[int, ...]
    i_buffer: tuple[int, ...]
    i_control: tuple[int, ...]
    t: int
    n_free: int


def _closure_size(supports: list[set[int]], control: set[int]) -> int:
    touched = set(control)
    for supp in supports:
        if supp & control:
            touched |= supp
    return len(touched)


def split_variables(c: Composition, t: int) -> VariableSplit:
    """Pick t control variables greedily (ascending index, minimizing the
    closure of inners that touch them), pad the closure to 2t+1 variables,
    and split the rest into buffer and free sets.

    Raises InfeasibleReductionError when the closure exceeds n/2.
    """
    if t < 1:
        raise ValueError("control size t must be >= 1")
    if t > c.n:
        raise ValueError(f"control size t={t} exceeds n={c.n}")
    supports = [set(g.support) for g in c.inners]
    control: set[int] = set()
    for _ in range(t):
        candidates = [v for v in range(1, c.n + 1) if v not in control]
        best = min(candidates, key=lambda v: (_closure_size(supports, control | {v}), v))
        control.add(best)
    closure = set(control)
    for supp in supports:
        if supp & control:
            closure |= supp
    for v in range(1, c.n + 1):
        if len(closure) >= 2 * t + 1:
            break
        closure.add(v)
    if 2 * len(closure) > c.n:
        raise InfeasibleReductionError(
            f"closure of the control set has {len(closure)} variables > n/2 = {c.n / 2}"
        )
    i_control = tuple(sorted(control))
    i_buffer = tuple(sorted(closure - control))
    i_free = tuple(sorted(set(range(1, c.n + 1)) - closure))
    split = VariableSplit(
        i_free=i_free, i_buffer=i_buffer, i_control=i_control, t=t, n_free=len(i_free)
    )
    free_set, control_set = set(i_free), set(i_control)
    for j, supp in enumerate(supports):
        if supp & free_set and supp & control_set:
            raise AssertionError(f"inner {j + 1} straddles the free and control sets")
    return split


@dataclass(frozen=True)
class PartialHW:
    """A composition computing |x| on a weight band of the free variables."""

    composition: Composition
    band: tuple[int, int]
    buffer_assignment: tuple[tuple[int, int], ...]  # (coordinate, bit) pairs
    buffer_weight: int
    split: VariableSplit

    @property
    def domain(self) -> Domain:
        return Domain.weight_band(self.composition.n, self.band[0], self.band[1])


def _weighted_assignment(coords: tuple[int, ...], weight: int, style: str) -> int:
    picked = coords[:weight] if style == "lowest" else coords[len(coords) - weight :]
    base = 0
    for v in picked:
        base |= 1 << (v - 1)
    return base


def derive_partial_hw(
    c: Composition, split: VariableSplit, control_style: str = "lowest"
) -> PartialHW:
    """Fix the buffer, replay every control weight through the source outer,
    and decode the clamped weight of the free variables.

    The derived outer maps each reachable free-inner pattern to |x_free|,
    clamped to [mid-s-1, mid+s] where mid = ceil(n_free/2), s = floor(t/2).
    Correctness on the band relies only on majority depending on total weight,
    so any same-weight control assignment yields identical outputs
    (control_style picks lowest- or highest-index coordinates).
    """
    if control_style not in ("lowest", "highest"):
        raise ValueError(f"control_style {control_style!r} not lowest|highest")
    t = split.t
    s = t // 2
    n_free = split.n_free
    mid = (n_free + 1) // 2  # ceil(n_free/2)
    b = (c.n + 1) // 2 - mid - s
    if not 0 <= b <= len(split.i_buffer):
        raise InfeasibleReductionError(
            f"buffer weight {b} not realizable on {len(split.i_buffer)} buffer variables"
        )
    lo, hi = mid - s - 1, mid + s
    if lo < 0 or hi > n_free:
        raise InfeasibleReductionError(
            f"band [{lo},{hi}] leaves 0..{n_free}; t={t} too large for n_free={n_free}"
        )
    buffer_base = _weighted_assignment(split.i_buffer, b, "lowest")

    free_set = set(split.i_free)
    kept = [j for j, g in enumerate(c.inners) if set(g.support) & free_set]
    dropped = sorted(set(range(c.m)) - set(kept))
    derived_inners = tuple(
        _restrict_inner(c.inners[j], split.i_free, buffer_base) for j in kept
    )

    # inners not touching the free set depend only on buffer+control: their
    # outputs under each control weight are constants we can fold in
    const_bits = []
    for cwt in range(t + 1):
        x_const = buffer_base | _weighted_assignment(split.i_control, cwt, control_style)
        bits = 0
        for j in dropped:
            bits |= c.inners[j].evaluate(x_const) << j
        const_bits.append(bits)

    probe = Composition(
        n=n_free,
        k=c.k,
        inners=derived_inners,
        outer=OuterFunction(m=len(derived_inners), codomain_size=2, entries={}),
    )
    reachable = np.unique(probe.cube_patterns)
    entries: dict[int, int] = {}
    for p in reachable:
        p = int(p)
        c_star = t + 1
        for cwt in range(t + 1):
            merged = const_bits[cwt]
            for pos, j in enumerate(kept):
                merged |= ((p >> pos) & 1) << j
            if merged not in c.outer.entries:
                raise RestrictionError(
                    "source composition undefined on a replayed inner-output vector"
                )
            if c.outer.entries[merged] == 1:
                c_star = cwt
                break
        value = min(max(mid + s - c_star, lo), hi)
        entries[p] = value
    outer = OuterFunction(m=len(derived_inners), codomain_size=n_free + 1, entries=entries)
    derived = Composition(n=n_free, k=c.k, inners=derived_inners, outer=outer)
    assignment = tuple(
        (v, (buffer_base >> (v - 1)) & 1) for v in split.i_buffer
    )
    return PartialHW(
        composition=derived,
        band=(lo, hi),
        buffer_assignment=assignment,
        buffer_weight=b,
        split=split,
    )


@dataclass(frozen=True)
class PipelineReport:
    """Everything the reduction certifies at once, on the derived band."""

    partial: PartialHW
    info: InfoReport
    lemma: KeyLemmaReport
    m_derived: int
    n_free_minus_log_domain: float
    gap_sum: float
    escape_bound: Fraction  # 2/(t+2), the replayed-control escape target

    @property
    def max_escape(self) -> Fraction:
        return max(row.escape for row in self.info.rows)


def end_to_end_pipeline(c: Composition, t: int) -> PipelineReport:
    """split -> derive -> exact information analysis on the band."""
    split = split_variables(c, t)
    partial = derive_partial_hw(c, split)
    domain = partial.domain
    target = named_function("hw", partial.composition.n)
    lemma = check_key_lemma(partial.composition, target, domain)
    info = info_report(partial.composition, domain)
    return PipelineReport(
        partial=partial,
        info=info,
        lemma=lemma,
        m_derived=partial.composition.m,
        n_free_minus_log_domain=split.n_free - math.log2(domain.size),
        gap_sum=sum(r.gap for r in lemma.records),
        escape_bound=Fraction(2, t + 2),
    )
