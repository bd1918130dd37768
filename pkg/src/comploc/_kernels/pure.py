"""Fallback kernels used when the compiled extension is unavailable.

Same contracts as ``_speedups``: see ``comploc._kernels`` for the dispatch.
"""

from __future__ import annotations

import numpy as np

name = "pure"


def inner_patterns(
    start: int,
    stop: int,
    supp_flat: np.ndarray,
    supp_off: np.ndarray,
    tab_flat: np.ndarray,
    tab_off: np.ndarray,
) -> np.ndarray:
    """Inner-output patterns for every input encoding in [start, stop).

    Bit j of the result is the output of inner j; supports hold 0-based bit
    positions in ascending order, matching the table index convention.
    """
    m = len(supp_off) - 1
    x = np.arange(start, stop, dtype=np.uint64)
    out = np.zeros(stop - start, dtype=np.uint64)
    for j in range(m):
        positions = supp_flat[supp_off[j] : supp_off[j + 1]]
        idx = np.zeros(stop - start, dtype=np.int64)
        for b, pos in enumerate(positions):
            idx |= (((x >> np.uint64(pos)) & np.uint64(1)) << b).astype(np.int64)
        table = tab_flat[tab_off[j] : tab_off[j + 1]]
        out |= table[idx].astype(np.uint64) << np.uint64(j)
    return out


class FeasibilityChecker:
    """Repeated fiber-refinement checks against one fixed target.

    ``columns[j]`` is the full-cube truth table of candidate inner j packed
    into an int (bit x = output on input x); feasible means every fiber of
    the joint inner-output map is constant on the target.
    """

    def __init__(self, values: np.ndarray, npoints: int, m_max: int) -> None:
        self.values = [int(v) for v in values]
        self.npoints = npoints

    def feasible(self, columns: list[int]) -> bool:
        seen: dict[int, int] = {}
        values = self.values
        for x in range(self.npoints):
            p = 0
            for j, col in enumerate(columns):
                p |= ((col >> x) & 1) << j
            v = seen.setdefault(p, values[x])
            if v != values[x]:
                return False
        return True
