"""Kernel backend selection.

The compiled Cython extension is preferred when importable; otherwise the
numpy/pure-Python fallback is used. Set COMPLOC_BACKEND=pure|compiled to
force a choice (forcing `compiled` raises if the extension is missing).
"""

from __future__ import annotations

import os

import numpy as np

from . import pure

try:
    from . import _speedups
except ImportError:  # extension not built on this install
    _speedups = None

_forced = os.environ.get("COMPLOC_BACKEND")
if _forced == "pure":
    _impl = pure
elif _forced == "compiled":
    if _speedups is None:
        raise ImportError(
            "COMPLOC_BACKEND=compiled but the comploc._kernels._speedups "
            "extension is not built"
        )
    _impl = _speedups
elif _forced is None:
    _impl = _speedups if _speedups is not None else pure
else:
    raise ValueError(f"COMPLOC_BACKEND={_forced!r} (expected pure or compiled)")


def backend_name() -> str:
    return _impl.name


def inner_patterns(start, stop, supp_flat, supp_off, tab_flat, tab_off):
    return _impl.inner_patterns(start, stop, supp_flat, supp_off, tab_flat, tab_off)


class _CompiledFeasibilityChecker:
    def __init__(self, values: np.ndarray, npoints: int, m_max: int) -> None:
        self.values = np.ascontiguousarray(values, dtype=np.uint8)
        self.npoints = npoints
        self._seen = np.zeros(1 << m_max, dtype=np.int16)
        self._stamp = np.full(1 << m_max, -1, dtype=np.int64)
        self._colbuf = np.zeros(m_max, dtype=np.uint64)
        self._tick = 0

    def feasible(self, columns: list[int]) -> bool:
        self._tick += 1
        m = len(columns)
        self._colbuf[:m] = columns
        return _speedups.multiset_feasible(
            self._colbuf[:m], self.values, self.npoints, self._seen, self._stamp, self._tick
        )


def feasibility_checker(values: np.ndarray, npoints: int, m_max: int):
    """Checker for repeated fiber-refinement tests on one target."""
    if _impl is pure:
        return pure.FeasibilityChecker(values, npoints, m_max)
    return _CompiledFeasibilityChecker(values, npoints, m_max)
