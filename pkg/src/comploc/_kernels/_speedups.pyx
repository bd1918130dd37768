# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the two hot loops: full-cube evaluation of the inner
functions, and the fiber-refinement feasibility test driving the exhaustive
search. Mirrors the contracts of ``comploc._kernels.pure``."""

import numpy as np

name = "compiled"


def inner_patterns(long long start, long long stop,
                   int[:] supp_flat, long long[:] supp_off,
                   unsigned char[:] tab_flat, long long[:] tab_off):
    cdef long long size = stop - start
    out = np.zeros(size, dtype=np.uint64)
    cdef unsigned long long[:] o = out
    cdef Py_ssize_t m = supp_off.shape[0] - 1
    cdef long long i, x
    cdef Py_ssize_t j, b, nsup
    cdef long long soff, toff
    cdef unsigned long long idx
    for j in range(m):
        soff = supp_off[j]
        toff = tab_off[j]
        nsup = supp_off[j + 1] - soff
        for i in range(size):
            x = start + i
            idx = 0
            for b in range(nsup):
                idx |= ((<unsigned long long> x >> supp_flat[soff + b]) & 1ULL) << b
            o[i] |= (<unsigned long long> tab_flat[toff + idx]) << j
    return out


def multiset_feasible(unsigned long long[:] columns, unsigned char[:] values,
                      int npoints, short[:] seen, long long[:] stamp,
                      long long tick):
    """True iff the joint map x -> (bit x of each column) refines `values`.

    `seen`/`stamp` are caller-owned scratch of length 2^m; `tick` must be
    fresh per call so the scratch never needs clearing.
    """
    cdef Py_ssize_t m = columns.shape[0]
    cdef int x
    cdef Py_ssize_t j
    cdef unsigned long long p
    for x in range(npoints):
        p = 0
        for j in range(m):
            p |= ((columns[j] >> x) & 1ULL) << j
        if stamp[p] == tick:
            if seen[p] != values[x]:
                return False
        else:
            stamp[p] = tick
            seen[p] = values[x]
    return True
