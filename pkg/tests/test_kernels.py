import numpy as np
import pytest

from comploc._kernels import backend_name, pure

try:
    from comploc._kernels import _speedups
except ImportError:
    _speedups = None

from comploc.boolfn import Domain, named_function
from comploc.composition import Composition, verify_against
from comploc.constructions import build_hw, build_maj

from conftest import random_binary_composition

needs_compiled = pytest.mark.skipif(_speedups is None, reason="compiled kernels not built")


def kernel_args(c: Composition):
    return c._kernel_args


class TestBackendAgreement:
    @needs_compiled
    def test_inner_patterns_match(self, rng):
        for _ in range(10):
            c = random_binary_composition(rng, n=int(rng.integers(2, 10)))
            supp_flat, supp_off, tab_flat, tab_off = kernel_args(c)
            size = 1 << c.n
            a = pure.inner_patterns(0, size, supp_flat, supp_off, tab_flat, tab_off)
            b = _speedups.inner_patterns(0, size, supp_flat, supp_off, tab_flat, tab_off)
            assert np.array_equal(a, b)

    @needs_compiled
    def test_inner_patterns_ranges(self):
        c = build_hw(8, 3)
        supp_flat, supp_off, tab_flat, tab_off = kernel_args(c)
        full = _speedups.inner_patterns(0, 256, supp_flat, supp_off, tab_flat, tab_off)
        lo = _speedups.inner_patterns(13, 77, supp_flat, supp_off, tab_flat, tab_off)
        assert np.array_equal(full[13:77], lo)

    @needs_compiled
    def test_feasibility_checkers_match(self, rng):
        from comploc._kernels import _CompiledFeasibilityChecker

        n = 4
        f = named_function("maj", n)
        values = np.ascontiguousarray(f.values, dtype=np.uint8)
        fast = _CompiledFeasibilityChecker(values, 1 << n, m_max=6)
        slow = pure.FeasibilityChecker(values, 1 << n, m_max=6)
        for _ in range(200):
            m = int(rng.integers(1, 5))
            cols = [int(v) for v in rng.integers(0, 1 << (1 << n), size=m, dtype=np.uint64)]
            assert fast.feasible(cols) == slow.feasible(cols)

    def test_patterns_match_scalar_evaluation(self, rng):
        c = random_binary_composition(rng, n=6)
        pats = c.cube_patterns
        for x in range(64):
            assert int(pats[x]) == c.pattern_of(x)


class TestThreading:
    def test_thread_count_parsing(self, monkeypatch):
        from comploc.composition import thread_count

        monkeypatch.delenv("COMPLOC_THREADS", raising=False)
        assert thread_count() == 1
        monkeypatch.setenv("COMPLOC_THREADS", "4")
        assert thread_count() == 4
        monkeypatch.setenv("COMPLOC_THREADS", "bogus")
        assert thread_count() == 1

    def test_chunked_evaluation_is_identical(self, monkeypatch):
        # n=17 crosses the chunking threshold, so threads actually engage
        reference = build_maj(17, 2).cube_patterns.copy()
        monkeypatch.setenv("COMPLOC_THREADS", "3")
        threaded = build_maj(17, 2).cube_patterns
        assert np.array_equal(reference, threaded)

    def test_verify_under_threads(self, monkeypatch):
        monkeypatch.setenv("COMPLOC_THREADS", "2")
        c = build_hw(12, 4)
        assert verify_against(c, named_function("hw", 12), Domain.full_cube(12)) is None


class TestBackendSelection:
    def test_backend_reports_a_name(self):
        assert backend_name() in ("pure", "compiled")
