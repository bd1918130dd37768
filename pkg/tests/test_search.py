import numpy as np
import pytest

from comploc.boolfn import Domain, SizingError, named_function
from comploc.composition import verify_against
from comploc.constructions import build_hw, build_maj, build_parity
from comploc.search import (
    SearchBudget,
    candidate_pool,
    exact_cc,
    lower_bound_refinement,
)


class TestCandidatePool:
    def test_negation_and_constant_pruning(self):
        pool = candidate_pool(2, 1)
        # per singleton support only the identity survives
        assert [(c.support, c.table_bits) for c in pool] == [((1,), 2), ((2,), 2)]

    def test_tables_depend_on_whole_support(self):
        pool = candidate_pool(3, 2)
        for cand in pool:
            if len(cand.support) == 2:
                bits = cand.table_bits
                assert any((bits >> y) & 1 != (bits >> (y ^ 1)) & 1 for y in range(4))
                assert any((bits >> y) & 1 != (bits >> (y ^ 2)) & 1 for y in range(4))

    def test_deterministic_order(self):
        assert candidate_pool(4, 2) == candidate_pool(4, 2)


class TestRefinementFilter:
    def test_hw4_k2_m2_refuted(self):
        assert lower_bound_refinement(named_function("hw", 4), 2, 2) == "refuted"

    def test_construction_size_possible(self):
        for n, k in [(4, 2), (6, 2), (6, 3)]:
            m = build_hw(n, k).m
            assert lower_bound_refinement(named_function("hw", n), k, m) == "possible"

    def test_coverage_refutation(self):
        assert lower_bound_refinement(named_function("parity", 4), 2, 1) == "refuted"


class TestExactCC:
    def test_hw2_k1(self):
        r = exact_cc(named_function("hw", 2), 1)
        assert r.m_star == 2
        assert [g.support for g in r.witness.inners] == [(1,), (2,)]

    def test_parity4_k2(self):
        r = exact_cc(named_function("parity", 4), 2)
        assert r.m_star == 2

    def test_hw3_k2(self):
        r = exact_cc(named_function("hw", 3), 2)
        assert r.m_star == 3

    def test_maj4_k2_strict_gap(self):
        r = exact_cc(named_function("maj", 4), 2)
        assert r.m_star is not None and r.m_star > 2
        # golden value decided by this oracle (not a literature claim)
        assert r.m_star == 4

    def test_witness_soundness(self):
        for name, n, k in [("hw", 3, 2), ("maj", 4, 2), ("parity", 4, 2)]:
            f = named_function(name, n)
            r = exact_cc(f, k)
            assert verify_against(r.witness, f, Domain.full_cube(n)) is None
            assert all(len(g.support) <= k for g in r.witness.inners)

    def test_never_beats_construction(self):
        for name, builder, n, k in [
            ("hw", build_hw, 3, 2),
            ("maj", build_maj, 4, 2),
            ("parity", build_parity, 4, 2),
            ("parity", build_parity, 4, 1),
        ]:
            r = exact_cc(named_function(name, n), k)
            assert r.m_star <= builder(n, k).m

    def test_budget_exhaustion_is_inconclusive(self):
        budget = SearchBudget(m_max=4, node_limit=10, time_limit=60.0)
        r = exact_cc(named_function("maj", 4), 2, budget)
        assert r.status == "inconclusive"
        assert r.m_star is None
        assert r.proven_lower_bound >= 2

    def test_m_max_exhausted_reports_bound(self):
        budget = SearchBudget(m_max=3, node_limit=5_000_000, time_limit=60.0)
        r = exact_cc(named_function("maj", 4), 2, budget)
        assert r.status == "inconclusive"
        assert r.proven_lower_bound == 4  # every level through 3 exhausted

    def test_sizing_guards(self):
        with pytest.raises(SizingError):
            exact_cc(named_function("hw", 7), 2)
        with pytest.raises(SizingError):
            exact_cc(named_function("hw", 4), 4)

    def test_dependence_precondition(self):
        from comploc.boolfn import TruthTable

        lazy = TruthTable(2, 2, np.array([0, 1, 0, 1], dtype=np.uint8))  # ignores x2
        with pytest.raises(ValueError):
            exact_cc(lazy, 1)

    def test_deterministic_witness(self):
        a = exact_cc(named_function("hw", 3), 2)
        b = exact_cc(named_function("hw", 3), 2)
        assert a.witness.inners == b.witness.inners
        assert a.witness.outer.entries == b.witness.outer.entries
