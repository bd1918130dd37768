import math
from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest

from comploc.boolfn import Domain, named_function
from comploc.composition import Composition, LocalFunction, OuterFunction, induce_outer
from comploc.constructions import build_hw
from comploc.infoflow import (
    AnalysisPreconditionError,
    DiscreteDistribution,
    binary_entropy,
    check_counting_bound,
    check_key_lemma,
    conditional_entropy,
    entropy,
    extract_bias_witness,
    info_report,
    mutual_information,
    validate_information_facts,
)

from conftest import random_hw_composition

TOL = 1e-9


def identity_inners(coords):
    ident = np.array([0, 1], dtype=np.uint8)
    return [LocalFunction((i,), ident) for i in coords]


def hw_wrapper(n, inners, k):
    target = named_function("hw", n)
    outer = induce_outer(target, inners, Domain.full_cube(n), k=k)
    assert isinstance(outer, OuterFunction)
    return Composition(n=n, k=k, inners=tuple(inners), outer=outer)


class TestEntropies:
    def test_closed_forms(self):
        assert abs(entropy([0.5, 0.5]) - 1.0) <= 1e-12
        assert abs(entropy([0.25] * 4) - 2.0) <= 1e-12
        assert abs(entropy([1.0])) <= 1e-12

    def test_distribution_validation(self):
        with pytest.raises(ValueError):
            DiscreteDistribution(np.array([0.5, 0.6]))
        with pytest.raises(ValueError):
            DiscreteDistribution(np.array([1.5, -0.5]))

    def test_conditional_and_mutual(self):
        copy = np.array([[0.5, 0.0], [0.0, 0.5]])
        assert abs(conditional_entropy(copy)) <= 1e-12
        assert abs(mutual_information(copy) - 1.0) <= 1e-12
        indep = np.full((2, 2), 0.25)
        assert abs(mutual_information(indep)) <= 1e-12

    def test_binary_entropy(self):
        assert binary_entropy(0.5) == 1.0
        assert binary_entropy(0.0) == 0.0
        assert binary_entropy(1.0) == 0.0
        with pytest.raises(ValueError):
            binary_entropy(1.5)


class TestInfoReport:
    def test_baby_case_identity_inners(self):
        c = hw_wrapper(2, identity_inners([1, 2]), k=1)
        rep = info_report(c, Domain.full_cube(2))
        assert abs(rep.rows[0].mi - 1.0) <= TOL
        assert abs(rep.rows[1].mi - 1.0) <= TOL

    def test_hw_4_2_derived_value(self):
        rep = info_report(build_hw(4, 2), Domain.full_cube(4))
        assert abs(rep.rows[0].mi - 0.5) <= TOL

    def test_i_total_is_pattern_entropy_bounded_by_m(self):
        c = build_hw(4, 2)
        rep = info_report(c, Domain.full_cube(4))
        assert rep.i_total <= rep.m + TOL
        # recompute H[g(X)] straight from the pattern multiset
        counts = {}
        for x in range(16):
            counts[c.pattern_of(x)] = counts.get(c.pattern_of(x), 0) + 1
        h = -sum(v / 16 * math.log2(v / 16) for v in counts.values())
        assert abs(rep.i_total - h) <= TOL

    def test_escape_probabilities_on_band(self):
        c = build_hw(5, 2)
        band = Domain.weight_band(5, 2, 3)
        rep = info_report(c, band)
        # escape exactly: members of weight 2 with x_i=1 or weight 3 with x_i=0
        idx = band.indices()
        for row in rep.rows:
            bit = 1 << (row.var - 1)
            outside = sum(1 for x in idx if not band.contains(int(x) ^ bit))
            assert row.escape == Fraction(outside, len(idx))


class TestKeyLemma:
    def test_constructions_have_positive_gaps(self):
        for n, k in [(4, 2), (6, 3), (8, 2)]:
            c = build_hw(n, k)
            report = check_key_lemma(c, named_function("hw", n), Domain.full_cube(n))
            assert report.ok
            assert report.min_gap > TOL

    def test_q_one_gap_is_exactly_one(self):
        inners = identity_inners([1]) + [
            LocalFunction((2, 3), t)
            for t in (
                np.array([0, 1, 1, 0], dtype=np.uint8),
                np.array([0, 0, 0, 1], dtype=np.uint8),
            )
        ]
        c = hw_wrapper(3, inners, k=2)
        report = check_key_lemma(c, named_function("hw", 3), Domain.full_cube(3))
        rec = report.records[0]
        assert rec.q == 1
        assert abs(rec.gap - 1.0) <= TOL

    def test_every_variable_queried(self):
        c = build_hw(6, 3)
        report = check_key_lemma(c, named_function("hw", 6), Domain.full_cube(6))
        assert all(r.q >= 1 for r in report.records)

    def test_precondition_violation_raises(self):
        c = build_hw(4, 2)
        with pytest.raises(AnalysisPreconditionError):
            check_key_lemma(c, named_function("parity", 4), Domain.full_cube(4))

    def test_random_corpus(self, rng):
        for _ in range(15):
            c = random_hw_composition(rng)
            report = check_key_lemma(
                c, named_function("hw", c.n), Domain.full_cube(c.n)
            )
            assert report.ok, (c.n, c.k, report.records)


class TestCountingBound:
    def test_build_hw_first_block(self):
        report = check_counting_bound(build_hw(8, 4), [(1, 2, 3, 4)])
        assert report.ok  # 3 inners >= log2(5)

    def test_singletons(self, rng):
        c = random_hw_composition(rng, n=6)
        report = check_counting_bound(c, [(i,) for i in range(1, 7)])
        assert report.ok

    def test_all_pairs(self, rng):
        c = random_hw_composition(rng, n=6)
        report = check_counting_bound(c, list(combinations(range(1, 7), 2)))
        assert report.ok
        assert report.checked == 15

    def test_failure_detected(self):
        # parity-style inners cannot count: a fabricated composition object
        # with too-few inners on a pair must fail the bound
        inner = LocalFunction((1, 2), np.array([0, 1, 1, 0], dtype=np.uint8))
        outer = OuterFunction(m=1, codomain_size=3, entries={0: 0, 1: 1})
        c = Composition(n=2, k=2, inners=(inner,), outer=outer)
        report = check_counting_bound(c, [(1, 2)])
        assert not report.ok
        assert report.failures[0].touching == 1


class TestBiasWitness:
    def test_baby_case(self):
        c = hw_wrapper(2, identity_inners([1, 2]), k=1)
        w = extract_bias_witness(c, named_function("hw", 2), Domain.full_cube(2), 1)
        # the non-querying inner is g2 with output v; W_v = {v, v+1} and the
        # paired-flip sequence jumps at w = v, where x_1 is pinned to 0
        # (the weight v+1 side would pin it to 1: same information)
        assert w.nonquery_inners == (1,)
        assert w.w_v_size == 2
        assert w.w_star == w.v
        assert w.p_cond == 0
        assert abs(w.p_cond - Fraction(1, 2)) * w.mass == Fraction(1, 4)

    def test_hw_4_2(self):
        c = build_hw(4, 2)
        w = extract_bias_witness(c, named_function("hw", 4), Domain.full_cube(4), 1)
        assert w.w_v_size <= 1 << 2
        assert w.p_cond in (Fraction(0), Fraction(1))

    def test_w_v_bound_all_variables(self, rng):
        from comploc.composition import query_profile

        for _ in range(10):
            c = random_hw_composition(rng, n=5)
            q = query_profile(c).q
            for i in range(1, 6):
                w = extract_bias_witness(
                    c, named_function("hw", 5), Domain.full_cube(5), i
                )
                assert w.w_v_size <= 1 << q[i - 1]
                assert w.p_cond != Fraction(1, 2)
                assert w.mass > 0

    def test_band_domain(self):
        c = build_hw(6, 2)
        band = Domain.weight_band(6, 2, 4)
        w = extract_bias_witness(c, named_function("hw", 6), band, 3)
        assert w.mass > 0
        assert 2 <= w.w_star <= 4


class TestFacts:
    def test_thousand_trials(self):
        report = validate_information_facts(200, seed=11)
        assert report.ok
        assert report.checks >= 200 * 10

    def test_bad_trials(self):
        with pytest.raises(ValueError):
            validate_information_facts(0, seed=1)
