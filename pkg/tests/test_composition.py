import numpy as np
import pytest

from comploc.boolfn import BitVector, Domain, flip_bit, named_function
from comploc.composition import (
    Composition,
    ConflictWitness,
    LocalFunction,
    OuterFunction,
    UnmappedPatternError,
    induce_outer,
    low_query_restriction,
    query_profile,
    restrict_composition,
    verify_against,
)
from comploc.constructions import build_hw, build_maj, build_parity

from conftest import random_hw_composition


def wrap_table(table):
    """m=1, k=n composition wrapping a binary truth table."""
    n = table.n
    inner = LocalFunction(tuple(range(1, n + 1)), table.values.astype(np.uint8))
    outer = OuterFunction(m=1, codomain_size=2, entries={0: 0, 1: 1})
    return Composition(n=n, k=n, inners=(inner,), outer=outer)


class TestEvaluate:
    def test_parity_composition(self):
        c = build_parity(4, 2)
        assert c.evaluate(BitVector.from_string("1101")) == 1

    def test_hw_composition(self):
        c = build_hw(4, 2)
        assert c.evaluate(BitVector.from_string("1111")) == 4

    def test_identity_wrapper(self):
        c = wrap_table(named_function("maj", 3))
        assert c.evaluate(BitVector.from_string("110")) == 1

    def test_unmapped_pattern_is_hard_error(self):
        inner = LocalFunction((1,), np.array([0, 1], dtype=np.uint8))
        outer = OuterFunction(m=1, codomain_size=2, entries={0: 0})
        c = Composition(n=1, k=1, inners=(inner,), outer=outer)
        with pytest.raises(UnmappedPatternError):
            c.evaluate(1)


class TestVerify:
    def test_construction_passes(self):
        c = build_parity(8, 4)
        assert verify_against(c, named_function("parity", 8), Domain.full_cube(8)) is None

    def test_counterexample_is_least_encoding(self):
        c = build_parity(8, 2)
        cx = verify_against(c, named_function("maj", 8), Domain.full_cube(8))
        assert cx is not None
        # first disagreement scanning encodings upward: the single-one input x1=1
        assert cx.x == BitVector(8, 1)
        assert cx.expected == 0 and cx.actual == 1

    def test_partial_band_verification(self):
        # hw composition restricted attention to a band still passes
        c = build_hw(6, 2)
        band = Domain.weight_band(6, 2, 4)
        assert verify_against(c, named_function("hw", 6), band) is None

    def test_undefined_inside_domain_is_counterexample(self):
        inner = LocalFunction((1,), np.array([0, 1], dtype=np.uint8))
        outer = OuterFunction(m=1, codomain_size=2, entries={0: 0})
        c = Composition(n=1, k=1, inners=(inner,), outer=outer)
        cx = verify_against(c, named_function("parity", 1), Domain.full_cube(1))
        assert cx is not None and cx.actual is None and cx.x.value == 1


class TestQueryProfile:
    def test_parity_disjoint(self):
        p = query_profile(build_parity(8, 4))
        assert p.q == (1,) * 8
        assert p.overhead == 1

    def test_hw_profile(self):
        p = query_profile(build_hw(8, 4))
        assert p.q == (3,) * 8
        assert p.overhead == 3
        assert p.q_max == 3

    def test_wrapper_profile(self):
        c = wrap_table(named_function("maj", 3))
        p = query_profile(c)
        assert p.q == (1, 1, 1)
        assert p.overhead == 1

    def test_sum_matches_support_sizes(self, rng):
        from fractions import Fraction

        for _ in range(10):
            c = random_hw_composition(rng)
            p = query_profile(c)
            assert sum(p.q) == sum(len(g.support) for g in c.inners)
            assert Fraction(sum(p.q), c.n) <= p.overhead


class TestInduceOuter:
    def test_hw2_identity_inners(self):
        target = named_function("hw", 2)
        inners = [
            LocalFunction((1,), np.array([0, 1], dtype=np.uint8)),
            LocalFunction((2,), np.array([0, 1], dtype=np.uint8)),
        ]
        outer = induce_outer(target, inners, Domain.full_cube(2))
        assert isinstance(outer, OuterFunction)
        assert outer.entries == {0b00: 0, 0b01: 1, 0b10: 1, 0b11: 2}

    def test_conflict_witness_hw3(self):
        target = named_function("hw", 3)
        and12 = LocalFunction((1, 2), np.array([0, 0, 0, 1], dtype=np.uint8))
        and23 = LocalFunction((2, 3), np.array([0, 0, 0, 1], dtype=np.uint8))
        witness = induce_outer(target, [and12, and23], Domain.full_cube(3))
        assert isinstance(witness, ConflictWitness)
        assert witness.x == BitVector.from_string("000")
        assert witness.y == BitVector.from_string("100")

    def test_conflict_witness_maj4(self):
        target = named_function("maj", 4)
        inners = [
            LocalFunction((1, 2), np.array([0, 1, 0, 1], dtype=np.uint8)),  # x1
            LocalFunction((3, 4), np.array([0, 1, 0, 1], dtype=np.uint8)),  # x3
        ]
        witness = induce_outer(target, inners, Domain.full_cube(4))
        assert isinstance(witness, ConflictWitness)

    def test_soundness(self, rng):
        # whenever an outer map comes back, the assembled composition verifies
        target = named_function("hw", 5)
        c = random_hw_composition(rng, n=5, k=2)
        outer = induce_outer(target, c.inners, Domain.full_cube(5), k=2)
        assert isinstance(outer, OuterFunction)
        rebuilt = Composition(n=5, k=2, inners=c.inners, outer=outer)
        assert verify_against(rebuilt, target, Domain.full_cube(5)) is None

    def test_completeness(self, rng):
        # whenever a conflict comes back, it is a real conflict
        for _ in range(20):
            n = int(rng.integers(2, 7))
            target = named_function("maj", n)
            m = int(rng.integers(1, 4))
            inners = []
            for _ in range(m):
                size = int(rng.integers(1, 3))
                support = tuple(
                    sorted(int(v) for v in rng.choice(np.arange(1, n + 1), size=size, replace=False))
                )
                inners.append(
                    LocalFunction(support, rng.integers(0, 2, size=1 << size).astype(np.uint8))
                )
            got = induce_outer(target, inners, Domain.full_cube(n))
            if isinstance(got, ConflictWitness):
                probe = Composition(
                    n=n,
                    k=n,
                    inners=tuple(inners),
                    outer=OuterFunction(m=m, codomain_size=2, entries={}),
                )
                assert probe.pattern_of(got.x) == probe.pattern_of(got.y)
                assert target.evaluate(got.x) != target.evaluate(got.y)


class TestLocality:
    def test_inner_ignores_nonsupport_exhaustive(self, rng):
        c = random_hw_composition(rng, n=6)
        for g in c.inners:
            others = [i for i in range(1, 7) if i not in g.support]
            for x in range(64):
                for i in others:
                    assert g.evaluate(x) == g.evaluate(x ^ (1 << (i - 1)))

    def test_inner_ignores_nonsupport_sampled(self, rng):
        for _ in range(10):
            c = random_hw_composition(rng, n=int(rng.integers(3, 9)))
            x = BitVector(c.n, int(rng.integers(0, 1 << c.n)))
            for g in c.inners:
                for i in range(1, c.n + 1):
                    if i not in g.support:
                        assert g.evaluate(x) == g.evaluate(flip_bit(x, i))


class TestRestrictComposition:
    def test_hw_restrict_to_any_four(self):
        c = build_hw(8, 2)
        kept = (2, 3, 5, 8)
        fixing = {v: 0 for v in range(1, 9) if v not in kept}
        r = restrict_composition(c, kept, fixing)
        assert r.n == 4 and r.m == c.m and r.k == c.k
        assert verify_against(r, named_function("hw", 4), Domain.full_cube(4)) is None

    def test_maj_restrict_with_balanced_fixing(self):
        c = build_maj(8, 2)
        kept = (1, 2, 5, 6)
        dropped = [3, 4, 7, 8]
        fixing = {3: 1, 4: 1, 7: 0, 8: 0}
        r = restrict_composition(c, kept, fixing)
        assert verify_against(r, named_function("maj", 4), Domain.full_cube(4)) is None

    def test_identity_restriction(self):
        c = build_hw(5, 2)
        r = restrict_composition(c, tuple(range(1, 6)), {})
        assert r.n == c.n and r.inners == c.inners
        assert r.outer.entries == c.outer.entries


class TestLowQueryRestriction:
    def test_uniform_hw(self):
        c = build_hw(8, 2)
        r = low_query_restriction(c, "hw")
        assert r.n == 4
        assert verify_against(r, named_function("hw", 4), Domain.full_cube(4)) is None
        bound = (c.m * c.k) // 4
        assert query_profile(r).q_max <= bound

    def test_markov_selection_excludes_heavy_variable(self):
        # x1 queried 5 times, everything else once
        n = 4
        ident = np.array([0, 1], dtype=np.uint8)
        inners = [LocalFunction((i,), ident) for i in range(1, n + 1)]
        inners += [LocalFunction((1,), ident) for _ in range(4)]
        target = named_function("hw", n)
        outer = induce_outer(target, inners, Domain.full_cube(n), k=1)
        c = Composition(n=n, k=1, inners=tuple(inners), outer=outer)
        r = low_query_restriction(c, "hw")
        assert r.n == 2
        # variable 1 must be among the dropped: its restricted inners are constants
        assert verify_against(r, named_function("hw", 2), Domain.full_cube(2)) is None
        heavy_supports = [g.support for g in c.inners if g.support == (1,)]
        assert len(heavy_supports) == 5
        assert query_profile(c).q[0] == 5

    def test_maj_restriction(self):
        c = build_maj(8, 2)
        r = low_query_restriction(c, "maj")
        assert verify_against(r, named_function("maj", 4), Domain.full_cube(4)) is None
        assert query_profile(r).q_max <= (c.m * c.k) // 4

    def test_odd_target_arity_threshold(self):
        # 10 -> 5: fixing weight floor(5/2)=2 keeps the ceil(5/2)=3 threshold
        c = build_maj(10, 2)
        r = low_query_restriction(c, "maj")
        assert r.n == 5
        assert verify_against(r, named_function("maj", 5), Domain.full_cube(5)) is None

    def test_requires_even_arity(self):
        with pytest.raises(ValueError):
            low_query_restriction(build_hw(5, 2), "hw")


class TestRestrictionPreservesVerification:
    def test_random_hw_corpus(self, rng):
        for _ in range(10):
            c = random_hw_composition(rng, n=6)
            kept = sorted(int(v) for v in rng.choice(np.arange(1, 7), size=3, replace=False))
            fixing = {v: 0 for v in range(1, 7) if v not in kept}
            r = restrict_composition(c, kept, fixing)
            assert verify_against(r, named_function("hw", 3), Domain.full_cube(3)) is None
