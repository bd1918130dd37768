"""Exact information-theoretic analysis of compositions over the hypercube.

All probabilities are accumulated as integer counts over the domain and only
converted to floats inside logarithms, so equality assertions hold to 1e-9.
Entropies are in bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .boolfn import Domain, SizingError, TruthTable, popcount_table
from .composition import Composition, query_profile, verify_against

MAX_INFO_N = 20

PROB_TOL = 1e-12
INFO_TOL = 1e-9


@dataclass(frozen=True)
class DiscreteDistribution:
    """Outcome weights summing to 1 (within 1e-12), no negative weight."""

    probs: np.ndarray

    def __post_init__(self) -> None:
        probs = np.asarray(self.probs, dtype=np.float64).ravel()
        if probs.size == 0:
            raise ValueError("distribution needs at least one outcome")
        if np.any(probs < 0):
            raise ValueError("negative probability")
        if abs(float(probs.sum()) - 1.0) > PROB_TOL:
            raise ValueError(f"weights sum to {probs.sum()}, not 1")
        probs.flags.writeable = False
        object.__setattr__(self, "probs", probs)

    @classmethod
    def from_counts(cls, counts) -> "DiscreteDistribution":
        counts = np.asarray(counts, dtype=np.float64)
        return cls(counts / counts.sum())


def _plogp(p: np.ndarray) -> float:
    """Sum of p*log2(p) with the 0*log(0) = 0 convention."""
    p = p[p > 0]
    return float(np.sum(p * np.log2(p)))


def entropy(dist) -> float:
    """H of a distribution (DiscreteDistribution or any array of weights)."""
    if not isinstance(dist, DiscreteDistribution):
        dist = DiscreteDistribution(np.asarray(dist, dtype=np.float64).ravel())
    return -_plogp(dist.probs)


def entropy_from_counts(counts: np.ndarray) -> float:
    """H of the empirical distribution given integer counts (exact path)."""
    counts = np.asarray(counts, dtype=np.float64)
    counts = counts[counts > 0]
    total = float(counts.sum())
    return math.log2(total) - float(np.sum(counts * np.log2(counts))) / total


def conditional_entropy(joint) -> float:
    """H[X|Y] for a joint array with axis 0 = X, axis 1 = Y."""
    joint = np.asarray(joint, dtype=np.float64)
    if joint.ndim != 2:
        raise ValueError("joint must be 2-dimensional (X by Y)")
    total = float(joint.sum())
    if abs(total - 1.0) > PROB_TOL or np.any(joint < 0):
        raise ValueError("joint weights must be nonnegative and sum to 1")
    h_joint = -_plogp(joint.ravel())
    h_y = -_plogp(joint.sum(axis=0))
    return h_joint - h_y


def mutual_information(joint) -> float:
    """I[X:Y] = H[X] - H[X|Y] for a joint array (axis 0 = X, axis 1 = Y)."""
    joint = np.asarray(joint, dtype=np.float64)
    h_x = -_plogp(joint.sum(axis=1))
    return h_x - conditional_entropy(joint)


def binary_entropy(p: float) -> float:
    """H2(p) = -p log2 p - (1-p) log2 (1-p)."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p={p} outside [0,1]")
    if p in (0.0, 1.0):
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


@dataclass(frozen=True)
class VariableInfo:
    var: int
    q: int
    mi: float  # I[X_i : g(X)]
    h_cond: float  # H[X_i | g(X)]
    escape: Fraction  # Pr[X flipped at i leaves the domain]


@dataclass(frozen=True)
class InfoReport:
    n: int
    m: int
    domain_size: int
    rows: tuple[VariableInfo, ...]
    i_total: float  # I[X : g(X)] = H[g(X)] since X determines g(X)


def _domain_patterns(c: Composition, domain: Domain):
    if domain.n != c.n:
        raise ValueError(f"domain n={domain.n} does not match composition n={c.n}")
    if c.n > MAX_INFO_N:
        raise SizingError(f"exhaustive analysis supports n <= {MAX_INFO_N}, got n={c.n}")
    idx = domain.indices()
    pats = c.cube_patterns[idx]
    uniq, inverse = np.unique(pats, return_inverse=True)
    return idx, uniq, inverse


def escape_fraction(domain: Domain, i: int) -> Fraction:
    """Pr over uniform X in D that flipping coordinate i leaves D."""
    idx = domain.indices()
    flipped = idx ^ (1 << (i - 1))
    outside = int(np.count_nonzero(~domain.mask[flipped]))
    return Fraction(outside, len(idx))


def info_report(c: Composition, domain: Domain) -> InfoReport:
    """Exact per-variable I[X_i : g(X)], H[X_i | g(X)], and escape probabilities
    for X uniform on the domain."""
    idx, uniq, inverse = _domain_patterns(c, domain)
    total = len(idx)
    g_counts = np.bincount(inverse, minlength=len(uniq))
    h_g = entropy_from_counts(g_counts)
    q = query_profile(c).q
    rows = []
    for i in range(1, c.n + 1):
        bits = ((idx >> (i - 1)) & 1).astype(np.int64)
        joint = np.bincount(2 * inverse + bits, minlength=2 * len(uniq))
        h_joint = entropy_from_counts(joint)
        h_bit = entropy_from_counts(np.bincount(bits, minlength=2))
        rows.append(
            VariableInfo(
                var=i,
                q=q[i - 1],
                mi=h_bit + h_g - h_joint,
                h_cond=h_joint - h_g,
                escape=escape_fraction(domain, i),
            )
        )
    # X determines g(X), so I[X : g(X)] collapses to H[g(X)].
    return InfoReport(n=c.n, m=c.m, domain_size=total, rows=tuple(rows), i_total=h_g)


class AnalysisPreconditionError(ValueError):
    """The composition fails the precondition of an analysis (with a witness)."""


def _require_weight_target(c: Composition, target: TruthTable, domain: Domain) -> None:
    idx = domain.indices()
    if not np.array_equal(target.values[idx], popcount_table(target.n)[idx]):
        raise AnalysisPreconditionError("target does not compute |x| on the domain")
    cx = verify_against(c, target, domain)
    if cx is not None:
        raise AnalysisPreconditionError(f"composition does not verify the target: {cx}")


@dataclass(frozen=True)
class KeyLemmaRecord:
    var: int
    q: int
    escape: Fraction
    h_cond: float
    gap: float  # 1 + escape - H[X_i | g(X)]

    @property
    def ok(self) -> bool:
        if self.gap < -INFO_TOL:
            return False
        if self.escape == 0 and not self.gap > INFO_TOL:
            return False
        return True


@dataclass(frozen=True)
class KeyLemmaReport:
    records: tuple[KeyLemmaRecord, ...]

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.records)

    @property
    def min_gap(self) -> float:
        return min(r.gap for r in self.records)


def check_key_lemma(c: Composition, target: TruthTable, domain: Domain) -> KeyLemmaReport:
    """Per-variable conditional-entropy gaps for a weight-computing composition.

    For each variable the report carries gap_i = 1 + escape_i - H[X_i|g(X)].
    The gap is never negative, and it must be strictly positive whenever
    flipping the variable cannot leave the domain (escape_i = 0). The (q_i,
    gap_i) pairs are emitted so the decay constant can be fit offline.
    """
    _require_weight_target(c, target, domain)
    rep = info_report(c, domain)
    records = tuple(
        KeyLemmaRecord(
            var=row.var,
            q=row.q,
            escape=row.escape,
            h_cond=row.h_cond,
            gap=1.0 + float(row.escape) - row.h_cond,
        )
        for row in rep.rows
    )
    return KeyLemmaReport(records=records)


@dataclass(frozen=True)
class CountingBoundFailure:
    subset: tuple[int, ...]
    touching: int
    required: int


@dataclass(frozen=True)
class CountingBoundReport:
    checked: int
    failures: tuple[CountingBoundFailure, ...]

    @property
    def ok(self) -> bool:
        return not self.failures


def check_counting_bound(c: Composition, subsets) -> CountingBoundReport:
    """Every given variable set S must be touched by >= log2(|S|+1) inners.

    Precondition (not re-checked here): c verifies the full Hamming weight.
    The comparison is the exact integer form 2^touching >= |S|+1.
    """
    failures = []
    checked = 0
    masks = []
    for g in c.inners:
        mask = 0
        for v in g.support:
            mask |= 1 << v
        masks.append(mask)
    for subset in subsets:
        s = tuple(sorted(set(subset)))
        if not s:
            raise ValueError("subsets must be nonempty")
        checked += 1
        smask = 0
        for v in s:
            smask |= 1 << v
        touching = sum(1 for mask in masks if mask & smask)
        required = len(s).bit_length()  # ceil(log2(|S|+1))
        if (1 << touching) < len(s) + 1:
            failures.append(CountingBoundFailure(subset=s, touching=touching, required=required))
    return CountingBoundReport(checked=checked, failures=tuple(failures))


@dataclass(frozen=True)
class BiasWitness:
    """A non-querying-inner output vector and weight at which X_i is biased.

    v assigns outputs to the inners not querying variable i (bit b of v is
    the output of nonquery_inners[b], 0-based inner indices); w_star is the
    weight with the largest upward jump of the paired-flip mass sequence.
    """

    var: int
    nonquery_inners: tuple[int, ...]
    v: int
    w_star: int
    p_cond: Fraction  # Pr[X_i = 1 | X in S_v, |X| = w_star]
    mass: Fraction  # Pr[|X| = w_star | X in S_v]
    w_v_size: int


def extract_bias_witness(
    c: Composition, target: TruthTable, domain: Domain, i: int
) -> BiasWitness:
    """Search every reachable assignment v to the non-querying inners for the
    weight w* where knowing |x| reveals x_i best; the returned witness
    maximizes |p_cond - 1/2| * mass (ties to the smaller (v, w*)).
    """
    _require_weight_target(c, target, domain)
    if not 1 <= i <= c.n:
        raise ValueError(f"variable {i} out of range 1..{c.n}")
    q = query_profile(c).q
    q_i = q[i - 1]
    if q_i < 1:
        raise ValueError(f"variable {i} is queried by no inner function")
    nonquery = tuple(
        j for j, g in enumerate(c.inners) if i not in g.support
    )
    idx, uniq, inverse = _domain_patterns(c, domain)
    pats = uniq[inverse]
    # project the pattern onto the non-querying inners' bits
    proj = np.zeros(len(idx), dtype=np.uint64)
    for b, j in enumerate(nonquery):
        proj |= ((pats >> np.uint64(j)) & np.uint64(1)) << np.uint64(b)
    pc = popcount_table(c.n)
    bit_i = 1 << (i - 1)

    best: BiasWitness | None = None
    best_score = Fraction(-1)
    for v in np.unique(proj):
        members = idx[proj == v]  # D intersect S_v, ascending
        size_sv = len(members)
        weights = pc[members].astype(np.int64)
        w_v = np.unique(weights)
        if len(w_v) > (1 << q_i):
            raise AssertionError(
                f"attainable weights exceed 2^q for v={int(v)}: {len(w_v)} > {1 << q_i}"
            )
        stays = domain.mask[members ^ bit_i]
        w0 = pc[members & ~bit_i].astype(np.int64)  # |x with bit i cleared|
        counts = np.bincount(w0[stays], minlength=c.n + 1)
        if counts.max() > 0:
            # largest upward jump of the (shared-denominator) p_w sequence;
            # a positive jump at w* guarantees attainable mass there
            jumps = np.diff(np.concatenate(([0], counts)))
            w_star = int(np.argmax(jumps))
        else:
            # every member escapes on flipping i: no jump exists, fall back
            # to the smallest attainable weight
            w_star = int(w_v[0])
        at_w = members[weights == w_star]
        ones = int(np.count_nonzero(at_w & bit_i))
        p_cond = Fraction(ones, len(at_w))
        mass = Fraction(len(at_w), size_sv)
        score = abs(p_cond - Fraction(1, 2)) * mass
        key_new = (score, -int(v), -w_star)
        key_old = (best_score, -best.v, -best.w_star) if best else None
        if best is None or key_new > key_old:
            best = BiasWitness(
                var=i,
                nonquery_inners=nonquery,
                v=int(v),
                w_star=w_star,
                p_cond=p_cond,
                mass=mass,
                w_v_size=len(w_v),
            )
            best_score = score
    if best is None:
        raise AssertionError("no reachable non-querying assignment (empty domain?)")
    if domain.is_full() and best.p_cond == Fraction(1, 2):
        raise AssertionError("bias witness degenerate on the full cube")
    return best


@dataclass(frozen=True)
class FactsReport:
    trials: int
    checks: int
    failures: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.failures


def _random_joint(rng: np.random.Generator, a: int, b: int) -> np.ndarray:
    w = rng.random((a, b))
    if rng.random() < 0.3:  # exercise zero-probability cells
        w[rng.random((a, b)) < 0.3] = 0.0
        if w.sum() == 0:
            w[0, 0] = 1.0
    return w / w.sum()


def validate_information_facts(trials: int, seed: int) -> FactsReport:
    """Randomized check of the entropy facts: bounds, subadditivity (plain and
    conditional), determined-variable behavior, and symmetry of I."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    failures: list[str] = []
    checks = 0

    def expect(cond: bool, msg: str) -> None:
        nonlocal checks
        checks += 1
        if not cond:
            failures.append(msg)

    for trial in range(trials):
        a = int(rng.integers(2, 6))
        b = int(rng.integers(2, 6))
        joint = _random_joint(rng, a, b)
        px = joint.sum(axis=1)
        h_x = entropy(px)
        h_x_given_y = conditional_entropy(joint)
        expect(h_x_given_y >= -INFO_TOL, f"trial {trial}: H[X|Y] negative")
        expect(h_x_given_y <= h_x + INFO_TOL, f"trial {trial}: H[X|Y] > H[X]")
        expect(h_x <= math.log2(a) + INFO_TOL, f"trial {trial}: H[X] > log|D|")
        h_y = entropy(joint.sum(axis=0))
        h_xy = entropy(joint.ravel())
        expect(
            h_xy <= h_x + h_y + INFO_TOL, f"trial {trial}: joint entropy superadditive"
        )
        expect(
            abs(mutual_information(joint) - mutual_information(joint.T)) <= INFO_TOL,
            f"trial {trial}: I[X:Y] != I[Y:X]",
        )

        # independent product: subadditivity is tight
        p1 = _random_joint(rng, a, 1).ravel()
        p2 = _random_joint(rng, b, 1).ravel()
        product = np.outer(p1, p2)
        expect(
            abs(entropy(product.ravel()) - entropy(p1) - entropy(p2)) <= INFO_TOL,
            f"trial {trial}: independence equality fails",
        )
        expect(
            abs(mutual_information(product)) <= INFO_TOL,
            f"trial {trial}: independent pair has I != 0",
        )

        # Y completely determined by X: H[Y|X] = 0 and conditioning on X is
        # at least as informative as conditioning on f(X)
        fmap = rng.integers(0, b, size=a)
        determined = np.zeros((a, b))
        determined[np.arange(a), fmap] = px
        expect(
            conditional_entropy(determined.T) <= INFO_TOL,
            f"trial {trial}: H[f(X)|X] != 0",
        )
        triple = _random_joint(rng, a, b)  # axes (X1, Z)
        coarse = np.zeros((b, b))  # axes (f(X1), Z)
        for x1 in range(a):
            coarse[fmap[x1], :] += triple[x1, :]
        h_z_given_x1 = conditional_entropy(triple.T)
        h_z_given_fx1 = conditional_entropy(coarse.T)
        expect(
            h_z_given_x1 <= h_z_given_fx1 + INFO_TOL,
            f"trial {trial}: H[Z|X] > H[Z|f(X)]",
        )

        # conditional subadditivity on a random triple (X1, X2, Y)
        c1, c2, cy = (int(rng.integers(2, 4)) for _ in range(3))
        j3 = rng.random((c1, c2, cy))
        j3 /= j3.sum()
        pair_given = j3.reshape(c1 * c2, cy)
        h_pair = conditional_entropy(pair_given)
        h_1 = conditional_entropy(j3.sum(axis=1))
        h_2 = conditional_entropy(j3.sum(axis=0))
        expect(
            h_pair <= h_1 + h_2 + INFO_TOL,
            f"trial {trial}: conditional subadditivity fails",
        )

        # uniform distribution attains the log|D| bound
        expect(
            abs(entropy(np.full(a, 1.0 / a)) - math.log2(a)) <= INFO_TOL,
            f"trial {trial}: uniform entropy != log|D|",
        )
    return FactsReport(trials=trials, checks=checks, failures=tuple(failures))
