"""
Core evaluation of rank and percentile.

Subset classification, rank and percentile of S* under a partition, partition
validity, and the two merging rules (the mediant bound and the merge-direction
test) as checkable utilities. Everything is exact rational arithmetic.
"""

import logging
from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence

import networkx as nx

from .errors import DomainError, ValidityError
from .models import Instance, MergeEffect, Partition, Profile, RankConvention, SubsetClass

logger = logging.getLogger(__name__)

SCORE = {SubsetClass.LARGE: Fraction(1), SubsetClass.MEDIUM: Fraction(1, 2), SubsetClass.SMALL: Fraction(0)}


def make_instance(mu: Sequence, edges: Iterable = (), special: Iterable[int] = ()) -> Instance:
    return Instance(mu=tuple(mu), edges=tuple(tuple(e) for e in edges), special=frozenset(special))


def complete_instance(mu: Sequence, special: Iterable[int] = ()) -> Instance:
    """Instance on the complete graph over len(mu) vertices."""
    n = len(mu)
    edges = [(u, v) for u in range(n) for v in range(u + 1, n)]
    return make_instance(mu, edges, special)


def path_instance(mu: Sequence, special: Iterable[int] = ()) -> Instance:
    """Instance on the path 0-1-...-(n-1)."""
    return make_instance(mu, [(v, v + 1) for v in range(len(mu) - 1)], special)


def classify_value(value: Fraction, special_mu: Fraction) -> SubsetClass:
    if value > special_mu:
        return SubsetClass.LARGE
    if value == special_mu:
        return SubsetClass.MEDIUM
    return SubsetClass.SMALL


def score_of(cls: SubsetClass) -> Fraction:
    """Additive contribution of a block to the percentile numerator."""
    return SCORE[cls]


def counts(value: Fraction, special_mu: Fraction, conv: RankConvention) -> bool:
    """Whether a block of this value outranks S* under the convention."""
    if conv == RankConvention.STRICT_ABOVE:
        return value > special_mu
    return value >= special_mu


def _require_special(inst: Instance) -> None:
    if not inst.special:
        raise DomainError("rank and percentile are undefined for an empty S*")


def classify_subset(inst: Instance, subset: Iterable[int]) -> SubsetClass:
    """Classify a vertex set as large, medium or small against S*."""
    _require_special(inst)
    subset = frozenset(subset)
    if not subset:
        raise DomainError("cannot classify the empty set")
    if subset == inst.special:
        raise DomainError("S* is not compared with itself")
    if any(v not in inst.vertices for v in subset):
        raise DomainError("subset references a vertex outside the instance")
    return classify_value(inst.mu_of(subset), inst.special_mu)


def is_connected_subset(inst: Instance, subset: Iterable[int]) -> bool:
    subset = set(subset)
    if not subset:
        return False
    return nx.is_connected(inst.graph.subgraph(subset))


def is_valid_partition(inst: Instance, partition: Partition) -> bool:
    """Blocks cover V without S*, avoid S*, and each induces a connected subgraph."""
    if partition.special != inst.special:
        return False
    covered = set()
    for block in partition.blocks:
        if not block or covered & block or block & inst.special:
            return False
        if not is_connected_subset(inst, block):
            return False
        covered |= block
    return covered == set(inst.others)


def _require_valid(inst: Instance, partition: Partition) -> None:
    if not is_valid_partition(inst, partition):
        raise ValidityError("partition is not a valid partition of the instance")


def profile_of(inst: Instance, partition: Partition) -> Profile:
    _require_special(inst)
    tally = {cls: 0 for cls in SubsetClass}
    for block in partition.blocks:
        tally[classify_value(inst.mu_of(block), inst.special_mu)] += 1
    return Profile(l=tally[SubsetClass.LARGE], m=tally[SubsetClass.MEDIUM], s=tally[SubsetClass.SMALL])


def rank_of_blocks(inst: Instance, partition: Partition, conv: RankConvention) -> int:
    """Rank without the connectivity check, for variants with their own admissible blocks."""
    _require_special(inst)
    special_mu = inst.special_mu
    return 1 + sum(1 for block in partition.blocks if counts(inst.mu_of(block), special_mu, conv))


def rank_of(inst: Instance, partition: Partition, conv: RankConvention) -> int:
    """One plus the number of blocks that outrank S* under conv."""
    _require_special(inst)
    _require_valid(inst, partition)
    return rank_of_blocks(inst, partition, conv)


def percentile_from_profile(profile: Profile) -> Fraction:
    if profile.c == 0:
        raise DomainError("percentile is undefined for a partition with no blocks besides S*")
    return (profile.score + Fraction(1, 2)) / (profile.c + 1)


def percentile_from_score(score: Fraction, c: int) -> Fraction:
    return (score + Fraction(1, 2)) / (c + 1)


def percentile_of(inst: Instance, partition: Partition) -> Fraction:
    """(l + m/2 + 1/2) / (c + 1) for the partition's profile."""
    _require_special(inst)
    _require_valid(inst, partition)
    return percentile_from_profile(profile_of(inst, partition))


def percentile_of_blocks(inst: Instance, partition: Partition) -> Fraction:
    return percentile_from_profile(profile_of(inst, partition))


def mediant_between(a: Fraction, b: Fraction, c: Fraction, d: Fraction) -> Fraction:
    """(a+c)/(b+d), which always lies between a/b and c/d."""
    if b <= 0 or d <= 0:
        raise DomainError("mediant denominators must be positive")
    return Fraction(a + c) / Fraction(b + d)


def merge_fraction(profile: Profile) -> Fraction:
    return (profile.score - 1) / (profile.c - 1)


def combine_improves(p0: Fraction, profile: Profile) -> MergeEffect:
    """Direction in which merging blocks with this profile moves the percentile p0.

    Merging only small blocks always raises the percentile. Otherwise the merge
    lowers it iff (l + m/2 - 1)/(l + m + s - 1) exceeds p0.
    """
    if profile.c < 2:
        raise DomainError("merging needs at least two blocks")
    if profile.l == 0 and profile.m == 0:
        return MergeEffect.INCREASES
    fraction = merge_fraction(profile)
    if fraction > p0:
        return MergeEffect.DECREASES
    if fraction < p0:
        return MergeEffect.INCREASES
    return MergeEffect.NEUTRAL


def strict_threshold(values: Iterable[Fraction], special_mu: Fraction) -> Fraction:
    """Threshold T with sum >= T exactly when sum > special_mu, for every sum of the values.

    T = special_mu + 1/(2L) where L is the lcm of every denominator involved.
    """
    denominator = special_mu.denominator
    for value in values:
        denominator = lcm(denominator, Fraction(value).denominator)
    return special_mu + Fraction(1, 2 * denominator)


def threshold_for(inst: Instance, conv: RankConvention) -> Fraction:
    """Value a block must reach (>=) to count under conv."""
    if conv == RankConvention.STRICT_ABOVE:
        return strict_threshold((inst.mu[v] for v in inst.others), inst.special_mu)
    return inst.special_mu


def perturbed_instance(inst: Instance) -> Instance:
    """Raise mu(S*) to the least multiple of 1/(b_1 ... b_n) above it.

    Here b_i are the denominators of the values outside S*. Under the perturbed
    measure, a block reaches mu(S*) exactly when it strictly exceeded it before.
    """
    _require_special(inst)
    product = 1
    for v in inst.others:
        product *= inst.mu[v].denominator
    special_mu = inst.special_mu
    raised = Fraction(int(special_mu * product) + 1, product)
    anchor = min(inst.special)
    mu = list(inst.mu)
    mu[anchor] += raised - special_mu
    logger.debug("perturbed mu(S*) from %s to %s", special_mu, raised)
    return Instance(mu=tuple(mu), edges=inst.edges, special=inst.special, labels=inst.labels)
