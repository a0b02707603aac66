"""Tests for instances, partitions, rank and percentile evaluation."""

import itertools
from fractions import Fraction

import pytest
from pydantic import ValidationError

from partition_rank.core import (
    classify_subset,
    combine_improves,
    complete_instance,
    is_connected_subset,
    is_valid_partition,
    make_instance,
    mediant_between,
    path_instance,
    percentile_from_profile,
    percentile_of,
    perturbed_instance,
    profile_of,
    rank_of,
    score_of,
    strict_threshold,
    threshold_for,
)
from partition_rank.errors import DomainError, ValidityError
from partition_rank.generators import random_connected_instance
from partition_rank.models import MergeEffect, Partition, Profile, RankConvention, SubsetClass, to_fraction
from partition_rank.oracle import enumerate_valid_partitions


class TestRationals:
    """Test cases for exact value parsing."""

    def test_strings_and_ints(self):
        """Test 'p/q', decimal strings and ints parse exactly."""
        assert to_fraction("3/4") == Fraction(3, 4)
        assert to_fraction("0.1") == Fraction(1, 10)
        assert to_fraction(7) == Fraction(7)
        assert to_fraction(Fraction(2, 3)) == Fraction(2, 3)

    def test_floats_rejected(self):
        """Test binary floats never enter an instance."""
        with pytest.raises(ValueError):
            to_fraction(0.1)
        with pytest.raises(ValidationError):
            make_instance([0.5, 1])

    def test_garbage_rejected(self):
        """Test non-numeric text is not a rational."""
        with pytest.raises(ValueError):
            to_fraction("three")
        with pytest.raises(ValueError):
            to_fraction(True)


class TestInstance:
    """Test cases for Instance invariants."""

    def test_edges_normalized(self):
        """Test edges are stored once per unordered pair, loops dropped."""
        inst = make_instance([1, 1, 1], [(1, 0), (0, 1), (2, 2), (2, 1)])
        assert inst.edges == ((0, 1), (1, 2))

    def test_non_positive_value(self):
        """Test values must be strictly positive."""
        with pytest.raises(ValidityError):
            make_instance([1, 0, 2])

    def test_disconnected_special(self):
        """Test S* must induce a connected subgraph."""
        with pytest.raises(ValidityError):
            path_instance([1, 1, 1], special=[0, 2])

    def test_edge_out_of_range(self):
        """Test edges must join existing vertices."""
        with pytest.raises(ValidityError):
            make_instance([1, 1], [(0, 5)])

    def test_derived_views(self, small_path):
        """Test the others, S* measure and residual graph of the shared path."""
        assert small_path.others == (0, 1, 3, 4)
        assert small_path.special_mu == 2
        assert set(small_path.residual.edges()) == {(0, 1), (3, 4)}


class TestClassification:
    """Test cases for large / medium / small."""

    def test_classes(self, small_path):
        """Test large, medium and small subsets against S*."""
        assert classify_subset(small_path, [0]) == SubsetClass.LARGE
        assert classify_subset(small_path, [1, 4]) == SubsetClass.MEDIUM
        assert classify_subset(small_path, [1]) == SubsetClass.SMALL

    def test_empty_special(self):
        """Test classification needs a nonempty S*."""
        inst = path_instance([1, 2])
        with pytest.raises(DomainError):
            classify_subset(inst, [0])

    def test_empty_subset_and_special_itself(self, small_path):
        """Test the empty subset and subsets meeting S* cannot be classified."""
        with pytest.raises(DomainError):
            classify_subset(small_path, [])
        with pytest.raises(DomainError):
            classify_subset(small_path, [2])

    def test_scores(self):
        """Test the class scores are 1, 1/2 and 0."""
        assert [score_of(cls) for cls in SubsetClass] == [1, Fraction(1, 2), 0]

    def test_connected_subset(self, small_path):
        """Test connectivity of subsets of the shared path."""
        assert is_connected_subset(small_path, [0, 1, 2])
        assert not is_connected_subset(small_path, [0, 3])
        assert not is_connected_subset(small_path, [])


class TestRankAndPercentile:
    """Test cases for rank_of and percentile_of."""

    def test_singletons(self, small_path):
        """Test rank 3 and percentile 1/2 with every vertex alone."""
        partition = Partition.of([[0], [1], [3], [4]], [2])
        assert rank_of(small_path, partition, RankConvention.STRICT_ABOVE) == 3
        assert percentile_of(small_path, partition) == Fraction(1, 2)
        assert profile_of(small_path, partition) == Profile(l=2, m=0, s=2)

    def test_merged_runs(self, small_path):
        """Test rank and percentile of the merged-runs partition of the shared path."""
        partition = Partition.of([[0, 1], [3, 4]], [2])
        assert rank_of(small_path, partition, RankConvention.STRICT_ABOVE) == 3
        assert percentile_of(small_path, partition) == Fraction(5, 6)

    def test_conventions_differ_on_ties(self):
        """Test ties with S* count only under the at-least convention."""
        inst = path_instance([2, 2, 1], special=[0])
        partition = Partition.of([[1], [2]], [0])
        assert rank_of(inst, partition, RankConvention.STRICT_ABOVE) == 1
        assert rank_of(inst, partition, RankConvention.AT_LEAST) == 2

    def test_invalid_partition(self, small_path):
        """Test a block through S* is rejected."""
        partition = Partition.of([[0], [1, 3], [4]], [2])
        assert not is_valid_partition(small_path, partition)
        with pytest.raises(ValidityError):
            rank_of(small_path, partition, RankConvention.STRICT_ABOVE)

    def test_partition_must_cover(self, small_path):
        """Test a partition must cover every non-special vertex."""
        assert not is_valid_partition(small_path, Partition.of([[0], [1]], [2]))

    def test_overlapping_blocks(self):
        """Test blocks may not overlap."""
        with pytest.raises(ValidityError):
            Partition.of([[0, 1], [1]], [2])

    def test_no_blocks(self):
        """Test the percentile needs at least one block."""
        with pytest.raises(DomainError):
            percentile_from_profile(Profile())

    def test_percentile_bounds(self, rng):
        """Test 0 < percentile < 1 for every valid partition."""
        for _ in range(30):
            inst = random_connected_instance(rng, rng.randint(2, 6), k=1)
            for partition in enumerate_valid_partitions(inst):
                value = percentile_of(inst, partition)
                assert 0 < value < 1


class TestMergingRules:
    """Test cases for the mediant bound and the merge-direction test."""

    def test_mediant_between(self, rng):
        """Test the mediant lies between its two fractions on random pairs."""
        for _ in range(10000):
            a, c = (Fraction(rng.randint(-20, 20), rng.randint(1, 9)) for _ in range(2))
            b, d = (Fraction(rng.randint(1, 20), rng.randint(1, 9)) for _ in range(2))
            mediant = mediant_between(a, b, c, d)
            low, high = sorted((a / b, c / d))
            assert low <= mediant <= high

    def test_mediant_rejects_zero_denominator(self):
        """Test a zero denominator is rejected."""
        with pytest.raises(DomainError):
            mediant_between(Fraction(1), Fraction(0), Fraction(1), Fraction(1))

    def test_all_small_merge_increases(self):
        """Test merging small blocks raises the percentile when the bound allows."""
        assert combine_improves(Fraction(9, 10), Profile(s=3)) == MergeEffect.INCREASES

    def test_needs_two_blocks(self):
        """Test a merge needs at least two blocks."""
        with pytest.raises(DomainError):
            combine_improves(Fraction(1, 2), Profile(l=1))

    def test_neutral(self):
        """Test (l + m/2 - 1)/(c - 1) equal to p0 leaves the percentile alone."""
        assert combine_improves(Fraction(1, 2), Profile(l=2, s=1)) == MergeEffect.NEUTRAL

    def test_merge_direction_matches_evaluation(self, rng):
        """Test the predicted effect of merging two adjacent blocks against direct evaluation."""
        checked = 0
        while checked < 10000:
            inst = random_connected_instance(rng, rng.randint(3, 7), k=rng.randint(1, 2))
            for partition in enumerate_valid_partitions(inst):
                if partition.c < 2:
                    continue
                before = percentile_of(inst, partition)
                for first, second in itertools.combinations(partition.blocks, 2):
                    if not any(inst.graph.has_edge(u, v) for u in first for v in second):
                        continue
                    rest = [b for b in partition.blocks if b not in (first, second)]
                    after = percentile_of(inst, Partition.of(rest + [first | second], inst.special))
                    pair = profile_of(inst, Partition.of([first, second], inst.special))
                    effect = combine_improves(before, pair)
                    if effect == MergeEffect.DECREASES:
                        assert after < before
                    elif effect == MergeEffect.INCREASES:
                        assert after > before
                    else:
                        assert after == before
                    checked += 1


class TestThresholds:
    """Test cases for the strict-to-weak reduction."""

    def test_strict_threshold(self):
        """Test the strict threshold on two fractions."""
        assert strict_threshold([Fraction(1, 2), Fraction(1, 3)], Fraction(1)) == Fraction(13, 12)

    def test_threshold_for(self, small_path):
        """Test the rank threshold under each convention."""
        assert threshold_for(small_path, RankConvention.AT_LEAST) == 2
        assert threshold_for(small_path, RankConvention.STRICT_ABOVE) == Fraction(5, 2)

    def test_perturbation_turns_strict_into_weak(self, rng):
        """Test a subset beats mu(S*) strictly exactly when it reaches the perturbed mu(S*)."""
        for _ in range(50):
            values = [Fraction(rng.randint(1, 6), rng.choice((1, 2, 3))) for _ in range(6)]
            inst = complete_instance(values, special=[0])
            raised = perturbed_instance(inst)
            assert raised.special_mu > inst.special_mu
            for size in range(1, 6):
                for subset in itertools.combinations(inst.others, size):
                    total = inst.mu_of(subset)
                    assert (total > inst.special_mu) == (total >= raised.special_mu)
