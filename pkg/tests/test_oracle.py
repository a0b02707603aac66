"""Tests for the exhaustive oracle."""

from fractions import Fraction

import networkx as nx
import pytest

from partition_rank.core import complete_instance, is_valid_partition, make_instance, path_instance
from partition_rank.errors import DomainError, SizeLimitError, ValidityError
from partition_rank.generators import random_connected_instance
from partition_rank.models import Objective, RankConvention
from partition_rank.oracle import (
    EquivalenceClasses,
    connected_partitions,
    enumerate_valid_partitions,
    exact_optimum,
    oracle_rank_max,
)


def _bell(n: int) -> int:
    row = [1]
    for _ in range(n):
        nxt = [row[-1]]
        for value in row:
            nxt.append(nxt[-1] + value)
        row = nxt
    return row[0]


class TestEnumeration:
    """Test cases for connected partition enumeration."""

    @pytest.mark.parametrize("n", [1, 2, 3, 5, 7])
    def test_path_count(self, n):
        """Test a path of n vertices has 2^(n-1) connected partitions."""
        graph = nx.path_graph(n)
        assert sum(1 for _ in connected_partitions(graph, frozenset(range(n)))) == 2 ** (n - 1)

    @pytest.mark.parametrize("n", [1, 3, 4, 6])
    def test_complete_count(self, n):
        """Test the complete graph has a Bell number of connected partitions."""
        graph = nx.complete_graph(n)
        assert sum(1 for _ in connected_partitions(graph, frozenset(range(n)))) == _bell(n)

    @pytest.mark.parametrize("n", [3, 4, 6, 8])
    def test_cycle_count(self, n):
        """Test a cycle of n vertices has 2^n - n connected partitions."""
        graph = nx.cycle_graph(n)
        assert sum(1 for _ in connected_partitions(graph, frozenset(range(n)))) == 2 ** n - n

    def test_no_duplicates_and_all_valid(self, rng):
        """Test every enumerated partition is valid and appears once."""
        for _ in range(40):
            inst = random_connected_instance(rng, rng.randint(2, 7), k=rng.randint(1, 2))
            seen = set()
            for partition in enumerate_valid_partitions(inst):
                assert is_valid_partition(inst, partition)
                key = frozenset(partition.blocks)
                assert key not in seen
                seen.add(key)

    def test_matches_brute_force_set_partitions(self, rng):
        """Test against filtering every set partition of V without S*."""

        def set_partitions(items):
            if not items:
                yield []
                return
            head, rest = items[0], items[1:]
            for smaller in set_partitions(rest):
                for i in range(len(smaller)):
                    yield smaller[:i] + [smaller[i] | {head}] + smaller[i + 1:]
                yield [frozenset({head})] + smaller

        for _ in range(30):
            inst = random_connected_instance(rng, rng.randint(2, 7), k=1, extra_edge_prob=0.2)
            graph = inst.residual
            expected = {
                frozenset(p) for p in set_partitions(list(inst.others))
                if all(nx.is_connected(graph.subgraph(b)) for b in p)
            }
            found = {frozenset(p.blocks) for p in enumerate_valid_partitions(inst)}
            assert found == expected

    def test_size_limit(self):
        """Test the enumeration enforces its size limit."""
        inst = path_instance([1] * 6, special=[0])
        with pytest.raises(SizeLimitError) as info:
            list(enumerate_valid_partitions(inst, limit=4))
        assert info.value.exit_status == 4


class TestExactOptimum:
    """Test cases for exact_optimum."""

    def test_small_path(self, small_path):
        """Test all four optima on the shared path."""
        assert exact_optimum(small_path, Objective.MIN_RANK).best_value == 3
        assert exact_optimum(small_path, Objective.MAX_RANK).best_value == 3
        assert exact_optimum(small_path, Objective.MIN_PERCENTILE).best_value == Fraction(1, 2)
        result = exact_optimum(small_path, Objective.MAX_PERCENTILE)
        assert result.best_value == Fraction(5, 6)
        assert result.explored == 4
        assert set(result.witness.blocks) == {frozenset({0, 1}), frozenset({3, 4})}

    def test_convention_override(self):
        """Test the convention argument decides ties with S*."""
        inst = complete_instance([2, 2, 2], special=[0])
        assert exact_optimum(inst, Objective.MAX_RANK, RankConvention.AT_LEAST).best_value == 3
        assert exact_optimum(inst, Objective.MAX_RANK, RankConvention.STRICT_ABOVE).best_value == 2

    def test_empty_special(self):
        """Test the oracle needs a nonempty S*."""
        with pytest.raises(DomainError):
            exact_optimum(path_instance([1, 2]), Objective.MIN_RANK)

    def test_special_covers_everything(self):
        """Test the percentile is undefined when S* covers everything."""
        inst = path_instance([1, 2], special=[0, 1])
        with pytest.raises(DomainError):
            exact_optimum(inst, Objective.MAX_PERCENTILE)
        assert exact_optimum(inst, Objective.MAX_RANK).best_value == 1

    def test_oracle_rank_max(self, rng):
        """Test the exact maximum rank is valid and matches the oracle."""
        for _ in range(20):
            inst = random_connected_instance(rng, rng.randint(2, 6), k=1)
            rank, witness = oracle_rank_max(inst, RankConvention.AT_LEAST)
            assert rank == exact_optimum(inst, Objective.MAX_RANK).best_value
            assert is_valid_partition(inst, witness)


class TestEquivalenceConstraint:
    """Test cases for the equivalence-class family."""

    def test_count(self):
        """Test only unions of whole classes are enumerated."""
        inst = make_instance([1] * 6, [], special=[0])
        constraint = EquivalenceClasses([[1, 2], [3], [4, 5]])
        assert sum(1 for _ in enumerate_valid_partitions(inst, constraint)) == 4

    def test_classes_must_cover(self):
        """Test the classes must cover every non-special vertex."""
        inst = make_instance([1] * 4, [], special=[0])
        with pytest.raises(ValidityError):
            list(enumerate_valid_partitions(inst, EquivalenceClasses([[1, 2]])))
