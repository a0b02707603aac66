"""Tests for the uniform-value case and circulant Hamiltonian paths."""

import itertools
from fractions import Fraction
from math import gcd

import pytest
from pydantic import ValidationError as PydanticValidationError

from partition_rank.case_uniform import (
    CirculantSpec,
    circulant_graph,
    circulant_hamiltonian_path,
    circulant_instance,
    is_hamiltonian_path,
    percentile_max_uniform_circulant,
    rank_max_uniform_circulant,
    uniform_min_solutions,
)
from partition_rank.core import complete_instance, is_valid_partition, path_instance, percentile_of
from partition_rank.errors import CaseError, ConnectivityError, ValidityError
from partition_rank.models import Objective, RankConvention
from partition_rank.oracle import exact_optimum


def connected_specs(max_n, max_jumps):
    for n in range(2, max_n + 1):
        for size in range(1, max_jumps + 1):
            for jumps in itertools.combinations(range(1, n // 2 + 1), size):
                g = n
                for s in jumps:
                    g = gcd(g, s)
                if g == 1:
                    yield CirculantSpec(n=n, jumps=jumps)


class TestCirculantSpec:
    """Test cases for circulant specifications."""

    def test_jumps_sorted_and_deduplicated(self):
        """Test jumps are normalised on input and the circulant stays immutable."""
        spec = CirculantSpec(n=10, jumps=[4, 2, 4])
        assert spec.jumps == (2, 4)
        assert spec == CirculantSpec(n=10, jumps=(2, 4))
        with pytest.raises(PydanticValidationError):
            spec.jumps = (1,)

    @pytest.mark.parametrize("jump", [0, 4, -1])
    def test_jump_out_of_range(self, jump):
        """Test jumps outside 0 < s <= n/2 are rejected."""
        with pytest.raises(ValidityError):
            CirculantSpec(n=6, jumps=(jump,))

    def test_connected(self):
        """Test connectivity is decided by the gcd of n and the jumps."""
        assert CirculantSpec(n=12, jumps=(4, 6)).connected is False
        assert CirculantSpec(n=12, jumps=(4, 3)).connected is True

    def test_graph(self):
        """Test the half-turn jump n/2 adds a single edge per antipodal pair."""
        graph = circulant_graph(CirculantSpec(n=6, jumps=(1, 3)))
        assert graph.number_of_edges() == 9
        assert all(degree == 3 for _, degree in graph.degree())


class TestHamiltonianPath:
    """Test cases for circulant_hamiltonian_path."""

    def test_single_jump(self):
        """Test a single coprime jump walks the cycle in steps of that jump."""
        assert circulant_hamiltonian_path(CirculantSpec(n=5, jumps=(2,))) == [0, 2, 4, 1, 3]

    def test_contraction(self):
        """Test C_12(4, 3): three 4-cycles joined through jumps of 3."""
        spec = CirculantSpec(n=12, jumps=(3, 4))
        path = circulant_hamiltonian_path(spec)
        assert is_hamiltonian_path(spec, path)

    def test_every_connected_circulant(self):
        """Test n <= 40 with up to three jumps."""
        checked = 0
        for spec in connected_specs(40, 3):
            path = circulant_hamiltonian_path(spec)
            assert is_hamiltonian_path(spec, path), spec
            checked += 1
        assert checked > 1000

    def test_disconnected(self):
        """Test a disconnected circulant raises with the DISCONNECTED code."""
        with pytest.raises(ConnectivityError) as info:
            circulant_hamiltonian_path(CirculantSpec(n=8, jumps=(2, 4)))
        assert info.value.code == "DISCONNECTED"

    def test_trivial(self):
        """Test the one-vertex circulant is its own path."""
        assert circulant_hamiltonian_path(CirculantSpec(n=1)) == [0]


class TestUniformMinimisation:
    """Test cases for uniform_min_solutions."""

    def test_several_special_elements(self):
        """Test all singletons give rank 1 when S* has several elements."""
        inst = complete_instance([2] * 6, special=[0, 1])
        rank, percentile, witness = uniform_min_solutions(inst)
        assert rank == 1
        assert percentile == Fraction(1, 10)
        assert len(witness.blocks) == 4

    def test_single_special_matches_oracle(self):
        """Test the singleton partition is optimal for a single special element."""
        inst = path_instance([3] * 5, special=[2])
        rank, percentile, witness = uniform_min_solutions(inst)
        assert rank == exact_optimum(inst, Objective.MIN_RANK).best_value
        assert percentile == exact_optimum(inst, Objective.MIN_PERCENTILE).best_value
        assert percentile == percentile_of(inst, witness)

    def test_rejects_unequal_values(self):
        """Test unequal values are rejected."""
        with pytest.raises(CaseError):
            uniform_min_solutions(path_instance([1, 2, 1], special=[0]))


class TestUniformMaximisation:
    """Test cases for the circulant chunking solvers."""

    def test_instance_layout(self):
        """Test S* is a path of k extra vertices attached to vertex 0."""
        inst = circulant_instance(CirculantSpec(n=5, jumps=(1,)), 2)
        assert inst.special == frozenset({5, 6})
        assert inst.others == (0, 1, 2, 3, 4)

    def test_rank_chunks(self):
        """Test the maximum rank chunks the Hamiltonian path into pieces of k vertices."""
        spec = CirculantSpec(n=7, jumps=(2,))
        inst = circulant_instance(spec, 2)
        rank, witness = rank_max_uniform_circulant(inst, spec, 2)
        assert rank == 4
        assert is_valid_partition(inst, witness)

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_match_oracle(self, k):
        """Test the chunking maximum against the oracle on every small connected circulant."""
        for spec in connected_specs(8, 2):
            inst = circulant_instance(spec, k)
            rank, witness = rank_max_uniform_circulant(inst, spec, k)
            assert is_valid_partition(inst, witness)
            assert rank == exact_optimum(inst, Objective.MAX_RANK, RankConvention.AT_LEAST).best_value
            percentile, witness = percentile_max_uniform_circulant(inst, spec, k)
            assert is_valid_partition(inst, witness)
            assert percentile == exact_optimum(inst, Objective.MAX_PERCENTILE).best_value

    def test_small_rest_is_one_block(self):
        """Test a remainder smaller than S* becomes a single block."""
        spec = CirculantSpec(n=3, jumps=(1,))
        inst = circulant_instance(spec, 3)
        percentile, witness = percentile_max_uniform_circulant(inst, spec, 3)
        assert witness.blocks == (frozenset({0, 1, 2}),)
        assert percentile == Fraction(1, 2)

    def test_wrong_k(self):
        """Test k must equal the size of S*."""
        spec = CirculantSpec(n=4, jumps=(1,))
        with pytest.raises(CaseError):
            rank_max_uniform_circulant(circulant_instance(spec, 2), spec, 3)

    def test_graph_must_match_circulant(self):
        """Test the instance graph must be the circulant given."""
        spec = CirculantSpec(n=4, jumps=(1,))
        inst = circulant_instance(CirculantSpec(n=4, jumps=(1, 2)), 1)
        with pytest.raises(CaseError):
            rank_max_uniform_circulant(inst, spec, 1)
