"""Tests for weighted average maximisation."""

from fractions import Fraction

import pytest

from partition_rank.errors import DomainError, ParseError, ValidityError
from partition_rank.grading import GradeInstance, WeightConvention, block_grade, weighted_average_max
from partition_rank.instance_io import parse_grades


def brute_force(inst):
    """Best grade over all 2^(n-1) cut patterns."""
    best = None
    n = inst.n
    for mask in range(2 ** (n - 1)):
        starts = [0] + [i + 1 for i in range(n - 1) if mask >> i & 1]
        grades = [block_grade(inst, i, j - 1) for i, j in zip(starts, starts[1:] + [n])]
        if any(g is None for g in grades):
            continue
        total = sum(grades, Fraction(0))
        best = total if best is None else max(best, total)
    return best


class TestGradeInstance:
    """Test cases for point validation."""

    def test_earned_above_possible(self):
        """Test earned points may not exceed possible points."""
        with pytest.raises(ValidityError):
            GradeInstance(earned=(11,), possible=(10,))

    def test_length_mismatch(self):
        """Test the two columns must have the same length."""
        with pytest.raises(ValidityError):
            GradeInstance(earned=(1, 2), possible=(3,))

    def test_negative(self):
        """Test points may not be negative."""
        with pytest.raises(ValidityError):
            GradeInstance(earned=(-1,), possible=(3,))

    def test_nothing_possible(self):
        """Test some marking period must have possible points."""
        with pytest.raises(DomainError):
            GradeInstance(earned=(0, 0), possible=(0, 0))


class TestWeightedAverageMax:
    """Test cases for weighted_average_max."""

    def test_two_periods(self):
        """Test 9/10 and 5/10 kept apart sum to 7/5."""
        inst = GradeInstance(earned=(9, 5), possible=(10, 10))
        grade, witness = weighted_average_max(inst)
        assert grade == Fraction(7, 5)
        assert set(witness.blocks) == {frozenset({0}), frozenset({1})}

    def test_length_convention(self):
        """Test the length-proportional weights."""
        inst = GradeInstance(earned=(9, 5), possible=(10, 10), convention=WeightConvention.LENGTH_PROPORTIONAL)
        grade, witness = weighted_average_max(inst)
        assert grade == Fraction(7, 10)
        assert witness.blocks == (frozenset({0, 1}),)

    def test_empty_period_is_absorbed(self):
        """Test a period with nothing possible merges into a neighbour."""
        inst = GradeInstance(earned=(1, 0), possible=(2, 0))
        grade, witness = weighted_average_max(inst)
        assert grade == Fraction(1, 4)
        assert witness.blocks == (frozenset({0, 1}),)

    @pytest.mark.parametrize("convention", list(WeightConvention))
    def test_matches_brute_force(self, rng, convention):
        """Test the best grade against every contiguous grouping."""
        for _ in range(200):
            n = rng.randint(1, 8)
            possible = [rng.choice((0, 1, 5, 10)) for _ in range(n)]
            if not any(possible):
                possible[0] = 10
            earned = [rng.randint(0, cap) for cap in possible]
            inst = GradeInstance(earned=tuple(earned), possible=tuple(possible), convention=convention)
            grade, witness = weighted_average_max(inst)
            assert grade == brute_force(inst)
            assert sorted(v for block in witness.blocks for v in block) == list(range(n))


class TestParseGrades:
    """Test cases for the two-column grade listing."""

    def test_parse(self):
        """Test comments and blank lines are skipped."""
        inst = parse_grades("# term one\n9 10\n\n5 10  # retake\n", WeightConvention.AS_WRITTEN)
        assert inst.earned == (Fraction(9), Fraction(5))
        assert inst.possible == (Fraction(10), Fraction(10))

    def test_rationals(self):
        """Test fractions and decimals are read exactly."""
        inst = parse_grades("1/2 1\n0.75 1\n")
        assert inst.earned == (Fraction(1, 2), Fraction(3, 4))

    def test_bad_columns(self):
        """Test a line with one column is reported by number."""
        with pytest.raises(ParseError) as info:
            parse_grades("9 10\n5\n")
        assert "line 2" in info.value.message

    def test_bad_number(self):
        """Test non-numeric points are rejected."""
        with pytest.raises(ParseError):
            parse_grades("nine 10\n")

    def test_invalid_points(self):
        """Test parsed points are validated."""
        with pytest.raises(ValidityError):
            parse_grades("11 10\n")
