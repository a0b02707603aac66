"""Tests for the command-line front end."""

import json
import os
from unittest.mock import patch

import pytest

from partition_rank.cli import main
from partition_rank.config import PartitionRankConfig

SMALL_PATH = {
    "vertices": [{"id": i, "mu": mu} for i, mu in enumerate([3, 1, 2, 4, 1])],
    "edges": [[0, 1], [1, 2], [2, 3], [3, 4]],
    "special": [2],
}


@pytest.fixture
def path_file(tmp_path):
    path = tmp_path / "path.json"
    path.write_text(json.dumps(SMALL_PATH))
    return path


def run(capsys, *argv):
    status = main(list(argv))
    captured = capsys.readouterr()
    return status, captured.out, captured.err


class TestSolve:
    """Test cases for the solve command."""

    def test_general_min_rank(self, capsys, path_file):
        """Test the general minimum rank prints the rank and a witness."""
        status, out, _ = run(capsys, "solve", "--problem", "min-rank", "--case", "general", "-i", str(path_file))
        assert status == PartitionRankConfig.EXIT_OK
        assert out.splitlines()[0] == "rank = 3"
        assert out.splitlines()[1].startswith("witness (")

    def test_linear_max_pct(self, capsys, path_file):
        """Test the linear maximum percentile prints the fraction, percent and blocks."""
        status, out, _ = run(capsys, "solve", "--problem", "max-pct", "--case", "linear", "-i", str(path_file))
        assert status == 0
        assert out.splitlines()[0] == "percentile = 5/6 (83.33%)"
        assert "  {0, 1}  mu = 4" in out

    def test_json_output(self, capsys, path_file):
        """Test the JSON report carries the quantity, value and S*."""
        status, out, _ = run(
            capsys, "solve", "--problem", "max-rank", "--case", "linear", "-i", str(path_file), "--format", "json"
        )
        data = json.loads(out)
        assert status == 0
        assert data["quantity"] == "rank"
        assert data["value"] == 3
        assert data["special"] == ["2"]

    def test_json_exact_rational(self, capsys, path_file):
        """Test the JSON report carries the value as an exact p/q string."""
        status, out, _ = run(
            capsys, "solve", "--problem", "max-pct", "--case", "linear", "-i", str(path_file), "--format", "json"
        )
        data = json.loads(out)
        assert status == 0
        assert data["exact"] == "5/6"
        assert data["percent"] == "83.33%"
        assert sorted(data["witness"]) == [["0", "1"], ["3", "4"]]

    def test_convention_flag(self, capsys, tmp_path):
        """Test --convention strict leaves ties with S* uncounted."""
        path = tmp_path / "ties.json"
        path.write_text(json.dumps({
            "vertices": [{"id": i, "mu": 2} for i in range(3)],
            "edges": [[0, 1], [1, 2]],
            "special": [0],
        }))
        _, out, _ = run(capsys, "solve", "--problem", "max-rank", "--case", "linear", "-i", str(path),
                        "--convention", "strict")
        assert out.splitlines()[0] == "rank = 2"

    def test_dot(self, capsys, path_file, tmp_path):
        """Test --dot writes the witness as a Graphviz graph."""
        dot = tmp_path / "out.dot"
        status, _, _ = run(capsys, "solve", "--problem", "max-pct", "--case", "linear", "-i", str(path_file),
                           "--dot", str(dot))
        assert status == 0
        assert dot.read_text().startswith("graph partition {")

    @pytest.mark.parametrize("problem", ["max-rank", "max-pct", "min-pct"])
    def test_limit_reaches_every_general_route(self, capsys, monkeypatch, tmp_path, problem):
        """Test --limit overrides the default cap on every oracle-backed general route."""
        monkeypatch.delenv(PartitionRankConfig.ORACLE_LIMIT_ENV, raising=False)
        path = tmp_path / "long.json"
        path.write_text(json.dumps({
            "vertices": [{"id": i, "mu": 1 + i % 3} for i in range(14)],
            "edges": [[i, i + 1] for i in range(13)],
            "special": [0],
        }))
        status, _, err = run(capsys, "solve", "--problem", problem, "--case", "general", "-i", str(path))
        assert status == PartitionRankConfig.EXIT_SIZE_LIMIT
        assert "limit of 12" in err
        status, out, _ = run(capsys, "solve", "--problem", problem, "--case", "general", "-i", str(path),
                             "--limit", "20")
        assert status == PartitionRankConfig.EXIT_OK
        assert "witness (" in out

    def test_complete_min_rank_witness(self, capsys, tmp_path):
        """Test the complete-graph minimum rank prints its witness."""
        path = tmp_path / "k4.json"
        path.write_text(json.dumps({
            "vertices": [{"id": i, "mu": mu} for i, mu in enumerate([2, 3, 5, 1])],
            "edges": [[u, v] for u in range(4) for v in range(u + 1, 4)],
            "special": [0],
        }))
        status, out, _ = run(capsys, "solve", "--problem", "min-rank", "--case", "complete", "-i", str(path))
        assert status == 0
        assert out.splitlines()[:2] == ["rank = 2", "witness (2 blocks besides S*):"]
        assert "  {1, 2}  mu = 8" in out

    def test_case_mismatch(self, capsys, path_file):
        """Test a non-complete graph on the complete route exits with a CASE error."""
        status, _, err = run(capsys, "solve", "--problem", "min-rank", "--case", "complete", "-i", str(path_file))
        assert status == PartitionRankConfig.EXIT_INVALID
        assert err.startswith("Partition Rank Error CASE:")

    def test_missing_file(self, capsys, tmp_path):
        """Test a missing input file exits with a PARSE error."""
        status, _, err = run(capsys, "solve", "--problem", "min-rank", "--case", "general",
                             "-i", str(tmp_path / "absent.json"))
        assert status == 2
        assert "PARSE" in err

    def test_missing_section(self, capsys, path_file):
        """Test a variant without its section exits with an explanation."""
        status, _, err = run(capsys, "solve", "--problem", "min-rank", "--variant", "hierarchy", "-i", str(path_file))
        assert status == 2
        assert "no tree section" in err


class TestOracle:
    """Test cases for the oracle command."""

    def test_explored(self, capsys, path_file):
        """Test the oracle reports how many partitions it explored."""
        status, out, _ = run(capsys, "oracle", "--objective", "max-pct", "-i", str(path_file))
        assert status == 0
        assert "explored: 4" in out

    def test_size_limit(self, capsys, path_file):
        """Test --limit below the instance size exits with the size-limit status."""
        status, _, err = run(capsys, "oracle", "--objective", "max-pct", "-i", str(path_file), "--limit", "2")
        assert status == PartitionRankConfig.EXIT_SIZE_LIMIT
        assert err.startswith("Partition Rank Error")

    def test_limit_from_environment(self, capsys, path_file):
        """Test the oracle limit is read from the environment."""
        with patch.dict(os.environ, {PartitionRankConfig.ORACLE_LIMIT_ENV: "3"}):
            status, _, _ = run(capsys, "oracle", "--objective", "min-rank", "-i", str(path_file))
        assert status == 4


class TestEpaTable:
    """Test cases for the inventory report."""

    def test_single_target(self, capsys):
        """Test a single inventory row with its percent columns."""
        status, out, _ = run(capsys, "epa-table", "--targets", "1.A.3.b")
        assert status == 0
        lines = out.splitlines()
        assert lines[0].startswith("CRT Category")
        assert lines[2].startswith("1.A.3.b Transportation: Road")
        assert lines[2].split()[-2:] == ["0.40%", "11.54%"]

    def test_json(self, capsys):
        """Test the inventory rows as JSON."""
        status, out, _ = run(capsys, "epa-table", "--targets", "3", "--format", "json")
        (row,) = json.loads(out)
        assert (row["min_rank"], row["max_rank"]) == (2, 6)
        assert row["max_pct"] == "50.00%"

    def test_show_witness(self, capsys):
        """Test the witness listing follows the table."""
        status, out, _ = run(capsys, "epa-table", "--targets", "3", "--show-witness", "max-rank")
        assert status == 0
        assert "3 max-rank:" in out
        assert "[S*] 3 Agriculture" in out

    def test_unknown_code(self, capsys):
        """Test an unknown category code exits with a LOOKUP error."""
        status, _, err = run(capsys, "epa-table", "--targets", "9.Z")
        assert status == 2
        assert "LOOKUP" in err


class TestOtherCommands:
    """Test cases for gerrymander, grade, validate, hamiltonian and generate."""

    def test_gerrymander_infeasible(self, capsys, tmp_path):
        """Test an infeasible redistricting exits with the infeasible status."""
        path = tmp_path / "plan.json"
        path.write_text(json.dumps({
            "grid": {"l": 3, "w": 1, "cells": [[1, 1, 1], [2, 1, 1], [3, 1, 1]], "mu_r": [[1, 1, 0], [2, 1, 0], [3, 1, 0]]},
            "districts": 2,
        }))
        status, _, _ = run(capsys, "gerrymander", "-i", str(path))
        assert status == PartitionRankConfig.EXIT_INFEASIBLE

    def test_gerrymander(self, capsys, tmp_path):
        """Test the redistricting slate in JSON."""
        path = tmp_path / "plan.json"
        path.write_text(json.dumps({
            "grid": {
                "l": 2, "w": 2,
                "cells": [[1, 1, 1], [2, 1, 1], [1, 2, 1], [2, 2, 1]],
                "mu_r": [[1, 1, 1], [2, 1, -1], [1, 2, 1], [2, 2, -1]],
            },
            "districts": 2,
        }))
        status, out, _ = run(capsys, "gerrymander", "-i", str(path), "--format", "json")
        assert status == 0
        assert json.loads(out)["slate"] == 2

    def test_grade(self, capsys, tmp_path):
        """Test the grade command in text and JSON."""
        path = tmp_path / "grades.txt"
        path.write_text("9 10\n5 10\n")
        status, out, _ = run(capsys, "grade", "-i", str(path))
        assert status == 0
        assert out.splitlines()[0] == "grade = 7/5 (140.00%)"
        _, out, _ = run(capsys, "grade", "-i", str(path), "--weights", "length", "--format", "json")
        assert json.loads(out) == {"grade": "7/10", "marking_periods": [[1, 2]]}

    def test_validate_partition(self, capsys, path_file, tmp_path):
        """Test a valid witness is reported with its rank and percentile."""
        witness = tmp_path / "witness.json"
        witness.write_text("[[0, 1], [3, 4]]")
        status, out, _ = run(capsys, "validate", "-i", str(path_file), "--partition", str(witness))
        assert status == 0
        assert "partition: 2 blocks, valid" in out
        assert "rank = 3" in out
        assert "percentile = 5/6 (83.33%)" in out

    def test_validate_bad_partition(self, capsys, path_file, tmp_path):
        """Test an invalid witness exits with an INVALID error."""
        witness = tmp_path / "witness.json"
        witness.write_text("[[0, 1, 3], [4]]")
        status, _, err = run(capsys, "validate", "-i", str(path_file), "--partition", str(witness))
        assert status == 2
        assert "INVALID" in err

    def test_validate_bad_instance(self, capsys, tmp_path):
        """Test an invalid instance exits with status 2."""
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"vertices": [{"id": 0, "mu": 0}]}))
        status, _, _ = run(capsys, "validate", "-i", str(path))
        assert status == 2

    def test_hamiltonian(self, capsys):
        """Test the Hamiltonian path visits every vertex once."""
        status, out, _ = run(capsys, "hamiltonian", "12", "3", "4", "--format", "json")
        assert status == 0
        data = json.loads(out)
        assert sorted(data["path"]) == list(range(12))

    def test_hamiltonian_disconnected(self, capsys):
        """Test a disconnected circulant exits with a DISCONNECTED error."""
        status, _, err = run(capsys, "hamiltonian", "8", "2", "4")
        assert status == 2
        assert "DISCONNECTED" in err

    def test_generate_is_seeded(self, capsys, tmp_path):
        """Test generation is reproducible by seed and can write to a file."""
        _, first, _ = run(capsys, "generate", "general", "--n", "6", "--k", "2", "--seed", "7")
        _, second, _ = run(capsys, "generate", "general", "--n", "6", "--k", "2", "--seed", "7")
        assert first == second
        output = tmp_path / "gen.json"
        status, _, _ = run(capsys, "generate", "linear", "--n", "5", "-o", str(output))
        assert status == 0
        assert len(json.loads(output.read_text())["vertices"]) == 5

    def test_generate_k_too_large(self, capsys):
        """Test generation rejects an S* larger than the graph."""
        status, _, _ = run(capsys, "generate", "complete", "--n", "2", "--k", "3")
        assert status == 2


class TestUsage:
    """Test cases for argument errors and settings."""

    def test_missing_problem(self, path_file):
        """Test a missing --problem exits with the usage status."""
        with pytest.raises(SystemExit) as info:
            main(["solve", "--case", "general", "-i", str(path_file)])
        assert info.value.code == PartitionRankConfig.EXIT_USAGE

    def test_case_and_variant_exclusive(self, path_file):
        """Test --case and --variant are mutually exclusive."""
        with pytest.raises(SystemExit) as info:
            main(["solve", "--problem", "min-rank", "--case", "general", "--variant", "hierarchy", "-i", str(path_file)])
        assert info.value.code == 5

    def test_bad_environment(self, capsys, path_file):
        """Test a malformed environment override exits with a DOMAIN error."""
        with patch.dict(os.environ, {PartitionRankConfig.ORACLE_LIMIT_ENV: "many"}):
            status, _, err = run(capsys, "oracle", "--objective", "min-rank", "-i", str(path_file))
        assert status == 2
        assert "DOMAIN" in err
