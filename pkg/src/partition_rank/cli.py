"""
Command-line front end.

Subcommands read an instance file, run the matching solver and print the
optimum with its witness partition. Errors are reported on stderr and mapped
to exit codes: 0 success, 2 invalid input, 3 infeasible, 4 size cap exceeded,
5 usage.
"""

import argparse
import json
import logging
import random
import sys
from functools import partial
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Dict, NamedTuple, Optional, Sequence, Tuple, Union

from pydantic import ValidationError

from . import __version__
from .case_complete import (
    min_percentile_complete,
    min_rank_complete_solution,
    percentile_max_complete_approx,
    rank_max_complete_approx,
)
from .case_linear import percentile_dp_linear, rank_max_linear
from .case_uniform import (
    CirculantSpec,
    circulant_hamiltonian_path,
    is_hamiltonian_path,
    percentile_max_uniform_circulant,
    rank_max_uniform_circulant,
    uniform_min_solutions,
)
from .config import PartitionRankConfig, Settings, load_settings
from .core import is_valid_partition, percentile_of_blocks, rank_of_blocks
from .epa_data import format_percent, format_report, load_crt, parse_crt, table1_report, validate_internal_values
from .errors import PartitionRankError, ValidityError
from .general import greedy_rank_min, percentile_max_2approx
from .generators import random_complete_instance, random_connected_instance, random_path_instance
from .grading import WeightConvention, weighted_average_max
from .grid import gerrymander_hier, grid_free_rect_oracle, grid_hier_percentile, grid_hier_rank
from .instance_io import (
    InstanceDocument,
    build,
    instance_to_document,
    parse_grades,
    partition_to_dot,
    read_document,
    read_partition,
    write_instance,
)
from .models import Instance, Objective, Partition, RankConvention, ResponseFormat
from .oracle import exact_optimum, oracle_rank_max
from .variant_equivalence import eq_percentile_opt, eq_rank_max, eq_rank_min
from .variant_hierarchy import (
    CategoryTree,
    ItemClasses,
    render_shaded,
    tree_general_bruteforce,
    tree_percentile_dp,
    tree_rank_max,
    tree_rank_min,
)

logger = logging.getLogger(__name__)

CASES = ("general", "complete", "linear", "uniform-circulant")
VARIANTS = ("equivalence", "hierarchy", "grid-hier")
ORACLE_FAMILIES = ("any", "equivalence", "hierarchy", "grid", "grid-hier")

EXAMPLES = """
Examples:
  partition-rank solve --problem min-rank --case general -i inst.json
  partition-rank solve --problem max-pct --variant hierarchy -i tree.json --dot out.dot
  partition-rank oracle --objective max-pct -i small.json --limit 10
  partition-rank epa-table --targets 1.A.3.b 3.B
  partition-rank grade -i grades.txt --weights length
  partition-rank hamiltonian 12 1 4
"""


class Report(NamedTuple):
    """A solver outcome ready for rendering."""

    quantity: str
    value: Union[int, Fraction]
    witness: Optional[Partition]
    label: Callable[[int], str]
    measure: Callable[[frozenset], Fraction]
    extra: Dict[str, Any]


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(PartitionRankConfig.EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _instance_report(quantity: str, value, witness, inst: Instance, **extra) -> Report:
    return Report(quantity, value, witness, inst.label, inst.mu_of, extra)


def _tree_report(quantity: str, value, witness, tree: CategoryTree, **extra) -> Report:
    def measure(block) -> Fraction:
        return sum((tree.mu[v] for v in block), Fraction(0))

    return Report(quantity, value, witness, tree.label_of_vertex, measure, extra)


def _quantity(objective: Objective) -> str:
    return "rank" if objective.is_rank else "percentile"


def _convention(args, objective: Objective) -> RankConvention:
    return RankConvention(args.convention) if args.convention else objective.default_convention


def _solve_general(doc: InstanceDocument, objective: Objective, args) -> Report:
    inst = build(doc, "to_instance")
    if objective == Objective.MIN_RANK:
        rank, witness = greedy_rank_min(inst)
        return _instance_report("rank", rank, witness, inst)
    if objective == Objective.MAX_RANK:
        rank, witness = oracle_rank_max(inst, _convention(args, objective), limit=args.limit)
        return _instance_report("rank", rank, witness, inst)
    if objective == Objective.MAX_PERCENTILE:
        percentile, witness, certified = percentile_max_2approx(inst, partial(oracle_rank_max, limit=args.limit))
        return _instance_report("percentile", percentile, witness, inst, certified_optimal=certified)
    result = exact_optimum(inst, objective, limit=args.limit)
    return _instance_report("percentile", result.best_value, result.witness, inst, explored=result.explored)


def _solve_complete(doc: InstanceDocument, objective: Objective, args) -> Report:
    inst = build(doc, "to_instance")
    if objective == Objective.MIN_RANK:
        return _instance_report("rank", *min_rank_complete_solution(inst), inst)
    if objective == Objective.MAX_RANK:
        rank, witness = rank_max_complete_approx(inst, _convention(args, objective))
        return _instance_report("rank", rank, witness, inst, approximate=True)
    if objective == Objective.MIN_PERCENTILE:
        return _instance_report("percentile", *min_percentile_complete(inst), inst)
    return _instance_report("percentile", *percentile_max_complete_approx(inst), inst, approximate=True)


def _solve_linear(doc: InstanceDocument, objective: Objective, args) -> Report:
    inst = build(doc, "to_instance")
    if objective == Objective.MIN_RANK:
        return _instance_report("rank", *greedy_rank_min(inst), inst)
    if objective == Objective.MAX_RANK:
        return _instance_report("rank", *rank_max_linear(inst, _convention(args, objective)), inst)
    return _instance_report("percentile", *percentile_dp_linear(inst, objective.direction), inst)


def _solve_circulant(doc: InstanceDocument, objective: Objective, args) -> Report:
    inst = build(doc, "to_instance")
    spec = build(doc, "to_circulant")
    k = len(inst.special)
    if objective in (Objective.MIN_RANK, Objective.MIN_PERCENTILE):
        rank, percentile, witness = uniform_min_solutions(inst)
        value = rank if objective.is_rank else percentile
        return _instance_report(_quantity(objective), value, witness, inst)
    if objective == Objective.MAX_RANK:
        return _instance_report("rank", *rank_max_uniform_circulant(inst, spec, k), inst)
    return _instance_report("percentile", *percentile_max_uniform_circulant(inst, spec, k), inst)


def _solve_equivalence(doc: InstanceDocument, objective: Objective, args) -> Report:
    eq = build(doc, "to_equivalence")
    if objective == Objective.MIN_RANK:
        solution = eq_rank_min(eq)
    elif objective == Objective.MAX_RANK:
        solution = eq_rank_max(eq)
    else:
        solution = eq_percentile_opt(eq, objective.direction)
    return _instance_report(_quantity(objective), *solution, eq.instance)


def _solve_hierarchy(doc: InstanceDocument, objective: Objective, args) -> Report:
    tree = build(doc, "to_tree")
    if objective == Objective.MIN_RANK:
        solution = tree_rank_min(tree, conv=_convention(args, objective))
    elif objective == Objective.MAX_RANK:
        solution = tree_rank_max(tree, conv=_convention(args, objective))
    else:
        solution = tree_percentile_dp(tree, objective.direction)
    return _tree_report(_quantity(objective), *solution, tree)


def _solve_grid(doc: InstanceDocument, objective: Objective, args) -> Report:
    grid = build(doc, "to_grid")
    if objective.is_rank:
        solution = grid_hier_rank(grid, objective.direction, RankConvention(args.convention) if args.convention else None)
    else:
        solution = grid_hier_percentile(grid, objective.direction)
    return _instance_report(_quantity(objective), *solution, grid.to_instance())


SOLVERS: Dict[str, Callable[[InstanceDocument, Objective, Any], Report]] = {
    "general": _solve_general,
    "complete": _solve_complete,
    "linear": _solve_linear,
    "uniform-circulant": _solve_circulant,
    "equivalence": _solve_equivalence,
    "hierarchy": _solve_hierarchy,
    "grid-hier": _solve_grid,
}


def _run_oracle(doc: InstanceDocument, objective: Objective, args, settings: Settings) -> Report:
    conv = RankConvention(args.convention) if args.convention else None
    family = args.family
    if family == "any":
        inst = build(doc, "to_instance")
        result = exact_optimum(inst, objective, conv, limit=args.limit or settings.oracle_limit)
    elif family == "equivalence":
        eq = build(doc, "to_equivalence")
        inst = eq.instance
        result = exact_optimum(inst, objective, conv, eq.constraint, args.limit or settings.oracle_limit)
    elif family == "hierarchy":
        tree = build(doc, "to_tree")
        classes = ItemClasses(classes=doc.classes) if doc.classes is not None else None
        result = tree_general_bruteforce(tree, classes, objective, conv, args.limit or settings.oracle_limit)
        return _tree_report(_quantity(objective), result.best_value, result.witness, tree, explored=result.explored)
    else:
        grid = build(doc, "to_grid")
        inst = grid.to_instance()
        result = grid_free_rect_oracle(
            grid, objective, conv, hierarchical=family == "grid-hier", limit=args.limit or settings.grid_cell_limit
        )
    return _instance_report(_quantity(objective), result.best_value, result.witness, inst, explored=result.explored)


def _format_value(quantity: str, value) -> str:
    if quantity == "percentile":
        return f"{value} ({format_percent(value)})"
    return str(value)


def _block_text(report: Report, block) -> str:
    names = ", ".join(report.label(v) for v in sorted(block))
    return f"{{{names}}}  mu = {report.measure(block)}"


def render(report: Report, fmt: ResponseFormat) -> str:
    if fmt == ResponseFormat.JSON:
        payload: Dict[str, Any] = {
            "quantity": report.quantity,
            "value": report.value if isinstance(report.value, int) else str(report.value),
            "exact": str(report.value),
        }
        if report.quantity == "percentile":
            payload["percent"] = format_percent(report.value)
        if report.witness is not None:
            payload["special"] = [report.label(v) for v in sorted(report.witness.special)]
            payload["witness"] = [[report.label(v) for v in sorted(block)] for block in report.witness.blocks]
        payload.update(report.extra)
        return json.dumps(payload, ensure_ascii=False, indent=2)

    lines = [f"{report.quantity} = {_format_value(report.quantity, report.value)}"]
    for key, value in report.extra.items():
        lines.append(f"{key.replace('_', ' ')}: {value}")
    if report.witness is not None:
        lines.append(f"witness ({report.witness.c} blocks besides S*):")
        if report.witness.special:
            lines.append(f"  S* {_block_text(report, report.witness.special)}")
        lines.extend(f"  {_block_text(report, block)}" for block in report.witness.blocks)
    return "\n".join(lines)


def _write_dot(report: Report, doc: InstanceDocument, args) -> None:
    if report.witness is None:
        logger.warning("no witness partition to write to %s", args.dot)
        return
    if doc.vertices:
        inst = build(doc, "to_instance")
    elif doc.grid is not None:
        inst = build(doc, "to_grid").to_instance()
    else:
        try:
            inst = build(doc, "to_tree").to_instance()
        except PartitionRankError as e:
            logger.warning("cannot draw the tree as a graph: %s", e.message)
            return
    Path(args.dot).write_text(partition_to_dot(inst, report.witness) + "\n", encoding="utf-8")
    logger.info("wrote %s", args.dot)


def cmd_solve(args, settings: Settings) -> str:
    doc = read_document(args.input)
    objective = Objective(args.problem)
    route = args.variant or args.case
    report = SOLVERS[route](doc, objective, args)
    if args.dot:
        _write_dot(report, doc, args)
    return render(report, ResponseFormat(args.format))


def cmd_oracle(args, settings: Settings) -> str:
    doc = read_document(args.input)
    report = _run_oracle(doc, Objective(args.objective), args, settings)
    if args.dot:
        _write_dot(report, doc, args)
    return render(report, ResponseFormat(args.format))


def cmd_epa_table(args, settings: Settings) -> str:
    tree = parse_crt(Path(args.input).read_text(encoding="utf-8")) if args.input else load_crt()
    validate_internal_values(tree)
    targets = args.targets or PartitionRankConfig.DEFAULT_TARGETS
    rows = table1_report(tree, targets)
    output = format_report(rows, ResponseFormat(args.format))
    if args.show_witness:
        for row in rows:
            target = tree.with_special(tree.find(row.code))
            output += f"\n\n{row.code} {args.show_witness}:\n" + render_shaded(target, row.witnesses[args.show_witness])
    return output


def cmd_gerrymander(args, settings: Settings) -> str:
    doc = read_document(args.input)
    inst = build(doc, "to_gerrymander")
    slate, witness = gerrymander_hier(inst)
    low, high = inst.window
    if ResponseFormat(args.format) == ResponseFormat.JSON:
        cells = inst.grid.cells
        return json.dumps({
            "slate": slate,
            "districts": [[list(cells[v]) for v in sorted(block)] for block in witness.blocks],
            "window": [str(low), str(high)],
        }, indent=2)
    lines = [f"slate = {slate} of {inst.n_districts} districts", f"population window: [{low}, {high}]"]
    grid_inst = inst.grid.to_instance()
    for block in witness.blocks:
        margin = sum((inst.mu_r[inst.grid.cells[v]] for v in block), Fraction(0))
        names = ", ".join(grid_inst.label(v) for v in sorted(block))
        lines.append(f"  {{{names}}}  population = {grid_inst.mu_of(block)}  margin = {margin}")
    return "\n".join(lines)


def cmd_grade(args, settings: Settings) -> str:
    inst = parse_grades(Path(args.input).read_text(encoding="utf-8"), WeightConvention(args.weights))
    grade, witness = weighted_average_max(inst)
    periods = [(min(block) + 1, max(block) + 1) for block in witness.blocks]
    if ResponseFormat(args.format) == ResponseFormat.JSON:
        return json.dumps({"grade": str(grade), "marking_periods": periods}, indent=2)
    lines = [f"grade = {grade} ({format_percent(grade)})"]
    lines.extend(f"  periods {first}-{last}" for first, last in periods)
    return "\n".join(lines)


def cmd_validate(args, settings: Settings) -> str:
    doc = read_document(args.input)
    lines = []
    if doc.vertices:
        inst = build(doc, "to_instance")
        lines.append(f"instance: {inst.n} vertices, {len(inst.edges)} edges, |S*| = {len(inst.special)}")
        if doc.classes is not None:
            lines.append(f"equivalence classes: {len(build(doc, 'to_equivalence').classes)}")
        if doc.circulant is not None:
            spec = build(doc, "to_circulant")
            lines.append(f"circulant C_{spec.n}{list(spec.jumps)}: {'connected' if spec.connected else 'disconnected'}")
    if doc.tree is not None:
        tree = build(doc, "to_tree")
        lines.append(f"tree: {len(tree.nodes)} nodes, {len(tree.leaves)} leaves")
    if doc.grid is not None:
        grid = build(doc, "to_grid")
        lines.append(f"grid: {grid.l} x {grid.w}, {len(grid.vacancies)} vacancies")
        if doc.districts is not None:
            build(doc, "to_gerrymander")
            lines.append(f"redistricting into {doc.districts} districts")
    if not lines:
        raise ValidityError("the file describes no instance")

    if args.partition:
        inst = build(doc, "to_instance")
        partition = read_partition(args.partition, inst.special)
        if not is_valid_partition(inst, partition):
            raise ValidityError("the partition does not cover V without S* with connected blocks")
        lines.append(f"partition: {partition.c} blocks, valid")
        if inst.special and inst.others:
            rank = rank_of_blocks(inst, partition, RankConvention(args.convention) if args.convention else RankConvention.STRICT_ABOVE)
            lines.append(f"rank = {rank}")
            lines.append(f"percentile = {_format_value('percentile', percentile_of_blocks(inst, partition))}")
    lines.append("valid")
    return "\n".join(lines)


def cmd_hamiltonian(args, settings: Settings) -> str:
    spec = CirculantSpec(n=args.n, jumps=tuple(args.jumps))
    path = circulant_hamiltonian_path(spec)
    if not is_hamiltonian_path(spec, path):
        raise ValidityError(f"constructed sequence is not a Hamiltonian path of C_{spec.n}{list(spec.jumps)}")
    if ResponseFormat(args.format) == ResponseFormat.JSON:
        return json.dumps({"n": spec.n, "jumps": list(spec.jumps), "path": path})
    return " ".join(str(v) for v in path)


GENERATORS = {
    "general": random_connected_instance,
    "complete": random_complete_instance,
    "linear": random_path_instance,
}


def cmd_generate(args, settings: Settings) -> str:
    if args.k > args.n:
        raise ValidityError(f"|S*| = {args.k} exceeds n = {args.n}")
    rng = random.Random(args.seed)
    inst = GENERATORS[args.kind](rng, args.n, args.k)
    if args.output:
        write_instance(inst, args.output)
        return f"wrote {args.output}"
    return json.dumps(instance_to_document(inst), indent=2)


COMMANDS = {
    "solve": cmd_solve,
    "oracle": cmd_oracle,
    "epa-table": cmd_epa_table,
    "gerrymander": cmd_gerrymander,
    "grade": cmd_grade,
    "validate": cmd_validate,
    "hamiltonian": cmd_hamiltonian,
    "generate": cmd_generate,
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="partition-rank",
        description="Extreme ranks and rank percentiles of a subset S* over valid partitions",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=EXAMPLES,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=[f.value for f in ResponseFormat], default=ResponseFormat.TEXT.value)
    common.add_argument("--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR"], type=str.upper)
    common.add_argument("--convention", choices=[c.value for c in RankConvention],
                        help="count strictly larger blocks or larger-or-equal ones")

    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    solve = sub.add_parser("solve", parents=[common], help="run a polynomial or exact solver")
    solve.add_argument("--problem", required=True, choices=[o.value for o in Objective])
    route = solve.add_mutually_exclusive_group(required=True)
    route.add_argument("--case", choices=CASES)
    route.add_argument("--variant", choices=VARIANTS)
    solve.add_argument("-i", "--input", required=True, help="instance file (JSON)")
    solve.add_argument("--dot", help="write the witness partition as Graphviz DOT")
    solve.add_argument("--limit", type=int, help="size cap when a solver falls back to enumeration")

    oracle = sub.add_parser("oracle", parents=[common], help="exhaustive optimum for small instances")
    oracle.add_argument("--objective", required=True, choices=[o.value for o in Objective])
    oracle.add_argument("--family", choices=ORACLE_FAMILIES, default="any", help="admissible partitions")
    oracle.add_argument("-i", "--input", required=True)
    oracle.add_argument("--limit", type=int, help="maximum non-special vertices (grid families: cells)")
    oracle.add_argument("--dot")

    epa = sub.add_parser("epa-table", parents=[common], help="min/max rank and percentile of CRT categories")
    epa.add_argument("--targets", nargs="+", metavar="CODE")
    epa.add_argument("--input", help="inventory listing instead of the shipped 2022 data")
    epa.add_argument("--show-witness", choices=[o.value for o in Objective],
                     help="also print the listing with the witness blocks marked")

    gerrymander = sub.add_parser("gerrymander", parents=[common], help="hierarchical redistricting")
    gerrymander.add_argument("-i", "--input", required=True)

    grade = sub.add_parser("grade", parents=[common], help="best weighted average over marking periods")
    grade.add_argument("-i", "--input", required=True, help="two columns: earned possible")
    grade.add_argument("--weights", choices=[w.value for w in WeightConvention], default=WeightConvention.AS_WRITTEN.value)

    validate = sub.add_parser("validate", parents=[common], help="check instance invariants")
    validate.add_argument("-i", "--input", required=True)
    validate.add_argument("--partition", help="witness file to check against the instance")

    hamiltonian = sub.add_parser("hamiltonian", parents=[common], help="Hamiltonian path of a circulant graph")
    hamiltonian.add_argument("n", type=int)
    hamiltonian.add_argument("jumps", type=int, nargs="+")

    generate = sub.add_parser("generate", parents=[common], help="write a seeded random instance")
    generate.add_argument("kind", choices=sorted(GENERATORS))
    generate.add_argument("--n", type=int, default=8)
    generate.add_argument("--k", type=int, default=1)
    generate.add_argument("--seed", type=int, default=0)
    generate.add_argument("-o", "--output")
    return parser


def _handle_error(e: PartitionRankError) -> Tuple[str, int]:
    """Error line and exit status for a library error."""
    return f"Partition Rank Error {e.code}: {e.message}", e.exit_status


def configure_logging(level: str) -> None:
    logging.basicConfig(
        level=getattr(logging, level),
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
        force=True,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        settings = load_settings()
        configure_logging(args.log_level or settings.log_level)
        output = COMMANDS[args.command](args, settings)
    except PartitionRankError as e:
        message, status = _handle_error(e)
        print(message, file=sys.stderr)
        return status
    except ValidationError as e:
        print(f"Partition Rank Error INVALID: {e.errors()[0]['msg']}", file=sys.stderr)
        return PartitionRankConfig.EXIT_INVALID
    except OSError as e:
        print(f"Partition Rank Error IO: {e}", file=sys.stderr)
        return PartitionRankConfig.EXIT_INVALID
    print(output)
    return PartitionRankConfig.EXIT_OK
