"""
EPA greenhouse-gas inventory.

Parses the CRT category listing (2022 emissions in MMT CO2 equivalent) into a
CategoryTree and reproduces the min/max rank and percentile report for a set
of target categories.
"""

import json
import logging
import re
from fractions import Fraction
from importlib import resources
from typing import Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field

from .config import PartitionRankConfig
from .errors import ParseError, ValidityError
from .models import Direction, Partition, Rational, ResponseFormat
from .variant_hierarchy import (
    CategoryTree,
    format_decimal,
    tree_percentile_dp,
    tree_rank_max,
    tree_rank_min,
)

logger = logging.getLogger(__name__)

DATA_FILE = "crt_2022.txt"

_TREEITEM = re.compile(r"^\s*\\treeitem\{(?P<depth>\d+)\}\{(?P<body>.*)\}\s*$")
_ENTRY = re.compile(r"^(?P<label>.*?)\s*\((?P<value>\d+(?:\.\d+)?|\.\d+)\)$")


def _split_line(raw: str, number: int) -> Tuple[int, str]:
    match = _TREEITEM.match(raw)
    if match:
        return int(match.group("depth")), match.group("body").strip()
    stripped = raw.lstrip()
    if "\t" in raw[: len(raw) - len(stripped)]:
        raise ParseError("tabs are not allowed in indentation", number)
    indent = len(raw) - len(stripped)
    if indent % PartitionRankConfig.INDENT_WIDTH:
        raise ParseError(f"indentation of {indent} spaces is not a multiple of {PartitionRankConfig.INDENT_WIDTH}", number)
    return indent // PartitionRankConfig.INDENT_WIDTH, stripped.rstrip()


def parse_crt(text: str) -> CategoryTree:
    """Build the category tree from an indented listing or treeitem lines.

    Each line is 'label (value)'; nesting is given either by two spaces per
    level or by the explicit depth of a \\treeitem{depth}{...} line. Values are
    parsed exactly. Leaves carry the measure; the printed totals of categories
    are kept for validate_internal_values only.
    """
    entries: List[tuple] = []
    stack: List[int] = []
    sibling_labels: Dict[Optional[int], set] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip() or raw.lstrip().startswith("#"):
            continue
        depth, body = _split_line(raw, number)
        match = _ENTRY.match(body)
        if not match:
            raise ParseError(f"expected 'label (value)', got {body!r}", number)
        if depth > len(stack):
            raise ParseError(f"depth {depth} skips a level (previous depth {len(stack) - 1})", number)
        del stack[depth:]
        parent = stack[-1] if stack else None
        label = match.group("label")
        siblings = sibling_labels.setdefault(parent, set())
        if label in siblings:
            raise ParseError(f"duplicate label {label!r} under the same parent", number)
        siblings.add(label)
        entries.append((label, parent, Fraction(match.group("value")), number))
        stack.append(len(entries) - 1)

    if not entries:
        raise ParseError("the listing contains no categories")
    child_count: Dict[int, int] = {}
    for _, parent, _, _ in entries:
        if parent is not None:
            child_count[parent] = child_count.get(parent, 0) + 1
    for index, count in child_count.items():
        if count == 1:
            raise ParseError(f"category {entries[index][0]!r} has exactly one subcategory", entries[index][3])

    try:
        tree = CategoryTree.from_parents(entries)
    except ValidityError as e:
        raise ParseError(e.message)
    logger.info("parsed %d categories with %d leaves", len(tree.nodes), len(tree.leaves))
    return tree


def load_crt() -> CategoryTree:
    """The 2022 inventory shipped with the package."""
    text = resources.files("partition_rank").joinpath("data").joinpath(DATA_FILE).read_text(encoding="utf-8")
    return parse_crt(text)


def validate_internal_values(
    tree: CategoryTree, tolerance: Fraction = PartitionRankConfig.INTERNAL_VALUE_TOLERANCE
) -> List[Tuple[int, Fraction, Fraction]]:
    """Categories whose printed total misses the sum of their leaves.

    The allowed gap is the tolerance times the number of leaves, since every
    printed value is rounded. Returns (node, printed, computed) triples.
    """
    misses = []
    for u in tree.preorder:
        node = tree.nodes[u]
        if node.is_leaf or node.value is None:
            continue
        computed = tree.totals[u]
        if abs(node.value - computed) > tolerance * len(tree.leaf_sets[u]):
            logger.warning(
                "printed total %s of %r differs from its leaves' sum %s",
                format_decimal(node.value), node.label, format_decimal(computed),
            )
            misses.append((u, node.value, computed))
    return misses


def format_percent(value: Fraction, decimals: int = PartitionRankConfig.PERCENT_DECIMALS) -> str:
    """Percentage rounded half up, e.g. Fraction(1, 250) -> '0.40%'."""
    scale = 10 ** decimals
    hundredths = int(value * 100 * scale + Fraction(1, 2))
    whole, part = divmod(hundredths, scale)
    return f"{whole}.{part:0{decimals}d}%" if decimals else f"{whole}%"


class ReportRow(BaseModel):
    """Extreme ranks and percentiles of one category."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    code: str
    label: str
    min_rank: int
    max_rank: int
    min_percentile: Rational
    max_percentile: Rational
    witnesses: Dict[str, Partition] = Field(default_factory=dict, exclude=True)

    def as_dict(self) -> dict:
        return {
            "code": self.code,
            "label": self.label,
            "min_rank": self.min_rank,
            "max_rank": self.max_rank,
            "min_pct_exact": str(self.min_percentile),
            "max_pct_exact": str(self.max_percentile),
            "min_pct": format_percent(self.min_percentile),
            "max_pct": format_percent(self.max_percentile),
        }


def category_row(tree: CategoryTree, code: str) -> ReportRow:
    node = tree.find(code)
    target = tree.with_special(node)
    low = tree_rank_min(target)
    high = tree_rank_max(target)
    least = tree_percentile_dp(target, Direction.MIN)
    most = tree_percentile_dp(target, Direction.MAX)
    logger.debug("%s: ranks %d..%d", code, low.rank, high.rank)
    return ReportRow(
        code=code,
        label=tree.nodes[node].label,
        min_rank=low.rank,
        max_rank=high.rank,
        min_percentile=least.percentile,
        max_percentile=most.percentile,
        witnesses={
            "min-rank": low.witness,
            "max-rank": high.witness,
            "min-pct": least.witness,
            "max-pct": most.witness,
        },
    )


def table1_report(
    tree: CategoryTree, targets: Sequence[str] = PartitionRankConfig.DEFAULT_TARGETS
) -> List[ReportRow]:
    """One row per target code, in the order given."""
    return [category_row(tree, code) for code in targets]


def format_report(rows: Sequence[ReportRow], fmt: ResponseFormat = ResponseFormat.TEXT) -> str:
    if fmt == ResponseFormat.JSON:
        return json.dumps([row.as_dict() for row in rows], ensure_ascii=False, indent=2)

    header = ("CRT Category", "Min Rank", "Max Rank", "Min Percentile", "Max Percentile")
    body = [
        (row.label, str(row.min_rank), str(row.max_rank),
         format_percent(row.min_percentile), format_percent(row.max_percentile))
        for row in rows
    ]
    widths = [max(len(line[i]) for line in [header, *body]) for i in range(len(header))]
    lines = []
    for line in [header, *body]:
        cells = [line[0].ljust(widths[0])] + [cell.rjust(width) for cell, width in zip(line[1:], widths[1:])]
        lines.append("  ".join(cells))
    lines.insert(1, "  ".join("-" * width for width in widths))
    return "\n".join(lines)
