"""
Hierarchical-category variant.

Elements are the leaves of a category tree. A block is either a category
(every leaf under an internal node) or what is left of an item class once the
chosen categories are removed. With one leaf per class the rank problems are
solved top-down and the percentile problems by a dynamic program over block
counts; the general setting is left to enumeration.
"""

import logging
from collections import deque
from decimal import Decimal
from fractions import Fraction
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Set, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .core import classify_value, counts, percentile_from_score, score_of
from .errors import DomainError, UnknownCategoryError, ValidityError, VariantError
from .models import (
    Direction,
    Instance,
    Objective,
    OracleResult,
    Partition,
    PercentileSolution,
    Rational,
    RankConvention,
    RankSolution,
    SubsetClass,
)
from .oracle import PartitionConstraint, exact_optimum

logger = logging.getLogger(__name__)

SYNTHETIC_ROOT_LABEL = "(all trees)"


class CategoryNode(BaseModel):
    """A category or a leaf element of the tree."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    id: int = Field(..., ge=0)
    label: str
    parent: Optional[int] = None
    children: Tuple[int, ...] = Field(default=())
    value: Optional[Rational] = Field(default=None, description="Leaf measure, or the printed total of a category")
    line: Optional[int] = Field(default=None, description="Source line, when parsed from a listing")

    @property
    def is_leaf(self) -> bool:
        return not self.children

    @property
    def code(self) -> str:
        """Leading token of the label, e.g. '1.A.3.b'."""
        parts = self.label.split(maxsplit=1)
        return parts[0] if parts else ""


class CategoryTree(BaseModel):
    """Rooted category tree; leaves are the elements, numbered in preorder."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    nodes: Tuple[CategoryNode, ...]
    root: int = 0
    special: Optional[int] = Field(default=None, description="Node whose leaves form S*")

    @model_validator(mode="after")
    def _check_structure(self) -> "CategoryTree":
        count = len(self.nodes)
        for index, node in enumerate(self.nodes):
            if node.id != index:
                raise ValidityError(f"node ids must be 0..{count - 1} in order, found {node.id} at {index}")
            for child in node.children:
                if not 0 <= child < count or self.nodes[child].parent != index:
                    raise ValidityError(f"node {index} lists child {child} that does not point back to it")
            if len(node.children) == 1:
                raise ValidityError(f"category {node.label!r} has exactly one child")
            if node.is_leaf:
                if node.value is None:
                    raise ValidityError(f"leaf {node.label!r} carries no value")
                if node.value < 0:
                    raise ValidityError(f"leaf {node.label!r} has negative value {node.value}")
        if not 0 <= self.root < count or self.nodes[self.root].parent is not None:
            raise ValidityError("the root must be a node without a parent")
        if sum(1 for node in self.nodes if node.parent is None) != 1:
            raise ValidityError("the tree must have a single root")
        if self.special is not None and not 0 <= self.special < count:
            raise ValidityError(f"special node {self.special} is not in the tree")
        return self

    @classmethod
    def from_parents(
        cls,
        entries: Sequence[tuple],
        special: Optional[int] = None,
    ) -> "CategoryTree":
        """Build from (label, parent index, value[, line]) rows listed parents first.

        Several parentless rows are joined under a synthetic root, which then
        takes id 0 and shifts every other id by one.
        """
        if not entries:
            raise ValidityError("a category tree needs at least one node")
        roots = [i for i, entry in enumerate(entries) if entry[1] is None]
        shift = 1 if len(roots) > 1 else 0
        children: Dict[int, List[int]] = {i + shift: [] for i in range(len(entries))}
        nodes = []
        if shift:
            children[0] = [r + 1 for r in roots]
        for i, entry in enumerate(entries):
            if entry[1] is not None:
                children[entry[1] + shift].append(i + shift)
        if shift:
            nodes.append(CategoryNode(id=0, label=SYNTHETIC_ROOT_LABEL, children=tuple(children[0])))
        for i, (label, parent, value, *line) in enumerate(entries):
            if parent is None:
                parent_id = 0 if shift else None
            else:
                parent_id = parent + shift
            nodes.append(CategoryNode(
                id=i + shift, label=label, parent=parent_id,
                children=tuple(children[i + shift]), value=value,
                line=line[0] if line else None,
            ))
        return cls(nodes=tuple(nodes), root=0 if shift else roots[0], special=None if special is None else special + shift)

    def with_special(self, node: int) -> "CategoryTree":
        return CategoryTree(nodes=self.nodes, root=self.root, special=node)

    @cached_property
    def preorder(self) -> Tuple[int, ...]:
        order, stack = [], [self.root]
        while stack:
            u = stack.pop()
            order.append(u)
            stack.extend(reversed(self.nodes[u].children))
        return tuple(order)

    @cached_property
    def depth(self) -> Dict[int, int]:
        depth = {self.root: 0}
        for u in self.preorder:
            for child in self.nodes[u].children:
                depth[child] = depth[u] + 1
        return depth

    @cached_property
    def leaves(self) -> Tuple[int, ...]:
        """Leaf node ids in preorder; leaf i of this tuple is element (vertex) i."""
        return tuple(u for u in self.preorder if self.nodes[u].is_leaf)

    @cached_property
    def vertex_of(self) -> Dict[int, int]:
        return {u: i for i, u in enumerate(self.leaves)}

    @cached_property
    def leaf_sets(self) -> Dict[int, FrozenSet[int]]:
        """Element ids under every node."""
        sets: Dict[int, FrozenSet[int]] = {}
        for u in reversed(self.preorder):
            node = self.nodes[u]
            if node.is_leaf:
                sets[u] = frozenset({self.vertex_of[u]})
            else:
                sets[u] = frozenset().union(*(sets[c] for c in node.children))
        return sets

    @cached_property
    def mu(self) -> Tuple[Fraction, ...]:
        return tuple(self.nodes[u].value for u in self.leaves)

    @cached_property
    def totals(self) -> Dict[int, Fraction]:
        """Measure of every node: the sum over its leaves."""
        return {u: sum((self.mu[v] for v in leaves), Fraction(0)) for u, leaves in self.leaf_sets.items()}

    @cached_property
    def special_leaves(self) -> FrozenSet[int]:
        return self.leaf_sets[self.special] if self.special is not None else frozenset()

    @cached_property
    def special_mu(self) -> Fraction:
        return self.totals[self.special] if self.special is not None else Fraction(0)

    @cached_property
    def special_ancestors(self) -> FrozenSet[int]:
        """Nodes strictly above the special node; they are never blocks."""
        ancestors: Set[int] = set()
        u = self.special
        while u is not None and self.nodes[u].parent is not None:
            u = self.nodes[u].parent
            ancestors.add(u)
        return frozenset(ancestors)

    @cached_property
    def others(self) -> Tuple[int, ...]:
        return tuple(v for v in range(len(self.leaves)) if v not in self.special_leaves)

    def inside_special(self, u: int) -> bool:
        return bool(self.special_leaves) and self.leaf_sets[u] <= self.special_leaves

    def selectable(self, u: int) -> bool:
        """Whether node u may be a block: it is disjoint from S* and no ancestor of it."""
        return u not in self.special_ancestors and not self.leaf_sets[u] & self.special_leaves

    def find(self, code: str) -> int:
        """Shallowest node whose label starts with the given code."""
        matches = [u for u in self.preorder if self.nodes[u].code == code]
        if not matches:
            raise UnknownCategoryError(code)
        return min(matches, key=lambda u: self.depth[u])

    def label_of_vertex(self, v: int) -> str:
        return self.nodes[self.leaves[v]].label

    def to_instance(self) -> Instance:
        """Elements as an instance on the complete graph; the tree structure stays here."""
        if any(value <= 0 for value in self.mu):
            raise ValidityError("enumeration over an instance needs strictly positive leaf values")
        n = len(self.leaves)
        edges = tuple((u, v) for u in range(n) for v in range(u + 1, n))
        labels = tuple(self.label_of_vertex(v) for v in range(n))
        return Instance(mu=self.mu, edges=edges, special=self.special_leaves, labels=labels)


class ItemClasses(BaseModel):
    """Partition of the non-S* elements into item classes."""

    model_config = ConfigDict(frozen=True)

    classes: Tuple[FrozenSet[int], ...]

    @field_validator("classes", mode="before")
    @classmethod
    def _freeze(cls, classes) -> Tuple[FrozenSet[int], ...]:
        return tuple(sorted((frozenset(c) for c in classes), key=lambda c: min(c) if c else -1))

    @classmethod
    def singletons(cls, tree: CategoryTree) -> "ItemClasses":
        return cls(classes=[{v} for v in tree.others])

    @property
    def trivial(self) -> bool:
        return all(len(c) == 1 for c in self.classes)

    def check_against(self, tree: CategoryTree) -> None:
        seen: Set[int] = set()
        for cls in self.classes:
            if not cls or seen & cls:
                raise ValidityError("item classes must be nonempty and disjoint")
            seen |= cls
        if seen != set(tree.others):
            raise ValidityError("item classes must cover exactly the elements outside S*")


def _require_special(tree: CategoryTree) -> None:
    if tree.special is None:
        raise DomainError("no special node is designated")
    if not tree.others:
        raise DomainError("S* covers every element")


def _require_single_instances(tree: CategoryTree, classes: Optional[ItemClasses]) -> None:
    if classes is not None and not classes.trivial:
        raise VariantError("this solver needs one element per item class; use tree_general_bruteforce")


def _rank(tree: CategoryTree, blocks: Iterable[FrozenSet[int]], conv: RankConvention) -> int:
    special_mu = tree.special_mu
    return 1 + sum(1 for block in blocks if counts(sum((tree.mu[v] for v in block), Fraction(0)), special_mu, conv))


def tree_rank_min(
    tree: CategoryTree,
    classes: Optional[ItemClasses] = None,
    conv: RankConvention = RankConvention.STRICT_ABOVE,
) -> RankSolution:
    """Breadth-first from the root: bundle a subtree whenever one of its leaves counts.

    Nodes above S* are opened; any other node either becomes one block (it
    holds a counting leaf, so some block in it must count anyway) or falls
    apart into singleton leaves, none of which count.
    """
    _require_special(tree)
    _require_single_instances(tree, classes)
    special_mu = tree.special_mu
    blocks: List[FrozenSet[int]] = []
    explore = deque([tree.root])
    while explore:
        u = explore.popleft()
        if u == tree.special or tree.inside_special(u):
            continue
        if u in tree.special_ancestors:
            explore.extend(tree.nodes[u].children)
            continue
        leaves = tree.leaf_sets[u]
        if any(counts(tree.mu[v], special_mu, conv) for v in leaves):
            blocks.append(leaves)
        else:
            blocks.extend(frozenset({v}) for v in leaves)
    witness = Partition.of(blocks, tree.special_leaves)
    return RankSolution(_rank(tree, witness.blocks, conv), witness)


def tree_rank_max(
    tree: CategoryTree,
    classes: Optional[ItemClasses] = None,
    conv: RankConvention = RankConvention.AT_LEAST,
) -> RankSolution:
    """Top-down: keep a category whole iff none of its children counts."""
    _require_special(tree)
    _require_single_instances(tree, classes)
    special_mu = tree.special_mu
    blocks: List[FrozenSet[int]] = []
    stack = [tree.root]
    while stack:
        u = stack.pop()
        node = tree.nodes[u]
        if u == tree.special or tree.inside_special(u):
            continue
        if u in tree.special_ancestors:
            stack.extend(node.children)
        elif node.is_leaf:
            blocks.append(tree.leaf_sets[u])
        elif any(counts(tree.totals[c], special_mu, conv) for c in node.children):
            stack.extend(node.children)
        else:
            blocks.append(tree.leaf_sets[u])
    witness = Partition.of(blocks, tree.special_leaves)
    return RankSolution(_rank(tree, witness.blocks, conv), witness)


# witness fragments: a block, a pair of fragments, or nothing
Fragment = Union[FrozenSet[int], Tuple["Fragment", "Fragment"], None]


def _flatten(fragment: Fragment) -> List[FrozenSet[int]]:
    blocks: List[FrozenSet[int]] = []
    stack = [fragment]
    while stack:
        item = stack.pop()
        if item is None:
            continue
        if isinstance(item, frozenset):
            blocks.append(item)
        else:
            stack.extend(item)
    return blocks


Table = Dict[int, Tuple[Fraction, Fragment]]


def _better(direction: Direction, candidate: Fraction, incumbent: Optional[Tuple[Fraction, Fragment]]) -> bool:
    if incumbent is None:
        return True
    return candidate < incumbent[0] if direction == Direction.MIN else candidate > incumbent[0]


def _fold(direction: Direction, left: Table, right: Table) -> Table:
    merged: Table = {}
    for a, (score_a, frag_a) in left.items():
        for b, (score_b, frag_b) in right.items():
            candidate = score_a + score_b
            if _better(direction, candidate, merged.get(a + b)):
                merged[a + b] = (candidate, (frag_a, frag_b))
    return merged


def tree_score_tables(tree: CategoryTree, direction: Direction) -> Dict[int, Table]:
    """G[u][c]: optimal l + m/2 over admissible splits of u's non-S* leaves into c blocks."""
    special_mu = tree.special_mu
    tables: Dict[int, Table] = {}
    for u in reversed(tree.preorder):
        if u == tree.special or tree.inside_special(u):
            continue
        node = tree.nodes[u]
        table: Table = {}
        if not node.is_leaf:
            table = {0: (Fraction(0), None)}
            for child in node.children:
                if child in tables:
                    table = _fold(direction, table, tables[child])
            table.pop(0, None)
        if tree.selectable(u):
            score = score_of(classify_value(tree.totals[u], special_mu))
            if _better(direction, score, table.get(1)):
                table[1] = (score, tree.leaf_sets[u])
        tables[u] = table
    return tables


def tree_percentile_dp(
    tree: CategoryTree, direction: Direction, classes: Optional[ItemClasses] = None
) -> PercentileSolution:
    """Optimal percentile over every admissible partition.

    Children are folded one at a time over block counts, so the table of a node
    costs quadratic time in its leaf count whatever its degree. A node may also
    be taken whole when it is disjoint from S*. The percentile for c blocks is
    (G[root][c] + 1/2)/(c + 1).
    """
    _require_special(tree)
    _require_single_instances(tree, classes)
    tables = tree_score_tables(tree, direction)
    root_table = tables.get(tree.root, {})
    best: Optional[Fraction] = None
    fragment: Fragment = None
    for c in sorted(root_table):
        score, candidate = root_table[c]
        value = percentile_from_score(score, c)
        if best is None or (value < best if direction == Direction.MIN else value > best):
            best, fragment = value, candidate
    if best is None:
        raise DomainError("no admissible partition exists")
    logger.debug("tree percentile %s: %s with %d table entries at the root", direction.value, best, len(root_table))
    return PercentileSolution(best, Partition.of(_flatten(fragment), tree.special_leaves))


class HierarchyAntichain(PartitionConstraint):
    """Antichains of selectable categories plus the leftover of every item class."""

    name = "hierarchy"

    def __init__(self, tree: CategoryTree, classes: Optional[ItemClasses] = None):
        self.tree = tree
        self.classes = classes or ItemClasses.singletons(tree)
        self.classes.check_against(tree)

    def _antichains(self, u: int) -> Iterator[Tuple[int, ...]]:
        tree = self.tree
        node = tree.nodes[u]
        if node.is_leaf or tree.inside_special(u):
            yield ()
            return
        if tree.selectable(u):
            yield (u,)

        def combine(children: Sequence[int]) -> Iterator[Tuple[int, ...]]:
            if not children:
                yield ()
                return
            for head in self._antichains(children[0]):
                for tail in combine(children[1:]):
                    yield head + tail

        yield from combine(node.children)

    def partitions(self, inst: Instance) -> Iterator[Partition]:
        seen: Set[FrozenSet[FrozenSet[int]]] = set()
        for chosen in self._antichains(self.tree.root):
            covered = frozenset().union(*(self.tree.leaf_sets[u] for u in chosen)) if chosen else frozenset()
            blocks = [self.tree.leaf_sets[u] for u in chosen]
            blocks += [cls - covered for cls in self.classes.classes if cls - covered]
            key = frozenset(blocks)
            if key in seen:
                continue
            seen.add(key)
            yield Partition.trusted(sorted(blocks, key=min), inst.special)


def tree_general_bruteforce(
    tree: CategoryTree,
    classes: Optional[ItemClasses],
    objective: Objective,
    conv: Optional[RankConvention] = None,
    limit: Optional[int] = None,
) -> OracleResult:
    """Exhaustive optimum for arbitrary item classes (both rank problems are NP-hard here)."""
    _require_special(tree)
    constraint = HierarchyAntichain(tree, classes)
    return exact_optimum(tree.to_instance(), objective, conv, constraint, limit)


_MARKS = {SubsetClass.LARGE: "[L]", SubsetClass.MEDIUM: "[M]", SubsetClass.SMALL: "[s]"}


def format_decimal(value: Fraction) -> str:
    """Exact decimal rendering when the denominator allows it, else p/q."""
    denominator = value.denominator
    for prime in (2, 5):
        while denominator % prime == 0:
            denominator //= prime
    if denominator != 1:
        return str(value)
    return format(Decimal(value.numerator) / Decimal(value.denominator), "f")


def render_shaded(tree: CategoryTree, witness: Partition) -> str:
    """Indented listing with every node that is a block of the witness marked."""
    blocks = set(witness.blocks)
    synthetic = tree.nodes[tree.root].label == SYNTHETIC_ROOT_LABEL
    lines = []
    for u in tree.preorder:
        if synthetic and u == tree.root:
            continue
        if u == tree.special:
            mark = "[S*]"
        elif tree.selectable(u) and tree.leaf_sets[u] in blocks:
            mark = _MARKS[classify_value(tree.totals[u], tree.special_mu)]
        else:
            mark = "   "
        indent = "  " * (tree.depth[u] - synthetic)
        lines.append(f"{indent}{mark} {tree.nodes[u].label} ({format_decimal(tree.totals[u])})")
    return "\n".join(lines)
