"""
Exhaustive oracle.

Enumerates every admissible partition of a small instance and evaluates the
four objectives exactly. Each variant supplies its admissible family through a
PartitionConstraint; the oracle itself only enforces the size cap, counts and
keeps the first optimal witness.
"""

import itertools
import logging
from abc import ABC, abstractmethod
from fractions import Fraction
from math import lcm
from typing import Callable, Dict, FrozenSet, Iterable, Iterator, List, Optional, Tuple

from .config import load_settings
from .core import counts, percentile_from_score
from .errors import DomainError, SizeLimitError, ValidityError
from .models import (
    Direction,
    Instance,
    Objective,
    OracleResult,
    Partition,
    RankConvention,
    RankSolution,
)

logger = logging.getLogger(__name__)


class PartitionConstraint(ABC):
    """Family of admissible partitions of V without S*."""

    name = "constraint"

    @abstractmethod
    def partitions(self, inst: Instance) -> Iterator[Partition]:
        """Yield every admissible partition exactly once, in a fixed order."""

    def check_size(self, inst: Instance, limit: int) -> None:
        if len(inst.others) > limit:
            raise SizeLimitError(len(inst.others), limit)


class AnyConnected(PartitionConstraint):
    """Every partition of V without S* into connected blocks."""

    name = "any"

    def partitions(self, inst: Instance) -> Iterator[Partition]:
        special = inst.special
        for blocks in connected_partitions(inst.residual, frozenset(inst.others)):
            yield Partition.trusted(blocks, special)


class EquivalenceClasses(PartitionConstraint):
    """Blocks are singletons or whole equivalence classes."""

    name = "equivalence"

    def __init__(self, classes: Iterable[Iterable[int]]):
        self.classes: Tuple[FrozenSet[int], ...] = tuple(
            sorted((frozenset(c) for c in classes), key=min)
        )

    def partitions(self, inst: Instance) -> Iterator[Partition]:
        covered = frozenset().union(*self.classes) if self.classes else frozenset()
        if covered != frozenset(inst.others) or sum(map(len, self.classes)) != len(covered):
            raise ValidityError("equivalence classes must partition V without S*")
        mergeable = [c for c in self.classes if len(c) > 1]
        fixed = [frozenset({v}) for c in self.classes if len(c) == 1 for v in c]
        for choice in itertools.product((False, True), repeat=len(mergeable)):
            blocks = list(fixed)
            for merged, cls in zip(choice, mergeable):
                if merged:
                    blocks.append(cls)
                else:
                    blocks.extend(frozenset({v}) for v in cls)
            blocks.sort(key=min)
            yield Partition.trusted(blocks, inst.special)


def _connected_sets(root: int, allowed: FrozenSet[int], adjacency: Dict[int, set]) -> Iterator[FrozenSet[int]]:
    """Connected subsets of `allowed` that contain root, each exactly once."""

    def grow(block: FrozenSet[int], extension: List[int], excluded: FrozenSet[int]):
        yield block
        done = set()
        for i, u in enumerate(extension):
            later = extension[i + 1:]
            fresh = sorted(
                w for w in adjacency[u]
                if w in allowed and w not in block and w not in excluded
                and w not in done and w not in extension
            )
            yield from grow(block | {u}, later + fresh, excluded | done)
            done.add(u)

    start = sorted(w for w in adjacency[root] if w in allowed)
    yield from grow(frozenset({root}), start, frozenset())


def connected_partitions(graph, vertices: FrozenSet[int]) -> Iterator[List[FrozenSet[int]]]:
    """Partitions of `vertices` into blocks connected in `graph`.

    The block holding the least unassigned vertex is grown first, so blocks come
    out sorted by their minimum element and no partition repeats.
    """
    adjacency = {v: set(graph[v]) & vertices for v in vertices}

    def split(remaining: FrozenSet[int]):
        if not remaining:
            yield []
            return
        root = min(remaining)
        for block in _connected_sets(root, remaining, adjacency):
            for rest in split(remaining - block):
                yield [block, *rest]

    yield from split(frozenset(vertices))


def enumerate_valid_partitions(
    inst: Instance, constraint: Optional[PartitionConstraint] = None, limit: Optional[int] = None
) -> Iterator[Partition]:
    """Stream every admissible partition; the size cap is checked before streaming."""
    constraint = constraint or AnyConnected()
    if limit is None:
        limit = load_settings().oracle_limit
    constraint.check_size(inst, limit)
    return constraint.partitions(inst)


def _scaled(inst: Instance) -> Tuple[Dict[int, int], int]:
    scale = 1
    for value in inst.mu:
        scale = lcm(scale, value.denominator)
    weights = {v: int(inst.mu[v] * scale) for v in inst.vertices}
    return weights, int(inst.special_mu * scale)


def _evaluator(inst: Instance, objective: Objective, conv: RankConvention) -> Callable[[Partition], object]:
    weights, special = _scaled(inst)
    cache: Dict[FrozenSet[int], int] = {}

    def block_value(block: FrozenSet[int]) -> int:
        value = cache.get(block)
        if value is None:
            value = sum(weights[v] for v in block)
            cache[block] = value
        return value

    if objective.is_rank:
        def rank(partition: Partition) -> int:
            return 1 + sum(1 for block in partition.blocks if counts(block_value(block), special, conv))

        return rank

    def percentile(partition: Partition) -> Fraction:
        doubled = 0
        for block in partition.blocks:
            value = block_value(block)
            doubled += 2 if value > special else 1 if value == special else 0
        return percentile_from_score(Fraction(doubled, 2), len(partition.blocks))

    return percentile


def exact_optimum(
    inst: Instance,
    objective: Objective,
    conv: Optional[RankConvention] = None,
    constraint: Optional[PartitionConstraint] = None,
    limit: Optional[int] = None,
) -> OracleResult:
    """Optimum of the objective over every admissible partition.

    Ties keep the first witness in enumeration order.
    """
    if not inst.special:
        raise DomainError("the oracle needs a nonempty S*")
    if not objective.is_rank and not inst.others:
        raise DomainError("percentile is undefined when S* covers every vertex")
    conv = conv or objective.default_convention
    evaluate = _evaluator(inst, objective, conv)
    minimize = objective.direction == Direction.MIN

    best = None
    witness = None
    explored = 0
    for partition in enumerate_valid_partitions(inst, constraint, limit):
        explored += 1
        value = evaluate(partition)
        if best is None or (value < best if minimize else value > best):
            best, witness = value, partition
    if witness is None:
        raise DomainError("no admissible partition exists")

    logger.debug("oracle %s explored %d partitions, best %s", objective.value, explored, best)
    return OracleResult(best_value=best, witness=witness.canonical(), explored=explored)


def oracle_rank_max(inst: Instance, conv: RankConvention, limit: Optional[int] = None) -> RankSolution:
    """Exact rank maximisation by enumeration; the default strategy for small graphs."""
    result = exact_optimum(inst, Objective.MAX_RANK, conv, limit=limit)
    return RankSolution(int(result.best_value), result.witness)
