"""
Equivalence-class variant.

Admissible blocks are singletons and whole equivalence classes; the graph plays
no role. All four problems are solved exactly in polynomial time.
"""

import logging
from fractions import Fraction
from functools import cached_property
from typing import FrozenSet, List, Set, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .core import classify_value, combine_improves, merge_fraction, percentile_of_blocks, rank_of_blocks
from .errors import DomainError, ValidityError
from .models import (
    Direction,
    Instance,
    MergeEffect,
    Partition,
    PercentileSolution,
    Profile,
    RankConvention,
    RankSolution,
    SubsetClass,
)
from .oracle import EquivalenceClasses

logger = logging.getLogger(__name__)


class EquivalenceInstance(BaseModel):
    """An instance together with a partition of V without S* into equivalence classes."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    instance: Instance
    classes: Tuple[FrozenSet[int], ...] = Field(..., description="Disjoint classes covering V without S*")

    @field_validator("classes", mode="before")
    @classmethod
    def _freeze(cls, classes) -> Tuple[FrozenSet[int], ...]:
        return tuple(sorted((frozenset(c) for c in classes), key=lambda c: min(c) if c else -1))

    @model_validator(mode="after")
    def _check_cover(self) -> "EquivalenceInstance":
        seen: Set[int] = set()
        for cls in self.classes:
            if not cls:
                raise ValidityError("equivalence classes must be nonempty")
            if seen & cls:
                raise ValidityError(f"class {sorted(cls)} overlaps another class")
            seen |= cls
        if seen != set(self.instance.others):
            raise ValidityError("equivalence classes must cover exactly V without S*")
        return self

    @cached_property
    def constraint(self) -> EquivalenceClasses:
        return EquivalenceClasses(self.classes)


def _require_special(eq: EquivalenceInstance) -> Instance:
    inst = eq.instance
    if not inst.special:
        raise DomainError("rank and percentile are undefined for an empty S*")
    return inst


def _blocks(eq: EquivalenceInstance, merged: Set[FrozenSet[int]]) -> Partition:
    blocks: List[FrozenSet[int]] = []
    for cls in eq.classes:
        if cls in merged:
            blocks.append(cls)
        else:
            blocks.extend(frozenset({v}) for v in cls)
    return Partition.of(blocks, eq.instance.special)


def eq_rank_min(eq: EquivalenceInstance) -> RankSolution:
    """Each class holding a large singleton becomes one block; that block is unavoidable."""
    inst = _require_special(eq)
    special_mu = inst.special_mu
    merged = {cls for cls in eq.classes if any(inst.mu[v] > special_mu for v in cls)}
    witness = _blocks(eq, merged)
    return RankSolution(rank_of_blocks(inst, witness, RankConvention.STRICT_ABOVE), witness)


def eq_rank_max(eq: EquivalenceInstance) -> RankSolution:
    """Keep a class whole iff at most one of its elements is large or medium."""
    inst = _require_special(eq)
    special_mu = inst.special_mu
    merged = {
        cls for cls in eq.classes
        if sum(1 for v in cls if inst.mu[v] >= special_mu) <= 1
    }
    witness = _blocks(eq, merged)
    return RankSolution(rank_of_blocks(inst, witness, RankConvention.AT_LEAST), witness)


def _class_profile(inst: Instance, cls: FrozenSet[int]) -> Profile:
    tally = {c: 0 for c in SubsetClass}
    for v in cls:
        tally[classify_value(inst.mu[v], inst.special_mu)] += 1
    return Profile(l=tally[SubsetClass.LARGE], m=tally[SubsetClass.MEDIUM], s=tally[SubsetClass.SMALL])


def _scan_order(inst: Instance, classes: List[FrozenSet[int]], direction: Direction) -> List[FrozenSet[int]]:
    """Extreme merge fractions first; all-small classes lead when maximising."""

    def key(cls: FrozenSet[int]):
        profile = _class_profile(inst, cls)
        if profile.l == 0 and profile.m == 0:
            return (0, Fraction(0), min(cls))
        fraction = merge_fraction(profile)
        return (1, -fraction if direction == Direction.MIN else fraction, min(cls))

    return sorted(classes, key=key)


def eq_percentile_opt(eq: EquivalenceInstance, direction: Direction) -> PercentileSolution:
    """Optimal percentile by merging classes from the all-singleton partition.

    A class is merged while doing so moves the current percentile in the wanted
    direction; the fixed point is optimal because each class's effect only
    depends on its own profile and the current percentile.
    """
    inst = _require_special(eq)
    if not inst.others:
        raise DomainError("percentile is undefined when S* covers every vertex")
    wanted = MergeEffect.DECREASES if direction == Direction.MIN else MergeEffect.INCREASES
    merged: Set[FrozenSet[int]] = set()
    current = percentile_of_blocks(inst, _blocks(eq, merged))

    candidates = [cls for cls in eq.classes if len(cls) > 1]
    progress = True
    while progress:
        progress = False
        for cls in _scan_order(inst, [c for c in candidates if c not in merged], direction):
            if combine_improves(current, _class_profile(inst, cls)) != wanted:
                continue
            merged.add(cls)
            current = percentile_of_blocks(inst, _blocks(eq, merged))
            logger.debug("merged class %s, percentile now %s", sorted(cls), current)
            progress = True
            break

    witness = _blocks(eq, merged)
    return PercentileSolution(current, witness)
