"""
Weighted average maximisation over a single timeline.

Periods are cut into contiguous marking periods, each with some possible
points, and the weighted sum of their earned/possible ratios is maximised.
"""

import logging
from enum import Enum
from fractions import Fraction
from typing import List, NamedTuple, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from .errors import DomainError, ValidityError
from .models import Partition, Rational

logger = logging.getLogger(__name__)


class WeightConvention(str, Enum):
    """Weight of a marking period of length L among n periods."""

    AS_WRITTEN = "as-written"  # 1 / L
    LENGTH_PROPORTIONAL = "length"  # L / n


class GradeInstance(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    earned: Tuple[Rational, ...]
    possible: Tuple[Rational, ...]
    labels: Optional[Tuple[str, ...]] = None
    convention: WeightConvention = WeightConvention.AS_WRITTEN

    @model_validator(mode="after")
    def _check_points(self) -> "GradeInstance":
        if not self.earned or len(self.earned) != len(self.possible):
            raise ValidityError("earned and possible points need one entry per period")
        if self.labels is not None and len(self.labels) != len(self.earned):
            raise ValidityError("expected one label per period")
        for i, (mu, cap) in enumerate(zip(self.earned, self.possible)):
            if mu < 0 or cap < 0:
                raise ValidityError(f"period {i} has negative points")
            if mu > cap:
                raise ValidityError(f"period {i} earns {mu} of only {cap} possible points")
        if sum(self.possible) <= 0:
            raise DomainError("no points are possible over the whole timeline")
        return self

    @property
    def n(self) -> int:
        return len(self.earned)


class GradeSolution(NamedTuple):
    grade: Fraction
    witness: Partition


def block_grade(inst: GradeInstance, i: int, j: int) -> Optional[Fraction]:
    """Weighted ratio of periods i..j (inclusive, 0-based); None when nothing is possible there."""
    cap = sum(inst.possible[i:j + 1], Fraction(0))
    if cap <= 0:
        return None
    ratio = sum(inst.earned[i:j + 1], Fraction(0)) / cap
    length = j - i + 1
    if inst.convention == WeightConvention.AS_WRITTEN:
        return ratio / length
    return ratio * Fraction(length, inst.n)


def weighted_average_max(inst: GradeInstance) -> GradeSolution:
    """Best grade over contiguous partitions whose blocks all have possible points.

    best[j] is the optimum over the first j periods; best[0] = 0 lets the whole
    prefix be a single marking period.
    """
    n = inst.n
    best: List[Optional[Fraction]] = [Fraction(0)] + [None] * n
    parent: List[int] = [0] * (n + 1)
    for j in range(1, n + 1):
        for i in range(j):
            if best[i] is None:
                continue
            value = block_grade(inst, i, j - 1)
            if value is None:
                continue
            candidate = best[i] + value
            if best[j] is None or candidate > best[j]:
                best[j], parent[j] = candidate, i
    if best[n] is None:
        raise DomainError("no partition gives every marking period possible points")

    blocks = []
    j = n
    while j > 0:
        blocks.append(range(parent[j], j))
        j = parent[j]
    logger.debug("grade %s over %d marking periods", best[n], len(blocks))
    return GradeSolution(best[n], Partition.of(blocks))
