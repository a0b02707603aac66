"""
Data models for partition-rank.

This module contains the Pydantic models and enums every solver shares:
instances, partitions, block profiles and the result tuples solvers return.
All measure values are exact rationals (fractions.Fraction).
"""

from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import Annotated, Any, FrozenSet, Iterable, NamedTuple, Optional, Tuple, Union

import networkx as nx
from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, field_validator, model_validator

from .errors import ValidityError


def to_fraction(value: Any) -> Fraction:
    """Parse an exact rational from a Fraction, int, "p/q" string or decimal string.

    Binary floats are rejected so that no rounding can enter the solvers.
    """
    if isinstance(value, bool):
        raise ValueError("booleans are not rational values")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        raise ValueError(f"floating-point value {value!r} is not accepted; use 'p/q' or a decimal string")
    if isinstance(value, str):
        text = value.strip().replace(" ", "")
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"not a rational number: {value!r}")
    raise ValueError(f"cannot interpret {type(value).__name__} as a rational number")


Rational = Annotated[Fraction, BeforeValidator(to_fraction)]


class SubsetClass(str, Enum):
    """Class of a block relative to S*."""

    LARGE = "large"
    MEDIUM = "medium"
    SMALL = "small"


class RankConvention(str, Enum):
    """Which blocks outrank S*: strictly larger ones, or larger-or-equal ones."""

    STRICT_ABOVE = "strict"
    AT_LEAST = "at-least"


class Direction(str, Enum):
    MIN = "min"
    MAX = "max"


class Objective(str, Enum):
    """The four base problems."""

    MIN_RANK = "min-rank"
    MAX_RANK = "max-rank"
    MIN_PERCENTILE = "min-pct"
    MAX_PERCENTILE = "max-pct"

    @property
    def direction(self) -> Direction:
        if self in (Objective.MIN_RANK, Objective.MIN_PERCENTILE):
            return Direction.MIN
        return Direction.MAX

    @property
    def is_rank(self) -> bool:
        return self in (Objective.MIN_RANK, Objective.MAX_RANK)

    @property
    def default_convention(self) -> RankConvention:
        # minimisation counts strictly larger blocks, maximisation counts ties too
        if self == Objective.MAX_RANK:
            return RankConvention.AT_LEAST
        return RankConvention.STRICT_ABOVE


class ResponseFormat(str, Enum):
    """Output format of the command-line reports."""

    TEXT = "text"
    JSON = "json"


class MergeEffect(str, Enum):
    """Effect of merging a family of blocks on the percentile of S*."""

    DECREASES = "decreases"
    INCREASES = "increases"
    NEUTRAL = "neutral"


class Instance(BaseModel):
    """Similarity graph, exact-rational measure and distinguished subset S*.

    Vertices are the dense ids 0..n-1; mu[v] is the value of the singleton {v}.
    Edges are stored once per unordered pair, without self-loops.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    mu: Tuple[Rational, ...] = Field(..., description="Singleton values indexed by vertex id")
    edges: Tuple[Tuple[int, int], ...] = Field(default=(), description="Undirected similarity pairs")
    special: FrozenSet[int] = Field(default_factory=frozenset, description="Vertex ids of S*")
    labels: Optional[Tuple[str, ...]] = Field(default=None, description="External vertex labels")

    @field_validator("edges")
    @classmethod
    def _normalize_edges(cls, edges: Tuple[Tuple[int, int], ...]) -> Tuple[Tuple[int, int], ...]:
        pairs = {(min(u, v), max(u, v)) for u, v in edges if u != v}
        return tuple(sorted(pairs))

    @model_validator(mode="after")
    def _check_invariants(self) -> "Instance":
        n = len(self.mu)
        for u, v in self.edges:
            if u < 0 or v >= n:
                raise ValidityError(f"edge ({u}, {v}) references a vertex outside 0..{n - 1}")
        for v, value in enumerate(self.mu):
            if value <= 0:
                raise ValidityError(f"vertex {v} has non-positive value {value}")
        if any(v < 0 or v >= n for v in self.special):
            raise ValidityError("S* references a vertex outside the instance")
        if self.labels is not None and len(self.labels) != n:
            raise ValidityError(f"expected {n} labels, got {len(self.labels)}")
        if self.special and not nx.is_connected(self.graph.subgraph(self.special)):
            raise ValidityError("S* must induce a connected subgraph")
        return self

    @property
    def n(self) -> int:
        return len(self.mu)

    @property
    def vertices(self) -> range:
        return range(len(self.mu))

    @cached_property
    def graph(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(len(self.mu)))
        graph.add_edges_from(self.edges)
        return graph

    @cached_property
    def others(self) -> Tuple[int, ...]:
        """Vertices outside S*, ascending."""
        return tuple(v for v in range(len(self.mu)) if v not in self.special)

    @cached_property
    def residual(self) -> nx.Graph:
        """G with S* removed."""
        return self.graph.subgraph(self.others).copy()

    @cached_property
    def special_mu(self) -> Fraction:
        return sum((self.mu[v] for v in self.special), Fraction(0))

    def mu_of(self, block: Iterable[int]) -> Fraction:
        return sum((self.mu[v] for v in block), Fraction(0))

    def label(self, v: int) -> str:
        return self.labels[v] if self.labels is not None else str(v)


class Partition(BaseModel):
    """Blocks S_1..S_c covering V without S*, plus S* itself when nonempty."""

    model_config = ConfigDict(frozen=True)

    blocks: Tuple[FrozenSet[int], ...] = Field(..., description="Disjoint nonempty blocks")
    special: FrozenSet[int] = Field(default_factory=frozenset, description="Vertex ids of S*")

    @model_validator(mode="after")
    def _check_blocks(self) -> "Partition":
        seen = set(self.special)
        for block in self.blocks:
            if not block:
                raise ValidityError("partition blocks must be nonempty")
            if seen & block:
                raise ValidityError(f"block {sorted(block)} overlaps another block or S*")
            seen |= block
        return self

    @classmethod
    def of(cls, blocks: Iterable[Iterable[int]], special: Iterable[int] = ()) -> "Partition":
        """Build a partition with blocks in canonical order (sorted by minimum element)."""
        frozen = [frozenset(block) for block in blocks]
        frozen.sort(key=min)
        return cls(blocks=tuple(frozen), special=frozenset(special))

    @classmethod
    def trusted(cls, blocks: Iterable[FrozenSet[int]], special: FrozenSet[int]) -> "Partition":
        """Build without validation; callers guarantee disjoint nonempty blocks."""
        return cls.model_construct(blocks=tuple(blocks), special=special)

    @property
    def includes_special(self) -> bool:
        return bool(self.special)

    @property
    def c(self) -> int:
        return len(self.blocks)

    def canonical(self) -> "Partition":
        return Partition.of(self.blocks, self.special)

    def covered(self) -> FrozenSet[int]:
        return frozenset().union(*self.blocks) if self.blocks else frozenset()


class Profile(BaseModel):
    """Counts of large, medium and small blocks in a partition."""

    model_config = ConfigDict(frozen=True)

    l: int = Field(default=0, ge=0)
    m: int = Field(default=0, ge=0)
    s: int = Field(default=0, ge=0)

    @property
    def c(self) -> int:
        return self.l + self.m + self.s

    @property
    def score(self) -> Fraction:
        return self.l + Fraction(self.m, 2)


class RankSolution(NamedTuple):
    rank: int
    witness: Partition


class PercentileSolution(NamedTuple):
    percentile: Fraction
    witness: Partition


class ApproxPercentileSolution(NamedTuple):
    percentile: Fraction
    witness: Partition
    certified_optimal: bool


class OracleResult(BaseModel):
    """Exhaustive optimum with the first partition attaining it."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    best_value: Union[int, Fraction]
    witness: Partition
    explored: int = Field(..., ge=0, description="Number of admissible partitions enumerated")
