"""
Uniform-value case.

When every element has the same value, S* of k elements is beaten exactly by
blocks of at least k elements. Minimisation takes all singletons; maximisation
on a connected circulant G without S* chunks a Hamiltonian path.
"""

import logging
from fractions import Fraction
from math import gcd
from typing import List, Sequence, Tuple

import networkx as nx
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .core import percentile_of, rank_of
from .errors import CaseError, ConnectivityError, DomainError, ValidityError
from .general import greedy_rank_min
from .models import (
    Instance,
    Objective,
    Partition,
    PercentileSolution,
    RankConvention,
    RankSolution,
)
from .oracle import exact_optimum

logger = logging.getLogger(__name__)


class CirculantSpec(BaseModel):
    """C_n(s_1, ..., s_l): vertex x is adjacent to x +- s_i mod n."""

    model_config = ConfigDict(frozen=True)

    n: int = Field(..., ge=1)
    jumps: Tuple[int, ...] = Field(default=())

    @field_validator("jumps")
    @classmethod
    def _normalise_jumps(cls, jumps: Tuple[int, ...]) -> Tuple[int, ...]:
        return tuple(sorted(set(jumps)))

    @model_validator(mode="after")
    def _check_jumps(self) -> "CirculantSpec":
        for s in self.jumps:
            if s <= 0 or 2 * s > self.n:
                raise ValidityError(f"jump {s} must satisfy 0 < s <= n/2 for n = {self.n}")
        return self

    @property
    def connected(self) -> bool:
        g = self.n
        for s in self.jumps:
            g = gcd(g, s)
        return g == 1

    def adjacent(self, u: int, v: int) -> bool:
        diff = (v - u) % self.n
        return any(diff == s or diff == self.n - s for s in self.jumps)


def circulant_graph(spec: CirculantSpec) -> nx.Graph:
    return nx.circulant_graph(spec.n, list(spec.jumps))


def circulant_instance(spec: CirculantSpec, k: int, value: Fraction = Fraction(1)) -> Instance:
    """Uniform instance whose G without S* is the circulant; S* is a path of k extra vertices.

    Vertices 0..n-1 are the circulant's, n..n+k-1 form S*, attached to vertex 0.
    """
    if k < 1:
        raise DomainError("S* needs at least one element")
    edges = list(circulant_graph(spec).edges())
    edges += [(spec.n + i, spec.n + i + 1) for i in range(k - 1)]
    edges.append((0, spec.n))
    return Instance(
        mu=tuple([value] * (spec.n + k)),
        edges=tuple(edges),
        special=frozenset(range(spec.n, spec.n + k)),
    )


def _require_uniform(inst: Instance) -> Fraction:
    values = set(inst.mu)
    if len(values) != 1:
        raise CaseError("all singleton values must be equal")
    return next(iter(values))


def uniform_min_solutions(inst: Instance) -> Tuple[int, Fraction, Partition]:
    """Minimum rank and percentile with uniform values.

    With k >= 2 no singleton beats S*, so all singletons give rank 1 and the most
    blocks, hence percentile 1/2 / (n - k + 1). For k = 1 every singleton ties
    with S*, and the general solvers take over.
    """
    _require_uniform(inst)
    k = len(inst.special)
    if k == 0:
        raise DomainError("rank is undefined for an empty S*")
    if not inst.others:
        raise DomainError("percentile is undefined when S* covers every vertex")
    if k == 1:
        rank, _ = greedy_rank_min(inst)
        result = exact_optimum(inst, Objective.MIN_PERCENTILE)
        logger.info("k = 1: minimum percentile taken from the oracle")
        return rank, result.best_value, result.witness
    witness = Partition.of(([v] for v in inst.others), inst.special)
    return 1, Fraction(1, 2) / (len(inst.others) + 1), witness


def _contracted_jump(g: int, s: int) -> int:
    """Jump induced by s between the residue classes mod g; 0 keeps s inside a class."""
    residue = s % g
    return min(residue, g - residue) if residue else 0


def circulant_hamiltonian_path(spec: CirculantSpec) -> List[int]:
    """Hamiltonian path of a connected circulant, built by contraction.

    With a single jump s1 the path is 0, s1, 2 s1, ... . Otherwise the s1-cycles
    are contracted into C_g with the induced jumps, a path through the cycles is
    found recursively, and each cycle is walked in +s1 order, entering it
    through an edge from the end of the previous cycle.
    """
    if not spec.connected:
        raise ConnectivityError(f"C_{spec.n}{spec.jumps} is disconnected")
    n = spec.n
    if n == 1:
        return [0]
    s1 = spec.jumps[0]
    g = gcd(n, s1)
    b = n // g
    if g == 1:
        return [(t * s1) % n for t in range(n)]

    contracted = sorted({_contracted_jump(g, s) for s in spec.jumps[1:]} - {0})
    cycle_order = circulant_hamiltonian_path(CirculantSpec(n=g, jumps=tuple(contracted)))
    logger.debug("C_%d%s contracted to C_%d%s", n, spec.jumps, g, tuple(contracted))

    path: List[int] = []
    start = cycle_order[0]
    for position, cycle in enumerate(cycle_order):
        path.extend((start + t * s1) % n for t in range(b))
        if position + 1 == len(cycle_order):
            break
        end = path[-1]
        target = cycle_order[position + 1]
        entries = sorted(
            (end + sign * s) % n
            for s in spec.jumps[1:]
            for sign in (1, -1)
            if (end + sign * s) % n % g == target
        )
        if not entries:
            raise ConnectivityError(f"no edge from cycle {cycle} to cycle {target}")
        start = entries[0]
    return path


def is_hamiltonian_path(spec: CirculantSpec, path: Sequence[int]) -> bool:
    if sorted(path) != list(range(spec.n)):
        return False
    return all(spec.adjacent(u, v) for u, v in zip(path, path[1:]))


def _path_labels(inst: Instance, spec: CirculantSpec) -> List[int]:
    """Instance vertices in circulant order: the i-th vertex outside S* plays i."""
    others = list(inst.others)
    position = {v: i for i, v in enumerate(others)}
    if len(others) != spec.n:
        raise CaseError(f"G without S* has {len(others)} vertices, the circulant has {spec.n}")
    expected = circulant_graph(spec)
    residual = inst.residual
    for i, u in enumerate(others):
        neighbours = {position[w] for w in residual[u]}
        if neighbours != set(expected[i]):
            raise CaseError("G without S* does not match the circulant specification")
    return [others[i] for i in circulant_hamiltonian_path(spec)]


def _chunks(path: List[int], size: int) -> List[List[int]]:
    if len(path) < size:
        return [path] if path else []
    blocks = [path[i:i + size] for i in range(0, len(path) - len(path) % size, size)]
    blocks[-1] = blocks[-1] + path[len(blocks) * size:]
    return blocks


def rank_max_uniform_circulant(inst: Instance, spec: CirculantSpec, k: int) -> RankSolution:
    """Maximum rank: floor(n'/k) runs of k consecutive path vertices."""
    _require_uniform(inst)
    if k != len(inst.special) or k < 1:
        raise CaseError(f"k = {k} does not match |S*| = {len(inst.special)}")
    path = _path_labels(inst, spec)
    witness = Partition.of(_chunks(path, k), inst.special)
    return RankSolution(rank_of(inst, witness, RankConvention.AT_LEAST), witness)


def percentile_max_uniform_circulant(inst: Instance, spec: CirculantSpec, k: int) -> PercentileSolution:
    """Maximum percentile: as many strictly large runs (k + 1 vertices) as fit.

    A single block when n' <= k; otherwise the large-run chunking is compared
    with the medium-run chunking and the better one returned.
    """
    _require_uniform(inst)
    if k != len(inst.special) or k < 1:
        raise CaseError(f"k = {k} does not match |S*| = {len(inst.special)}")
    path = _path_labels(inst, spec)
    if not path:
        raise DomainError("percentile is undefined when S* covers every vertex")
    if len(path) <= k:
        witness = Partition.of([path], inst.special)
        return PercentileSolution(percentile_of(inst, witness), witness)

    large_runs = Partition.of(_chunks(path, k + 1), inst.special)
    medium_runs = Partition.of(_chunks(path, k), inst.special)
    p_large = percentile_of(inst, large_runs)
    p_medium = percentile_of(inst, medium_runs)
    if p_medium > p_large:
        return PercentileSolution(p_medium, medium_runs)
    return PercentileSolution(p_large, large_runs)
