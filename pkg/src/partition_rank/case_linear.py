"""
Linear-component case.

Every component of G is a path. Rank maximisation reduces to unweighted
interval scheduling; percentile optimisation is a dynamic program over
prefixes and block counts.
"""

import logging
from fractions import Fraction
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import networkx as nx
from pydantic import BaseModel, ConfigDict, Field

from .core import classify_value, percentile_from_score, rank_of, score_of, threshold_for
from .errors import CaseError, DomainError
from .models import Direction, Instance, Partition, PercentileSolution, RankConvention, RankSolution

logger = logging.getLogger(__name__)


class SpecialSpan(BaseModel):
    """Where S* sat: the path it was cut from and its index range on that path."""

    model_config = ConfigDict(frozen=True)

    path: Tuple[int, ...]
    start: int
    stop: int


class LineInstance(BaseModel):
    """The paths of G once S* has been cut out, each an ordered vertex list."""

    model_config = ConfigDict(frozen=True)

    segments: Tuple[Tuple[int, ...], ...] = Field(default=())
    special_span: Optional[SpecialSpan] = Field(default=None, description="None when S* is empty")


class Job(NamedTuple):
    """Interval [start, finish + 1/2] covering path positions start..finish."""

    start: int
    finish: int

    @property
    def end(self) -> Fraction:
        return self.finish + Fraction(1, 2)


def _ordered_path(graph: nx.Graph, component) -> Tuple[int, ...]:
    sub = graph.subgraph(component)
    if len(component) == 1:
        return (next(iter(component)),)
    if sub.number_of_edges() != len(component) - 1 or max(d for _, d in sub.degree()) > 2:
        raise CaseError(f"component containing vertex {min(component)} is not a path")
    ends = sorted(v for v, d in sub.degree() if d == 1)
    order = [ends[0]]
    previous = None
    while len(order) < len(component):
        step = next(w for w in sub[order[-1]] if w != previous)
        previous = order[-1]
        order.append(step)
    return tuple(order)


def preprocess_remove_special(inst: Instance) -> LineInstance:
    """Cut S* out of its path, leaving the pieces before and after it."""
    graph = inst.graph
    segments: List[Tuple[int, ...]] = []
    span = None
    for component in sorted(nx.connected_components(graph), key=min):
        path = _ordered_path(graph, component)
        if not inst.special & set(path):
            segments.append(path)
            continue
        positions = [i for i, v in enumerate(path) if v in inst.special]
        start, stop = positions[0], positions[-1] + 1
        if stop - start != len(positions):
            raise CaseError("S* is not a contiguous run of its path")
        span = SpecialSpan(path=path, start=start, stop=stop)
        for piece in (path[:start], path[stop:]):
            if piece:
                segments.append(piece)
    segments.sort(key=min)
    return LineInstance(segments=tuple(segments), special_span=span)


def linear_rank_max_jobs(inst: Instance, segment: Sequence[int], threshold: Fraction) -> List[Job]:
    """Jobs for every contiguous run of the segment whose value reaches threshold."""
    jobs = []
    for i in range(len(segment)):
        total = Fraction(0)
        for j in range(i, len(segment)):
            total += inst.mu[segment[j]]
            if total >= threshold:
                jobs.append(Job(i, j))
    return jobs


def _schedule(jobs: List[Job]) -> List[Job]:
    """Earliest-finish-time greedy for unweighted interval scheduling."""
    chosen: List[Job] = []
    last_end: Optional[Fraction] = None
    for job in sorted(jobs, key=lambda job: (job.end, job.start)):
        if last_end is None or job.start > last_end:
            chosen.append(job)
            last_end = job.end
    return chosen


def rank_max_linear(inst: Instance, conv: RankConvention = RankConvention.AT_LEAST) -> RankSolution:
    """Maximum rank on a union of paths via interval scheduling."""
    if not inst.special:
        raise DomainError("rank is undefined for an empty S*")
    line = preprocess_remove_special(inst)
    threshold = threshold_for(inst, conv)
    blocks: List[List[int]] = []
    for segment in line.segments:
        chosen = _schedule(linear_rank_max_jobs(inst, segment, threshold))
        covered = set()
        for job in chosen:
            blocks.append(list(segment[job.start:job.finish + 1]))
            covered.update(range(job.start, job.finish + 1))
        blocks.extend([v] for i, v in enumerate(segment) if i not in covered)
    witness = Partition.of(blocks, inst.special)
    return RankSolution(rank_of(inst, witness, conv), witness)


def _better(direction: Direction, candidate: Fraction, incumbent: Optional[Fraction]) -> bool:
    if incumbent is None:
        return True
    return candidate < incumbent if direction == Direction.MIN else candidate > incumbent


def _segment_table(inst: Instance, segment: Sequence[int], direction: Direction) -> Dict[int, Tuple[Fraction, List[Tuple[int, int]]]]:
    """For each k, the optimal score of splitting the segment into k runs, and the runs."""
    n = len(segment)
    special_mu = inst.special_mu
    prefix = [Fraction(0)]
    for v in segment:
        prefix.append(prefix[-1] + inst.mu[v])

    # best[j][k]: optimal score of positions 0..j-1 in k runs; parent[j][k]: start of last run
    best: List[Dict[int, Fraction]] = [dict() for _ in range(n + 1)]
    parent: List[Dict[int, int]] = [dict() for _ in range(n + 1)]
    best[0][0] = Fraction(0)
    for j in range(1, n + 1):
        for i in range(j):
            run_score = score_of(classify_value(prefix[j] - prefix[i], special_mu))
            for k, score in best[i].items():
                candidate = score + run_score
                if _better(direction, candidate, best[j].get(k + 1)):
                    best[j][k + 1] = candidate
                    parent[j][k + 1] = i

    result = {}
    for k, score in best[n].items():
        runs, j, kk = [], n, k
        while j > 0:
            i = parent[j][kk]
            runs.append((i, j))
            j, kk = i, kk - 1
        result[k] = (score, list(reversed(runs)))
    return result


def _convolve(direction: Direction, left: Dict[int, tuple], right: Dict[int, tuple]) -> Dict[int, tuple]:
    merged: Dict[int, tuple] = {}
    for a, (score_a, blocks_a) in left.items():
        for b, (score_b, blocks_b) in right.items():
            candidate = score_a + score_b
            incumbent = merged.get(a + b)
            if _better(direction, candidate, incumbent[0] if incumbent else None):
                merged[a + b] = (candidate, blocks_a + blocks_b)
    return merged


def percentile_dp_linear(inst: Instance, direction: Direction) -> PercentileSolution:
    """Optimal percentile over contiguous partitions of every path.

    G[j, k], the optimal l + m/2 over splits of the first j vertices into k runs,
    turns the normalised recurrence into a plain min/max-plus one; the
    percentile for k blocks is (G + 1/2)/(k + 1). Paths are combined by
    convolving their tables over block counts.
    """
    if not inst.special:
        raise DomainError("percentile is undefined for an empty S*")
    line = preprocess_remove_special(inst)
    if not line.segments:
        raise DomainError("percentile is undefined when S* covers every vertex")

    total: Dict[int, tuple] = {0: (Fraction(0), [])}
    for segment in line.segments:
        table = {
            k: (score, [list(segment[i:j]) for i, j in runs])
            for k, (score, runs) in _segment_table(inst, segment, direction).items()
        }
        total = _convolve(direction, total, table)

    best: Optional[Fraction] = None
    blocks: List[List[int]] = []
    for k in sorted(total):
        score, candidate_blocks = total[k]
        value = percentile_from_score(score, k)
        if _better(direction, value, best):
            best, blocks = value, candidate_blocks
    logger.debug("linear percentile %s over %d segments: %s", direction.value, len(line.segments), best)
    return PercentileSolution(best, Partition.of(blocks, inst.special))
