"""
Complete-graph case.

On a complete graph every partition is valid, so only the multiset of values
matters. Minimisation has closed forms; rank maximisation is approximated by
seeding blocks with intermediate elements and filling them with tiny ones.
"""

import itertools
import logging
from enum import Enum
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .core import classify_value, percentile_of, rank_of, strict_threshold
from .errors import CaseError, DomainError
from .models import (
    Instance,
    Partition,
    PercentileSolution,
    RankConvention,
    RankSolution,
    SubsetClass,
)

logger = logging.getLogger(__name__)


class ElementTier(str, Enum):
    """Tier of a singleton relative to S* and the current seed threshold c."""

    LARGE_SINGLETON = "large"
    MEDIUM_SINGLETON = "medium"
    INTERMEDIATE = "intermediate"
    SUBINTERMEDIATE = "subintermediate"
    SUBSUBINTERMEDIATE = "subsubintermediate"
    OTHER_TINY = "tiny"


_COUNTED = (ElementTier.LARGE_SINGLETON, ElementTier.MEDIUM_SINGLETON)


def element_tier(value: Fraction, special_mu: Fraction, c: Optional[Fraction] = None) -> ElementTier:
    """Tier of a singleton value; the sub-tiers of tiny elements need the seed value c."""
    if value > special_mu:
        return ElementTier.LARGE_SINGLETON
    if value == special_mu:
        return ElementTier.MEDIUM_SINGLETON
    if 2 * value >= special_mu:
        return ElementTier.INTERMEDIATE
    if c is not None:
        if value >= special_mu - c:
            return ElementTier.SUBINTERMEDIATE
        if 2 * value >= special_mu - c:
            return ElementTier.SUBSUBINTERMEDIATE
    return ElementTier.OTHER_TINY


def _require_complete(inst: Instance) -> None:
    graph = inst.graph
    for u, v in itertools.combinations(inst.vertices, 2):
        if not graph.has_edge(u, v):
            raise CaseError(f"vertices {u} and {v} are not adjacent; the graph is not complete")


def _singleton_tally(inst: Instance) -> Tuple[List[int], List[int], List[int]]:
    large, medium, small = [], [], []
    special_mu = inst.special_mu
    for v in inst.others:
        cls = classify_value(inst.mu[v], special_mu)
        (large if cls == SubsetClass.LARGE else medium if cls == SubsetClass.MEDIUM else small).append(v)
    return large, medium, small


def min_rank_complete(inst: Instance) -> int:
    """1 if no singleton is large, else 2 (all large singletons fit in one block)."""
    return min_rank_complete_solution(inst).rank


def min_rank_complete_solution(inst: Instance) -> RankSolution:
    """Minimum rank with its witness: the large singletons bundled, everything else alone."""
    _require_complete(inst)
    if not inst.special:
        raise DomainError("rank is undefined for an empty S*")
    large, medium, small = _singleton_tally(inst)
    blocks = ([large] if large else []) + [[v] for v in medium + small]
    return RankSolution(2 if large else 1, Partition.of(blocks, inst.special))


def _absorbs_mediums(l0: int, m0: int, s0: int) -> bool:
    if l0 >= 1 and s0 >= 1:
        return True
    # m0 >= (2 s0 + 1)/(s0 - 1) with s0 >= 2
    return l0 == 0 and s0 >= 2 and m0 * (s0 - 1) >= 2 * s0 + 1


def min_percentile_complete(inst: Instance) -> PercentileSolution:
    """Closed-form minimum percentile in the singleton counts l0, m0, s0.

    All large singletons are merged into one block. Medium singletons join that
    block when there is a small singleton to dilute the percentile, or when no
    large singleton exists but enough mediums do; otherwise they stay apart.
    """
    _require_complete(inst)
    if not inst.others:
        raise DomainError("percentile is undefined when S* covers every vertex")
    large, medium, small = _singleton_tally(inst)
    l0, m0, s0 = len(large), len(medium), len(small)

    if _absorbs_mediums(l0, m0, s0):
        merged = [large + medium]
        rest = [[v] for v in small]
        closed_form = Fraction(3, 2) / (s0 + 2)
        branch = "merge large and medium"
    elif l0 >= 1 and s0 == 0:
        merged = [large]
        rest = [[v] for v in medium]
        closed_form = (Fraction(m0, 2) + Fraction(3, 2)) / (m0 + 2)
        branch = "merge large, no small"
    else:
        merged = [large] if large else []
        rest = [[v] for v in medium + small]
        closed_form = (Fraction(m0, 2) + Fraction(1, 2)) / (m0 + s0 + 1)
        branch = "merge large only"

    witness = Partition.of(merged + rest, inst.special)
    value = percentile_of(inst, witness)
    if value != closed_form:
        logger.warning(
            "closed-form minimum percentile %s disagrees with its witness %s (l0=%d m0=%d s0=%d)",
            closed_form, value, l0, m0, s0,
        )
    logger.debug("min percentile branch: %s", branch)
    return PercentileSolution(value, witness)


def _sum(inst: Instance, block: Sequence[int]) -> Fraction:
    return sum((inst.mu[v] for v in block), Fraction(0))


def _fill(inst: Instance, block: List[int], pool: List[int], threshold: Fraction) -> bool:
    """Move pool elements (front first) into block until it reaches threshold."""
    total = _sum(inst, block)
    while total < threshold and pool:
        v = pool.pop(0)
        block.append(v)
        total += inst.mu[v]
    return total >= threshold


def _layout(
    inst: Instance,
    threshold: Fraction,
    seeds: List[int],
    paired: List[int],
    tier1: List[int],
    tier2: List[int],
    tiny_rest: List[int],
    x: int,
    y: int,
    z: int,
) -> Tuple[List[List[int]], List[List[int]]]:
    """Blocks of one (i, x, y, z) configuration: (completed blocks, leftovers)."""
    completed: List[List[int]] = [paired[j:j + 2] for j in range(0, len(paired), 2)]
    leftovers: List[List[int]] = []
    t1, t2 = list(tier1), list(tier2)

    blocks = [[seed] for seed in seeds]
    for j in range(z):
        blocks[j].append(t2.pop(0))
    for j in range(z, z + y):
        blocks[j].extend([t2.pop(0), t2.pop(0)])
    for j in range(z + y, z + y + x):
        blocks[j].append(t1.pop(0))

    pool = sorted(t1 + t2 + tiny_rest, key=lambda v: (inst.mu[v], v))
    for j in range(z):
        _fill(inst, blocks[j], pool, threshold)
    for block in blocks:
        (completed if _sum(inst, block) >= threshold else leftovers).append(block)

    while pool:
        fresh: List[int] = []
        (completed if _fill(inst, fresh, pool, threshold) else leftovers).append(fresh)
    return completed, leftovers


def rank_max_complete_approx(
    inst: Instance, conv: RankConvention = RankConvention.AT_LEAST
) -> RankSolution:
    """Approximate maximum rank on a complete graph.

    Counting singletons stay alone. The r intermediate elements (between half
    and all of the threshold) are partly paired among themselves; each remaining
    intermediate seeds a block completed with subintermediate and
    subsubintermediate elements, then with the smallest tiny elements. Every
    configuration (i, x, y, z) is tried and the first best one kept. The result
    satisfies OPT <= 3/2 ALG + 1.
    """
    _require_complete(inst)
    if not inst.special:
        raise DomainError("rank is undefined for an empty S*")
    if conv == RankConvention.STRICT_ABOVE:
        threshold = strict_threshold((inst.mu[v] for v in inst.others), inst.special_mu)
    else:
        threshold = inst.special_mu

    ordered = sorted(inst.others, key=lambda v: (-inst.mu[v], v))
    tiers = {v: element_tier(inst.mu[v], threshold) for v in ordered}
    counted = [v for v in ordered if tiers[v] in _COUNTED]
    intermediates = [v for v in ordered if tiers[v] == ElementTier.INTERMEDIATE]
    tiny = [v for v in ordered if tiers[v] == ElementTier.OTHER_TINY]
    r = len(intermediates)

    choices = [i for i in range(-(-2 * r // 3), r + 1) if i % 2 == 0] or [0]
    best: Optional[Tuple[int, Tuple[int, int, int, int], List[List[int]]]] = None
    for i in choices:
        seeds = intermediates[:r - i]
        paired = intermediates[r - i:]
        if seeds:
            c = inst.mu[seeds[-1]]
            refined = {v: element_tier(inst.mu[v], threshold, c) for v in tiny}
            ascending = sorted(tiny, key=lambda v: (inst.mu[v], v))
            tier1 = [v for v in ascending if refined[v] == ElementTier.SUBINTERMEDIATE]
            tier2 = [v for v in ascending if refined[v] == ElementTier.SUBSUBINTERMEDIATE]
        else:
            tier1, tier2 = [], []
        in_tiers = set(tier1) | set(tier2)
        tiny_rest = [v for v in tiny if v not in in_tiers]

        for x in range(len(tier1) + 1):
            for y in range(len(tier2) // 2 + 1):
                for z in range(len(tier2) - 2 * y + 1):
                    if x + y + z > len(seeds):
                        break
                    completed, leftovers = _layout(
                        inst, threshold, seeds, paired, tier1, tier2, tiny_rest, x, y, z
                    )
                    blocks = [[v] for v in counted] + completed
                    rest = [v for block in leftovers for v in block]
                    if rest:
                        blocks.append(rest)
                    score = sum(1 for block in blocks if _sum(inst, block) >= threshold)
                    if best is None or score > best[0]:
                        best = (score, (i, x, y, z), blocks)

    logger.debug("rank approximation argmax (i, x, y, z) = %s with %d counting blocks", best[1], best[0])
    witness = Partition.of(best[2], inst.special)
    return RankSolution(rank_of(inst, witness, conv), witness)


def percentile_max_complete_approx(inst: Instance) -> PercentileSolution:
    """Percentile maximisation on a complete graph via the strict rank approximation."""
    _require_complete(inst)
    if not inst.others:
        raise DomainError("percentile is undefined when S* covers every vertex")
    total = inst.mu_of(inst.others)
    if total <= inst.special_mu:
        witness = Partition.of([inst.others], inst.special)
        return PercentileSolution(percentile_of(inst, witness), witness)

    _, approx = rank_max_complete_approx(inst, RankConvention.STRICT_ABOVE)
    special_mu = inst.special_mu
    large = [set(b) for b in approx.blocks if inst.mu_of(b) > special_mu]
    rest = [v for b in approx.blocks if inst.mu_of(b) <= special_mu for v in b]
    if large:
        large[0] |= set(rest)
    else:
        large = [set(inst.others)]
    witness = Partition.of(large, inst.special)
    value = percentile_of(inst, witness)
    logger.debug("complete percentile max: %d large blocks", len(large))
    return PercentileSolution(value, witness)

