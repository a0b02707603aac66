"""
Algorithms valid on arbitrary similarity graphs.

Greedy rank minimisation, the matching lower bound, and the 2-approximation
that reduces percentile maximisation to rank maximisation.
"""

import logging
from fractions import Fraction
from typing import Callable, Dict, FrozenSet, List, Optional

import networkx as nx

from .core import percentile_of
from .models import (
    ApproxPercentileSolution,
    Instance,
    Partition,
    RankConvention,
    RankSolution,
)
from .oracle import oracle_rank_max

logger = logging.getLogger(__name__)

RankMaxStrategy = Callable[[Instance, RankConvention], RankSolution]


def _components(inst: Instance) -> List[FrozenSet[int]]:
    return sorted((frozenset(c) for c in nx.connected_components(inst.residual)), key=min)


def _large_components(inst: Instance) -> List[FrozenSet[int]]:
    special_mu = inst.special_mu
    return [c for c in _components(inst) if any(inst.mu[v] > special_mu for v in c)]


def greedy_rank_min(inst: Instance) -> RankSolution:
    """Minimum rank under the strict convention.

    Every component of G without S* that holds a large singleton must contain a
    large block, and one block covering the whole component suffices. All other
    vertices stay singletons, none of which is large.
    """
    if not inst.special:
        return RankSolution(1, Partition.of(([v] for v in inst.others)))

    bundled = _large_components(inst)
    covered = frozenset().union(*bundled) if bundled else frozenset()
    blocks = list(bundled) + [frozenset({v}) for v in inst.others if v not in covered]
    logger.debug("greedy rank min bundles %d components", len(bundled))
    return RankSolution(1 + len(bundled), Partition.of(blocks, inst.special))


def rank_lower_bound(inst: Instance) -> int:
    if not inst.special:
        return 1
    return 1 + len(_large_components(inst))


def _absorb(inst: Instance, partition: Partition, keep: Callable[[Fraction], bool]) -> Partition:
    """Merge every block failing `keep` into an adjacent kept block of its component.

    Leftovers are processed smallest value first; a component with no kept block
    collapses into a single block.
    """
    owner: Dict[int, int] = {}
    blocks: Dict[int, set] = {}
    for index, block in enumerate(partition.blocks):
        blocks[index] = set(block)
        for v in block:
            owner[v] = index

    kept = {i for i, block in blocks.items() if keep(inst.mu_of(block))}
    leftovers = sorted(
        (i for i in blocks if i not in kept), key=lambda i: (inst.mu_of(blocks[i]), min(blocks[i]))
    )
    residual = inst.residual

    progress = True
    while progress and leftovers:
        progress = False
        for i in leftovers:
            targets = sorted(
                {owner[w] for v in blocks[i] for w in residual[v] if owner[w] in kept},
                key=lambda j: min(blocks[j]),
            )
            if not targets:
                continue
            target = targets[0]
            for v in blocks[i]:
                owner[v] = target
            blocks[target] |= blocks.pop(i)
            leftovers.remove(i)
            progress = True
            break

    merged = [frozenset(blocks[i]) for i in kept]
    for component in _components(inst):
        stranded = [v for i in leftovers for v in blocks[i] if v in component]
        if stranded:
            merged.append(frozenset(stranded))
    return Partition.of(merged, inst.special)


def percentile_max_2approx(
    inst: Instance, rank_max_solver: Optional[RankMaxStrategy] = None
) -> ApproxPercentileSolution:
    """Percentile maximisation through two rank-maximisation runs.

    Branch one maximises the number of strictly large blocks and absorbs small
    and medium blocks into them; branch two maximises large-or-medium blocks
    and absorbs small blocks. The better branch is at least half the optimum,
    and optimal whenever the optimum is at least 1/2.
    """
    solver = rank_max_solver or oracle_rank_max
    special_mu = inst.special_mu

    _, strict = solver(inst, RankConvention.STRICT_ABOVE)
    first = _absorb(inst, strict, lambda value: value > special_mu)
    _, weak = solver(inst, RankConvention.AT_LEAST)
    second = _absorb(inst, weak, lambda value: value >= special_mu)

    p_first = percentile_of(inst, first)
    p_second = percentile_of(inst, second)
    logger.debug("2-approx branches: large-only %s, large-or-medium %s", p_first, p_second)
    if p_second > p_first:
        best, witness = p_second, second
    else:
        best, witness = p_first, first
    return ApproxPercentileSolution(best, witness, best >= Fraction(1, 2))

