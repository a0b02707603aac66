"""
Partition Rank

Exact and approximate solvers for the best and worst rank, and rank
percentile, that a distinguished subset S* can reach when the remaining
elements are partitioned into connected blocks.

Example:
    from partition_rank import path_instance, greedy_rank_min

    inst = path_instance(["3", "1", "5", "2"], special=[1])
    rank, witness = greedy_rank_min(inst)
"""

__version__ = "0.1.0"

from .core import complete_instance, make_instance, path_instance, percentile_of, rank_of
from .errors import PartitionRankError
from .general import greedy_rank_min, percentile_max_2approx
from .models import Instance, Objective, Partition, RankConvention
from .oracle import exact_optimum

__all__ = [
    "Instance",
    "Objective",
    "Partition",
    "PartitionRankError",
    "RankConvention",
    "complete_instance",
    "exact_optimum",
    "greedy_rank_min",
    "make_instance",
    "path_instance",
    "percentile_max_2approx",
    "percentile_of",
    "rank_of",
]
