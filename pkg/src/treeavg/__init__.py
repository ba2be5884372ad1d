"""Exact averaging of (discontinuous) constituency trees under F1."""

from .dp import BoundedDP, dp_average_general, dp_best_tree, dp_fixed_size
from .hits import HitTable, build_hits, weighted_hit_scorer
from .prune import PruneResult, all_hit_set, hit_lower_bound, prune_candidates, prune_zero_hit
from .search import (
    AverageResult,
    CandidateGraph,
    CapacityError,
    CliqueSolution,
    EngineError,
    assemble_tree,
    average,
    average_tree,
    binarize,
    build_graph,
    clique_exhaustive,
    clique_mitm,
)
from .tree import ParseTree, TreeError, fan_out, is_valid_tree, pairwise_f1, sum_f1_objective

__version__ = "0.1.0"

__all__ = [
    "AverageResult",
    "BoundedDP",
    "CandidateGraph",
    "CapacityError",
    "CliqueSolution",
    "EngineError",
    "HitTable",
    "ParseTree",
    "PruneResult",
    "TreeError",
    "all_hit_set",
    "assemble_tree",
    "average",
    "average_tree",
    "binarize",
    "build_graph",
    "build_hits",
    "clique_exhaustive",
    "clique_mitm",
    "dp_average_general",
    "dp_best_tree",
    "dp_fixed_size",
    "fan_out",
    "hit_lower_bound",
    "is_valid_tree",
    "pairwise_f1",
    "prune_candidates",
    "prune_zero_hit",
    "sum_f1_objective",
    "weighted_hit_scorer",
]
