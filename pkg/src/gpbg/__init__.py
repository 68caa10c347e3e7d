"""Combinatorics, kernels and numerics of Duhamel expansions for the cubic GP hierarchy."""
from .board import (
    BoardState,
    EchelonClass,
    acceptable_move,
    is_upper_echelon,
    partition_classes,
    reduce_to_echelon,
)
from .bounds import NormBound, bound_for_map, combine_factors, schedule_bounds
from .core import (
    CollisionMap,
    HighlightedMatrix,
    Permutation,
    TimeLabel,
    enumerate_maps,
    map_to_matrix,
    matrix_to_map,
)
from .kernels import KernelExpr, build_kernel, expand_term_signs
from .trees import FactorMap, TreeForest, build_forest, extract_factor_maps

__version__ = "0.1.0"
