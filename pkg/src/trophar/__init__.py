"""Hit-and-run MCMC sampling from tropically convex sets.

Tropical (max-plus) polytopes and the space of equidistant-tree
ultrametrics, with uniform and Metropolis-filtered samplers plus
statistical diagnostics.
"""

from .core import (DimensionError, DomainError, TropicalSegment, canonicalize,
                   sample_segment, segment_breakpoints, segment_point_at,
                   trop_add, trop_dist, trop_lin_combo, trop_scale)
from .diagnostics import (DiagnosticsReport, OracleInfeasibleError,
                          chi_square_pairwise, chi_square_two_sample,
                          ks_uniform, rejection_uniform)
from .polytope import ProjectionResult, TropicalBall, TropicalPolytope
from .samplers import (KERNELS, ChainConfig, ChainResult, MixingError,
                       TargetDensity, extend_segment, mh_filter, run_chain)
from .ultrametrics import (EquidistantTree, har_ultrametric, is_ultrametric,
                           pair_index, pairs, topology_histogram, topology_of,
                           tree_from_ultrametric, upgma, upgma_vector)

__all__ = [
    "DimensionError", "DomainError", "TropicalSegment", "canonicalize",
    "sample_segment", "segment_breakpoints", "segment_point_at", "trop_add",
    "trop_dist", "trop_lin_combo", "trop_scale",
    "DiagnosticsReport", "OracleInfeasibleError", "chi_square_pairwise",
    "chi_square_two_sample", "ks_uniform", "rejection_uniform",
    "ProjectionResult", "TropicalBall", "TropicalPolytope",
    "KERNELS", "ChainConfig", "ChainResult", "MixingError", "TargetDensity",
    "extend_segment", "mh_filter", "run_chain",
    "EquidistantTree", "har_ultrametric", "is_ultrametric", "pair_index",
    "pairs", "topology_histogram", "topology_of", "tree_from_ultrametric",
    "upgma", "upgma_vector",
]

__version__ = "0.1.0"
