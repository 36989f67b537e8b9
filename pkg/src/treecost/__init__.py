"""treecost: communicative-efficiency measures for dependency-tree topologies.

Library + CLI for measuring the production/comprehension cost pair of
directed trees, generating size-matched synthetic baselines (uniform,
noisy-optimized, sublinear preferential attachment), and statistically
comparing the resulting distributions.
"""
from ._backend import available_backends, backend_name
from .measures import (
    CostPair,
    EntropyExtremaTable,
    NormalizedCostPair,
    build_extrema_table,
    cost_pair,
    h_deg,
    h_ks,
    normalize,
    spectral_radius,
)
from .optimizer import OptimizerConfig, Population, Trajectory
from .samplers import AlphaEstimate, estimate_alpha, language_alpha, \
    sample_pa_tree, sample_uniform_directed_tree
from .trees import (
    DegreeHistogram,
    DirectedTree,
    ExtendedPrueferCode,
    decode_extended_pruefer,
    encode_extended_pruefer,
    enumerate_directed_trees,
    out_degree_histogram,
    undirected_adjacency,
)

__version__ = "0.1.0"

__all__ = [
    "AlphaEstimate",
    "CostPair",
    "DegreeHistogram",
    "DirectedTree",
    "EntropyExtremaTable",
    "ExtendedPrueferCode",
    "NormalizedCostPair",
    "OptimizerConfig",
    "Population",
    "Trajectory",
    "available_backends",
    "backend_name",
    "build_extrema_table",
    "cost_pair",
    "decode_extended_pruefer",
    "encode_extended_pruefer",
    "enumerate_directed_trees",
    "estimate_alpha",
    "h_deg",
    "h_ks",
    "language_alpha",
    "normalize",
    "out_degree_histogram",
    "sample_pa_tree",
    "sample_uniform_directed_tree",
    "spectral_radius",
    "undirected_adjacency",
    "__version__",
]
