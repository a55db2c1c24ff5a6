"""Spectral graph clustering from simulated wave dynamics.

The toolkit evolves a wave on a graph (explicit second-order update,
Schrodinger-pair evolution, or a closed-form spectral oracle), turns each
node's time series into Laplacian eigenvalues and mode coefficients by
time-delay dynamic mode decomposition, and clusters nodes by coefficient
signs.  An analog crossbar emulator can stand in for every matrix-vector
product, and a dense classical eigendecomposition serves as the
verification oracle throughout.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .analog import (
    AnalogConfig,
    SplitMatrix,
    analog_mvm,
    analog_mvm_strategy,
    convergence_time,
    direct_mvm,
    settle_mvm,
    split_nonnegative,
)
from .cluster import (
    ClusterAssignment,
    ClusterConfig,
    agreement,
    classical_cluster,
    recovered_spectrum,
    result_document,
    spectral_gap_k,
    wave_dmd_cluster,
)
from .datasets import gen_planted_partition, karate_factions, load_karate
from .dmd import (
    DmdResult,
    HankelPair,
    PowerResult,
    ReducedSvd,
    build_hankel,
    dmd,
    hotelling_deflate,
    power_method,
    recover_laplacian_eigenvalues,
    reduced_svd,
)
from .dynamics import (
    SchrodingerState,
    StabilityReport,
    WaveTrajectory,
    closed_form_wave,
    random_u0,
    schrodinger_state,
    simulate,
    simulate_discrete,
    simulate_schrodinger,
    stability_check,
)
from .errors import (
    DisconnectedGraphError,
    GraphFormatError,
    NumericalError,
    ValidationError,
    WaveclusterError,
)
from .graph import (
    Graph,
    GraphOperators,
    adjacency,
    build_operators,
    classical_spectrum,
    graph_from_edges,
    graph_from_json,
    graph_to_json,
    load_graph,
)

__all__ = [
    "AnalogConfig",
    "ClusterAssignment",
    "ClusterConfig",
    "DisconnectedGraphError",
    "DmdResult",
    "Graph",
    "GraphFormatError",
    "GraphOperators",
    "HankelPair",
    "NumericalError",
    "PowerResult",
    "ReducedSvd",
    "SchrodingerState",
    "SplitMatrix",
    "StabilityReport",
    "ValidationError",
    "WaveTrajectory",
    "WaveclusterError",
    "adjacency",
    "agreement",
    "analog_mvm",
    "analog_mvm_strategy",
    "build_hankel",
    "build_operators",
    "classical_cluster",
    "classical_spectrum",
    "closed_form_wave",
    "convergence_time",
    "direct_mvm",
    "dmd",
    "gen_planted_partition",
    "graph_from_edges",
    "graph_from_json",
    "graph_to_json",
    "hotelling_deflate",
    "karate_factions",
    "load_graph",
    "load_karate",
    "power_method",
    "random_u0",
    "recover_laplacian_eigenvalues",
    "recovered_spectrum",
    "reduced_svd",
    "result_document",
    "schrodinger_state",
    "settle_mvm",
    "simulate",
    "simulate_discrete",
    "simulate_schrodinger",
    "spectral_gap_k",
    "split_nonnegative",
    "stability_check",
    "wave_dmd_cluster",
]
