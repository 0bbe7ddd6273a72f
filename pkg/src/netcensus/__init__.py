"""Counting classical nodes in quantum networks from fidelity measurements.

The package decides, from the fidelity of a shared state with a target graph
or GHZ state, how many network nodes could be simulated classically: fidelity
above the threshold ``F(n_c)`` certifies that at most ``n_c - 1`` nodes are
classical.  It provides the threshold table (closed form and brute-force
search over classical strategies), the optimal classical-coalition strategy
that saturates each threshold, exact and sampled fidelity estimation for
hybrid quantum/classical networks under noise, and a CLI plus HTTP service
for reproducible experiments.
"""

from .errors import (
    ConfigError,
    InvalidGraph,
    InvalidMatrix,
    InvalidPartition,
    InvalidState,
    NetcensusError,
    ResourceCapExceeded,
    UndefinedSignificance,
    UnsupportedBipartition,
)
from .graphs import Graph, chain, complete, graph_from_spec, load_graph_file, ring, star
from .paulis import (
    PauliString,
    enumerate_stabilizer,
    ghz_stabilizer_generators,
    graph_stabilizer_generators,
    pauli_dense,
    pauli_expectation,
    pauli_multiply,
)
from .states import (
    HermitianMatrix,
    PureState,
    SchmidtDecomposition,
    StateEnsemble,
    Target,
    build_graph_state,
    ghz_state,
    ghz_target,
    hermitian_eigs,
    schmidt_decompose,
    target_state,
)
from .hybrid import (
    ClassicalAssignment,
    ClassicalNodeState,
    HybridNetwork,
    classical_expectation,
    decohere_node,
    hybrid_string_expectation,
)
from .fidelity import (
    FidelityEstimate,
    MeasurementSetting,
    assemble_fidelity,
    fidelity_exact,
    setting_cover,
)
from .thresholds import (
    BruteforceResult,
    CountVerdict,
    ThresholdTable,
    assignment_value,
    build_threshold_table,
    count_classical_nodes,
    f_matrix,
    f_matrix_lambda_max,
    significance,
    threshold_bruteforce,
    threshold_bruteforce_over_subsets,
    threshold_closed_form,
)
from .cheating import (
    OcsParams,
    hadamard_conjugate_assignment,
    ocs_broadcast_outcomes,
    ocs_check_matches_threshold,
    ocs_hybrid,
    ocs_landscape,
    ocs_optimal_params,
    ocs_state,
)
from .sampling import (
    NoiseSpec,
    SampledFidelity,
    ShotRecord,
    apply_noise,
    estimate_fidelity_sampled,
    noise_exact_ensemble,
    sample_setting,
    setting_estimate,
    split_seed,
)
from .scenarios import (
    ExperimentReportModel,
    GridRequest,
    LandscapeRequest,
    OracleCheckRequest,
    ScenarioModel,
    ThresholdsRequest,
    build_network,
    load_scenario,
    run_grid,
    run_landscape,
    run_oracle_check,
    run_scenario,
    run_thresholds,
    scenario_from_dict,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "NetcensusError",
    "ConfigError",
    "InvalidGraph",
    "InvalidPartition",
    "InvalidMatrix",
    "InvalidState",
    "UnsupportedBipartition",
    "UndefinedSignificance",
    "ResourceCapExceeded",
    "Graph",
    "star",
    "chain",
    "ring",
    "complete",
    "graph_from_spec",
    "load_graph_file",
    "PauliString",
    "pauli_multiply",
    "pauli_dense",
    "pauli_expectation",
    "graph_stabilizer_generators",
    "ghz_stabilizer_generators",
    "enumerate_stabilizer",
    "PureState",
    "StateEnsemble",
    "Target",
    "HermitianMatrix",
    "SchmidtDecomposition",
    "build_graph_state",
    "ghz_state",
    "ghz_target",
    "target_state",
    "hermitian_eigs",
    "schmidt_decompose",
    "ClassicalAssignment",
    "ClassicalNodeState",
    "HybridNetwork",
    "classical_expectation",
    "hybrid_string_expectation",
    "decohere_node",
    "FidelityEstimate",
    "MeasurementSetting",
    "fidelity_exact",
    "setting_cover",
    "assemble_fidelity",
    "ThresholdTable",
    "BruteforceResult",
    "CountVerdict",
    "threshold_closed_form",
    "build_threshold_table",
    "threshold_bruteforce",
    "threshold_bruteforce_over_subsets",
    "assignment_value",
    "f_matrix",
    "f_matrix_lambda_max",
    "count_classical_nodes",
    "significance",
    "OcsParams",
    "ocs_optimal_params",
    "ocs_state",
    "ocs_hybrid",
    "ocs_landscape",
    "ocs_broadcast_outcomes",
    "ocs_check_matches_threshold",
    "hadamard_conjugate_assignment",
    "NoiseSpec",
    "ShotRecord",
    "SampledFidelity",
    "split_seed",
    "apply_noise",
    "noise_exact_ensemble",
    "sample_setting",
    "setting_estimate",
    "estimate_fidelity_sampled",
    "ScenarioModel",
    "ExperimentReportModel",
    "ThresholdsRequest",
    "GridRequest",
    "LandscapeRequest",
    "OracleCheckRequest",
    "scenario_from_dict",
    "load_scenario",
    "build_network",
    "run_scenario",
    "run_thresholds",
    "run_grid",
    "run_landscape",
    "run_oracle_check",
]
