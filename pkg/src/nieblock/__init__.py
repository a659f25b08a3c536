"""Influence blocking maximization toolkit.

Pick true-information seeds that maximally cut the spread of a competing
false cascade on a directed graph. The package provides the two-cascade
Monte Carlo simulator with an exact oracle, a 7-feature neural surrogate
for the blocked-influence objective, lazy-greedy (CELF) seed selection,
labeled-data generation, and a benchmark harness. See the demos/ scripts
for end-to-end walkthroughs.
"""

from .bench import BenchReport, BenchRow, run_quality_within_budget, run_time_to_target, write_report
from .cascade import (
    Estimate,
    Instance,
    SimOutcome,
    estimate_blocked,
    estimate_y,
    exact_blocked,
    replication_rng,
    simulate_once,
)
from .datagen import (
    DataRecord,
    Dataset,
    SamplerConfig,
    check_dataset_graph,
    generate_dataset,
    high_impact_pool,
    load_dataset,
    sample_false_seeds,
    sample_instance,
    save_dataset,
)
from .errors import (
    FingerprintMismatchError,
    ModelFormatError,
    NieblockError,
    OracleSizeError,
    ParseError,
    TrainingDivergedError,
)
from .features import (
    FActiveMap,
    FeatureVector,
    f_active_probabilities,
    featurize,
    inter_relationship,
    location_feature,
    neighborhood_feature,
    structure_feature,
)
from .graph import (
    Graph,
    NodeStats,
    assign_degree_probabilities,
    compute_node_stats,
    from_edges,
    load_edge_list,
    load_node_stats,
    load_or_compute_stats,
    multi_source_bfs,
    save_node_stats,
)
from .model import (
    MlpModel,
    TrainConfig,
    TrainReport,
    check_model_graph,
    forward,
    load_model,
    loss_and_gradients,
    predict_batch,
    save_model,
    train,
)
from .optimize import (
    CelfTrace,
    Estimator,
    EstimatorError,
    ExactEstimator,
    McsEstimator,
    NieEstimator,
    celf,
    evaluate_solution,
    greedy,
)

__version__ = "0.1.0"

__all__ = [
    "BenchReport",
    "BenchRow",
    "CelfTrace",
    "DataRecord",
    "Dataset",
    "Estimate",
    "Estimator",
    "EstimatorError",
    "ExactEstimator",
    "FActiveMap",
    "FeatureVector",
    "FingerprintMismatchError",
    "Graph",
    "Instance",
    "McsEstimator",
    "MlpModel",
    "ModelFormatError",
    "NieEstimator",
    "NieblockError",
    "NodeStats",
    "OracleSizeError",
    "ParseError",
    "SamplerConfig",
    "SimOutcome",
    "TrainConfig",
    "TrainReport",
    "TrainingDivergedError",
    "assign_degree_probabilities",
    "celf",
    "check_dataset_graph",
    "check_model_graph",
    "compute_node_stats",
    "estimate_blocked",
    "estimate_y",
    "evaluate_solution",
    "exact_blocked",
    "f_active_probabilities",
    "featurize",
    "forward",
    "from_edges",
    "generate_dataset",
    "greedy",
    "high_impact_pool",
    "inter_relationship",
    "load_dataset",
    "load_edge_list",
    "load_model",
    "load_node_stats",
    "load_or_compute_stats",
    "location_feature",
    "loss_and_gradients",
    "multi_source_bfs",
    "neighborhood_feature",
    "predict_batch",
    "replication_rng",
    "run_quality_within_budget",
    "run_time_to_target",
    "sample_false_seeds",
    "sample_instance",
    "save_dataset",
    "save_model",
    "save_node_stats",
    "simulate_once",
    "structure_feature",
    "train",
    "write_report",
    "__version__",
]
