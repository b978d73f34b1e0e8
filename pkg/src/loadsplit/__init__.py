"""Energy disaggregation by constrained matrix factorization.

A household's aggregate meter signal is split into a smooth fixed load,
modeled by a low-rank non-negative factorization, and a set of duty-cycled
appliance classes, each modeled as a binary combination of rectangular
activations under a per-day L0 budget. Fixed factors are fitted with
multiplicative updates; binary weights with an exact-greedy hill climb.
"""

from .errors import (
    ConfigError,
    DataError,
    DimensionMismatchError,
    LoadSplitError,
    NumericalError,
)
from .evaluate import ClassScore, EvalReport, evaluate, format_report, score_class
from .hillclimb import (
    BUDGET_EXHAUSTED,
    NO_IMPROVING_MOVE,
    HillClimbTrace,
    Residual,
    brute_force_best,
    compute_residual,
    hill_climb,
)
from .model import (
    BASIS_KINDS,
    ORDERS,
    UPDATE_RULES,
    DisaggregationModel,
    EnergyDataset,
    FixedLoadFactors,
    ModelConfig,
    ShiftableClassConfig,
    ShiftableLoadClass,
    SparseBinaryBasis,
    make_basis,
    reconstruct,
)
from .objective import ObjectiveValue, frobenius_objective, negative_log_likelihood
from .pipeline import (
    ApplianceGroundTruth,
    IngestResult,
    export_disaggregation,
    ingest_csv,
    load_appliance_config,
    load_ground_truth,
    load_model,
    read_matrix_csv,
    read_matrix_dataset,
    save_model,
    write_matrix_csv,
)
from .synth import SynthClassSpec, SynthSpec, generate, load_synth_spec
from .trainer import (
    CONVERGED,
    MAX_ITERATIONS,
    FitReport,
    fit,
    initialize_model,
)
from .updates import (
    normalize_basis_columns,
    normalize_fixed_factors,
    update_fixed_basis,
    update_fixed_weights,
)

__version__ = "0.1.0"

__all__ = [
    "ApplianceGroundTruth",
    "BASIS_KINDS",
    "BUDGET_EXHAUSTED",
    "CONVERGED",
    "ClassScore",
    "ConfigError",
    "DataError",
    "DimensionMismatchError",
    "DisaggregationModel",
    "EnergyDataset",
    "EvalReport",
    "FitReport",
    "FixedLoadFactors",
    "HillClimbTrace",
    "IngestResult",
    "LoadSplitError",
    "MAX_ITERATIONS",
    "ModelConfig",
    "NO_IMPROVING_MOVE",
    "NumericalError",
    "ORDERS",
    "ObjectiveValue",
    "Residual",
    "ShiftableClassConfig",
    "ShiftableLoadClass",
    "SparseBinaryBasis",
    "SynthClassSpec",
    "SynthSpec",
    "UPDATE_RULES",
    "brute_force_best",
    "compute_residual",
    "evaluate",
    "export_disaggregation",
    "fit",
    "format_report",
    "frobenius_objective",
    "generate",
    "hill_climb",
    "ingest_csv",
    "initialize_model",
    "load_appliance_config",
    "load_ground_truth",
    "load_model",
    "load_synth_spec",
    "make_basis",
    "negative_log_likelihood",
    "normalize_basis_columns",
    "normalize_fixed_factors",
    "read_matrix_csv",
    "read_matrix_dataset",
    "reconstruct",
    "save_model",
    "score_class",
    "update_fixed_basis",
    "update_fixed_weights",
    "write_matrix_csv",
]
