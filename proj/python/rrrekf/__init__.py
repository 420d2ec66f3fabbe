"""Adaptive EKF tuning for aircraft parameter estimation."""

from ._core import (
    ConfigError,
    DataError,
    Dataset,
    DivergenceError,
    EstimationReport,
    Model,
    NominalEstimates,
    NumericError,
    RecipeConfig,
    ResidueSeries,
    SimConfig,
    SimResult,
    TruthRecord,
    __version__,
    builtin_model,
    correlation_matrix,
    crb_percent,
    default_sim_config,
    nominal_estimates,
    read_dataset,
    reference_recipe,
    run_estimation,
    simulate_dataset,
    weak_parameter_screen,
    write_dataset,
    write_report,
)

__all__ = [
    "ConfigError",
    "DataError",
    "Dataset",
    "DivergenceError",
    "EstimationReport",
    "Model",
    "NominalEstimates",
    "NumericError",
    "RecipeConfig",
    "ResidueSeries",
    "SimConfig",
    "SimResult",
    "TruthRecord",
    "__version__",
    "builtin_model",
    "correlation_matrix",
    "crb_percent",
    "default_sim_config",
    "nominal_estimates",
    "read_dataset",
    "reference_recipe",
    "run_estimation",
    "simulate_dataset",
    "weak_parameter_screen",
    "write_dataset",
    "write_report",
]
