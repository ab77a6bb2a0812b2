"""Angle-encoded parameterized quantum circuits as trainable Fourier models.

Exact statevector simulation with analytic gradients, frequency-spectrum
algebra for encoding design, white-box Fourier targets, deterministic Adam
training, coefficient extraction, and Monte-Carlo shot-noise execution.
Heavy state updates run on a compiled extension when it is available and on
a pure-numpy twin otherwise (see pqcfourier.backend).
"""

from .errors import (
    ConfigurationError,
    ContractViolationError,
    DegenerateDataError,
    NumericFailureError,
    PqcError,
    ResourceLimitError,
)
from .backend import backend_name
from .spectrum import (
    CoverageReport,
    MixedCardinality,
    MixedSpectrum,
    Spectrum1D,
    covers,
    eigenvalue_ladder,
    mixed_cardinality,
    spectrum_from_prefactors,
    ternary_prefactors,
)
from .simulator import (
    Gate,
    StateVector,
    apply_gate,
    expectation_z,
    gradient,
    gradient_batch,
    model_output,
    model_output_batch,
    rotation_matrix,
    run_circuit,
    zero_state,
)
from .circuit import (
    ModelConfig,
    ParamCircuit,
    SufficiencyReport,
    build_circuit,
    param_count,
    parameter_sufficiency,
    qubit_count,
)
from .dataset import (
    TARGET_PRESETS,
    Dataset,
    DataView,
    TargetSpec,
    cartesian_grid,
    eval_target,
    eval_target_batch,
    grid_dataset,
    load_csv,
    minmax_scale,
    output_scaling,
    save_csv,
    split,
    target_2d,
    target_4d,
    unscale_predictions,
)
from .fastpath import ModelEngine
from .training import (
    AdamState,
    TrainConfig,
    TrainReport,
    adam_step,
    init_theta,
    mse,
    multi_run,
    r2,
    train,
)
from .analysis import (
    CoefficientDiff,
    CoefficientTable,
    FourierFit,
    RunSummary,
    coefficient_diff,
    dft_coefficients,
    fourier_least_squares,
    model_coefficients,
    summarize_runs,
    target_coefficients,
)
from .noise import NoiseModel, noisy_evaluate, noisy_train, sample_expectation
from .experiments import (
    ExperimentConfig,
    PRESETS,
    coefficient_report,
    run_experiment,
)

__version__ = "0.1.0"

__all__ = [
    "AdamState",
    "CoefficientDiff",
    "CoefficientTable",
    "ConfigurationError",
    "ContractViolationError",
    "CoverageReport",
    "Dataset",
    "DataView",
    "DegenerateDataError",
    "ExperimentConfig",
    "FourierFit",
    "Gate",
    "MixedCardinality",
    "MixedSpectrum",
    "ModelConfig",
    "ModelEngine",
    "NoiseModel",
    "NumericFailureError",
    "ParamCircuit",
    "PqcError",
    "PRESETS",
    "ResourceLimitError",
    "RunSummary",
    "Spectrum1D",
    "StateVector",
    "SufficiencyReport",
    "TARGET_PRESETS",
    "TargetSpec",
    "TrainConfig",
    "TrainReport",
    "adam_step",
    "apply_gate",
    "backend_name",
    "build_circuit",
    "cartesian_grid",
    "coefficient_diff",
    "coefficient_report",
    "covers",
    "dft_coefficients",
    "eigenvalue_ladder",
    "eval_target",
    "eval_target_batch",
    "expectation_z",
    "fourier_least_squares",
    "gradient",
    "gradient_batch",
    "grid_dataset",
    "init_theta",
    "load_csv",
    "minmax_scale",
    "mixed_cardinality",
    "model_coefficients",
    "model_output",
    "model_output_batch",
    "mse",
    "multi_run",
    "noisy_evaluate",
    "noisy_train",
    "output_scaling",
    "param_count",
    "parameter_sufficiency",
    "qubit_count",
    "r2",
    "rotation_matrix",
    "run_circuit",
    "run_experiment",
    "sample_expectation",
    "save_csv",
    "split",
    "spectrum_from_prefactors",
    "summarize_runs",
    "target_2d",
    "target_4d",
    "target_coefficients",
    "ternary_prefactors",
    "train",
    "unscale_predictions",
    "zero_state",
]
