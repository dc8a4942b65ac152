"""Analytic sensitivity analysis for feed-forward multilayer perceptrons.

Computes exact partial derivatives of network outputs with respect to
inputs over a dataset, aggregates them into summary measures, compares
them with weight-based importance baselines, and renders diagnostic
plots. Includes a small deterministic trainer and synthetic dataset
generators so analyses are reproducible end to end.
"""

from .activations import LayerJacobian, eval_jacobian
from .baselines import ImportanceTable, garson, olden
from .dataio import (
    export_summary,
    export_tensor,
    generate_seasonal_demand,
    generate_simdata,
    load_dataset,
    load_iris_fixture,
    load_model,
    save_model,
    write_dataset_csv,
)
from .errors import (
    DegenerateDistributionError,
    DivergenceError,
    MlpSensError,
    ParseError,
    UnsupportedStructureError,
    ValidationError,
)
from .jacobian import (
    ForwardTrace,
    SensitivityTensor,
    forward,
    jacobian_at,
    predict,
    reduced_weight_matrix,
    sensitivities,
)
from .measures import (
    MeasureRow,
    SensitivitySummary,
    combine,
    rank_inputs,
    summarize,
)
from .model import (
    ActivationKind,
    Dataset,
    LayerSpec,
    NetworkSpec,
    Scaler,
    activation,
    apply_scaler,
    fit_scaler,
    flatten_network,
    invert_scaler,
    network_from_flat,
    validate_network,
)
from .plots import (
    PlotData,
    Series,
    feature_plot,
    kde,
    sensitivity_plots,
    time_plot,
)
from .rng import Rng
from .svg import plot_data_text, render_svg
from .training import TrainConfig, TrainReport, init_weights, train

__version__ = "0.1.0"

__all__ = [
    "ActivationKind",
    "Dataset",
    "DegenerateDistributionError",
    "DivergenceError",
    "ForwardTrace",
    "ImportanceTable",
    "LayerJacobian",
    "LayerSpec",
    "MeasureRow",
    "MlpSensError",
    "NetworkSpec",
    "ParseError",
    "PlotData",
    "Rng",
    "Scaler",
    "Series",
    "SensitivitySummary",
    "SensitivityTensor",
    "TrainConfig",
    "TrainReport",
    "UnsupportedStructureError",
    "ValidationError",
    "activation",
    "apply_scaler",
    "combine",
    "eval_jacobian",
    "export_summary",
    "export_tensor",
    "feature_plot",
    "fit_scaler",
    "flatten_network",
    "forward",
    "garson",
    "generate_seasonal_demand",
    "generate_simdata",
    "init_weights",
    "invert_scaler",
    "jacobian_at",
    "kde",
    "load_dataset",
    "load_iris_fixture",
    "load_model",
    "network_from_flat",
    "olden",
    "plot_data_text",
    "predict",
    "rank_inputs",
    "render_svg",
    "reduced_weight_matrix",
    "save_model",
    "sensitivities",
    "sensitivity_plots",
    "summarize",
    "time_plot",
    "train",
    "validate_network",
    "write_dataset_csv",
]
