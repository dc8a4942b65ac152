"""Network and dataset data model shared by every other module.

A network is described layer by layer starting at the first weighted
layer: the input layer is implicit (identity activation, no weights).
Each weight matrix has shape (previous_width + 1, width); row 0 holds
the bias weights, fed by a constant input of 1.0, and rows 1..n hold
the connection weights. Column k belongs to neuron k of the layer.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .errors import ValidationError

ACTIVATION_NAMES = (
    "sigmoid", "tanh", "linear", "relu", "prelu", "elu",
    "step", "arctan", "softplus", "softmax",
)

# defaults for the slope/scale parameter when a model file omits it
DEFAULT_PRELU_PARAM = 0.01
DEFAULT_ELU_PARAM = 1.0


@dataclass(frozen=True)
class ActivationKind:
    """An activation function name plus its slope/scale parameter.

    `param` only matters for prelu (slope on the negative branch) and
    elu (scale of the exponential branch); it is carried but ignored
    for every other kind.
    """

    kind: str
    param: float = 0.0

    def __post_init__(self):
        if self.kind not in ACTIVATION_NAMES:
            raise ValidationError(
                f"unknown activation kind {self.kind!r}; "
                f"expected one of {', '.join(ACTIVATION_NAMES)}"
            )
        if not np.isfinite(self.param):
            raise ValidationError(f"activation param must be finite, got {self.param}")
        if self.kind == "elu" and self.param <= 0:
            raise ValidationError(f"elu param must be > 0, got {self.param}")
        if self.kind == "prelu" and self.param < 0:
            raise ValidationError(f"prelu param must be >= 0, got {self.param}")


def activation(kind: str, param: float | None = None) -> ActivationKind:
    """Convenience constructor applying the documented parameter defaults."""
    if param is None:
        if kind == "prelu":
            param = DEFAULT_PRELU_PARAM
        elif kind == "elu":
            param = DEFAULT_ELU_PARAM
        else:
            param = 0.0
    return ActivationKind(kind, float(param))


@dataclass(frozen=True)
class LayerSpec:
    """One weighted layer: weights of shape (prev_width + 1, width)."""

    width: int
    weights: np.ndarray
    activation: ActivationKind

    def __post_init__(self):
        # copy: freezing a view would leave the base array mutable
        w = np.array(self.weights, dtype=float)
        object.__setattr__(self, "weights", w)
        w.setflags(write=False)

    @property
    def fan_in(self) -> int:
        return self.weights.shape[0] - 1


@dataclass(frozen=True)
class NetworkSpec:
    """Full MLP description.

    `layers` covers the weighted layers only (hidden and output); the
    implicit input layer has `len(input_names)` neurons, identity
    activation and no weights.
    """

    input_names: tuple[str, ...]
    output_names: tuple[str, ...]
    layers: tuple[LayerSpec, ...]

    def __post_init__(self):
        object.__setattr__(self, "input_names", tuple(self.input_names))
        object.__setattr__(self, "output_names", tuple(self.output_names))
        object.__setattr__(self, "layers", tuple(self.layers))

    @property
    def structure(self) -> tuple[int, ...]:
        """Layer widths, input layer included."""
        return (len(self.input_names),) + tuple(l.width for l in self.layers)

    @property
    def n_inputs(self) -> int:
        return len(self.input_names)

    @property
    def n_outputs(self) -> int:
        return len(self.output_names)


def validate_network(spec: NetworkSpec) -> list[str]:
    """Collect every invariant violation; an empty list means valid.

    Violations are returned as data rather than raised, so callers can
    report all problems of a loaded model at once.
    """
    problems: list[str] = []
    if len(spec.layers) < 1:
        problems.append("network needs at least one weighted layer")
        return problems
    if len(spec.input_names) < 1:
        problems.append("network needs at least one input")
    if len(set(spec.input_names)) != len(spec.input_names):
        problems.append("input_names contains duplicates")
    if len(set(spec.output_names)) != len(spec.output_names):
        problems.append("output_names contains duplicates")

    prev_width = len(spec.input_names)
    for idx, layer in enumerate(spec.layers):
        where = f"layer {idx + 2}"  # input layer is layer 1
        if layer.width < 1:
            problems.append(f"{where}: width must be >= 1, got {layer.width}")
        if layer.weights.ndim != 2:
            problems.append(f"{where}: weights must be a matrix")
            continue
        rows, cols = layer.weights.shape
        if cols != layer.width:
            problems.append(
                f"{where}: weight matrix has {cols} columns, expected width {layer.width}"
            )
        if rows != prev_width + 1:
            problems.append(
                f"{where}: weight matrix has {rows} rows, expected "
                f"{prev_width + 1} (previous width {prev_width} plus bias row)"
            )
        if not np.all(np.isfinite(layer.weights)):
            problems.append(f"{where}: weights contain non-finite entries")
        if layer.activation.kind == "softmax" and idx != len(spec.layers) - 1:
            problems.append(
                f"{where}: softmax is only allowed on the output layer"
            )
        prev_width = layer.width

    if spec.layers and spec.layers[-1].width != len(spec.output_names):
        problems.append(
            f"output layer width {spec.layers[-1].width} does not match "
            f"{len(spec.output_names)} output names"
        )
    return problems


def network_from_flat(
    structure: Sequence[int],
    weights: Sequence[float],
    activations: Sequence[ActivationKind],
    input_names: Sequence[str] | None = None,
    output_names: Sequence[str] | None = None,
) -> NetworkSpec:
    """Build a network from a flat weight list.

    Weights are consumed layer by layer, column-major within a layer:
    each neuron contributes its bias weight first, then one weight per
    neuron of the previous layer. Round-trips with `flatten_network`.
    """
    structure = [int(w) for w in structure]
    if len(structure) < 2:
        raise ValidationError("structure needs at least input and output widths")
    if any(w < 1 for w in structure):
        raise ValidationError(f"all widths must be >= 1, got {structure}")
    if len(activations) != len(structure) - 1:
        raise ValidationError(
            f"expected {len(structure) - 1} activations for {len(structure)} "
            f"layers, got {len(activations)}"
        )
    expected = sum((p + 1) * n for p, n in zip(structure, structure[1:]))
    if len(weights) != expected:
        raise ValidationError(
            f"structure {structure} needs {expected} weights, got {len(weights)}"
        )

    flat = np.asarray(weights, dtype=float)
    layers = []
    offset = 0
    for prev, width, act in zip(structure, structure[1:], activations):
        count = (prev + 1) * width
        block = flat[offset:offset + count].reshape((prev + 1, width), order="F")
        layers.append(LayerSpec(width=width, weights=block, activation=act))
        offset += count

    if input_names is None:
        input_names = [f"X{i + 1}" for i in range(structure[0])]
    if output_names is None:
        output_names = [f"Y{i + 1}" for i in range(structure[-1])]
    return NetworkSpec(tuple(input_names), tuple(output_names), tuple(layers))


def flatten_network(spec: NetworkSpec) -> np.ndarray:
    """Inverse of `network_from_flat`: column-major per layer, bias first."""
    return np.concatenate([l.weights.flatten(order="F") for l in spec.layers])


@dataclass(frozen=True)
class Dataset:
    """Named numeric columns with declared input/output roles.

    `timestamp`, when present, is a per-row list of datetimes or plain
    reals used by the time plot.
    """

    column_names: tuple[str, ...]
    values: np.ndarray
    input_columns: tuple[int, ...]
    output_columns: tuple[int, ...]
    timestamp: tuple | None = None

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        object.__setattr__(self, "values", v)
        v.setflags(write=False)
        object.__setattr__(self, "column_names", tuple(self.column_names))
        object.__setattr__(self, "input_columns", tuple(self.input_columns))
        object.__setattr__(self, "output_columns", tuple(self.output_columns))
        if self.timestamp is not None:
            object.__setattr__(self, "timestamp", tuple(self.timestamp))

        if v.ndim != 2 or v.shape[0] < 1:
            raise ValidationError("dataset needs an N x d value matrix with N >= 1")
        if v.shape[1] != len(self.column_names):
            raise ValidationError(
                f"{len(self.column_names)} column names for {v.shape[1]} columns"
            )
        used = list(self.input_columns) + list(self.output_columns)
        if len(set(self.input_columns) & set(self.output_columns)) > 0:
            raise ValidationError("input and output columns overlap")
        if any(c < 0 or c >= v.shape[1] for c in used):
            raise ValidationError("column index out of range")
        if used and not np.all(np.isfinite(v[:, used])):
            raise ValidationError("non-finite values in input/output columns")
        if self.timestamp is not None and len(self.timestamp) != v.shape[0]:
            raise ValidationError(
                f"timestamp length {len(self.timestamp)} does not match N={v.shape[0]}"
            )

    @property
    def n_samples(self) -> int:
        return self.values.shape[0]

    @property
    def input_names(self) -> tuple[str, ...]:
        return tuple(self.column_names[i] for i in self.input_columns)

    @property
    def output_names(self) -> tuple[str, ...]:
        return tuple(self.column_names[i] for i in self.output_columns)

    def inputs(self) -> np.ndarray:
        return self.values[:, list(self.input_columns)]

    def outputs(self) -> np.ndarray:
        return self.values[:, list(self.output_columns)]


@dataclass(frozen=True)
class Scaler:
    """Per-column z-score parameters (sample sd, divisor N-1)."""

    columns: tuple[int, ...]
    means: tuple[float, ...]
    sds: tuple[float, ...]


def fit_scaler(data: Dataset, columns: Sequence[int]) -> Scaler:
    """Fit z-score parameters on the selected columns.

    Constant columns are rejected: a zero sample sd would make the
    transform non-invertible.
    """
    columns = [int(c) for c in columns]
    means, sds = [], []
    for c in columns:
        col = data.values[:, c]
        mean = float(np.mean(col))
        sd = float(np.std(col, ddof=1)) if len(col) > 1 else 0.0
        if sd <= 0.0:
            raise ValidationError(
                f"column {data.column_names[c]!r} is constant; cannot scale"
            )
        means.append(mean)
        sds.append(sd)
    return Scaler(tuple(columns), tuple(means), tuple(sds))


def apply_scaler(data: Dataset, scaler: Scaler) -> Dataset:
    """Return a dataset with the scaler's columns replaced by z-scores."""
    values = np.array(data.values, dtype=float)
    for c, mean, sd in zip(scaler.columns, scaler.means, scaler.sds):
        values[:, c] = (values[:, c] - mean) / sd
    return replace(data, values=values)


def invert_scaler(data: Dataset, scaler: Scaler) -> Dataset:
    """Undo `apply_scaler` on the scaler's columns."""
    values = np.array(data.values, dtype=float)
    for c, mean, sd in zip(scaler.columns, scaler.means, scaler.sds):
        values[:, c] = values[:, c] * sd + mean
    return replace(data, values=values)
