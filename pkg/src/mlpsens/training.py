"""Desk-scale deterministic MLP training.

Full-batch gradient descent with momentum 0.9 on the chosen loss plus
an optional L2 penalty on connection weights (bias weights are not
decayed). Everything is seeded through the package PRNG and evaluated
in a fixed order, so identical inputs give bit-identical networks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import activations
from .errors import DivergenceError, ValidationError
from .jacobian import forward
from .model import ActivationKind, Dataset, LayerSpec, NetworkSpec
from .rng import Rng

MOMENTUM = 0.9
LOSSES = ("mse", "cross_entropy")


@dataclass(frozen=True)
class TrainConfig:
    max_epochs: int = 1000
    learning_rate: float = 0.1
    l2_decay: float = 0.0
    loss: str = "mse"
    seed: int = 0
    init_scale: float = 1.0

    def __post_init__(self):
        if self.max_epochs < 1:
            raise ValidationError("max_epochs must be >= 1")
        if not (np.isfinite(self.learning_rate) and self.learning_rate > 0):
            raise ValidationError("learning_rate must be finite and > 0")
        if not (np.isfinite(self.init_scale) and self.init_scale > 0):
            raise ValidationError("init_scale must be finite and > 0")
        if self.l2_decay < 0:
            raise ValidationError("l2_decay must be >= 0")
        if self.loss not in LOSSES:
            raise ValidationError(
                f"unknown loss {self.loss!r}; expected one of {', '.join(LOSSES)}"
            )


@dataclass(frozen=True)
class TrainReport:
    """Objective value per epoch (evaluated before each update)."""

    loss_history: tuple[float, ...]
    final_loss: float
    epochs_run: int


def init_weights(
    structure: list[int],
    acts: list[ActivationKind],
    seed: int,
    init_scale: float = 1.0,
    input_names: list[str] | None = None,
    output_names: list[str] | None = None,
) -> NetworkSpec:
    """Random network: each layer uniform in +-init_scale/sqrt(fan_in).

    Weights are drawn neuron by neuron (bias first), so the draw order
    matches the flat weight layout.
    """
    if len(structure) < 2 or any(w < 1 for w in structure):
        raise ValidationError(f"invalid structure {structure}")
    if len(acts) != len(structure) - 1:
        raise ValidationError("one activation per weighted layer is required")
    gen = Rng(seed).split("weight-init")
    layers = []
    for prev, width, act in zip(structure, structure[1:], acts):
        limit = init_scale / np.sqrt(prev)
        w = np.empty((prev + 1, width))
        for k in range(width):
            for j in range(prev + 1):
                w[j, k] = gen.uniform(-limit, limit)
        layers.append(LayerSpec(width=width, weights=w, activation=act))
    if input_names is None:
        input_names = [f"X{i + 1}" for i in range(structure[0])]
    if output_names is None:
        output_names = [f"Y{i + 1}" for i in range(structure[-1])]
    return NetworkSpec(tuple(input_names), tuple(output_names), tuple(layers))


def _check_training_data(network: NetworkSpec, data: Dataset, config: TrainConfig):
    if len(data.input_columns) != network.n_inputs:
        raise ValidationError(
            f"network expects {network.n_inputs} inputs, dataset declares "
            f"{len(data.input_columns)}"
        )
    if len(data.output_columns) != network.n_outputs:
        raise ValidationError(
            f"network expects {network.n_outputs} outputs, dataset declares "
            f"{len(data.output_columns)}"
        )
    if config.loss == "cross_entropy":
        if network.layers[-1].activation.kind != "softmax":
            raise ValidationError("cross_entropy requires a softmax output layer")
        targets = data.outputs()
        one_hot = np.all((targets == 0.0) | (targets == 1.0)) and np.allclose(
            targets.sum(axis=1), 1.0
        )
        if not one_hot:
            raise ValidationError("cross_entropy requires one-hot target rows")


def loss_and_gradients(
    network: NetworkSpec,
    inputs: np.ndarray,
    targets: np.ndarray,
    loss: str = "mse",
    l2_decay: float = 0.0,
) -> tuple[float, list[np.ndarray]]:
    """Objective value and its gradient per layer weight matrix.

    mse averages the squared error over all N * n_outputs entries;
    cross_entropy averages -log p(target class) over samples and is
    differentiated jointly with the softmax output for stability. The
    L2 term adds l2_decay * sum of squared connection weights.

    Overflow is not treated as an error here: it yields non-finite
    values that train() turns into a DivergenceError.
    """
    with np.errstate(over="ignore", invalid="ignore"):
        return _loss_and_gradients(network, inputs, targets, loss, l2_decay)


def _loss_and_gradients(
    network: NetworkSpec,
    inputs: np.ndarray,
    targets: np.ndarray,
    loss: str,
    l2_decay: float,
) -> tuple[float, list[np.ndarray]]:
    trace = forward(network, inputs)
    predictions = trace.outputs
    n, n_out = predictions.shape

    if loss == "mse":
        err = predictions - targets
        data_loss = float(np.mean(err * err))
        d_out = 2.0 * err / (n * n_out)  # dL/dy at the output layer
        delta = _through_layer_jacobian(network.layers[-1], trace.pre_activations[-1], d_out)
    elif loss == "cross_entropy":
        clipped = np.clip(predictions, 1e-300, None)
        data_loss = float(-np.sum(targets * np.log(clipped)) / n)
        delta = (predictions - targets) / n  # dL/dz of softmax + CE jointly
    else:
        raise ValidationError(f"unknown loss {loss!r}")

    penalty = 0.0
    grads: list[np.ndarray] = [np.empty(0)] * len(network.layers)
    for idx in range(len(network.layers) - 1, -1, -1):
        layer = network.layers[idx]
        y_prev = trace.activations[idx]
        grad = np.empty_like(layer.weights)
        grad[0, :] = delta.sum(axis=0)
        grad[1:, :] = y_prev.T @ delta
        if l2_decay > 0.0:
            grad[1:, :] += 2.0 * l2_decay * layer.weights[1:, :]
        penalty += float(np.sum(layer.weights[1:, :] ** 2))
        grads[idx] = grad
        if idx > 0:
            d_prev = delta @ layer.weights[1:, :].T
            delta = _through_layer_jacobian(
                network.layers[idx - 1], trace.pre_activations[idx], d_prev
            )
    return data_loss + l2_decay * penalty, grads


def _through_layer_jacobian(layer: LayerSpec, z: np.ndarray, d_y: np.ndarray) -> np.ndarray:
    """dL/dz from dL/dy for one layer."""
    jac = activations.eval_jacobian(layer.activation, z)
    if jac.form == "diagonal":
        return d_y * jac.diag
    # dense[n, i, j] = df_j/dz_i: dL/dz_i = sum_j dense[i, j] * dL/dy_j
    return np.einsum("nij,nj->ni", jac.dense, d_y)


def train(
    network: NetworkSpec, data: Dataset, config: TrainConfig
) -> tuple[NetworkSpec, TrainReport]:
    """Train a copy of `network` on the dataset's declared columns.

    Raises DivergenceError as soon as the objective or any weight
    stops being finite, reporting the epoch.
    """
    _check_training_data(network, data, config)
    inputs = data.inputs()
    targets = data.outputs()

    weights = [np.array(l.weights) for l in network.layers]
    velocity = [np.zeros_like(w) for w in weights]
    history: list[float] = []

    current = network
    for epoch in range(config.max_epochs):
        loss_value, grads = loss_and_gradients(
            current, inputs, targets, config.loss, config.l2_decay
        )
        if not np.isfinite(loss_value):
            raise DivergenceError(epoch)
        history.append(loss_value)
        with np.errstate(over="ignore", invalid="ignore"):
            for w, v, g in zip(weights, velocity, grads):
                v *= MOMENTUM
                v -= config.learning_rate * g
                w += v
        if any(not np.all(np.isfinite(w)) for w in weights):
            raise DivergenceError(epoch)
        current = _replace_weights(network, weights)

    final_loss, _ = loss_and_gradients(
        current, inputs, targets, config.loss, config.l2_decay
    )
    if not np.isfinite(final_loss):
        raise DivergenceError(config.max_epochs)
    report = TrainReport(
        loss_history=tuple(history),
        final_loss=float(final_loss),
        epochs_run=len(history),
    )
    return current, report


def _replace_weights(network: NetworkSpec, weights: list[np.ndarray]) -> NetworkSpec:
    layers = tuple(
        LayerSpec(width=l.width, weights=np.array(w), activation=l.activation)
        for l, w in zip(network.layers, weights)
    )
    return NetworkSpec(network.input_names, network.output_names, layers)


def mse(network: NetworkSpec, data: Dataset) -> float:
    """Mean squared prediction error over the dataset."""
    err = forward(network, data.inputs()).outputs - data.outputs()
    return float(np.mean(err * err))


def accuracy(network: NetworkSpec, data: Dataset) -> float:
    """Fraction of samples whose argmax prediction matches the target."""
    predicted = forward(network, data.inputs()).outputs.argmax(axis=1)
    expected = data.outputs().argmax(axis=1)
    return float(np.mean(predicted == expected))
