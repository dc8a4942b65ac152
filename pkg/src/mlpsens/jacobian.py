"""Forward pass and analytic input-output Jacobians.

The sensitivity of output k to input i at a sample is the partial
derivative dy_k/dx_i of the fitted network. It is accumulated per
sample as a matrix product over layers,

    D = W*2 J2 W*3 J3 ... W*L JL

where W*l is the layer's weight matrix without its bias row and Jl is
the layer Jacobian of the activation at that sample's pre-activations.
Diagonal Jacobians are applied as column scalings; only softmax needs
a dense per-sample matrix. Samples are processed in blocks so memory
stays bounded by one block of traces plus the output tensor.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import activations
from .errors import ValidationError
from .model import LayerSpec, NetworkSpec

DEFAULT_BLOCK_SIZE = 256


@dataclass(frozen=True)
class ForwardTrace:
    """Per-layer pre-activations and activations for a batch.

    Index 0 is the input layer, where both entries equal the input
    batch itself.
    """

    pre_activations: tuple[np.ndarray, ...]
    activations: tuple[np.ndarray, ...]

    @property
    def outputs(self) -> np.ndarray:
        return self.activations[-1]


@dataclass(frozen=True)
class SensitivityTensor:
    """Raw sensitivities: values[n, i, k] = dy_k/dx_i at sample n."""

    values: np.ndarray
    input_names: tuple[str, ...]
    output_names: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "input_names", tuple(self.input_names))
        object.__setattr__(self, "output_names", tuple(self.output_names))
        v = np.array(self.values, dtype=float)
        object.__setattr__(self, "values", v)
        v.setflags(write=False)
        if v.ndim != 3:
            raise ValidationError("sensitivity values must be N x inputs x outputs")
        if v.shape[1] != len(self.input_names) or v.shape[2] != len(self.output_names):
            raise ValidationError("tensor dimensions do not match variable names")

    @property
    def n_samples(self) -> int:
        return self.values.shape[0]

    def slice(self, input_name: str, output_name: str) -> np.ndarray:
        """All samples of one (input, output) cell."""
        i = self.input_names.index(input_name)
        k = self.output_names.index(output_name)
        return self.values[:, i, k]


def _check_inputs(network: NetworkSpec, inputs: np.ndarray) -> np.ndarray:
    inputs = np.asarray(inputs, dtype=float)
    if inputs.ndim != 2:
        raise ValidationError(f"inputs must be a 2-D batch, got ndim={inputs.ndim}")
    if inputs.shape[0] < 1:
        raise ValidationError("input batch is empty (N must be >= 1)")
    if inputs.shape[1] != network.n_inputs:
        raise ValidationError(
            f"network expects {network.n_inputs} inputs, batch has {inputs.shape[1]}"
        )
    if not np.all(np.isfinite(inputs)):
        raise ValidationError("inputs contain non-finite values")
    return inputs


def forward(network: NetworkSpec, inputs: np.ndarray) -> ForwardTrace:
    """Run the batch through the network, retaining every layer.

    Each layer computes z = [1 | y_prev] W (bias row first) and
    y = activation(z).
    """
    inputs = _check_inputs(network, inputs)
    pre = [inputs]
    act = [inputs]
    y = inputs
    for layer in network.layers:
        z = y @ layer.weights[1:, :] + layer.weights[0, :]
        y = activations.eval(layer.activation, z)
        pre.append(z)
        act.append(y)
    return ForwardTrace(tuple(pre), tuple(act))


def predict(network: NetworkSpec, inputs: np.ndarray) -> np.ndarray:
    """Output activations only."""
    return forward(network, inputs).outputs


def reduced_weight_matrix(layer: LayerSpec) -> np.ndarray:
    """The weight matrix without its bias row; entry (i, k) is the
    weight from previous-layer neuron i to this layer's neuron k."""
    return layer.weights[1:, :]


def sensitivities(
    network: NetworkSpec,
    inputs: np.ndarray,
    block_size: int = DEFAULT_BLOCK_SIZE,
) -> SensitivityTensor:
    """Analytic dy_k/dx_i for every sample of the batch.

    NaNs coming from the step activation's kink are propagated into
    the tensor, never masked.
    """
    inputs = _check_inputs(network, inputs)
    n_samples = inputs.shape[0]
    out = np.empty((n_samples, network.n_inputs, network.n_outputs))
    for start in range(0, n_samples, block_size):
        block = inputs[start:start + block_size]
        out[start:start + block.shape[0]] = _sensitivities_block(network, block)
    return SensitivityTensor(out, network.input_names, network.output_names)


def _sensitivities_block(network: NetworkSpec, inputs: np.ndarray) -> np.ndarray:
    trace = forward(network, inputs)
    n = inputs.shape[0]
    d = np.broadcast_to(
        np.eye(network.n_inputs), (n, network.n_inputs, network.n_inputs)
    ).copy()
    for idx, layer in enumerate(network.layers):
        d = d @ reduced_weight_matrix(layer)
        jac = activations.eval_jacobian(layer.activation, trace.pre_activations[idx + 1])
        if jac.form == "diagonal":
            d *= jac.diag[:, None, :]
        else:
            # dense[n, i, j] = df_j/dz_i, contract over the z index
            d = np.einsum("npi,nij->npj", d, jac.dense)
    return d


def jacobian_at(network: NetworkSpec, x: np.ndarray) -> np.ndarray:
    """Single-sample convenience: the inputs x outputs Jacobian at x."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValidationError("jacobian_at expects a single input row")
    return sensitivities(network, x[None, :]).values[0]
