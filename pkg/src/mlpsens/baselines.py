"""Weight-based variable importance baselines.

Both algorithms are defined for networks with exactly one hidden
layer and use connection weights only (bias weights excluded).
Garson sums, per hidden neuron, each input's share of the absolute
input-to-hidden weight mass times the absolute hidden-to-output
weight, then rescales so the importances sum to one. Olden keeps
sign and scale: the sum over hidden neurons of the raw weight
products.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UnsupportedStructureError, ValidationError
from .jacobian import reduced_weight_matrix
from .model import NetworkSpec


@dataclass(frozen=True)
class ImportanceTable:
    """Per-input importance values for one output neuron."""

    method: str  # "garson" | "olden"
    input_names: tuple[str, ...]
    values: tuple[float, ...]
    output_name: str

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.input_names, self.values))


def _hidden_output_weights(network: NetworkSpec, output_index: int):
    if len(network.layers) != 2:
        raise UnsupportedStructureError(
            f"classical importance algorithms need exactly one hidden layer; "
            f"this network has {len(network.layers) - 1}"
        )
    if not 0 <= output_index < network.n_outputs:
        raise ValidationError(
            f"output index {output_index} out of range for {network.n_outputs} outputs"
        )
    w_hidden = reduced_weight_matrix(network.layers[0])  # inputs x hidden
    w_output = reduced_weight_matrix(network.layers[1])[:, output_index]  # hidden
    return w_hidden, w_output


def garson(network: NetworkSpec, output_index: int = 0) -> ImportanceTable:
    """Garson importance: non-negative shares summing to one."""
    w_hidden, w_output = _hidden_output_weights(network, output_index)
    abs_hidden = np.abs(w_hidden)
    shares = abs_hidden / np.sum(abs_hidden, axis=0, keepdims=True)
    raw = shares @ np.abs(w_output)
    values = raw / np.sum(raw)
    return ImportanceTable(
        method="garson",
        input_names=network.input_names,
        values=tuple(float(v) for v in values),
        output_name=network.output_names[output_index],
    )


def olden(network: NetworkSpec, output_index: int = 0) -> ImportanceTable:
    """Olden importance: signed, unscaled weight products."""
    w_hidden, w_output = _hidden_output_weights(network, output_index)
    values = w_hidden @ w_output
    return ImportanceTable(
        method="olden",
        input_names=network.input_names,
        values=tuple(float(v) for v in values),
        output_name=network.output_names[output_index],
    )
