"""Activation functions and their first derivatives.

Elementwise kinds yield diagonal layer Jacobians (stored as a vector);
softmax is the single vector-valued kind and yields a dense matrix.
The step derivative is NaN exactly at z = 0 and callers are expected
to propagate that NaN, not mask it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ActivationKind


@dataclass(frozen=True)
class LayerJacobian:
    """Derivative of a layer's activations w.r.t. its pre-activations.

    `diag` holds f'(z) per neuron for elementwise kinds (batched:
    shape N x n). For softmax, `dense` holds the full matrix per
    sample (shape N x n x n) with entry (i, j) = d f_j / d z_i.
    """

    form: str  # "diagonal" | "dense"
    diag: np.ndarray | None = None
    dense: np.ndarray | None = None


def _sigmoid(z: np.ndarray) -> np.ndarray:
    # split by sign to avoid exp overflow warnings for large |z|
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _softmax(z: np.ndarray) -> np.ndarray:
    shifted = z - np.max(z, axis=-1, keepdims=True)
    ez = np.exp(shifted)
    return ez / np.sum(ez, axis=-1, keepdims=True)


def eval(kind: ActivationKind, z: np.ndarray) -> np.ndarray:
    """Apply the activation elementwise (softmax: along the last axis)."""
    z = np.asarray(z, dtype=float)
    k, a = kind.kind, kind.param
    if k == "sigmoid":
        return _sigmoid(z)
    if k == "tanh":
        return np.tanh(z)
    if k == "linear":
        return z.copy()
    if k == "relu":
        return np.where(z > 0, z, 0.0)
    if k == "prelu":
        return np.where(z > 0, z, a * z)
    if k == "elu":
        return np.where(z > 0, z, a * np.expm1(np.minimum(z, 0.0)))
    if k == "step":
        return np.where(z > 0, 1.0, 0.0)
    if k == "arctan":
        return np.arctan(z)
    if k == "softplus":
        # log1p(exp(-|z|)) + max(z, 0) is overflow-safe
        return np.log1p(np.exp(-np.abs(z))) + np.maximum(z, 0.0)
    if k == "softmax":
        return _softmax(z)
    raise AssertionError(f"unhandled activation {k!r}")


def eval_derivative(kind: ActivationKind, z: np.ndarray) -> np.ndarray:
    """f'(z) elementwise, for every kind except softmax.

    ReLU/PReLU/step use their z <= 0 branch at exactly z = 0; step is
    NaN there.
    """
    z = np.asarray(z, dtype=float)
    k, a = kind.kind, kind.param
    if k == "sigmoid":
        s = _sigmoid(z)
        return s * (1.0 - s)
    if k == "tanh":
        t = np.tanh(z)
        return 1.0 - t * t
    if k == "linear":
        return np.ones_like(z)
    if k == "relu":
        return np.where(z > 0, 1.0, 0.0)
    if k == "prelu":
        return np.where(z > 0, 1.0, a)
    if k == "elu":
        return np.where(z > 0, 1.0, a * np.exp(np.minimum(z, 0.0)))
    if k == "step":
        out = np.zeros_like(z)
        out[z == 0] = np.nan
        return out
    if k == "arctan":
        return 1.0 / (1.0 + z * z)
    if k == "softplus":
        return _sigmoid(z)
    raise AssertionError(f"no elementwise derivative for {k!r}")


def eval_jacobian(kind: ActivationKind, z: np.ndarray) -> LayerJacobian:
    """Layer Jacobian at pre-activations `z` (batched along axis 0).

    Softmax returns a dense per-sample matrix with entry (i, j) equal
    to f_i (1 - f_i) on the diagonal and -f_i f_j off it; every other
    kind returns the diagonal vector f'(z).
    """
    z = np.asarray(z, dtype=float)
    if kind.kind != "softmax":
        return LayerJacobian(form="diagonal", diag=eval_derivative(kind, z))
    f = _softmax(z)
    batched = f if f.ndim == 2 else f[None, :]
    n = batched.shape[-1]
    dense = -batched[:, :, None] * batched[:, None, :]
    idx = np.arange(n)
    dense[:, idx, idx] = batched * (1.0 - batched)
    if f.ndim == 1:
        dense = dense[0]
    return LayerJacobian(form="dense", dense=dense)
