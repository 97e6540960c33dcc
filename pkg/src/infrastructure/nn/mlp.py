"""Fully connected networks with explicit reverse-mode gradients.

Parameters live in a flat dict: "W0", "b0", ..., with W of shape (fan_in, fan_out), so a layer
computes x @ W + b.
"""

import numpy as np
from scipy.special import expit

from core.exceptions import InvalidInputError
from core.models import MlpSpec


def init_mlp(spec: MlpSpec, rng: np.random.Generator) -> dict[str, np.ndarray]:
    """Xavier-uniform weights and zero biases; `zero_last_layer` also zeroes the final weights."""
    params = {}
    for i, (fan_in, fan_out) in enumerate(spec.layer_dims):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        params[f"W{i}"] = rng.uniform(-limit, limit, size=(fan_in, fan_out))
        params[f"b{i}"] = np.zeros(fan_out)
    if spec.init == "zero_last_layer":
        last = spec.num_layers - 1
        params[f"W{last}"] = np.zeros_like(params[f"W{last}"])
        params[f"b{last}"] = np.zeros_like(params[f"b{last}"])
    return params


def _check(spec: MlpSpec, params: dict[str, np.ndarray], x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != spec.input_dim:
        raise InvalidInputError(f"network expects {spec.input_dim} inputs, got shape {x.shape}")
    for i, (fan_in, fan_out) in enumerate(spec.layer_dims):
        w, b = params.get(f"W{i}"), params.get(f"b{i}")
        if w is None or b is None or w.shape != (fan_in, fan_out) or b.shape != (fan_out,):
            raise InvalidInputError(f"layer {i} parameters do not match {(fan_in, fan_out)}")
    return x


def _forward(spec: MlpSpec, params: dict[str, np.ndarray], x: np.ndarray) -> tuple[np.ndarray, list[np.ndarray]]:
    activations = [x]
    h = x
    last = spec.num_layers - 1
    for i in range(spec.num_layers):
        z = h @ params[f"W{i}"] + params[f"b{i}"]
        h = np.maximum(z, 0.0) if i < last else z
        activations.append(h)
    if spec.output_activation == "sigmoid":
        h = expit(h)
    return h, activations


def mlp_forward(spec: MlpSpec, params: dict[str, np.ndarray], x: np.ndarray) -> np.ndarray:
    x = _check(spec, params, x)
    return _forward(spec, params, x)[0]


def mlp_backward(spec: MlpSpec, params: dict[str, np.ndarray], x: np.ndarray,
                 grad_output: np.ndarray) -> tuple[dict[str, np.ndarray], np.ndarray]:
    """Returns (dL/dparams, dL/dx) for upstream dL/dy; the forward pass is recomputed."""
    x = _check(spec, params, x)
    y, activations = _forward(spec, params, x)
    grad_output = np.asarray(grad_output, dtype=np.float64)
    if grad_output.shape != y.shape:
        raise InvalidInputError(f"grad_output shape {grad_output.shape} != output shape {y.shape}")

    grad = grad_output * y * (1.0 - y) if spec.output_activation == "sigmoid" else grad_output
    grads = {}
    for i in reversed(range(spec.num_layers)):
        h_in = activations[i]
        if h_in.ndim == 1:
            grads[f"W{i}"] = np.outer(h_in, grad)
            grads[f"b{i}"] = grad.copy()
        else:
            grads[f"W{i}"] = h_in.reshape(-1, h_in.shape[-1]).T @ grad.reshape(-1, grad.shape[-1])
            grads[f"b{i}"] = grad.reshape(-1, grad.shape[-1]).sum(axis=0)
        grad = grad @ params[f"W{i}"].T
        if i > 0:
            grad = grad * (activations[i] > 0.0)
    return grads, grad
