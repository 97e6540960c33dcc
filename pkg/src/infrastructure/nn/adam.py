from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from core.exceptions import InvalidInputError
from core.utils import logger

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-15


@dataclass
class AdamState:
    """Moment buffers keyed by parameter name, one shared step count, and per-group rates."""

    learning_rates: dict[str, float] = field(default_factory=dict)
    first_moment: dict[str, np.ndarray] = field(default_factory=dict)
    second_moment: dict[str, np.ndarray] = field(default_factory=dict)
    step: int = 0
    rejected_steps: int = 0
    beta1: float = ADAM_BETA1
    beta2: float = ADAM_BETA2
    eps: float = ADAM_EPS

    def prune(self, keep: np.ndarray, names: list[str]) -> None:
        """Drop moment rows of removed Gaussians for the per-Gaussian parameters in `names`."""
        for name in names:
            if name in self.first_moment:
                self.first_moment[name] = self.first_moment[name][keep]
                self.second_moment[name] = self.second_moment[name][keep]


class AdamResult(NamedTuple):
    params: dict[str, np.ndarray]
    rejected: bool


def adam_step(state: AdamState, params: dict[str, np.ndarray], grads: dict[str, np.ndarray],
              lr: float | dict[str, float] | None = None) -> AdamResult:
    """One bias-corrected Adam update over every parameter that has a gradient.

    `lr` overrides the state's per-group rates (a float applies to all groups). A non-finite
    gradient rejects the whole step: params and state are left untouched.
    """
    for name, grad in grads.items():
        if name not in params:
            raise InvalidInputError(f"gradient for unknown parameter '{name}'")
        if np.shape(grad) != np.shape(params[name]):
            raise InvalidInputError(f"gradient shape {np.shape(grad)} != parameter shape {np.shape(params[name])} for '{name}'")
    if not all(np.all(np.isfinite(g)) for g in grads.values()):
        state.rejected_steps += 1
        logger.warning(f"Rejected optimizer step {state.step + 1}: non-finite gradient")
        return AdamResult(dict(params), True)

    state.step += 1
    correction1 = 1.0 - state.beta1 ** state.step
    correction2 = 1.0 - state.beta2 ** state.step
    updated = dict(params)
    for name, grad in grads.items():
        if isinstance(lr, dict):
            rate = lr.get(name, state.learning_rates.get(name, 0.0))
        elif lr is not None:
            rate = lr
        else:
            rate = state.learning_rates.get(name, 0.0)
        m = state.first_moment.get(name)
        v = state.second_moment.get(name)
        if m is None or m.shape != grad.shape:
            m = np.zeros_like(grad, dtype=np.float64)
            v = np.zeros_like(grad, dtype=np.float64)
        m = state.beta1 * m + (1.0 - state.beta1) * grad
        v = state.beta2 * v + (1.0 - state.beta2) * grad * grad
        state.first_moment[name] = m
        state.second_moment[name] = v
        m_hat = m / correction1
        v_hat = v / correction2
        updated[name] = params[name] - rate * m_hat / (np.sqrt(v_hat) + state.eps)
    return AdamResult(updated, False)
