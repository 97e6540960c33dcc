"""Per-Gaussian dynamic scores learned from splatted BCE supervision against error maps."""

import time
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from tqdm import tqdm

from core.exceptions import InvalidInputError
from core.models import CameraPose, GaussianSet, GaussianSnapshot, MlpSpec, ReferenceBundle
from core.utils import log_stage, logger
from infrastructure.config import settings
from infrastructure.nn import AdamState, adam_step, init_mlp, mlp_backward, mlp_forward
from infrastructure.rendering import RenderGrad, RenderOptions, render, render_backward
from application.decomposition.error_maps import ErrorMapSet

BCE_EPS = 1e-6


@dataclass
class ScoreField:
    spec: MlpSpec
    params: dict[str, np.ndarray]
    center: np.ndarray
    scene_scale: float


class ScoreLoss(NamedTuple):
    loss: float
    grads: dict[str, np.ndarray]


def score_network_spec(feature_dim: int, hidden_dims: tuple[int, ...] = (64, 64)) -> MlpSpec:
    return MlpSpec(input_dim=3 + feature_dim, hidden_dims=tuple(hidden_dims), output_dim=1,
                   output_activation="sigmoid", init="xavier")


def create_score_field(feature_dim: int, center: np.ndarray, scene_scale: float, rng: np.random.Generator,
                       hidden_dims: tuple[int, ...] = (64, 64)) -> ScoreField:
    spec = score_network_spec(feature_dim, hidden_dims)
    return ScoreField(spec, init_mlp(spec, rng), np.asarray(center, dtype=np.float64), float(scene_scale))


def score_inputs(field: ScoreField, gaussians: GaussianSet) -> np.ndarray:
    return np.concatenate([(gaussians.positions - field.center) / field.scene_scale, gaussians.features], axis=1)


def predict_scores(field: ScoreField, gaussians: GaussianSet) -> np.ndarray:
    if not len(gaussians):
        return np.zeros(0)
    return mlp_forward(field.spec, field.params, score_inputs(field, gaussians))[:, 0]


def binary_cross_entropy(prediction: np.ndarray, target: np.ndarray) -> tuple[float, np.ndarray]:
    """Mean BCE against soft targets and its gradient; predictions are clipped to [1e-6, 1 - 1e-6]."""
    clipped = np.clip(prediction, BCE_EPS, 1.0 - BCE_EPS)
    loss = -np.mean(target * np.log(clipped) + (1.0 - target) * np.log(1.0 - clipped))
    inside = (prediction > BCE_EPS) & (prediction < 1.0 - BCE_EPS)
    grad = np.where(inside, (clipped - target) / (clipped * (1.0 - clipped)), 0.0) / prediction.size
    return float(loss), grad


def score_loss_and_grad(field: ScoreField, gaussians: GaussianSet, pose: CameraPose, target: np.ndarray,
                        options: RenderOptions) -> ScoreLoss:
    """BCE between the splatted score image and `target`, differentiated w.r.t. the network parameters.

    Gaussian geometry is frozen; only the scores carried as the scalar payload depend on the network.
    """
    options = options.evolve(payload=True)
    inputs = score_inputs(field, gaussians)
    scores = mlp_forward(field.spec, field.params, inputs)[:, 0]
    snapshot = GaussianSnapshot.from_gaussian_set(gaussians, payloads=scores)
    output = render(snapshot, pose, options)
    loss, grad_image = binary_cross_entropy(output.scalar, target)
    grads = render_backward(snapshot, pose, options, RenderGrad(scalar=grad_image))
    param_grads, _ = mlp_backward(field.spec, field.params, inputs, grads.payloads[:, None])
    return ScoreLoss(loss, param_grads)


def train_score_field(gaussians: GaussianSet, bundle: ReferenceBundle, error_maps: ErrorMapSet, iterations: int, *,
                      frames: list[int], field: ScoreField, learning_rate: float,
                      options: RenderOptions | None = None) -> np.ndarray:
    """Fit `field` in place so splatted scores match the normalized error maps; returns S in [0, 1].

    `error_maps[k]` supervises `bundle[frames[k]]`. All-zero maps mean nothing moved: every score is 0.
    """
    if len(error_maps) != len(frames):
        raise InvalidInputError(f"{len(error_maps)} error maps for {len(frames)} frames")
    if not len(gaussians):
        return np.zeros(0)
    if error_maps.is_empty:
        logger.info("Error maps are all zero; every Gaussian scored static")
        return np.zeros(len(gaussians))

    started = time.perf_counter()
    options = options or RenderOptions(background=np.zeros(3))
    state = AdamState(learning_rates={name: learning_rate for name in field.params})
    loss = float("nan")
    progress = tqdm(range(iterations), desc="score_field", disable=not settings.runtime.progress)
    for iteration in progress:
        k = iteration % len(frames)
        step = score_loss_and_grad(field, gaussians, bundle[frames[k]].pose, error_maps.normalized[k], options)
        loss = step.loss
        field.params = adam_step(state, field.params, step.grads).params
        progress.set_postfix(bce=f"{loss:.4f}")

    scores = predict_scores(field, gaussians)
    log_stage("score_field", loss=loss, mean_score=float(scores.mean()), gaussians=len(gaussians),
              wall=time.perf_counter() - started)
    return scores
