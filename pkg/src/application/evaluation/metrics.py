"""Image quality and decomposition metrics."""

import numpy as np

from core.exceptions import InvalidInputError, MissingMaskError
from core.imaging import psnr, ssim
from core.models import GaussianSet, GaussianSnapshot, HybridScene, ReferenceBundle
from infrastructure.rendering import RenderOptions, render
from application.dynamics import compose_scene_at_t

LABEL_THRESHOLD = 0.5


def mask_iou(predicted: np.ndarray, truth: np.ndarray) -> float:
    """IoU of two boolean masks; two empty masks count as a perfect match (1.0)."""
    union = np.count_nonzero(predicted | truth)
    if union == 0:
        return 1.0
    return np.count_nonzero(predicted & truth) / union


def _require_masks(bundle: ReferenceBundle, frames: list[int]) -> None:
    missing = [i for i in frames if bundle[i].dyn_mask is None]
    if missing:
        raise MissingMaskError(f"frames {missing} have no ground-truth dynamic mask")


def _label_options(options: RenderOptions | None) -> RenderOptions:
    return (options or RenderOptions()).evolve(payload=True, background=np.zeros(3))


def decomposition_iou(scene: HybridScene, bundle: ReferenceBundle, labels: np.ndarray | None = None, *,
                      frames: list[int] | None = None, options: RenderOptions | None = None) -> float:
    """Mean over frames of the IoU between splatted dynamic labels (> 0.5) and the ground-truth mask.

    `labels` default to the scene's own split (static 0, dynamic 1) in static-then-dynamic order.
    """
    frames = list(range(len(bundle))) if frames is None else list(frames)
    _require_masks(bundle, frames)
    if labels is None:
        labels = np.concatenate([np.zeros(len(scene.static_gaussians)), np.ones(len(scene.dynamic_gaussians))])
    labels = np.asarray(labels, dtype=np.float64)
    if labels.shape != (scene.num_gaussians,):
        raise InvalidInputError(f"expected {scene.num_gaussians} labels, got shape {labels.shape}")
    options = _label_options(options)
    scores = []
    for i in frames:
        frame = bundle[i]
        splat = render(compose_scene_at_t(scene, frame.pose.timestamp_index, labels), frame.pose, options).scalar
        scores.append(mask_iou(splat > LABEL_THRESHOLD, frame.dyn_mask))
    return float(np.mean(scores))


def label_iou(gaussians: GaussianSet, labels: np.ndarray, bundle: ReferenceBundle, *,
              frames: list[int] | None = None, options: RenderOptions | None = None) -> float:
    """Same measure for a time-independent set, e.g. the pre-pass fit before and after grouping."""
    frames = list(range(len(bundle))) if frames is None else list(frames)
    _require_masks(bundle, frames)
    snapshot = GaussianSnapshot.from_gaussian_set(gaussians, payloads=np.asarray(labels, dtype=np.float64))
    options = _label_options(options)
    return float(np.mean([
        mask_iou(render(snapshot, bundle[i].pose, options).scalar > LABEL_THRESHOLD, bundle[i].dyn_mask)
        for i in frames
    ]))


def view_metrics(rendered: np.ndarray, reference: np.ndarray) -> dict[str, float]:
    rendered = np.clip(rendered, 0.0, 1.0)
    return {"psnr": psnr(rendered, reference), "ssim": ssim(rendered, reference)}


def static_region_variance(frames: list[np.ndarray], mask: np.ndarray) -> float:
    """Mean per-pixel variance across rendered timesteps over the pixels where `mask` is true."""
    stack = np.stack([np.asarray(f, dtype=np.float64) for f in frames])
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != stack.shape[1:3]:
        raise InvalidInputError(f"mask shape {mask.shape} != frame shape {stack.shape[1:3]}")
    if not mask.any():
        return 0.0
    variance = stack.var(axis=0)
    if variance.ndim == 3:
        variance = variance.mean(axis=-1)
    return float(variance[mask].mean())
