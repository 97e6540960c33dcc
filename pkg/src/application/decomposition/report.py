"""Score and label visualizations for a finished scene."""

from pathlib import Path

import numpy as np

from core.models import HybridScene, ReferenceBundle
from core.utils import atomic_directory, logger
from infrastructure.rendering import RenderOptions, render
from infrastructure.storage.bundle_io import frame_name, write_png
from application.decomposition.result import DecompositionResult, write_sidecar
from application.dynamics import compose_scene_at_t

OVERLAY_WEIGHT = 0.5


def heat_colors(values: np.ndarray) -> np.ndarray:
    """Black-red-yellow-white ramp for values in [0, 1]."""
    v = np.clip(values, 0.0, 1.0)[..., None] * 3.0
    return np.clip(np.concatenate([v, v - 1.0, v - 2.0], axis=-1), 0.0, 1.0)


def heat_overlay(image: np.ndarray, values: np.ndarray) -> np.ndarray:
    return (1.0 - OVERLAY_WEIGHT) * image + OVERLAY_WEIGHT * heat_colors(values)


def scene_payloads(scene: HybridScene, result: DecompositionResult) -> tuple[np.ndarray, np.ndarray]:
    """(scores, dynamic labels) per Gaussian in the scene's static-then-dynamic order."""
    ids = np.concatenate([scene.static_gaussians.ids, scene.dynamic_gaussians.ids])
    labels = np.concatenate([np.zeros(len(scene.static_gaussians)), np.ones(len(scene.dynamic_gaussians))])
    return result.score_of(ids), labels


def splatted_maps(scene: HybridScene, result: DecompositionResult, bundle: ReferenceBundle,
                  options: RenderOptions | None = None) -> list[tuple[np.ndarray, np.ndarray]]:
    """Per frame: (splatted score map, splatted dynamic-label map)."""
    options = (options or RenderOptions()).evolve(payload=True, sh_degree=None)
    scores, labels = scene_payloads(scene, result)
    maps = []
    for frame in bundle:
        t = frame.pose.timestamp_index
        score_map = render(compose_scene_at_t(scene, t, scores), frame.pose, options).scalar
        label_map = render(compose_scene_at_t(scene, t, labels), frame.pose, options).scalar
        maps.append((score_map, label_map))
    return maps


def write_decomposition_report(scene: HybridScene, result: DecompositionResult, bundle: ReferenceBundle,
                               directory: str | Path, options: RenderOptions | None = None) -> Path:
    """Write NNNN_scores.png, NNNN_labels.png and decomposition.json into `directory` atomically."""
    maps = splatted_maps(scene, result, bundle, options)
    with atomic_directory(directory) as tmp:
        for i, (frame, (score_map, label_map)) in enumerate(zip(bundle, maps)):
            write_png(tmp / frame_name(i, "_scores.png"), heat_overlay(frame.image, score_map))
            write_png(tmp / frame_name(i, "_labels.png"), heat_overlay(frame.image, label_map))
        write_sidecar(result, tmp / "decomposition.json")
    logger.info(f"Wrote decomposition report for {len(bundle)} frames to {directory}")
    return Path(directory)
