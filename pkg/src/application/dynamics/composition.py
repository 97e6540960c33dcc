import numpy as np

from core.models import GaussianSnapshot, HybridScene
from core.utils import logger
from application.dynamics.deformation import apply_deformation


def is_extrapolated(scene: HybridScene, t: float) -> bool:
    start, end = scene.time_range
    return not start <= t <= end


def compose_scene_at_t(scene: HybridScene, t: float, payloads: np.ndarray | None = None) -> GaussianSnapshot:
    """Static Gaussians verbatim followed by the dynamic Gaussians deformed to time t.

    `payloads`, when given, is one scalar per Gaussian in the same static-then-dynamic order.
    """
    if is_extrapolated(scene, t):
        logger.warning(f"Timestep {t} is outside the scene's time range {scene.time_range}; extrapolating")
    static = GaussianSnapshot.from_gaussian_set(scene.static_gaussians)
    if len(scene.dynamic_gaussians):
        moved = apply_deformation(scene.dynamic_gaussians, scene.deformation, t)
        snapshot = GaussianSnapshot.concatenate([static, GaussianSnapshot.from_gaussian_set(moved)])
    else:
        snapshot = static
    return snapshot.with_payloads(payloads) if payloads is not None else snapshot
