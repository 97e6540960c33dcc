"""Builders for cameras, Gaussians and scenes shared across test modules."""

import numpy as np

from core.models import CameraPose, GaussianSet, GaussianSnapshot, HybridScene
from core.sh import num_sh_coeffs, rgb_to_sh_dc


def make_pose(size: int = 64, focal: float = 64.0, world_to_cam=None, t: float = 0) -> CameraPose:
    """Camera at the origin looking down +z (x right, y down)."""
    return CameraPose(focal, focal, size / 2.0, size / 2.0, size, size,
                      np.eye(4) if world_to_cam is None else world_to_cam, t)


def make_gaussians(rng: np.random.Generator, n: int, *, sh_degree: int = 1, feature_dim: int = 8,
                   depth: tuple[float, float] = (2.0, 6.0), spread: float = 0.4,
                   opacity: tuple[float, float] = (-2.0, 1.0), scale: tuple[float, float] = (0.05, 0.2)) -> GaussianSet:
    """Random Gaussians inside the view frustum of `make_pose`."""
    z = rng.uniform(*depth, size=n)
    xy = rng.uniform(-spread, spread, size=(n, 2)) * z[:, None]
    sh = np.zeros((n, num_sh_coeffs(sh_degree), 3))
    sh[:, 0, :] = rgb_to_sh_dc(rng.uniform(0.2, 0.8, size=(n, 3)))
    sh[:, 1:, :] = rng.normal(0.0, 0.05, size=(n, num_sh_coeffs(sh_degree) - 1, 3))
    return GaussianSet(
        positions=np.column_stack([xy, z]),
        rotations=rng.normal(size=(n, 4)),
        log_scales=np.log(rng.uniform(*scale, size=(n, 3))),
        opacity_logits=rng.uniform(*opacity, size=n),
        sh_coeffs=sh,
        features=rng.normal(size=(n, feature_dim)),
        dynamic_scores=np.zeros(n),
    )


def make_snapshot(rng: np.random.Generator, n: int, payload: bool = False, **kwargs) -> GaussianSnapshot:
    gaussians = make_gaussians(rng, n, **kwargs)
    return GaussianSnapshot.from_gaussian_set(gaussians, payloads=rng.uniform(0.0, 1.0, size=n) if payload else None)


def make_scene(static: GaussianSet, dynamic: GaussianSet | None = None, deformation=None,
               num_frames: int = 5) -> HybridScene:
    dynamic = dynamic if dynamic is not None else GaussianSet.empty(static.sh_degree, static.feature_dim)
    return HybridScene(static_gaussians=static, dynamic_gaussians=dynamic, deformation=deformation,
                       time_range=(0.0, float(num_frames - 1)), scene_scale=1.0)
