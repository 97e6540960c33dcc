"""Lifting pixel-aligned point maps to an initial Gaussian set."""

from typing import NamedTuple

import numpy as np
from sklearn.neighbors import NearestNeighbors

from core.constants import DefaultValues
from core.exceptions import InsufficientGeometryError, InvalidInputError
from core.models import GaussianSet, ReferenceBundle, logit
from core.sh import num_sh_coeffs, rgb_to_sh_dc

MIN_POINTS = 100
SCALE_NEIGHBORS = 3


class InitialGaussians(NamedTuple):
    gaussians: GaussianSet
    scene_scale: float
    center: np.ndarray


def sample_mask(valid: np.ndarray, stride: int) -> np.ndarray:
    sampled = np.zeros_like(valid)
    sampled[::stride, ::stride] = True
    return valid & sampled


def init_gaussians_from_bundle(bundle: ReferenceBundle, subsample_stride: int = 1, *,
                               frames: list[int] | None = None,
                               sh_degree: int = DefaultValues.SH_DEGREE) -> InitialGaussians:
    """One Gaussian per valid sampled pixel of every listed frame.

    Colors come from pixel RGB through the inverse degree-0 activation, features from the featmap at
    the same pixel, isotropic scales from the mean distance to the 3 nearest initialized neighbors.
    """
    if subsample_stride < 1:
        raise InvalidInputError(f"subsample_stride must be >= 1, got {subsample_stride}")
    frames = list(range(len(bundle))) if frames is None else list(frames)
    positions, colors, features = [], [], []
    for i in frames:
        frame = bundle[i]
        mask = sample_mask(frame.valid_mask, subsample_stride)
        positions.append(frame.pointmap[mask])
        colors.append(frame.image[mask])
        features.append(frame.featmap[mask])
    positions = np.concatenate(positions) if positions else np.zeros((0, 3))
    if len(positions) < MIN_POINTS:
        raise InsufficientGeometryError(
            f"only {len(positions)} valid points after stride {subsample_stride}; at least {MIN_POINTS} are needed"
        )
    colors = np.concatenate(colors)
    features = np.concatenate(features)
    n = len(positions)

    distances, _ = NearestNeighbors(n_neighbors=SCALE_NEIGHBORS + 1).fit(positions).kneighbors(positions)
    spacing = np.maximum(distances[:, 1:].mean(axis=1), DefaultValues.MIN_SCALE)
    log_scales = np.repeat(np.log(spacing)[:, None], 3, axis=1)

    sh = np.zeros((n, num_sh_coeffs(sh_degree), 3))
    sh[:, 0, :] = rgb_to_sh_dc(colors)
    rotations = np.zeros((n, 4))
    rotations[:, 0] = 1.0

    center = positions.mean(axis=0)
    scene_scale = float(np.median(np.linalg.norm(positions - center, axis=1)))
    if scene_scale <= 0.0:
        raise InsufficientGeometryError("all initialized points coincide; scene scale is zero")
    gaussians = GaussianSet(
        positions=positions,
        rotations=rotations,
        log_scales=log_scales,
        opacity_logits=np.full(n, logit(DefaultValues.INIT_OPACITY)),
        sh_coeffs=sh,
        features=features,
        dynamic_scores=np.zeros(n),
    )
    gaussians.enforce_invariants()
    return InitialGaussians(gaussians, scene_scale, center)
