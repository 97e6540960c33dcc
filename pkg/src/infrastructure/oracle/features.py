"""Per-pixel feature maps standing in for the generative front-end's latent features."""

import numpy as np
from scipy.ndimage import gaussian_filter, sobel

from core.exceptions import InvalidInputError

BASE_FEATURE_DIM = 6
_ID_SALT = 7919


def gradient_magnitude(image: np.ndarray) -> np.ndarray:
    luminance = np.asarray(image, dtype=np.float64) @ np.array([0.299, 0.587, 0.114])
    gx = sobel(luminance, axis=1, mode="nearest")
    gy = sobel(luminance, axis=0, mode="nearest")
    return np.hypot(gx, gy) / 8.0


def base_features(image: np.ndarray) -> np.ndarray:
    """[r, g, b, |grad|, x / (W-1), y / (H-1)] per pixel."""
    height, width = image.shape[:2]
    ys, xs = np.mgrid[0:height, 0:width].astype(np.float64)
    xs /= max(width - 1, 1)
    ys /= max(height - 1, 1)
    return np.concatenate([image, gradient_magnitude(image)[..., None], xs[..., None], ys[..., None]], axis=-1)


def primitive_codes(num_primitives: int, dim: int) -> np.ndarray:
    """Row i is a fixed pseudo-random code for primitive i; the last row (no hit) is zero."""
    codes = np.zeros((num_primitives + 1, dim))
    for i in range(num_primitives):
        codes[i] = np.random.default_rng(i + _ID_SALT).uniform(-1.0, 1.0, size=dim)
    return codes


def oracle_features(image: np.ndarray, primitive_ids: np.ndarray, num_primitives: int, feature_dim: int) -> np.ndarray:
    """Base features followed by a hashed code of the primitive each pixel hits (-1 = background)."""
    if feature_dim < BASE_FEATURE_DIM:
        raise InvalidInputError(f"oracle feature maps need at least {BASE_FEATURE_DIM} dims, got {feature_dim}")
    codes = primitive_codes(num_primitives, feature_dim - BASE_FEATURE_DIM)
    hashed = codes[np.where(primitive_ids < 0, num_primitives, primitive_ids)]
    return np.concatenate([base_features(image), hashed], axis=-1)


def fallback_features(image: np.ndarray, feature_dim: int) -> np.ndarray:
    """Features computable from RGB alone, for bundles shipped without feature maps.

    Channels beyond the base six are blurred color channels at growing scales.
    """
    base = base_features(image)
    if feature_dim <= BASE_FEATURE_DIM:
        return base[..., :feature_dim]
    extra = [
        gaussian_filter(image[..., k % 3], sigma=2.0 ** (k // 3 + 1), mode="nearest")
        for k in range(feature_dim - BASE_FEATURE_DIM)
    ]
    return np.concatenate([base, np.stack(extra, axis=-1)], axis=-1)
