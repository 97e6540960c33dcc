"""Image-space losses and quality metrics with analytic gradients w.r.t. the first argument."""

import numpy as np
from scipy.ndimage import gaussian_filter

from core.exceptions import InvalidInputError

SSIM_SIGMA = 1.5
SSIM_RADIUS = 5
SSIM_K1 = 0.01
SSIM_K2 = 0.03
SSIM_C1 = SSIM_K1 ** 2
SSIM_C2 = SSIM_K2 ** 2


def _check_pair(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise InvalidInputError(f"image shapes differ: {a.shape} vs {b.shape}")
    if a.ndim == 2:
        a, b = a[..., None], b[..., None]
    if a.ndim != 3:
        raise InvalidInputError(f"expected HxW or HxWxC images, got shape {a.shape}")
    return a, b


def _window(image: np.ndarray) -> np.ndarray:
    # 11x11 Gaussian window per channel, zero padding; the operator is symmetric.
    return gaussian_filter(image, sigma=(SSIM_SIGMA, SSIM_SIGMA, 0.0), truncate=SSIM_RADIUS / SSIM_SIGMA,
                           mode="constant", cval=0.0)


def l1_loss(a: np.ndarray, b: np.ndarray) -> float:
    a, b = _check_pair(a, b)
    return float(np.mean(np.abs(a - b)))


def l1_loss_grad(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    shape = np.shape(a)
    a, b = _check_pair(a, b)
    return (np.sign(a - b) / a.size).reshape(shape)


def _ssim_terms(a: np.ndarray, b: np.ndarray):
    mu_a, mu_b = _window(a), _window(b)
    var_a = _window(a * a) - mu_a * mu_a
    var_b = _window(b * b) - mu_b * mu_b
    cov_ab = _window(a * b) - mu_a * mu_b
    num_l = 2.0 * mu_a * mu_b + SSIM_C1
    num_c = 2.0 * cov_ab + SSIM_C2
    den_l = mu_a * mu_a + mu_b * mu_b + SSIM_C1
    den_c = var_a + var_b + SSIM_C2
    ssim_map = (num_l * num_c) / (den_l * den_c)
    return mu_a, mu_b, num_l, num_c, den_l, den_c, ssim_map


def ssim(a: np.ndarray, b: np.ndarray) -> float:
    """Mean SSIM over pixels and channels (11x11 Gaussian window, sigma 1.5, k1 0.01, k2 0.03)."""
    a, b = _check_pair(a, b)
    return float(np.mean(_ssim_terms(a, b)[-1]))


def ssim_grad(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """d ssim(a, b) / d a."""
    shape = np.shape(a)
    a, b = _check_pair(a, b)
    mu_a, mu_b, num_l, num_c, den_l, den_c, ssim_map = _ssim_terms(a, b)
    weight = 1.0 / ssim_map.size
    den = den_l * den_c
    d_mu_a = (2.0 * mu_b * num_c - 2.0 * mu_b * num_l) / den - ssim_map * 2.0 * mu_a / den_l \
        + ssim_map * 2.0 * mu_a / den_c
    d_m_ab = 2.0 * num_l / den
    d_m_aa = -ssim_map / den_c
    grad = _window(weight * d_mu_a) + _window(weight * d_m_ab) * b + 2.0 * _window(weight * d_m_aa) * a
    return grad.reshape(shape)


def ssim_loss(a: np.ndarray, b: np.ndarray) -> float:
    return 1.0 - ssim(a, b)


def mse(a: np.ndarray, b: np.ndarray) -> float:
    a, b = _check_pair(a, b)
    return float(np.mean((a - b) ** 2))


def psnr(a: np.ndarray, b: np.ndarray) -> float:
    """10 log10(1 / MSE) for images in [0, 1]; identical images give +inf."""
    error = mse(a, b)
    if error == 0.0:
        return float("inf")
    return float(10.0 * np.log10(1.0 / error))
