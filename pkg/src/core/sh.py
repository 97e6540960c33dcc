"""Real spherical-harmonics color evaluation (degrees 0-3) with analytic derivatives."""

import numpy as np

from core.constants import MAX_SH_DEGREE, SH_C0, SH_C1, SH_C2, SH_C3
from core.exceptions import InvalidInputError


def num_sh_coeffs(degree: int) -> int:
    return (degree + 1) ** 2


def sh_basis(dirs: np.ndarray, degree: int) -> np.ndarray:
    """Basis values for unit directions, shape (..., (degree+1)^2)."""
    if not 0 <= degree <= MAX_SH_DEGREE:
        raise InvalidInputError(f"SH degree must be in [0, {MAX_SH_DEGREE}], got {degree}")
    dirs = np.asarray(dirs, dtype=np.float64)
    x, y, z = dirs[..., 0], dirs[..., 1], dirs[..., 2]
    terms = [np.full(x.shape, SH_C0)]
    if degree >= 1:
        terms += [-SH_C1 * y, SH_C1 * z, -SH_C1 * x]
    if degree >= 2:
        xx, yy, zz = x * x, y * y, z * z
        terms += [
            SH_C2[0] * x * y,
            SH_C2[1] * y * z,
            SH_C2[2] * (2 * zz - xx - yy),
            SH_C2[3] * x * z,
            SH_C2[4] * (xx - yy),
        ]
    if degree >= 3:
        terms += [
            SH_C3[0] * y * (3 * xx - yy),
            SH_C3[1] * x * y * z,
            SH_C3[2] * y * (4 * zz - xx - yy),
            SH_C3[3] * z * (2 * zz - 3 * xx - 3 * yy),
            SH_C3[4] * x * (4 * zz - xx - yy),
            SH_C3[5] * z * (xx - yy),
            SH_C3[6] * x * (xx - 3 * yy),
        ]
    return np.stack(terms, axis=-1)


def sh_basis_jacobian(dirs: np.ndarray, degree: int) -> np.ndarray:
    """d(basis)/d(dir) treating the direction components as free, shape (..., K, 3)."""
    dirs = np.asarray(dirs, dtype=np.float64)
    x, y, z = dirs[..., 0], dirs[..., 1], dirs[..., 2]
    zero = np.zeros(x.shape)

    def row(a, b, c):
        return np.stack([a + zero, b + zero, c + zero], axis=-1)

    rows = [row(zero, zero, zero)]
    if degree >= 1:
        rows += [row(0.0, -SH_C1, 0.0), row(0.0, 0.0, SH_C1), row(-SH_C1, 0.0, 0.0)]
    if degree >= 2:
        c = SH_C2
        rows += [
            row(c[0] * y, c[0] * x, 0.0),
            row(0.0, c[1] * z, c[1] * y),
            row(-2 * c[2] * x, -2 * c[2] * y, 4 * c[2] * z),
            row(c[3] * z, 0.0, c[3] * x),
            row(2 * c[4] * x, -2 * c[4] * y, 0.0),
        ]
    if degree >= 3:
        c = SH_C3
        xx, yy, zz = x * x, y * y, z * z
        rows += [
            row(6 * c[0] * x * y, c[0] * (3 * xx - 3 * yy), 0.0),
            row(c[1] * y * z, c[1] * x * z, c[1] * x * y),
            row(-2 * c[2] * x * y, c[2] * (4 * zz - xx - 3 * yy), 8 * c[2] * y * z),
            row(-6 * c[3] * x * z, -6 * c[3] * y * z, c[3] * (6 * zz - 3 * xx - 3 * yy)),
            row(c[4] * (4 * zz - 3 * xx - yy), -2 * c[4] * x * y, 8 * c[4] * x * z),
            row(2 * c[5] * x * z, -2 * c[5] * y * z, c[5] * (xx - yy)),
            row(c[6] * (3 * xx - 3 * yy), -6 * c[6] * x * y, 0.0),
        ]
    return np.stack(rows, axis=-2)


def _check_coeffs(sh_coeffs: np.ndarray, degree: int) -> np.ndarray:
    sh_coeffs = np.asarray(sh_coeffs, dtype=np.float64)
    needed = num_sh_coeffs(degree)
    if sh_coeffs.ndim < 2 or sh_coeffs.shape[-1] != 3 or sh_coeffs.shape[-2] != needed:
        raise InvalidInputError(
            f"SH degree {degree} needs exactly {needed} RGB coefficients, got shape {sh_coeffs.shape}"
        )
    return sh_coeffs


def truncate_sh(sh_coeffs: np.ndarray, degree: int) -> np.ndarray:
    """Leading bands of stored coefficients, for evaluating at a lower degree than stored."""
    sh_coeffs = np.asarray(sh_coeffs, dtype=np.float64)
    needed = num_sh_coeffs(degree)
    if sh_coeffs.ndim < 2 or sh_coeffs.shape[-2] < needed:
        raise InvalidInputError(f"cannot truncate SH shape {sh_coeffs.shape} to degree {degree}")
    return sh_coeffs[..., :needed, :]


def eval_sh_raw(sh_coeffs: np.ndarray, view_dir: np.ndarray, degree: int) -> np.ndarray:
    """Contracted SH value plus 0.5, before the lower clamp."""
    coeffs = _check_coeffs(sh_coeffs, degree)
    basis = sh_basis(view_dir, degree)
    return np.einsum("...k,...kc->...c", basis, coeffs) + 0.5


def eval_sh(sh_coeffs: np.ndarray, view_dir: np.ndarray, degree: int) -> np.ndarray:
    """RGB color: SH contraction + 0.5, clamped below at 0 (no upper clamp)."""
    return np.maximum(eval_sh_raw(sh_coeffs, view_dir, degree), 0.0)


def eval_sh_backward(
    sh_coeffs: np.ndarray, view_dir: np.ndarray, degree: int, grad_color: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Gradients w.r.t. the SH coefficients and the view direction."""
    coeffs = _check_coeffs(sh_coeffs, degree)
    raw = eval_sh_raw(coeffs, view_dir, degree)
    grad_raw = np.where(raw > 0.0, grad_color, 0.0)
    basis = sh_basis(view_dir, degree)
    grad_coeffs = basis[..., :, None] * grad_raw[..., None, :]
    grad_basis = np.einsum("...kc,...c->...k", coeffs, grad_raw)
    grad_dir = np.einsum("...k,...kd->...d", grad_basis, sh_basis_jacobian(view_dir, degree))
    return grad_coeffs, grad_dir


def rgb_to_sh_dc(rgb: np.ndarray) -> np.ndarray:
    """Inverse of the degree-0 color activation."""
    return (np.asarray(rgb, dtype=np.float64) - 0.5) / SH_C0
