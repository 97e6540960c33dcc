"""Quaternion, covariance and pinhole-projection math shared by every module.

All functions accept a single item or a leading batch dimension and compute in float64.
Quaternions are (w, x, y, z). Camera convention: x-right, y-down, z-forward.
"""

from typing import NamedTuple

import numpy as np

from core.constants import DefaultValues
from core.exceptions import InvalidInputError


def normalize_quaternions(q: np.ndarray) -> np.ndarray:
    q = np.asarray(q, dtype=np.float64)
    norm = np.linalg.norm(q, axis=-1, keepdims=True)
    if np.any(norm == 0.0):
        raise InvalidInputError("zero-norm quaternion")
    return q / norm


def normalize_quaternions_backward(q: np.ndarray, grad_unit: np.ndarray) -> np.ndarray:
    """Pull a gradient w.r.t. q/|q| back to the raw quaternion q."""
    q = np.asarray(q, dtype=np.float64)
    norm = np.linalg.norm(q, axis=-1, keepdims=True)
    unit = q / norm
    radial = np.sum(unit * grad_unit, axis=-1, keepdims=True)
    return (grad_unit - unit * radial) / norm


def quaternion_to_rotation(q_unit: np.ndarray) -> np.ndarray:
    """Rotation matrices from unit quaternions, shape (..., 3, 3)."""
    w, x, y, z = np.moveaxis(np.asarray(q_unit, dtype=np.float64), -1, 0)
    return np.stack([
        np.stack([1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)], axis=-1),
        np.stack([2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)], axis=-1),
        np.stack([2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)], axis=-1),
    ], axis=-2)


def quaternion_to_rotation_backward(q_unit: np.ndarray, grad_rot: np.ndarray) -> np.ndarray:
    """Gradient w.r.t. the unit quaternion given dL/dR, shape (..., 4)."""
    w, x, y, z = np.moveaxis(np.asarray(q_unit, dtype=np.float64), -1, 0)
    g = grad_rot
    g00, g01, g02 = g[..., 0, 0], g[..., 0, 1], g[..., 0, 2]
    g10, g11, g12 = g[..., 1, 0], g[..., 1, 1], g[..., 1, 2]
    g20, g21, g22 = g[..., 2, 0], g[..., 2, 1], g[..., 2, 2]
    dw = 2 * (-z * g01 + y * g02 + z * g10 - x * g12 - y * g20 + x * g21)
    dx = 2 * (y * g01 + z * g02 + y * g10 - 2 * x * g11 - w * g12 + z * g20 + w * g21 - 2 * x * g22)
    dy = 2 * (-2 * y * g00 + x * g01 + w * g02 + x * g10 + z * g12 - w * g20 + z * g21 - 2 * y * g22)
    dz = 2 * (-2 * z * g00 - w * g01 + x * g02 + w * g10 - 2 * z * g11 + y * g12 + x * g20 + y * g21)
    return np.stack([dw, dx, dy, dz], axis=-1)


def covariance_from_rotation_scale(rotation: np.ndarray, log_scale: np.ndarray) -> np.ndarray:
    """Sigma = R diag(exp(log_scale))^2 R^T.

    Args:
        rotation: (4,) or (N, 4) quaternion, normalized internally
        log_scale: (3,) or (N, 3) per-axis log standard deviations

    Returns:
        (3, 3) or (N, 3, 3) symmetric PSD matrices
    """
    rot = quaternion_to_rotation(normalize_quaternions(rotation))
    scale = np.exp(np.asarray(log_scale, dtype=np.float64))
    m = rot * scale[..., None, :]
    cov = m @ np.swapaxes(m, -1, -2)
    return 0.5 * (cov + np.swapaxes(cov, -1, -2))


def covariance_backward(
    rotation: np.ndarray, log_scale: np.ndarray, grad_cov: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Gradients w.r.t. raw quaternion and log-scale given a full-matrix dL/dSigma."""
    unit = normalize_quaternions(rotation)
    rot = quaternion_to_rotation(unit)
    scale = np.exp(np.asarray(log_scale, dtype=np.float64))
    m = rot * scale[..., None, :]
    g_sym = 0.5 * (grad_cov + np.swapaxes(grad_cov, -1, -2))
    grad_m = 2.0 * g_sym @ m
    grad_scale = np.sum(grad_m * rot, axis=-2)
    grad_rot = grad_m * scale[..., None, :]
    grad_unit = quaternion_to_rotation_backward(unit, grad_rot)
    return normalize_quaternions_backward(rotation, grad_unit), grad_scale * scale


class ProjectedPoints(NamedTuple):
    u: np.ndarray
    v: np.ndarray
    depth: np.ndarray
    culled: np.ndarray


def project_points(pose, x_world: np.ndarray, near: float = DefaultValues.NEAR_PLANE,
                   far: float = DefaultValues.FAR_PLANE) -> ProjectedPoints:
    """Pinhole projection of world points; points at depth <= near or >= far are flagged culled."""
    x = np.asarray(x_world, dtype=np.float64)
    p_cam = x @ pose.rotation.T + pose.translation
    depth = p_cam[..., 2]
    culled = (depth <= near) | (depth >= far)
    safe = np.where(culled, 1.0, depth)
    u = pose.fx * p_cam[..., 0] / safe + pose.cx
    v = pose.fy * p_cam[..., 1] / safe + pose.cy
    return ProjectedPoints(u, v, depth, culled)


def project_point(pose, x_world: np.ndarray, near: float = DefaultValues.NEAR_PLANE) -> ProjectedPoints:
    """Single-point convenience wrapper; fields are 0-d arrays."""
    x = np.asarray(x_world, dtype=np.float64)
    if x.shape != (3,):
        raise InvalidInputError(f"expected a 3-vector, got shape {x.shape}")
    return project_points(pose, x, near=near)


def projection_jacobian(pose, p_cam: np.ndarray) -> np.ndarray:
    """d(u, v)/d(p_cam) for camera-space points, shape (..., 2, 3)."""
    x, y, z = p_cam[..., 0], p_cam[..., 1], p_cam[..., 2]
    jac = np.zeros(p_cam.shape[:-1] + (2, 3))
    jac[..., 0, 0] = pose.fx / z
    jac[..., 0, 2] = -pose.fx * x / (z * z)
    jac[..., 1, 1] = pose.fy / z
    jac[..., 1, 2] = -pose.fy * y / (z * z)
    return jac


def project_covariance(pose, x_world: np.ndarray, cov3d: np.ndarray,
                       blur: float = DefaultValues.LOW_PASS_BLUR) -> np.ndarray:
    """EWA screen-space covariance J W Sigma W^T J^T + blur I in px^2."""
    x = np.asarray(x_world, dtype=np.float64)
    p_cam = x @ pose.rotation.T + pose.translation
    t = projection_jacobian(pose, p_cam) @ pose.rotation
    cov2d = t @ np.asarray(cov3d, dtype=np.float64) @ np.swapaxes(t, -1, -2)
    cov2d = 0.5 * (cov2d + np.swapaxes(cov2d, -1, -2))
    return cov2d + blur * np.eye(2)


def look_at_rotation(eye: np.ndarray, target: np.ndarray, up=(0.0, 0.0, 1.0)) -> np.ndarray:
    """World-to-camera rotation whose rows are camera right, down and forward axes."""
    forward = np.asarray(target, dtype=np.float64) - np.asarray(eye, dtype=np.float64)
    forward /= np.linalg.norm(forward)
    right = np.cross(forward, np.asarray(up, dtype=np.float64))
    norm = np.linalg.norm(right)
    if norm < 1e-9:
        raise InvalidInputError("view direction parallel to up vector")
    right /= norm
    down = np.cross(forward, right)
    return np.stack([right, down, forward])
