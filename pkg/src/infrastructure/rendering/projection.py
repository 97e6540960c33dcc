"""Per-Gaussian screen-space preprocessing (EWA projection, SH color) and its backward pass."""

from dataclasses import dataclass

import numpy as np

from core.constants import DefaultValues
from core.exceptions import InvalidInputError
from core.geometry import covariance_backward, projection_jacobian
from core.models import CameraPose, GaussianSnapshot
from core.sh import eval_sh, eval_sh_backward, num_sh_coeffs, truncate_sh
from infrastructure.rendering.options import GaussianGradients, RenderOptions


@dataclass
class ScreenSpace:
    """Projected Gaussians. Arrays are indexed like the snapshot; `order` lists the
    renderable ones front to back (camera depth, then snapshot index)."""

    means2d: np.ndarray
    conics: np.ndarray
    radii: np.ndarray
    depths: np.ndarray
    opacities: np.ndarray
    colors: np.ndarray
    payloads: np.ndarray | None
    order: np.ndarray
    skipped: int
    p_cam: np.ndarray
    cov2d_jacobian: np.ndarray
    view_dirs: np.ndarray
    view_dist: np.ndarray
    sh_degree: int


def resolve_sh_degree(snapshot: GaussianSnapshot, options: RenderOptions) -> int:
    degree = snapshot.sh_degree if options.sh_degree is None else options.sh_degree
    if degree > snapshot.sh_degree:
        raise InvalidInputError(f"render degree {degree} exceeds stored SH degree {snapshot.sh_degree}")
    return degree


def project_gaussians(snapshot: GaussianSnapshot, pose: CameraPose, options: RenderOptions) -> ScreenSpace:
    n = len(snapshot)
    degree = resolve_sh_degree(snapshot, options)
    if options.payload and snapshot.payloads is None:
        raise InvalidInputError("payload rendering requested but the snapshot carries no payloads")

    rot = pose.rotation
    p_cam = snapshot.positions @ rot.T + pose.translation
    depth = p_cam[:, 2]
    culled = (depth <= options.near_plane) | (depth >= options.far_plane)
    safe_cam = p_cam.copy()
    safe_cam[culled, 2] = 1.0

    jac = projection_jacobian(pose, safe_cam) @ rot
    cov2d = jac @ snapshot.covariances @ np.swapaxes(jac, -1, -2)
    cov2d = 0.5 * (cov2d + np.swapaxes(cov2d, -1, -2)) + options.blur * np.eye(2)
    a, b, c = cov2d[:, 0, 0], cov2d[:, 0, 1], cov2d[:, 1, 1]
    det = a * c - b * b
    degenerate = ~culled & (det <= DefaultValues.DEGENERATE_DET)
    safe_det = np.where(culled | degenerate, 1.0, det)
    conics = np.stack([np.stack([c, -b], -1), np.stack([-b, a], -1)], -2) / safe_det[:, None, None]

    u = pose.fx * safe_cam[:, 0] / safe_cam[:, 2] + pose.cx
    v = pose.fy * safe_cam[:, 1] / safe_cam[:, 2] + pose.cy
    half_trace = 0.5 * (a + c)
    lambda_max = half_trace + np.sqrt(np.maximum(0.25 * (a - c) ** 2 + b * b, 0.0))
    radii = options.footprint_sigma * np.sqrt(np.maximum(lambda_max, 0.0))
    on_screen = (u + radii >= 0) & (u - radii <= pose.width - 1) & (v + radii >= 0) & (v - radii <= pose.height - 1)

    offsets = snapshot.positions - pose.camera_center
    view_dist = np.linalg.norm(offsets, axis=-1)
    view_dirs = offsets / np.where(view_dist > 0, view_dist, 1.0)[:, None]
    colors = eval_sh(truncate_sh(snapshot.sh_coeffs, degree), view_dirs, degree) if n else np.zeros((0, 3))

    renderable = ~culled & ~degenerate & on_screen
    index = np.flatnonzero(renderable)
    order = index[np.lexsort((index, depth[index]))]

    return ScreenSpace(
        means2d=np.stack([u, v], axis=-1),
        conics=conics,
        radii=radii,
        depths=depth,
        opacities=snapshot.opacities,
        colors=colors,
        payloads=snapshot.payloads if options.payload else None,
        order=order,
        skipped=int(np.count_nonzero(degenerate)),
        p_cam=p_cam,
        cov2d_jacobian=jac,
        view_dirs=view_dirs,
        view_dist=view_dist,
        sh_degree=degree,
    )


def project_gaussians_backward(
    snapshot: GaussianSnapshot,
    pose: CameraPose,
    screen: ScreenSpace,
    grad_means2d: np.ndarray,
    grad_conics: np.ndarray,
    grad_opacities: np.ndarray,
    grad_colors: np.ndarray,
    grad_depths: np.ndarray,
) -> GaussianGradients:
    """Chain screen-space gradients back to the snapshot's raw parameters.

    Only Gaussians in `screen.order` receive gradient; everything else stays zero.
    """
    n = len(snapshot)
    grads = GaussianGradients.zeros(n, snapshot.sh_coeffs.shape[1:], screen.payloads is not None)
    idx = screen.order
    if idx.size == 0:
        return grads

    rot = pose.rotation
    p_cam = screen.p_cam[idx]
    x, y, z = p_cam[:, 0], p_cam[:, 1], p_cam[:, 2]
    fx, fy = pose.fx, pose.fy
    conic = screen.conics[idx]
    jac_cov = screen.cov2d_jacobian[idx]
    cov3d = snapshot.covariances[idx]

    # conic = inverse(cov2d)
    grad_cov2d = -conic @ grad_conics[idx] @ conic
    grad_cov2d = 0.5 * (grad_cov2d + np.swapaxes(grad_cov2d, -1, -2))
    grad_cov3d = np.swapaxes(jac_cov, -1, -2) @ grad_cov2d @ jac_cov
    grad_t = 2.0 * grad_cov2d @ jac_cov @ cov3d
    grad_j = grad_t @ rot.T

    g_pcam = np.zeros_like(p_cam)
    inv_z2 = 1.0 / (z * z)
    inv_z3 = inv_z2 / z
    g_pcam[:, 0] += grad_j[:, 0, 2] * (-fx * inv_z2)
    g_pcam[:, 1] += grad_j[:, 1, 2] * (-fy * inv_z2)
    g_pcam[:, 2] += (grad_j[:, 0, 0] * (-fx * inv_z2) + grad_j[:, 0, 2] * (2.0 * fx * x * inv_z3)
                     + grad_j[:, 1, 1] * (-fy * inv_z2) + grad_j[:, 1, 2] * (2.0 * fy * y * inv_z3))

    gu, gv = grad_means2d[idx, 0], grad_means2d[idx, 1]
    g_pcam[:, 0] += gu * fx / z
    g_pcam[:, 1] += gv * fy / z
    g_pcam[:, 2] += -(gu * fx * x + gv * fy * y) * inv_z2 + grad_depths[idx]

    grad_positions = g_pcam @ rot

    grad_sh, grad_dir = eval_sh_backward(truncate_sh(snapshot.sh_coeffs[idx], screen.sh_degree), screen.view_dirs[idx],
                                         screen.sh_degree, grad_colors[idx])
    dirs = screen.view_dirs[idx]
    radial = np.sum(dirs * grad_dir, axis=-1, keepdims=True)
    grad_positions += (grad_dir - dirs * radial) / screen.view_dist[idx, None]

    grad_rot, grad_log_scale = covariance_backward(snapshot.rotations[idx], snapshot.log_scales[idx], grad_cov3d)
    opac = screen.opacities[idx]

    grads.positions[idx] = grad_positions
    grads.rotations[idx] = grad_rot
    grads.log_scales[idx] = grad_log_scale
    grads.opacity_logits[idx] = grad_opacities[idx] * opac * (1.0 - opac)
    grads.sh_coeffs[idx, : num_sh_coeffs(screen.sh_degree)] = grad_sh
    return grads
