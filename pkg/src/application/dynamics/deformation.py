"""The shared deformation network: (position, time) -> per-Gaussian offsets, and its gradients."""

from typing import NamedTuple

import numpy as np

from core.exceptions import InvalidInputError
from core.geometry import normalize_quaternions, normalize_quaternions_backward
from core.models import DeformationField, GaussianSet, MlpSpec
from infrastructure.nn import encoded_dim, init_mlp, mlp_backward, mlp_forward, positional_encoding, \
    positional_encoding_backward

DEFORM_OUTPUTS = 10


class DeformationOffsets(NamedTuple):
    positions: np.ndarray
    rotations: np.ndarray
    log_scales: np.ndarray


class DeformationGradients(NamedTuple):
    """Gradients w.r.t. the network parameters and the canonical Gaussian parameters."""

    params: dict[str, np.ndarray]
    positions: np.ndarray
    rotations: np.ndarray
    log_scales: np.ndarray


def deformation_spec(position_freqs: int = 8, time_freqs: int = 4, hidden_width: int = 128,
                     hidden_layers: int = 4) -> MlpSpec:
    return MlpSpec(
        input_dim=encoded_dim(3, position_freqs) + encoded_dim(1, time_freqs),
        hidden_dims=(hidden_width,) * hidden_layers,
        output_dim=DEFORM_OUTPUTS,
        output_activation="none",
        init="zero_last_layer",
    )


def create_deformation_field(center: np.ndarray, scene_scale: float, num_frames: int, rng: np.random.Generator, *,
                             position_freqs: int = 8, time_freqs: int = 4, hidden_width: int = 128,
                             hidden_layers: int = 4) -> DeformationField:
    """A field whose last layer is zero, so every offset is exactly zero until trained."""
    spec = deformation_spec(position_freqs, time_freqs, hidden_width, hidden_layers)
    return DeformationField(
        spec=spec,
        params=init_mlp(spec, rng),
        center=np.asarray(center, dtype=np.float64),
        scene_scale=float(scene_scale),
        num_frames=int(num_frames),
        position_freqs=position_freqs,
        time_freqs=time_freqs,
    )


def _inputs(field: DeformationField, positions: np.ndarray, t: float) -> tuple[np.ndarray, np.ndarray]:
    positions = np.asarray(positions, dtype=np.float64)
    if positions.ndim != 2 or positions.shape[1] != 3:
        raise InvalidInputError(f"positions must have shape (N, 3), got {positions.shape}")
    if not np.all(np.isfinite(positions)):
        raise InvalidInputError("positions contain non-finite values")
    if not np.isfinite(t):
        raise InvalidInputError(f"timestep must be finite, got {t}")
    normalized = (positions - field.center) / field.scene_scale
    time_code = positional_encoding(np.array([field.normalized_time(t)]), field.time_freqs)
    encoded = np.concatenate([
        positional_encoding(normalized, field.position_freqs),
        np.broadcast_to(time_code, (len(positions), time_code.size)),
    ], axis=1)
    return encoded, normalized


def _split(field: DeformationField, raw: np.ndarray) -> DeformationOffsets:
    return DeformationOffsets(raw[:, :3] * field.scene_scale, raw[:, 3:7], raw[:, 7:10])


def deform(field: DeformationField, positions: np.ndarray, t: float) -> DeformationOffsets:
    """Offsets (world meters, quaternion units, log-scale units) for canonical positions at time t."""
    encoded, _ = _inputs(field, positions, t)
    if not len(encoded):
        return DeformationOffsets(np.zeros((0, 3)), np.zeros((0, 4)), np.zeros((0, 3)))
    return _split(field, mlp_forward(field.spec, field.params, encoded))


def _deformed_rotations(rotations: np.ndarray, delta: np.ndarray) -> np.ndarray:
    # Rows with a zero offset keep their stored quaternion bit-for-bit.
    moved = np.any(delta != 0.0, axis=1)
    out = rotations.copy()
    if np.any(moved):
        out[moved] = normalize_quaternions(rotations[moved] + delta[moved])
    return out


def apply_deformation(gaussians: GaussianSet, field: DeformationField, t: float) -> GaussianSet:
    """Canonical Gaussians moved to time t: x + dx, normalize(r + dr), s + ds; opacity and color untouched."""
    offsets = deform(field, gaussians.positions, t)
    return gaussians.with_params(
        positions=gaussians.positions + offsets.positions,
        rotations=_deformed_rotations(gaussians.rotations, offsets.rotations),
        log_scales=gaussians.log_scales + offsets.log_scales,
    )


def apply_deformation_backward(gaussians: GaussianSet, field: DeformationField, t: float,
                               grad_positions: np.ndarray, grad_rotations: np.ndarray,
                               grad_log_scales: np.ndarray) -> DeformationGradients:
    """Pull gradients w.r.t. the deformed Gaussians back to the canonical set and the network.

    `grad_rotations` is w.r.t. the (renormalized) deformed quaternion as handed to the rasterizer.
    """
    encoded, normalized = _inputs(field, gaussians.positions, t)
    if not len(encoded):
        zeros = {name: np.zeros_like(value) for name, value in field.params.items()}
        return DeformationGradients(zeros, np.zeros((0, 3)), np.zeros((0, 4)), np.zeros((0, 3)))
    raw = mlp_forward(field.spec, field.params, encoded)
    grad_delta_rot = normalize_quaternions_backward(gaussians.rotations + raw[:, 3:7], grad_rotations)
    grad_raw = np.concatenate([grad_positions * field.scene_scale, grad_delta_rot, grad_log_scales], axis=1)
    grad_params, grad_encoded = mlp_backward(field.spec, field.params, encoded, grad_raw)
    pos_dim = encoded_dim(3, field.position_freqs)
    grad_normalized = positional_encoding_backward(normalized, field.position_freqs, grad_encoded[:, :pos_dim])
    return DeformationGradients(
        params=grad_params,
        positions=grad_positions + grad_normalized / field.scene_scale,
        rotations=grad_delta_rot,
        log_scales=np.array(grad_log_scales, dtype=np.float64),
    )
