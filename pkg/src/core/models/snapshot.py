from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from core.exceptions import InvalidInputError
from core.geometry import covariance_from_rotation_scale
from core.models.gaussians import GaussianSet, sigmoid


@dataclass(frozen=True, eq=False)
class GaussianSnapshot:
    """Gaussians frozen at one timestep, in the raw parameterization the rasterizer differentiates.

    Covariances and opacities are derived on first access.
    """

    positions: np.ndarray
    rotations: np.ndarray
    log_scales: np.ndarray
    opacity_logits: np.ndarray
    sh_coeffs: np.ndarray
    payloads: np.ndarray | None = None
    ids: np.ndarray = field(default=None)

    def __post_init__(self):
        n = len(self.positions)
        if self.ids is None:
            object.__setattr__(self, "ids", np.arange(n, dtype=np.int64))
        lengths = {len(self.rotations), len(self.log_scales), len(self.opacity_logits), len(self.sh_coeffs), len(self.ids)}
        if self.payloads is not None:
            lengths.add(len(self.payloads))
        if lengths != {n}:
            raise InvalidInputError(f"snapshot arrays have mismatched lengths: {sorted(lengths | {n})}")

    def __len__(self) -> int:
        return len(self.positions)

    @cached_property
    def covariances(self) -> np.ndarray:
        if not len(self):
            return np.zeros((0, 3, 3))
        return covariance_from_rotation_scale(self.rotations, self.log_scales)

    @cached_property
    def opacities(self) -> np.ndarray:
        return sigmoid(self.opacity_logits)

    @property
    def sh_degree(self) -> int:
        return int(round(np.sqrt(self.sh_coeffs.shape[1]))) - 1

    def with_payloads(self, payloads: np.ndarray | None) -> "GaussianSnapshot":
        return GaussianSnapshot(self.positions, self.rotations, self.log_scales, self.opacity_logits,
                                self.sh_coeffs, payloads, self.ids)

    @classmethod
    def from_gaussian_set(cls, gaussians: GaussianSet, payloads: np.ndarray | None = None) -> "GaussianSnapshot":
        return cls(
            positions=gaussians.positions,
            rotations=gaussians.rotations,
            log_scales=gaussians.log_scales,
            opacity_logits=gaussians.opacity_logits,
            sh_coeffs=gaussians.sh_coeffs,
            payloads=payloads,
            ids=gaussians.ids,
        )

    @staticmethod
    def concatenate(snapshots: list["GaussianSnapshot"]) -> "GaussianSnapshot":
        with_payload = [s.payloads is not None for s in snapshots]
        if any(with_payload) and not all(with_payload):
            raise InvalidInputError("cannot concatenate snapshots with and without payloads")
        return GaussianSnapshot(
            positions=np.concatenate([s.positions for s in snapshots]),
            rotations=np.concatenate([s.rotations for s in snapshots]),
            log_scales=np.concatenate([s.log_scales for s in snapshots]),
            opacity_logits=np.concatenate([s.opacity_logits for s in snapshots]),
            sh_coeffs=np.concatenate([s.sh_coeffs for s in snapshots]),
            payloads=np.concatenate([s.payloads for s in snapshots]) if all(with_payload) and snapshots else None,
            ids=np.concatenate([s.ids for s in snapshots]),
        )
