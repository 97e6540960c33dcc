"""The persistent product of a generation run: static Gaussians, dynamic Gaussians and their deformation field."""

from dataclasses import dataclass, field

import numpy as np

from core.exceptions import InvalidInputError
from core.models.deformation import DeformationField
from core.models.gaussians import GaussianSet


@dataclass
class HybridScene:
    static_gaussians: GaussianSet
    dynamic_gaussians: GaussianSet
    deformation: DeformationField | None
    time_range: tuple[float, float]
    scene_scale: float
    scene_center: np.ndarray = field(default_factory=lambda: np.zeros(3))
    metadata: dict = field(default_factory=dict)

    @property
    def num_gaussians(self) -> int:
        return len(self.static_gaussians) + len(self.dynamic_gaussians)

    @property
    def num_frames(self) -> int:
        return int(round(self.time_range[1] - self.time_range[0])) + 1

    @property
    def sh_degree(self) -> int:
        return self.static_gaussians.sh_degree

    @property
    def dynamic_fraction(self) -> float:
        return len(self.dynamic_gaussians) / self.num_gaussians if self.num_gaussians else 0.0

    def all_gaussians(self) -> GaussianSet:
        """Static block followed by the canonical dynamic block."""
        return GaussianSet.concatenate([self.static_gaussians, self.dynamic_gaussians])

    def validate(self) -> "HybridScene":
        """Raise InvalidInputError if the scene breaks its structural invariants."""
        if self.deformation is None and len(self.dynamic_gaussians):
            raise InvalidInputError("dynamic Gaussians present without a deformation field")
        overlap = np.intersect1d(self.static_gaussians.ids, self.dynamic_gaussians.ids)
        if overlap.size:
            raise InvalidInputError(f"{overlap.size} Gaussian ids are both static and dynamic")
        ids = np.concatenate([self.static_gaussians.ids, self.dynamic_gaussians.ids])
        if np.unique(ids).size != ids.size:
            raise InvalidInputError("duplicate Gaussian ids")
        if self.static_gaussians.sh_coeffs.shape[1:] != self.dynamic_gaussians.sh_coeffs.shape[1:]:
            raise InvalidInputError("static and dynamic sets use different SH degrees")
        if self.static_gaussians.feature_dim != self.dynamic_gaussians.feature_dim:
            raise InvalidInputError("static and dynamic sets use different feature dimensions")
        if not (self.scene_scale > 0 and np.isfinite(self.scene_scale)):
            raise InvalidInputError(f"scene_scale must be positive, got {self.scene_scale}")
        if self.time_range[1] < self.time_range[0]:
            raise InvalidInputError(f"invalid time range {self.time_range}")
        return self

    def copy(self) -> "HybridScene":
        return HybridScene(
            static_gaussians=self.static_gaussians.copy(),
            dynamic_gaussians=self.dynamic_gaussians.copy(),
            deformation=self.deformation.copy() if self.deformation is not None else None,
            time_range=tuple(self.time_range),
            scene_scale=self.scene_scale,
            scene_center=np.array(self.scene_center, dtype=np.float64),
            metadata=dict(self.metadata),
        )
