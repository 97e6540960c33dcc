"""Gaussian splat parameters: a single Gaussian3D and the struct-of-arrays GaussianSet."""

from dataclasses import dataclass, field, fields, replace

import numpy as np
from scipy.special import expit
from scipy.special import logit as special_logit

from core.constants import LOG_SCALE_MAX, LOG_SCALE_MIN
from core.exceptions import InvalidInputError
from core.geometry import normalize_quaternions
from core.sh import num_sh_coeffs


def sigmoid(x: np.ndarray) -> np.ndarray:
    return expit(np.asarray(x, dtype=np.float64))


def logit(p: np.ndarray) -> np.ndarray:
    return special_logit(np.asarray(p, dtype=np.float64))


@dataclass(frozen=True, eq=False)
class Gaussian3D:
    position: np.ndarray
    rotation: np.ndarray
    log_scale: np.ndarray
    opacity_logit: float
    sh_coeffs: np.ndarray
    feature: np.ndarray
    dynamic_score: float = 0.0

    @property
    def opacity(self) -> float:
        return float(sigmoid(self.opacity_logit))

    @property
    def scale(self) -> np.ndarray:
        return np.exp(self.log_scale)


@dataclass
class GaussianSet:
    """N Gaussians stored as parallel float64 arrays; `ids` are stable across stages."""

    positions: np.ndarray
    rotations: np.ndarray
    log_scales: np.ndarray
    opacity_logits: np.ndarray
    sh_coeffs: np.ndarray
    features: np.ndarray
    dynamic_scores: np.ndarray
    ids: np.ndarray = field(default=None)

    PARAMETER_FIELDS = ("positions", "rotations", "log_scales", "opacity_logits", "sh_coeffs")

    def __post_init__(self):
        n = len(self.positions)
        if self.ids is None:
            self.ids = np.arange(n, dtype=np.int64)
        self.positions = np.asarray(self.positions, dtype=np.float64).reshape(n, 3)
        self.rotations = np.asarray(self.rotations, dtype=np.float64).reshape(n, 4)
        self.log_scales = np.asarray(self.log_scales, dtype=np.float64).reshape(n, 3)
        self.opacity_logits = np.asarray(self.opacity_logits, dtype=np.float64).reshape(n)
        self.sh_coeffs = np.asarray(self.sh_coeffs, dtype=np.float64)
        self.features = np.asarray(self.features, dtype=np.float64)
        if self.sh_coeffs.ndim != 3 or self.sh_coeffs.shape[0] != n or self.sh_coeffs.shape[2] != 3:
            raise InvalidInputError(f"sh_coeffs must have shape (N, K, 3), got {self.sh_coeffs.shape}")
        if self.features.ndim != 2 or self.features.shape[0] != n:
            raise InvalidInputError(f"features must have shape (N, F), got {self.features.shape}")
        self.dynamic_scores = np.asarray(self.dynamic_scores, dtype=np.float64).reshape(n)
        self.ids = np.asarray(self.ids, dtype=np.int64).reshape(n)
        sh_k = self.sh_coeffs.shape[1]
        if sh_k not in {num_sh_coeffs(d) for d in range(4)}:
            raise InvalidInputError(f"SH coefficient count {sh_k} is not (degree+1)^2")

    def __len__(self) -> int:
        return len(self.positions)

    def __getitem__(self, index: int) -> Gaussian3D:
        return Gaussian3D(
            position=self.positions[index].copy(),
            rotation=self.rotations[index].copy(),
            log_scale=self.log_scales[index].copy(),
            opacity_logit=float(self.opacity_logits[index]),
            sh_coeffs=self.sh_coeffs[index].copy(),
            feature=self.features[index].copy(),
            dynamic_score=float(self.dynamic_scores[index]),
        )

    @property
    def sh_degree(self) -> int:
        return int(round(np.sqrt(self.sh_coeffs.shape[1]))) - 1

    @property
    def feature_dim(self) -> int:
        return self.features.shape[1]

    @property
    def opacities(self) -> np.ndarray:
        return sigmoid(self.opacity_logits)

    @classmethod
    def empty(cls, sh_degree: int, feature_dim: int) -> "GaussianSet":
        k = num_sh_coeffs(sh_degree)
        return cls(
            positions=np.zeros((0, 3)), rotations=np.zeros((0, 4)), log_scales=np.zeros((0, 3)),
            opacity_logits=np.zeros(0), sh_coeffs=np.zeros((0, k, 3)),
            features=np.zeros((0, feature_dim)), dynamic_scores=np.zeros(0),
            ids=np.zeros(0, dtype=np.int64),
        )

    @classmethod
    def from_gaussians(cls, gaussians: list[Gaussian3D], ids=None) -> "GaussianSet":
        if not gaussians:
            raise InvalidInputError("cannot build a GaussianSet from an empty list; use GaussianSet.empty")
        return cls(
            positions=np.stack([g.position for g in gaussians]),
            rotations=np.stack([g.rotation for g in gaussians]),
            log_scales=np.stack([g.log_scale for g in gaussians]),
            opacity_logits=np.array([g.opacity_logit for g in gaussians]),
            sh_coeffs=np.stack([g.sh_coeffs for g in gaussians]),
            features=np.stack([g.feature for g in gaussians]),
            dynamic_scores=np.array([g.dynamic_score for g in gaussians]),
            ids=ids,
        )

    def subset(self, mask_or_index: np.ndarray) -> "GaussianSet":
        idx = np.asarray(mask_or_index)
        return GaussianSet(**{f.name: getattr(self, f.name)[idx].copy() for f in fields(self)})

    def copy(self) -> "GaussianSet":
        return GaussianSet(**{f.name: getattr(self, f.name).copy() for f in fields(self)})

    def with_params(self, **arrays: np.ndarray) -> "GaussianSet":
        return replace(self.copy(), **arrays)

    @staticmethod
    def concatenate(sets: list["GaussianSet"]) -> "GaussianSet":
        return GaussianSet(**{
            f.name: np.concatenate([getattr(s, f.name) for s in sets], axis=0)
            for f in fields(GaussianSet)
        })

    def enforce_invariants(self) -> None:
        """Renormalize quaternions and clamp scales into [1e-6, 1e3] in place."""
        if len(self):
            self.rotations = normalize_quaternions(self.rotations)
        np.clip(self.log_scales, LOG_SCALE_MIN, LOG_SCALE_MAX, out=self.log_scales)
