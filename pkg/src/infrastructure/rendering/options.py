from dataclasses import dataclass, field, replace

import numpy as np

from infrastructure.config.settings import settings


@dataclass(frozen=True, eq=False)
class RenderOptions:
    """Per-call rasterizer options; unset cutoffs come from `settings.render`."""

    background: np.ndarray = field(default_factory=lambda: np.zeros(3))
    sh_degree: int | None = None
    payload: bool = False
    tile_size: int = field(default_factory=lambda: settings.render.tile_size)
    near_plane: float = field(default_factory=lambda: settings.render.near_plane)
    far_plane: float = field(default_factory=lambda: settings.render.far_plane)
    blur: float = field(default_factory=lambda: settings.render.blur)
    footprint_sigma: float = field(default_factory=lambda: settings.render.footprint_sigma)
    min_alpha: float = field(default_factory=lambda: settings.render.min_alpha)
    termination_transmittance: float = field(default_factory=lambda: settings.render.termination_transmittance)
    threads: int = field(default_factory=lambda: settings.runtime.threads)

    def __post_init__(self):
        object.__setattr__(self, "background", np.asarray(self.background, dtype=np.float64).reshape(3))

    def evolve(self, **changes) -> "RenderOptions":
        return replace(self, **changes)


@dataclass
class RenderOutput:
    color: np.ndarray
    alpha: np.ndarray
    depth: np.ndarray
    contrib_count: np.ndarray
    transmittance: np.ndarray
    scalar: np.ndarray | None = None
    skipped: int = 0


@dataclass
class RenderGrad:
    """Upstream dLoss/dRenderOutput; omitted channels carry zero gradient."""

    color: np.ndarray | None = None
    alpha: np.ndarray | None = None
    depth: np.ndarray | None = None
    scalar: np.ndarray | None = None


@dataclass
class GaussianGradients:
    positions: np.ndarray
    rotations: np.ndarray
    log_scales: np.ndarray
    opacity_logits: np.ndarray
    sh_coeffs: np.ndarray
    payloads: np.ndarray | None = None

    @classmethod
    def zeros(cls, n: int, sh_shape: tuple[int, ...], payload: bool) -> "GaussianGradients":
        return cls(
            positions=np.zeros((n, 3)),
            rotations=np.zeros((n, 4)),
            log_scales=np.zeros((n, 3)),
            opacity_logits=np.zeros(n),
            sh_coeffs=np.zeros((n,) + tuple(sh_shape)),
            payloads=np.zeros(n) if payload else None,
        )
