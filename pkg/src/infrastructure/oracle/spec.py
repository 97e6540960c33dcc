"""Oracle scene descriptions: analytic primitives, their motion, the ego path and view jitter."""

import json
from pathlib import Path
from typing import Annotated, Literal, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from core.constants import DefaultValues
from core.exceptions import ConfigValidationError
from core.models import CameraPose

Vector3 = tuple[float, float, float]
Color = tuple[float, float, float]


class SpecModel(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class Albedo(SpecModel):
    color: Color = Field(default=(0.7, 0.7, 0.7), description="Primary RGB albedo in [0, 1]")
    checker_color: Color | None = Field(default=None, description="Second checker color; None = uniform")
    checker_size: float = Field(default=0.5, gt=0, description="Checker cell edge (m)")


class PlanePrimitive(SpecModel):
    """Finite rectangle spanned by two orthogonal in-plane axes."""

    kind: Literal["plane"] = "plane"
    center: Vector3
    axis_u: Vector3 = (1.0, 0.0, 0.0)
    axis_v: Vector3 = (0.0, 1.0, 0.0)
    half_size: tuple[float, float] = Field(description="Half extents along axis_u and axis_v (m)")
    albedo: Albedo = Field(default_factory=Albedo)

    @model_validator(mode="after")
    def _check(self) -> "PlanePrimitive":
        if min(self.half_size) <= 0:
            raise ValueError("plane half_size must be positive")
        u, v = np.asarray(self.axis_u), np.asarray(self.axis_v)
        if np.linalg.norm(u) == 0 or np.linalg.norm(v) == 0 or np.linalg.norm(np.cross(u, v)) < 1e-9:
            raise ValueError("plane axes must be non-zero and not parallel")
        return self


class BoxPrimitive(SpecModel):
    """Box resting with its faces aligned to the world axes after a rotation `yaw` about z."""

    kind: Literal["box"] = "box"
    center: Vector3
    size: Vector3 = Field(description="Full edge lengths (m)")
    yaw: float = 0.0
    albedo: Albedo = Field(default_factory=Albedo)

    @model_validator(mode="after")
    def _check(self) -> "BoxPrimitive":
        if min(self.size) <= 0:
            raise ValueError("box size must be positive")
        return self


class SpherePrimitive(SpecModel):
    kind: Literal["sphere"] = "sphere"
    center: Vector3
    radius: float = Field(gt=0)
    albedo: Albedo = Field(default_factory=Albedo)


class LinearMotion(SpecModel):
    kind: Literal["linear"] = "linear"
    velocity: Vector3 = Field(description="Displacement per frame (m/frame)")


class CircularMotion(SpecModel):
    """Horizontal circle around `pivot`; the primitive's own center sets the height."""

    kind: Literal["circular"] = "circular"
    pivot: Vector3
    radius: float = Field(gt=0)
    angular_speed: float = Field(description="rad/frame")
    phase: float = 0.0


StaticPrimitive = Annotated[Union[PlanePrimitive, BoxPrimitive], Field(discriminator="kind")]
MovingShape = Annotated[Union[SpherePrimitive, BoxPrimitive], Field(discriminator="kind")]
Motion = Annotated[Union[LinearMotion, CircularMotion], Field(discriminator="kind")]


class DynamicPrimitive(SpecModel):
    shape: MovingShape
    motion: Motion

    def center_at(self, t: float) -> np.ndarray:
        base = np.asarray(self.shape.center, dtype=np.float64)
        if isinstance(self.motion, LinearMotion):
            return base + np.asarray(self.motion.velocity) * t
        angle = self.motion.phase + self.motion.angular_speed * t
        pivot = np.asarray(self.motion.pivot, dtype=np.float64)
        return np.array([pivot[0] + self.motion.radius * np.cos(angle),
                         pivot[1] + self.motion.radius * np.sin(angle),
                         base[2]])


class ViewSpec(SpecModel):
    eye: Vector3
    target: Vector3
    up: Vector3 = (0.0, 0.0, 1.0)


class JitterSpec(SpecModel):
    """View inconsistency injected into images and pointmaps, never into poses or masks."""

    mode: Literal["none", "rigid", "warp"] = "none"
    sigma_rot: float = Field(default=0.0, ge=0, description="Per-frame rotation noise (rad)")
    sigma_trans: float = Field(default=0.0, ge=0, description="Per-frame translation noise (m)")
    sigma_px: float = Field(default=0.0, ge=0, description="Per-pixel warp magnitude (px)")

    @property
    def is_identity(self) -> bool:
        if self.mode == "rigid":
            return self.sigma_rot == 0 and self.sigma_trans == 0
        if self.mode == "warp":
            return self.sigma_px == 0
        return True


class OracleSceneSpec(SpecModel):
    width: int = Field(default=128, ge=8)
    height: int = Field(default=128, ge=8)
    focal: float = Field(default=110.0, gt=0, description="fx = fy in pixels")
    feature_dim: int = Field(default=DefaultValues.FEATURE_DIM, ge=6)
    background: Color = (0.0, 0.0, 0.0)
    light_dir: Vector3 = (0.3, -0.5, 0.8)
    static: list[StaticPrimitive] = Field(default_factory=list)
    dynamic: list[DynamicPrimitive] = Field(default_factory=list)
    trajectory: list[ViewSpec] = Field(description="One view per frame; T = len(trajectory)")
    jitter: JitterSpec = Field(default_factory=JitterSpec)

    @model_validator(mode="after")
    def _check(self) -> "OracleSceneSpec":
        if len(self.trajectory) < 2:
            raise ValueError("an oracle scene needs at least 2 frames")
        if not self.static and not self.dynamic:
            raise ValueError("an oracle scene needs at least one primitive")
        return self

    @property
    def num_frames(self) -> int:
        return len(self.trajectory)

    @property
    def num_primitives(self) -> int:
        return len(self.static) + len(self.dynamic)

    def pose(self, frame: int) -> CameraPose:
        view = self.trajectory[frame]
        return CameraPose.look_at(view.eye, view.target, width=self.width, height=self.height,
                                  fx=self.focal, up=view.up, timestamp_index=frame)

    def poses(self) -> list[CameraPose]:
        return [self.pose(i) for i in range(self.num_frames)]


def load_oracle_spec(path: str | Path) -> OracleSceneSpec:
    try:
        return OracleSceneSpec.model_validate(json.loads(Path(path).read_text()))
    except FileNotFoundError as e:
        raise ConfigValidationError(f"oracle spec not found: {path}") from e
    except json.JSONDecodeError as e:
        raise ConfigValidationError(f"oracle spec {path} is not valid JSON: {e}") from e
    except ValidationError as e:
        raise ConfigValidationError(f"oracle spec {path} is invalid: {e}") from e
