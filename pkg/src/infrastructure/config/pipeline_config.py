"""Pipeline configuration: one JSON document, every field optional."""

import json
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from core.constants import DefaultValues
from core.exceptions import ConfigValidationError


class ConfigModel(BaseModel):
    model_config = ConfigDict(extra="forbid", validate_assignment=True)


class StageIterations(ConfigModel):
    prepass: int = Field(default=3000, ge=0, description="Static pre-pass iterations over all Gaussians")
    score_field: int = Field(default=500, ge=0, description="Score-network training iterations")
    hybrid: int = Field(default=3000, ge=0, description="Joint hybrid optimization iterations")


class LearningRates(ConfigModel):
    position: float = Field(default=1.6e-4, ge=0, description="Position rate, multiplied by scene_scale")
    rotation: float = Field(default=1e-3, ge=0)
    log_scale: float = Field(default=5e-3, ge=0)
    opacity: float = Field(default=5e-2, ge=0)
    sh: float = Field(default=2.5e-3, ge=0)
    deform: float = Field(default=8e-4, ge=0, description="Deformation network rate")
    score: float = Field(default=1e-3, ge=0, description="Score network rate")


class DecompositionParams(ConfigModel):
    tau: float = Field(default=0.5, ge=0, le=1, description="Dynamic iff score > tau")
    vote_threshold: float = Field(default=0.5, ge=0, le=1, description="Cluster turns dynamic iff its dynamic fraction exceeds this")
    eps_factor: float = Field(default=3.0, gt=0, description="DBSCAN eps as a multiple of the median nearest-neighbor distance")
    min_points: int = Field(default=8, ge=1, description="DBSCAN core-point neighborhood size")
    error_floor: float = Field(default=0.2, ge=0, description="Smallest divisor when normalizing error maps")
    feature_weight: float = Field(default=0.25, ge=0, description="Weight of appearance features in the clustering space")
    score_hidden: tuple[int, ...] = Field(default=(64, 64), description="Score network hidden widths")


class DeformationParams(ConfigModel):
    position_freqs: int = Field(default=8, ge=0)
    time_freqs: int = Field(default=4, ge=0)
    hidden_width: int = Field(default=128, ge=1)
    hidden_layers: int = Field(default=4, ge=1)


class LossWeights(ConfigModel):
    l1: float = Field(default=1.0, ge=0, description="Weight of the L1 photometric term")
    ssim: float = Field(default=1.0, ge=0, description="Weight of the (1 - SSIM) term")


class PruningSettings(ConfigModel):
    enabled: bool = True
    opacity_threshold: float = Field(default=0.005, ge=0, le=1)
    interval: int = Field(default=500, ge=1)


class PlanningParams(ConfigModel):
    ego_size: tuple[float, float, float] = Field(default=(4.0, 2.0, 1.5), description="Ego box length, width, height (m)")
    sigma: float = Field(default=0.5, gt=0, description="Falloff of the soft occupancy cost (m)")
    opacity_threshold: float = Field(default=0.1, ge=0, le=1, description="Gaussians at or below this opacity are ignored")
    ground_percentile: float = Field(default=15.0, ge=0, le=100, description="Gaussians below this height percentile are ground")
    smoothness_bound: float = Field(default=0.2, ge=0, description="Max second difference of lateral offsets (m)")
    step_budget: int = Field(default=200, ge=0, description="Coordinate-descent sweeps")
    initial_step: float = Field(default=0.5, gt=0, description="Initial lateral perturbation (m)")
    min_step: float = Field(default=1e-3, gt=0)
    collision_threshold: float = Field(default=0.5, ge=0, description="Step cost above which a step counts as a collision")


class PipelineConfig(ConfigModel):
    seed: int = Field(default=0, description="Fixes every stochastic choice")
    representation: Literal["hybrid", "all_deformable", "all_static"] = "hybrid"
    sh_degree: int = Field(default=DefaultValues.SH_DEGREE, ge=0, le=3)
    subsample_stride: int = Field(default=1, ge=1, description="Pixel stride when lifting pointmaps to Gaussians")
    holdout_frames: list[int] = Field(default_factory=list, description="Frames excluded from every training stage")
    iterations: StageIterations = Field(default_factory=StageIterations)
    learning_rates: LearningRates = Field(default_factory=LearningRates)
    decomposition: DecompositionParams = Field(default_factory=DecompositionParams)
    deformation: DeformationParams = Field(default_factory=DeformationParams)
    loss: LossWeights = Field(default_factory=LossWeights)
    pruning: PruningSettings = Field(default_factory=PruningSettings)
    planning: PlanningParams = Field(default_factory=PlanningParams)
    checkpoint_interval: int = Field(default=500, ge=1, description="Iterations between in-memory checkpoints")
    checkpoint_dir: Path | None = Field(default=None, description="Also write checkpoints here when set")

    @field_validator("holdout_frames")
    @classmethod
    def _non_negative_frames(cls, value: list[int]) -> list[int]:
        if any(i < 0 for i in value):
            raise ValueError(f"holdout frame indices must be >= 0, got {value}")
        return sorted(set(value))


def splatting_preset() -> LossWeights:
    """The 0.8 L1 / 0.2 SSIM weighting common in splatting practice."""
    return LossWeights(l1=0.8, ssim=0.2)


def load_config(path: str | Path | None) -> PipelineConfig:
    if path is None:
        return PipelineConfig()
    try:
        data = json.loads(Path(path).read_text())
        return PipelineConfig.model_validate(data)
    except FileNotFoundError as e:
        raise ConfigValidationError(f"config file not found: {path}") from e
    except json.JSONDecodeError as e:
        raise ConfigValidationError(f"config {path} is not valid JSON: {e}") from e
    except ValidationError as e:
        raise ConfigValidationError(f"config {path} is invalid: {e}") from e
