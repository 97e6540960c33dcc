import os

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict
from dotenv import load_dotenv

from core.constants import DefaultValues

load_dotenv(override=False)


class BaseAppSettings(BaseSettings):

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
        populate_by_name=True,
    )


class RuntimeSettings(BaseAppSettings):
    threads: int = Field(
        alias="HYBRIDSPLAT_THREADS",
        default_factory=lambda: os.cpu_count() or 1,
        ge=1,
        description="Worker threads for tile-parallel rendering and per-frame work",
    )
    progress: bool = Field(alias="HYBRIDSPLAT_PROGRESS", default=True, description="Show tqdm progress bars")
    log_level: str = Field(alias="HYBRIDSPLAT_LOG_LEVEL", default="INFO", description="Root log level")


class RenderSettings(BaseAppSettings):
    tile_size: int = Field(alias="HYBRIDSPLAT_TILE_SIZE", default=DefaultValues.TILE_SIZE, ge=1, description="Square tile edge in pixels")
    near_plane: float = Field(default=DefaultValues.NEAR_PLANE, gt=0, description="Gaussians at depth <= near are culled (m)")
    far_plane: float = Field(default=DefaultValues.FAR_PLANE, gt=0, description="Gaussians at depth >= far are culled (m)")
    blur: float = Field(default=DefaultValues.LOW_PASS_BLUR, ge=0, description="Low-pass term added to the 2D covariance diagonal (px^2)")
    footprint_sigma: float = Field(default=DefaultValues.FOOTPRINT_SIGMA, gt=0, description="Footprint cutoff in standard deviations")
    min_alpha: float = Field(default=DefaultValues.MIN_ALPHA, ge=0, description="Per-pixel contributions below this alpha are skipped")
    termination_transmittance: float = Field(
        default=DefaultValues.TERMINATION_TRANSMITTANCE, ge=0, description="A pixel stops compositing once transmittance drops below this"
    )


class Settings(BaseAppSettings):
    runtime: RuntimeSettings = Field(default_factory=RuntimeSettings)
    render: RenderSettings = Field(default_factory=RenderSettings)


settings = Settings()
