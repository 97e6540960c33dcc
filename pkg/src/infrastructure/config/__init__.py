from .settings import settings, Settings
from .pipeline_config import PipelineConfig, load_config, splatting_preset

__all__ = ["settings", "Settings", "PipelineConfig", "load_config", "splatting_preset"]
