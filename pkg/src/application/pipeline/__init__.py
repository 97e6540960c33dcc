from .generation import (
    GenerationPipeline,
    GenerationReport,
    GenerationResult,
    StageMetrics,
    generate_scene,
    optimize_hybrid,
    training_frames,
)
from .initialization import InitialGaussians, init_gaussians_from_bundle

__all__ = [
    "GenerationPipeline",
    "GenerationReport",
    "GenerationResult",
    "InitialGaussians",
    "StageMetrics",
    "generate_scene",
    "init_gaussians_from_bundle",
    "optimize_hybrid",
    "training_frames",
]
