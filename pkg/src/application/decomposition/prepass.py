import numpy as np

from core.models import GaussianSet, HybridScene, ReferenceBundle
from core.utils import logger
from infrastructure.config import PipelineConfig
from infrastructure.rendering import RenderOptions
from application.training import GaussianTrainer, TrainingReport
from application.training.trainer import CheckpointCallback


def bundle_time_range(bundle: ReferenceBundle) -> tuple[float, float]:
    times = [frame.pose.timestamp_index for frame in bundle]
    return float(min(times)), float(max(times))


def optimize_static_prepass(gaussians: GaussianSet, bundle: ReferenceBundle, config: PipelineConfig, *,
                            frames: list[int], scene_scale: float, center: np.ndarray,
                            options: RenderOptions | None = None,
                            on_checkpoint: CheckpointCallback | None = None) -> tuple[GaussianSet, TrainingReport]:
    """Fit every Gaussian as time-independent against all training frames; nothing is pruned."""
    if len(frames) < 2:
        logger.warning("Static pre-pass on a single frame degenerates to per-view overfitting")
    draft = HybridScene(
        static_gaussians=gaussians.copy(),
        dynamic_gaussians=GaussianSet.empty(gaussians.sh_degree, gaussians.feature_dim),
        deformation=None,
        time_range=bundle_time_range(bundle),
        scene_scale=scene_scale,
        scene_center=center,
    )
    trainer = GaussianTrainer(draft, bundle, config, stage="prepass", frames=frames, prune=False, options=options,
                              on_checkpoint=on_checkpoint)
    report = trainer.fit(config.iterations.prepass)
    return trainer.scene.static_gaussians, report
