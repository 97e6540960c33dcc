import numpy as np
from tqdm import tqdm

from core.models import CameraPose, HybridScene, ReferenceBundle
from infrastructure.config import settings
from infrastructure.rendering import RenderOptions, render
from application.dynamics import compose_scene_at_t
from application.evaluation.metrics import view_metrics


def render_trajectory(scene: HybridScene, trajectory: list[CameraPose | tuple[CameraPose, float]],
                      options: RenderOptions | None = None) -> list[np.ndarray]:
    """Frame i is the scene composed at t_i seen from pose_i; bare poses use their own timestamp."""
    options = options or RenderOptions(background=np.asarray(scene.metadata.get("background", (0.0, 0.0, 0.0))))
    frames = []
    for step in tqdm(trajectory, desc="render", disable=not settings.runtime.progress):
        pose, t = step if isinstance(step, tuple) else (step, step.timestamp_index)
        frames.append(render(compose_scene_at_t(scene, t), pose, options).color)
    return frames


def evaluate_views(scene: HybridScene, bundle: ReferenceBundle, frames: list[int],
                   options: RenderOptions | None = None) -> list[dict]:
    """PSNR/SSIM of the listed reference frames rendered from the scene."""
    options = options or RenderOptions(background=bundle.background, sh_degree=scene.sh_degree)
    renders = render_trajectory(scene, [bundle[i].pose for i in frames], options)
    return [{"frame": i, **view_metrics(image, bundle[i].image)} for i, image in zip(frames, renders)]
