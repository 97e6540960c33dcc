"""Gradient-descent fitting of a HybridScene to reference frames."""

import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from tqdm import tqdm

from core.exceptions import InvalidInputError, TrainingDivergedError
from core.imaging import psnr
from core.models import GaussianSet, HybridScene, ReferenceBundle
from core.utils import log_stage, logger
from infrastructure.config import PipelineConfig, settings
from infrastructure.nn import AdamState, adam_step
from infrastructure.rendering import GaussianGradients, RenderGrad, RenderOptions, render, render_backward
from application.dynamics import apply_deformation_backward, compose_scene_at_t
from application.training.losses import PhotometricLoss, photometric_loss

CheckpointCallback = Callable[[HybridScene, int], None]


@dataclass
class StepGradients:
    loss: PhotometricLoss
    static: GaussianGradients
    dynamic: GaussianGradients
    deformation: dict[str, np.ndarray] | None


@dataclass
class TrainingReport:
    stage: str
    iterations: int
    losses: list[float] = field(default_factory=list)
    psnr: float = float("nan")
    gaussians: int = 0
    pruned: int = 0
    rejected_steps: int = 0
    wall: float = 0.0

    @property
    def final_loss(self) -> float:
        return self.losses[-1] if self.losses else float("nan")

    def moving_average(self, window: int = 100) -> np.ndarray:
        if not self.losses:
            return np.zeros(0)
        window = min(window, len(self.losses))
        return np.convolve(self.losses, np.ones(window) / window, mode="valid")

    def to_dict(self) -> dict:
        return {
            "stage": self.stage,
            "iterations": self.iterations,
            "loss": self.final_loss,
            "psnr": self.psnr,
            "gaussians": self.gaussians,
            "pruned": self.pruned,
            "rejected_steps": self.rejected_steps,
            "wall": self.wall,
        }


def gaussian_learning_rates(config: PipelineConfig, scene_scale: float) -> dict[str, float]:
    rates = config.learning_rates
    return {
        "positions": rates.position * scene_scale,
        "rotations": rates.rotation,
        "log_scales": rates.log_scale,
        "opacity_logits": rates.opacity,
        "sh_coeffs": rates.sh,
    }


def _split_gradients(grads: GaussianGradients, count: int) -> tuple[GaussianGradients, GaussianGradients]:
    def part(index: slice) -> GaussianGradients:
        return GaussianGradients(
            positions=grads.positions[index],
            rotations=grads.rotations[index],
            log_scales=grads.log_scales[index],
            opacity_logits=grads.opacity_logits[index],
            sh_coeffs=grads.sh_coeffs[index],
        )
    return part(slice(0, count)), part(slice(count, None))


class GaussianTrainer:
    """Optimizes a scene's Gaussians (and deformation network, if any) one frame per iteration.

    Frames are visited round-robin in the order given. Static and dynamic sets keep separate Adam
    buffers so pruning one never shifts the other's moments.
    """

    def __init__(self, scene: HybridScene, bundle: ReferenceBundle, config: PipelineConfig, *, stage: str,
                 frames: list[int] | None = None, prune: bool = False, options: RenderOptions | None = None,
                 on_checkpoint: CheckpointCallback | None = None):
        self.scene = scene
        self.bundle = bundle
        self.config = config
        self.stage = stage
        self.frames = list(range(len(bundle))) if frames is None else list(frames)
        if not self.frames:
            raise InvalidInputError(f"stage {stage} has no training frames")
        self.prune_enabled = prune and config.pruning.enabled
        self.options = options or RenderOptions(background=bundle.background, sh_degree=scene.sh_degree)
        self.on_checkpoint = on_checkpoint
        rates = gaussian_learning_rates(config, scene.scene_scale)
        self.static_state = AdamState(learning_rates=dict(rates))
        self.dynamic_state = AdamState(learning_rates=dict(rates))
        self.field_state = AdamState(
            learning_rates={name: config.learning_rates.deform for name in scene.deformation.params}
            if scene.deformation is not None else {}
        )
        self.checkpoint: HybridScene = scene.copy()
        self.report = TrainingReport(stage=stage, iterations=0)

    def frame_for(self, iteration: int) -> int:
        return self.frames[iteration % len(self.frames)]

    def compute_gradients(self, frame_index: int) -> StepGradients:
        frame = self.bundle[frame_index]
        t = frame.pose.timestamp_index
        snapshot = compose_scene_at_t(self.scene, t)
        output = render(snapshot, frame.pose, self.options)
        loss = photometric_loss(output.color, frame.image, self.config.loss)
        grads = render_backward(snapshot, frame.pose, self.options, RenderGrad(color=loss.grad))
        static, dynamic = _split_gradients(grads, len(self.scene.static_gaussians))
        field_grads = None
        if len(self.scene.dynamic_gaussians):
            pulled = apply_deformation_backward(self.scene.dynamic_gaussians, self.scene.deformation, t,
                                                dynamic.positions, dynamic.rotations, dynamic.log_scales)
            dynamic.positions = pulled.positions
            dynamic.rotations = pulled.rotations
            dynamic.log_scales = pulled.log_scales
            field_grads = pulled.params
        return StepGradients(loss, static, dynamic, field_grads)

    @staticmethod
    def _update_set(gaussians: GaussianSet, grads: GaussianGradients, state: AdamState) -> bool:
        if not len(gaussians):
            return False
        params = {name: getattr(gaussians, name) for name in GaussianSet.PARAMETER_FIELDS}
        result = adam_step(state, params, {name: getattr(grads, name) for name in GaussianSet.PARAMETER_FIELDS})
        if not result.rejected:
            for name, value in result.params.items():
                setattr(gaussians, name, value)
            gaussians.enforce_invariants()
        return result.rejected

    def step(self, iteration: int) -> PhotometricLoss:
        step = self.compute_gradients(self.frame_for(iteration))
        if not np.isfinite(step.loss.total):
            raise TrainingDivergedError(f"{self.stage}: loss became non-finite", iteration, self.checkpoint)
        rejected = self._update_set(self.scene.static_gaussians, step.static, self.static_state)
        rejected |= self._update_set(self.scene.dynamic_gaussians, step.dynamic, self.dynamic_state)
        if step.deformation is not None:
            result = adam_step(self.field_state, self.scene.deformation.params, step.deformation)
            self.scene.deformation.params = result.params
            rejected |= result.rejected
        self.report.rejected_steps += int(rejected)
        return step.loss

    def prune(self) -> int:
        """Remove Gaussians whose opacity fell below the pruning threshold; returns how many."""
        threshold = self.config.pruning.opacity_threshold
        removed = 0
        for attr, state in (("static_gaussians", self.static_state), ("dynamic_gaussians", self.dynamic_state)):
            gaussians: GaussianSet = getattr(self.scene, attr)
            keep = gaussians.opacities >= threshold
            if np.all(keep):
                continue
            removed += int(np.count_nonzero(~keep))
            setattr(self.scene, attr, gaussians.subset(keep))
            state.prune(keep, list(GaussianSet.PARAMETER_FIELDS))
        if removed:
            logger.info(f"Pruned {removed} Gaussians with opacity < {threshold}")
        return removed

    def _save_checkpoint(self, iteration: int) -> None:
        self.checkpoint = self.scene.copy()
        if self.on_checkpoint is not None:
            self.on_checkpoint(self.checkpoint, iteration)

    def evaluate_psnr(self) -> float:
        values = []
        for index in self.frames:
            frame = self.bundle[index]
            output = render(compose_scene_at_t(self.scene, frame.pose.timestamp_index), frame.pose, self.options)
            values.append(psnr(np.clip(output.color, 0.0, 1.0), frame.image))
        return float(np.mean(values))

    def fit(self, iterations: int) -> TrainingReport:
        started = time.perf_counter()
        interval = self.config.checkpoint_interval
        progress = tqdm(range(iterations), desc=self.stage, disable=not settings.runtime.progress)
        for iteration in progress:
            loss = self.step(iteration)
            self.report.losses.append(loss.total)
            done = iteration + 1
            if self.prune_enabled and done % self.config.pruning.interval == 0:
                self.report.pruned += self.prune()
            if done % interval == 0:
                self._save_checkpoint(done)
            progress.set_postfix(loss=f"{loss.total:.4f}")
        self.report.iterations = iterations
        self.report.gaussians = self.scene.num_gaussians
        self.report.psnr = self.evaluate_psnr()
        self.report.wall = time.perf_counter() - started
        log_stage(self.stage, loss=self.report.final_loss, psnr=self.report.psnr, gaussians=self.report.gaussians,
                  pruned=self.report.pruned, wall=self.report.wall)
        return self.report
