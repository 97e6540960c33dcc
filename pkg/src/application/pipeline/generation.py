"""End-to-end scene generation: initialization, static pre-pass, decomposition, hybrid optimization."""

import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from pydantic import BaseModel, Field

from core.exceptions import InvalidInputError
from core.models import GaussianSet, HybridScene, ReferenceBundle
from core.utils import handle_stage_errors, log_stage, logger
from infrastructure.config import PipelineConfig
from infrastructure.rendering import RenderOptions
from infrastructure.storage import save_scene
from application.decomposition import (
    Decomposition,
    DecompositionResult,
    bundle_time_range,
    decompose,
    optimize_static_prepass,
)
from application.dynamics import create_deformation_field
from application.pipeline.initialization import InitialGaussians, init_gaussians_from_bundle
from application.training import GaussianTrainer, TrainingReport
from application.training.trainer import CheckpointCallback


class StageMetrics(BaseModel):
    stage: str
    iterations: int = 0
    loss: float | None = None
    psnr: float | None = None
    gaussians: int = 0
    wall: float = 0.0
    details: dict = Field(default_factory=dict)

    @classmethod
    def from_training(cls, report: TrainingReport) -> "StageMetrics":
        return cls(stage=report.stage, iterations=report.iterations, loss=report.final_loss, psnr=report.psnr,
                   gaussians=report.gaussians, wall=report.wall,
                   details={"pruned": report.pruned, "rejected_steps": report.rejected_steps})


class GenerationReport(BaseModel):
    representation: str
    seed: int
    training_frames: list[int]
    holdout_frames: list[int]
    scene_scale: float = 0.0
    num_static: int = 0
    num_dynamic: int = 0
    stages: list[StageMetrics] = Field(default_factory=list)


@dataclass
class GenerationResult:
    scene: HybridScene
    decomposition: DecompositionResult
    report: GenerationReport


def training_frames(bundle: ReferenceBundle, holdout: list[int]) -> list[int]:
    unknown = [i for i in holdout if i >= len(bundle)]
    if unknown:
        raise InvalidInputError(f"holdout frames {unknown} do not exist in a {len(bundle)}-frame bundle")
    frames = [i for i in range(len(bundle)) if i not in set(holdout)]
    if not frames:
        raise InvalidInputError("every frame is held out; nothing left to train on")
    return frames


def optimize_hybrid(scene: HybridScene, bundle: ReferenceBundle, config: PipelineConfig, *,
                    frames: list[int] | None = None, options: RenderOptions | None = None,
                    on_checkpoint: CheckpointCallback | None = None) -> tuple[HybridScene, TrainingReport]:
    """Jointly fit static Gaussians, canonical dynamic Gaussians and the deformation network.

    Works on a copy of `scene`. Gaussians whose opacity falls below the pruning threshold are removed
    every `config.pruning.interval` iterations.
    """
    trainer = GaussianTrainer(scene.copy(), bundle, config, stage="hybrid", frames=frames, prune=True,
                              options=options, on_checkpoint=on_checkpoint)
    report = trainer.fit(config.iterations.hybrid)
    return trainer.scene, report


def _uniform_result(gaussians: GaussianSet, dynamic: bool, tau: float) -> DecompositionResult:
    n = len(gaussians)
    labels = np.full(n, dynamic)
    return DecompositionResult(ids=gaussians.ids, scores=labels.astype(np.float64), threshold_labels=labels,
                               grouped_labels=labels, cluster_ids=np.full(n, -1), tau=tau)


class GenerationPipeline:
    """Runs every generation stage for one bundle under one config.

    The representation selects what follows the pre-pass: `hybrid` decomposes the fitted set,
    `all_static` keeps every Gaussian static, `all_deformable` makes every Gaussian time-dependent.
    """

    def __init__(self, config: PipelineConfig, options: RenderOptions | None = None):
        self.config = config
        self.options = options

    def _checkpoint_writer(self, stage: str) -> CheckpointCallback | None:
        directory = self.config.checkpoint_dir
        if directory is None:
            return None

        def write(scene: HybridScene, iteration: int) -> None:
            save_scene(scene, Path(directory) / f"{stage}_{iteration:06d}.hspl")
        return write

    def _render_options(self, bundle: ReferenceBundle) -> RenderOptions:
        if self.options is not None:
            return self.options.evolve(background=bundle.background)
        return RenderOptions(background=bundle.background, sh_degree=self.config.sh_degree)

    @handle_stage_errors("init")
    def initialize(self, bundle: ReferenceBundle, frames: list[int]) -> InitialGaussians:
        started = time.perf_counter()
        init = init_gaussians_from_bundle(bundle, self.config.subsample_stride, frames=frames,
                                          sh_degree=self.config.sh_degree)
        log_stage("init", gaussians=len(init.gaussians), scene_scale=init.scene_scale,
                  wall=time.perf_counter() - started)
        return init

    @handle_stage_errors("prepass")
    def prepass(self, init: InitialGaussians, bundle: ReferenceBundle,
                frames: list[int]) -> tuple[GaussianSet, TrainingReport]:
        return optimize_static_prepass(init.gaussians, bundle, self.config, frames=frames,
                                       scene_scale=init.scene_scale, center=init.center,
                                       options=self._render_options(bundle),
                                       on_checkpoint=self._checkpoint_writer("prepass"))

    @handle_stage_errors("decomposition")
    def decompose(self, fitted: GaussianSet, init: InitialGaussians, bundle: ReferenceBundle,
                  frames: list[int]) -> Decomposition:
        return decompose(fitted, bundle, self.config, frames=frames, scene_scale=init.scene_scale,
                         center=init.center, options=self._render_options(bundle))

    def split(self, fitted: GaussianSet, init: InitialGaussians, bundle: ReferenceBundle,
              frames: list[int]) -> tuple[GaussianSet, GaussianSet, DecompositionResult]:
        tau = self.config.decomposition.tau
        empty = GaussianSet.empty(fitted.sh_degree, fitted.feature_dim)
        if self.config.representation == "all_static":
            return fitted, empty, _uniform_result(fitted, False, tau)
        if self.config.representation == "all_deformable":
            return empty, fitted.with_params(dynamic_scores=np.ones(len(fitted))), _uniform_result(fitted, True, tau)
        decomposition = self.decompose(fitted, init, bundle, frames)
        return decomposition.static, decomposition.dynamic, decomposition.result

    @handle_stage_errors("hybrid")
    def optimize(self, scene: HybridScene, bundle: ReferenceBundle,
                 frames: list[int]) -> tuple[HybridScene, TrainingReport]:
        return optimize_hybrid(scene, bundle, self.config, frames=frames, options=self._render_options(bundle),
                               on_checkpoint=self._checkpoint_writer("hybrid"))

    def run(self, bundle: ReferenceBundle) -> GenerationResult:
        config = self.config
        frames = training_frames(bundle, config.holdout_frames)
        report = GenerationReport(representation=config.representation, seed=config.seed,
                                  training_frames=frames, holdout_frames=list(config.holdout_frames))

        init = self.initialize(bundle, frames)
        report.scene_scale = init.scene_scale
        report.stages.append(StageMetrics(stage="init", gaussians=len(init.gaussians)))

        fitted, prepass_report = self.prepass(init, bundle, frames)
        report.stages.append(StageMetrics.from_training(prepass_report))

        static, dynamic, decomposition = self.split(fitted, init, bundle, frames)
        report.stages.append(StageMetrics(stage="decomposition", gaussians=len(decomposition),
                                          details={"dynamic": len(dynamic), "static": len(static),
                                                   "flipped_by_grouping": int(decomposition.flipped.sum())}))

        time_range = bundle_time_range(bundle)
        deformation = None
        if len(dynamic):
            params = config.deformation
            deformation = create_deformation_field(
                init.center, init.scene_scale, int(round(time_range[1])) + 1, np.random.default_rng([config.seed, 2]),
                position_freqs=params.position_freqs, time_freqs=params.time_freqs,
                hidden_width=params.hidden_width, hidden_layers=params.hidden_layers,
            )
        draft = HybridScene(
            static_gaussians=static,
            dynamic_gaussians=dynamic,
            deformation=deformation,
            time_range=time_range,
            scene_scale=init.scene_scale,
            scene_center=init.center,
            metadata={"representation": config.representation, "seed": config.seed,
                      "background": bundle.background.tolist(),
                      "training_frames": frames, "holdout_frames": list(config.holdout_frames)},
        )
        scene, hybrid_report = self.optimize(draft, bundle, frames)
        report.stages.append(StageMetrics.from_training(hybrid_report))
        scene.metadata["training_psnr"] = hybrid_report.psnr
        scene.validate()

        report.num_static = len(scene.static_gaussians)
        report.num_dynamic = len(scene.dynamic_gaussians)
        logger.info(f"Generated {config.representation} scene: {report.num_static} static, "
                    f"{report.num_dynamic} dynamic Gaussians, training PSNR {hybrid_report.psnr:.2f} dB")
        return GenerationResult(scene, decomposition, report)


def generate_scene(bundle: ReferenceBundle, config: PipelineConfig | None = None,
                   output_path: str | Path | None = None, options: RenderOptions | None = None) -> GenerationResult:
    """Full generation run; the scene is also saved when `output_path` is given."""
    result = GenerationPipeline(config or PipelineConfig(), options).run(bundle)
    if output_path is not None:
        save_scene(result.scene, output_path)
    return result
