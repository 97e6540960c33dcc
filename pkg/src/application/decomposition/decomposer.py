"""Static/dynamic separation of a statically fitted Gaussian set."""

import time
from dataclasses import dataclass

import numpy as np

from core.models import GaussianSet, GaussianSnapshot, ReferenceBundle
from core.utils import log_stage
from infrastructure.config import PipelineConfig
from infrastructure.rendering import RenderOptions, render
from application.decomposition.error_maps import ErrorMapSet, compute_error_maps
from application.decomposition.grouping import group_labels
from application.decomposition.result import DecompositionResult
from application.decomposition.score_field import ScoreField, create_score_field, train_score_field
from application.decomposition.split import threshold_labels


@dataclass
class Decomposition:
    static: GaussianSet
    dynamic: GaussianSet
    result: DecompositionResult
    error_maps: ErrorMapSet
    score_field: ScoreField


def static_error_maps(gaussians: GaussianSet, bundle: ReferenceBundle, frames: list[int],
                      options: RenderOptions, floor: float) -> ErrorMapSet:
    snapshot = GaussianSnapshot.from_gaussian_set(gaussians)
    renders = [render(snapshot, bundle[i].pose, options).color for i in frames]
    return compute_error_maps(renders, [bundle[i].image for i in frames], floor=floor)


def decompose(fitted: GaussianSet, bundle: ReferenceBundle, config: PipelineConfig, *, frames: list[int],
              scene_scale: float, center: np.ndarray, options: RenderOptions | None = None) -> Decomposition:
    """Error maps -> score field -> threshold split -> cluster vote.

    The returned static and dynamic sets are sorted by Gaussian id and carry their scores.
    """
    started = time.perf_counter()
    params = config.decomposition
    options = options or RenderOptions(background=bundle.background, sh_degree=fitted.sh_degree)
    error_maps = static_error_maps(fitted, bundle, frames, options, params.error_floor)

    field = create_score_field(fitted.feature_dim, center, scene_scale, np.random.default_rng([config.seed, 1]),
                               params.score_hidden)
    scores = train_score_field(fitted, bundle, error_maps, config.iterations.score_field, frames=frames,
                               field=field, learning_rate=config.learning_rates.score,
                               options=options.evolve(background=np.zeros(3)))

    labeled = fitted.with_params(dynamic_scores=scores)
    before = threshold_labels(scores, params.tau)
    after, clusters = group_labels(labeled, before, params, scene_scale)
    result = DecompositionResult(ids=labeled.ids, scores=scores, threshold_labels=before, grouped_labels=after,
                                 cluster_ids=clusters, tau=params.tau)

    ordered = labeled.subset(np.argsort(labeled.ids, kind="stable"))
    dynamic = result.label_of(ordered.ids)
    log_stage("decomposition", dynamic_before=int(before.sum()), dynamic_after=int(after.sum()),
              clusters=int(np.unique(clusters[clusters >= 0]).size), gaussians=len(fitted),
              wall=time.perf_counter() - started)
    return Decomposition(ordered.subset(~dynamic), ordered.subset(dynamic), result, error_maps, field)
