"""Cluster-level majority vote that makes whole objects static or dynamic together."""

import numpy as np
from sklearn.cluster import DBSCAN
from sklearn.neighbors import NearestNeighbors

from core.models import GaussianSet
from infrastructure.config.pipeline_config import DecompositionParams

NOISE = -1


def clustering_space(gaussians: GaussianSet, scene_scale: float, feature_weight: float) -> np.ndarray:
    return np.concatenate([gaussians.positions / scene_scale, feature_weight * gaussians.features], axis=1)


def clustering_eps(normalized_positions: np.ndarray, eps_factor: float) -> float:
    """eps_factor times the median nearest-neighbor distance; 0 when every position coincides."""
    distances, _ = NearestNeighbors(n_neighbors=2).fit(normalized_positions).kneighbors(normalized_positions)
    nearest = distances[:, 1]
    median = float(np.median(nearest))
    if median <= 0.0:
        positive = nearest[nearest > 0.0]
        median = float(positive.min()) if positive.size else 0.0
    return eps_factor * median


def cluster_ids(gaussians: GaussianSet, params: DecompositionParams, scene_scale: float) -> np.ndarray:
    """DBSCAN labels per Gaussian (-1 = noise), computed in id order so the result ignores array order."""
    n = len(gaussians)
    if n < 2:
        return np.full(n, NOISE, dtype=np.int64)
    order = np.argsort(gaussians.ids, kind="stable")
    ordered = gaussians.subset(order)
    positions = ordered.positions / scene_scale
    clusters = np.empty(n, dtype=np.int64)
    if np.all(positions == positions[0]):
        clusters[order] = 0
        return clusters
    eps = clustering_eps(positions, params.eps_factor)
    space = clustering_space(ordered, scene_scale, params.feature_weight)
    clusters[order] = DBSCAN(eps=eps, min_samples=params.min_points).fit_predict(space)
    return clusters


def majority_vote(labels: np.ndarray, clusters: np.ndarray, vote_threshold: float) -> np.ndarray:
    """Each cluster turns dynamic iff its dynamic fraction exceeds the threshold; noise keeps its label."""
    labels = np.asarray(labels, dtype=bool)
    clusters = np.asarray(clusters)
    voted = labels.copy()
    for cluster in np.unique(clusters[clusters != NOISE]):
        members = clusters == cluster
        voted[members] = labels[members].mean() > vote_threshold
    return voted


def group_labels(gaussians: GaussianSet, labels: np.ndarray, params: DecompositionParams,
                 scene_scale: float) -> tuple[np.ndarray, np.ndarray]:
    """(grouped labels, cluster ids), aligned with the input order."""
    clusters = cluster_ids(gaussians, params, scene_scale)
    return majority_vote(np.asarray(labels, dtype=bool), clusters, params.vote_threshold), clusters


def cluster_group(static: GaussianSet, dynamic: GaussianSet, params: DecompositionParams,
                  scene_scale: float) -> tuple[GaussianSet, GaussianSet]:
    """Regroup a static/dynamic split by cluster majority; both outputs come back sorted by id."""
    union = GaussianSet.concatenate([static, dynamic])
    union = union.subset(np.argsort(union.ids, kind="stable"))
    labels = np.isin(union.ids, dynamic.ids)
    grouped, _ = group_labels(union, labels, params, scene_scale)
    return union.subset(~grouped), union.subset(grouped)
