import numpy as np

from core.exceptions import InvalidInputError
from core.models import GaussianSet


def threshold_labels(scores: np.ndarray, tau: float) -> np.ndarray:
    """True (dynamic) where score > tau; the inequality is strict."""
    return np.asarray(scores, dtype=np.float64) > tau


def threshold_split(gaussians: GaussianSet, scores: np.ndarray, tau: float) -> tuple[GaussianSet, GaussianSet]:
    """Partition into (static, dynamic); the scores are stored on both halves."""
    scores = np.asarray(scores, dtype=np.float64)
    if scores.shape != (len(gaussians),):
        raise InvalidInputError(f"expected {len(gaussians)} scores, got shape {scores.shape}")
    labeled = gaussians.with_params(dynamic_scores=scores)
    dynamic = threshold_labels(scores, tau)
    return labeled.subset(~dynamic), labeled.subset(dynamic)
