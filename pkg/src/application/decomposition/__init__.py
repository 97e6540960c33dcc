from .decomposer import Decomposition, decompose, static_error_maps
from .error_maps import ErrorMapSet, compute_error_maps, normalize_error_map
from .grouping import cluster_group, cluster_ids, group_labels, majority_vote
from .prepass import bundle_time_range, optimize_static_prepass
from .report import heat_overlay, splatted_maps, write_decomposition_report
from .result import DecompositionResult, read_sidecar, write_sidecar
from .score_field import (
    ScoreField,
    binary_cross_entropy,
    create_score_field,
    predict_scores,
    score_loss_and_grad,
    train_score_field,
)
from .split import threshold_labels, threshold_split

__all__ = [
    "Decomposition",
    "DecompositionResult",
    "ErrorMapSet",
    "ScoreField",
    "binary_cross_entropy",
    "bundle_time_range",
    "cluster_group",
    "cluster_ids",
    "compute_error_maps",
    "create_score_field",
    "decompose",
    "group_labels",
    "heat_overlay",
    "majority_vote",
    "normalize_error_map",
    "optimize_static_prepass",
    "predict_scores",
    "read_sidecar",
    "score_loss_and_grad",
    "splatted_maps",
    "static_error_maps",
    "threshold_labels",
    "threshold_split",
    "train_score_field",
    "write_decomposition_report",
    "write_sidecar",
]
