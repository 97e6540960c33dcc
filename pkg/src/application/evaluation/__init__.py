from .metrics import (
    decomposition_iou,
    label_iou,
    mask_iou,
    psnr,
    ssim,
    static_region_variance,
    view_metrics,
)
from .planning import (
    EgoFootprint,
    PlanResult,
    collision_cost,
    collision_rate,
    occupied_points,
    optimize_trajectory,
    trajectory_l2,
)
from .rendering import evaluate_views, render_trajectory

__all__ = [
    "EgoFootprint",
    "PlanResult",
    "collision_cost",
    "collision_rate",
    "decomposition_iou",
    "evaluate_views",
    "label_iou",
    "mask_iou",
    "occupied_points",
    "optimize_trajectory",
    "psnr",
    "render_trajectory",
    "ssim",
    "static_region_variance",
    "trajectory_l2",
    "view_metrics",
]
