"""Collision cost of an ego box against Gaussians treated as occupied points, and lateral trajectory refinement.

The world is z-up. The ego box is centered horizontally on the camera, hangs `height` meters down from
it, and is oriented along the camera's horizontal heading.
"""

from dataclasses import dataclass, field

import numpy as np

from core.exceptions import InvalidInputError
from core.models import CameraPose, HybridScene
from core.utils import logger
from infrastructure.config.pipeline_config import PlanningParams
from infrastructure.oracle.trajectories import WORLD_UP, lateral_axis, shift_pose
from application.dynamics import compose_scene_at_t

SMOOTHNESS_TOLERANCE = 1e-9


@dataclass
class EgoFootprint:
    length: float
    width: float
    height: float

    @classmethod
    def from_params(cls, params: PlanningParams) -> "EgoFootprint":
        return cls(*params.ego_size)

    @property
    def half_extents(self) -> np.ndarray:
        return np.array([self.length, self.width, self.height]) / 2.0


@dataclass
class PlanResult:
    trajectory: list[CameraPose]
    offsets: np.ndarray
    initial_costs: np.ndarray
    costs: np.ndarray
    accepted: list[float] = field(default_factory=list)

    @property
    def initial_total(self) -> float:
        return float(self.initial_costs.sum())

    @property
    def total(self) -> float:
        return float(self.costs.sum())


def ground_height(scene: HybridScene, percentile: float) -> float:
    """Height below which Gaussians count as road surface, from the canonical positions."""
    heights = np.concatenate([scene.static_gaussians.positions[:, 2], scene.dynamic_gaussians.positions[:, 2]])
    if not heights.size:
        return -np.inf
    return float(np.percentile(heights, percentile))


def occupied_points(scene: HybridScene, t: float, params: PlanningParams,
                    ground: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    """(positions, opacities) of the Gaussians that can block the ego at time t."""
    if scene.num_gaussians == 0:
        return np.zeros((0, 3)), np.zeros(0)
    ground = ground_height(scene, params.ground_percentile) if ground is None else ground
    snapshot = compose_scene_at_t(scene, t)
    keep = (snapshot.opacities > params.opacity_threshold) & (snapshot.positions[:, 2] > ground)
    return snapshot.positions[keep], snapshot.opacities[keep]


def box_frame(pose: CameraPose, footprint: EgoFootprint) -> tuple[np.ndarray, np.ndarray]:
    """(center, rows = [forward, left, up]) of the ego box at this pose."""
    left = lateral_axis(pose)
    forward = np.cross(left, WORLD_UP)
    center = pose.camera_center - np.array([0.0, 0.0, footprint.height / 2.0])
    return center, np.stack([forward, left, WORLD_UP])


def distance_to_box(points: np.ndarray, center: np.ndarray, axes: np.ndarray, half_extents: np.ndarray) -> np.ndarray:
    """Euclidean distance from each point to the box; 0 inside."""
    local = (points - center) @ axes.T
    outside = np.maximum(np.abs(local) - half_extents, 0.0)
    return np.linalg.norm(outside, axis=1)


def step_cost(points: np.ndarray, opacities: np.ndarray, pose: CameraPose, footprint: EgoFootprint,
              sigma: float) -> float:
    if not len(points):
        return 0.0
    center, axes = box_frame(pose, footprint)
    d = distance_to_box(points, center, axes, footprint.half_extents)
    return float(np.sum(opacities * np.exp(-0.5 * (d / sigma) ** 2)))


def collision_cost(scene: HybridScene, trajectory: list[CameraPose], params: PlanningParams | None = None,
                   footprint: EgoFootprint | None = None) -> np.ndarray:
    """Soft occupancy cost per step: sum of alpha * exp(-d^2 / 2 sigma^2) over filtered Gaussians.

    Dynamic Gaussians are deformed to each pose's timestep before measuring.
    """
    params = params or PlanningParams()
    footprint = footprint or EgoFootprint.from_params(params)
    ground = ground_height(scene, params.ground_percentile)
    costs = np.zeros(len(trajectory))
    for i, pose in enumerate(trajectory):
        points, opacities = occupied_points(scene, pose.timestamp_index, params, ground)
        costs[i] = step_cost(points, opacities, pose, footprint, params.sigma)
    return costs


def max_second_difference(offsets: np.ndarray) -> float:
    if len(offsets) < 3:
        return 0.0
    return float(np.max(np.abs(offsets[2:] - 2.0 * offsets[1:-1] + offsets[:-2])))


def _smooth(offsets: np.ndarray, params: PlanningParams) -> bool:
    return max_second_difference(offsets) <= params.smoothness_bound + SMOOTHNESS_TOLERANCE


def offset_trajectory(trajectory: list[CameraPose], offsets: np.ndarray) -> list[CameraPose]:
    return [shift_pose(pose, offset * lateral_axis(pose)) if offset else pose
            for pose, offset in zip(trajectory, offsets)]


def optimize_trajectory(scene: HybridScene, trajectory: list[CameraPose], params: PlanningParams | None = None,
                        footprint: EgoFootprint | None = None) -> PlanResult:
    """Coordinate descent on per-step lateral offsets.

    Candidate moves shift one step, or the whole trajectory, by +/- delta sideways. A move is kept only
    if it lowers the total cost and the offsets' max second difference stays within the smoothness bound.
    After a sweep without improvement delta halves; the search ends below `min_step` or after
    `step_budget` sweeps.
    """
    params = params or PlanningParams()
    footprint = footprint or EgoFootprint.from_params(params)
    if not trajectory:
        raise InvalidInputError("cannot optimize an empty trajectory")
    ground = ground_height(scene, params.ground_percentile)
    occupancy = [occupied_points(scene, pose.timestamp_index, params, ground) for pose in trajectory]
    axes = [lateral_axis(pose) for pose in trajectory]

    def cost_at(i: int, offset: float) -> float:
        pose = shift_pose(trajectory[i], offset * axes[i]) if offset else trajectory[i]
        return step_cost(*occupancy[i], pose, footprint, params.sigma)

    n = len(trajectory)
    offsets = np.zeros(n)
    initial = np.array([cost_at(i, 0.0) for i in range(n)])
    costs = initial.copy()
    total = float(costs.sum())
    accepted: list[float] = []
    delta = params.initial_step
    sweeps = 0

    def accept(new_offsets: np.ndarray, new_costs: np.ndarray) -> bool:
        nonlocal offsets, costs, total
        new_total = float(new_costs.sum())
        if new_total >= total or not _smooth(new_offsets, params):
            return False
        offsets, costs, total = new_offsets, new_costs, new_total
        accepted.append(total)
        return True

    while total > 0.0 and delta >= params.min_step and sweeps < params.step_budget:
        sweeps += 1
        improved = False
        for sign in (1.0, -1.0):
            shifted = offsets + sign * delta
            if _smooth(shifted, params):
                improved |= accept(shifted, np.array([cost_at(i, shifted[i]) for i in range(n)]))
        for i in range(n):
            for sign in (1.0, -1.0):
                candidate = offsets.copy()
                candidate[i] += sign * delta
                if not _smooth(candidate, params):
                    continue
                new_costs = costs.copy()
                new_costs[i] = cost_at(i, candidate[i])
                improved |= accept(candidate, new_costs)
        if not improved:
            delta /= 2.0

    logger.info(f"Trajectory refinement: total cost {float(initial.sum()):.4f} -> {total:.4f} "
                f"in {len(accepted)} accepted moves, {sweeps} sweeps")
    return PlanResult(offset_trajectory(trajectory, offsets), offsets, initial, costs, accepted)


def collision_rate(costs: np.ndarray, threshold: float) -> float:
    """Fraction of steps whose cost exceeds the threshold."""
    costs = np.asarray(costs, dtype=np.float64)
    return float(np.mean(costs > threshold)) if costs.size else 0.0


def trajectory_l2(a: list[CameraPose], b: list[CameraPose]) -> float:
    """Mean distance between corresponding camera centers."""
    if len(a) != len(b):
        raise InvalidInputError(f"trajectories differ in length: {len(a)} vs {len(b)}")
    if not a:
        return 0.0
    return float(np.mean([np.linalg.norm(p.camera_center - q.camera_center) for p, q in zip(a, b)]))
