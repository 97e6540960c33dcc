"""Tests for view metrics, decomposition IoU, trajectory rendering and collision-aware planning."""

from dataclasses import replace

import numpy as np
import pytest

from core.exceptions import InvalidInputError, MissingMaskError
from core.models import GaussianSet, ReferenceBundle
from infrastructure.config.pipeline_config import PlanningParams
from infrastructure.oracle import lateral_offset_trajectory, straight_trajectory
from application.evaluation import (
    EgoFootprint,
    collision_cost,
    collision_rate,
    decomposition_iou,
    evaluate_views,
    label_iou,
    mask_iou,
    occupied_points,
    optimize_trajectory,
    render_trajectory,
    static_region_variance,
    trajectory_l2,
    view_metrics,
)
from application.evaluation.planning import max_second_difference
from application.pipeline import init_gaussians_from_bundle
from tests.fixtures import make_scene


def _points(positions, opacity_logit: float = 2.0) -> GaussianSet:
    positions = np.asarray(positions, dtype=np.float64).reshape(-1, 3)
    n = len(positions)
    return GaussianSet(
        positions=positions,
        rotations=np.tile([1.0, 0.0, 0.0, 0.0], (n, 1)),
        log_scales=np.full((n, 3), np.log(0.1)),
        opacity_logits=np.full(n, opacity_logit),
        sh_coeffs=np.zeros((n, 1, 3)),
        features=np.zeros((n, 4)),
        dynamic_scores=np.zeros(n),
    )


def _street(obstacle: tuple[float, float, float]):
    """Ground points far off to the side plus a small obstacle cluster 1 m above the road."""
    rng = np.random.default_rng(0)
    ground = np.column_stack([rng.uniform(30.0, 40.0, 40), rng.uniform(0.0, 10.0, 40), np.zeros(40)])
    cluster = np.asarray(obstacle) + rng.uniform(-0.05, 0.05, size=(5, 3))
    return make_scene(_points(np.concatenate([ground, cluster])), num_frames=10)


@pytest.fixture
def drive():
    return straight_trajectory([0.0, 0.0, 1.5], [0.0, 1.0, 0.0], 1.0, 10, width=16, height=16, focal=14.0)


class TestMaskIou:
    def test_empty_masks_match(self):
        empty = np.zeros((4, 4), dtype=bool)
        assert mask_iou(empty, empty) == 1.0

    def test_partial_overlap(self):
        a = np.zeros((4, 4), dtype=bool)
        b = np.zeros((4, 4), dtype=bool)
        a[:2] = True
        b[1:3] = True
        assert mask_iou(a, b) == pytest.approx(4 / 12)

    def test_disjoint(self):
        a = np.eye(3, dtype=bool)
        assert mask_iou(a, ~a) == 0.0


class TestDecompositionIou:
    """Splatted labels against ground-truth masks."""

    @pytest.fixture
    def static_scene(self, static_bundle):
        init = init_gaussians_from_bundle(static_bundle, 2, frames=[0], sh_degree=0)
        return make_scene(init.gaussians, num_frames=len(static_bundle))

    def test_static_scene_on_static_bundle(self, static_scene, static_bundle):
        assert decomposition_iou(static_scene, static_bundle) == 1.0

    def test_all_static_labels_miss_a_moving_object(self, static_scene, sphere_bundle):
        zeros = np.zeros(static_scene.num_gaussians)
        assert decomposition_iou(static_scene, sphere_bundle, zeros, frames=[0, 2]) == 0.0

    def test_label_count_checked(self, static_scene, static_bundle):
        with pytest.raises(InvalidInputError):
            decomposition_iou(static_scene, static_bundle, np.zeros(3))

    def test_missing_masks(self, static_scene, static_bundle):
        unmasked = ReferenceBundle([replace(frame, dyn_mask=None) for frame in static_bundle], static_bundle.meta)
        with pytest.raises(MissingMaskError):
            decomposition_iou(static_scene, unmasked)

    def test_label_iou_on_a_bare_set(self, static_scene, static_bundle):
        gaussians = static_scene.static_gaussians
        assert label_iou(gaussians, np.zeros(len(gaussians)), static_bundle, frames=[1]) == 1.0


class TestViewMetrics:
    def test_identical_views(self, rng):
        image = rng.uniform(size=(16, 16, 3))
        metrics = view_metrics(image, image)
        assert metrics["psnr"] == float("inf")
        assert metrics["ssim"] == pytest.approx(1.0)

    def test_static_region_variance(self, rng):
        frame = rng.uniform(size=(6, 6, 3))
        mask = np.zeros((6, 6), dtype=bool)
        mask[:3] = True
        assert static_region_variance([frame, frame, frame], mask) == 0.0
        other = frame.copy()
        other[0, 0] += 0.2
        assert static_region_variance([frame, other], mask) > 0.0
        assert static_region_variance([frame, other], np.zeros((6, 6), dtype=bool)) == 0.0

    def test_static_region_variance_shape(self, rng):
        with pytest.raises(InvalidInputError):
            static_region_variance([rng.uniform(size=(6, 6, 3))], np.ones((5, 6), dtype=bool))


class TestRenderTrajectory:
    @pytest.fixture
    def scene(self, static_bundle):
        init = init_gaussians_from_bundle(static_bundle, 2, sh_degree=0)
        return make_scene(init.gaussians, num_frames=len(static_bundle))

    def test_static_scene_ignores_time(self, scene, static_bundle):
        pose = static_bundle[1].pose
        early, late = render_trajectory(scene, [(pose, 0.0), (pose, 3.0)])
        np.testing.assert_array_equal(early, late)

    def test_reversed_trajectory_reverses_frames(self, scene, static_bundle):
        poses = [frame.pose for frame in static_bundle]
        forward = render_trajectory(scene, poses)
        backward = render_trajectory(scene, poses[::-1])
        for a, b in zip(forward, backward[::-1]):
            np.testing.assert_array_equal(a, b)

    def test_evaluate_views(self, scene, static_bundle):
        views = evaluate_views(scene, static_bundle, [0, 2])
        assert [view["frame"] for view in views] == [0, 2]
        assert all(np.isfinite(view["psnr"]) and -1.0 <= view["ssim"] <= 1.0 for view in views)


class TestCollisionCost:
    """Soft occupancy of the ego box."""

    def test_empty_scene_costs_nothing(self, drive):
        scene = make_scene(GaussianSet.empty(0, 4))
        np.testing.assert_array_equal(collision_cost(scene, drive), 0.0)

    def test_ground_and_faint_points_ignored(self):
        scene = _street((0.0, 5.0, 1.0))
        scene.static_gaussians.opacity_logits[-1] = -5.0
        points, opacities = occupied_points(scene, 0.0, PlanningParams())
        assert len(points) == 4
        assert np.all(points[:, 2] > 0.5)
        assert np.all(opacities > 0.1)

    def test_obstacle_on_the_path(self, drive):
        costs = collision_cost(_street((0.0, 5.0, 1.0)), drive)
        assert costs.shape == (10,)
        assert costs[5] == pytest.approx(costs.max())
        assert costs[5] == pytest.approx(5 * (1.0 / (1.0 + np.exp(-2.0))))
        assert costs[0] < 1e-6 * costs[5]

    def test_clear_lane_next_to_the_obstacle(self, drive):
        clear = lateral_offset_trajectory(drive, 20.0)
        assert collision_cost(_street((0.0, 5.0, 1.0)), clear).sum() < 1e-12

    def test_footprint_from_params(self):
        footprint = EgoFootprint.from_params(PlanningParams(ego_size=(4.0, 2.0, 1.6)))
        np.testing.assert_allclose(footprint.half_extents, [2.0, 1.0, 0.8])


class TestOptimizeTrajectory:
    """Lateral coordinate descent under a smoothness bound."""

    def test_refinement_lowers_cost(self, drive):
        params = PlanningParams()
        plan = optimize_trajectory(_street((0.8, 5.0, 1.0)), drive, params)
        assert plan.total < plan.initial_total
        assert max_second_difference(plan.offsets) <= params.smoothness_bound + 1e-9
        assert all(later < earlier for earlier, later in zip(plan.accepted, plan.accepted[1:]))
        np.testing.assert_allclose(collision_cost(_street((0.8, 5.0, 1.0)), plan.trajectory, params), plan.costs)

    def test_zero_smoothness_bound_allows_only_rigid_shifts(self, drive):
        params = PlanningParams(smoothness_bound=0.0)
        plan = optimize_trajectory(_street((0.8, 5.0, 1.0)), drive, params)
        np.testing.assert_allclose(plan.offsets, plan.offsets[0], atol=1e-9)
        assert plan.total < plan.initial_total

    def test_free_road_is_left_alone(self, drive):
        plan = optimize_trajectory(make_scene(GaussianSet.empty(0, 4)), drive)
        np.testing.assert_array_equal(plan.offsets, 0.0)
        assert plan.accepted == []

    def test_empty_trajectory(self):
        with pytest.raises(InvalidInputError):
            optimize_trajectory(_street((0.0, 5.0, 1.0)), [])


def test_collision_rate():
    assert collision_rate(np.array([0.0, 1.0, 0.2, 3.0]), 0.5) == 0.5
    assert collision_rate(np.zeros(0), 0.5) == 0.0


def test_trajectory_l2(drive):
    assert trajectory_l2(drive, lateral_offset_trajectory(drive, 2.0)) == pytest.approx(2.0)
    with pytest.raises(InvalidInputError):
        trajectory_l2(drive, drive[:3])
