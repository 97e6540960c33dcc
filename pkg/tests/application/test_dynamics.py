"""Tests for the deformation network and time composition of hybrid scenes."""

import numpy as np
import pytest

from core.exceptions import InvalidInputError
from core.models import GaussianSet, GaussianSnapshot
from infrastructure.rendering import RenderOptions, render
from application.dynamics import (
    apply_deformation,
    apply_deformation_backward,
    compose_scene_at_t,
    create_deformation_field,
    deform,
    is_extrapolated,
)
from tests.fixtures import make_gaussians, make_pose, make_scene


def _small_field(rng, trained: bool = False):
    field = create_deformation_field(np.array([0.0, 0.0, 4.0]), 2.0, 5, rng, position_freqs=2, time_freqs=2,
                                     hidden_width=8, hidden_layers=2)
    if trained:
        field.params = {name: value + 0.3 * rng.normal(size=value.shape) for name, value in field.params.items()}
    return field


class TestDeform:
    """Offsets produced by the shared network."""

    def test_fresh_field_is_identity(self, rng):
        gaussians = make_gaussians(rng, 6)
        field = _small_field(rng)
        offsets = deform(field, gaussians.positions, 2.0)
        for part in offsets:
            np.testing.assert_array_equal(part, 0.0)
        moved = apply_deformation(gaussians, field, 3.0)
        np.testing.assert_array_equal(moved.positions, gaussians.positions)
        np.testing.assert_array_equal(moved.rotations, gaussians.rotations)
        np.testing.assert_array_equal(moved.log_scales, gaussians.log_scales)

    def test_rows_are_independent_of_the_batch(self, rng):
        gaussians = make_gaussians(rng, 6)
        field = _small_field(rng, trained=True)
        full = deform(field, gaussians.positions, 1.5)
        part = deform(field, gaussians.positions[:2], 1.5)
        np.testing.assert_allclose(part.positions, full.positions[:2], rtol=1e-12, atol=1e-12)
        np.testing.assert_allclose(part.rotations, full.rotations[:2], rtol=1e-12, atol=1e-12)

    def test_offsets_depend_on_time(self, rng):
        gaussians = make_gaussians(rng, 4)
        field = _small_field(rng, trained=True)
        assert not np.allclose(deform(field, gaussians.positions, 0.0).positions,
                               deform(field, gaussians.positions, 4.0).positions)

    def test_empty_positions(self, rng):
        offsets = deform(_small_field(rng), np.zeros((0, 3)), 1.0)
        assert offsets.positions.shape == (0, 3)
        assert offsets.rotations.shape == (0, 4)

    @pytest.mark.parametrize("t", [np.nan, np.inf])
    def test_non_finite_time_rejected(self, rng, t):
        with pytest.raises(InvalidInputError):
            deform(_small_field(rng), np.zeros((1, 3)), t)

    def test_non_finite_position_rejected(self, rng):
        with pytest.raises(InvalidInputError):
            deform(_small_field(rng), np.array([[0.0, np.nan, 1.0]]), 0.0)

    def test_opacity_and_color_untouched(self, rng):
        gaussians = make_gaussians(rng, 5)
        moved = apply_deformation(gaussians, _small_field(rng, trained=True), 2.0)
        np.testing.assert_array_equal(moved.opacity_logits, gaussians.opacity_logits)
        np.testing.assert_array_equal(moved.sh_coeffs, gaussians.sh_coeffs)
        np.testing.assert_array_equal(moved.ids, gaussians.ids)
        np.testing.assert_allclose(np.linalg.norm(moved.rotations, axis=1), 1.0)


class TestDeformationBackward:
    """Reverse-mode pull-back through the network and the quaternion renormalization."""

    @pytest.fixture
    def setup(self, rng):
        gaussians = make_gaussians(rng, 4)
        gaussians.enforce_invariants()
        field = _small_field(rng, trained=True)
        upstream = (rng.normal(size=(4, 3)), rng.normal(size=(4, 4)), rng.normal(size=(4, 3)))
        return gaussians, field, upstream

    @staticmethod
    def _loss(gaussians, field, upstream, t=1.0):
        moved = apply_deformation(gaussians, field, t)
        return float(np.sum(upstream[0] * moved.positions) + np.sum(upstream[1] * moved.rotations)
                     + np.sum(upstream[2] * moved.log_scales))

    def test_network_gradients(self, setup, rng):
        gaussians, field, upstream = setup
        grads = apply_deformation_backward(gaussians, field, 1.0, *upstream)
        eps = 1e-6
        for name, value in field.params.items():
            direction = rng.normal(size=value.shape)
            plus, minus = field.copy(), field.copy()
            plus.params[name] = value + eps * direction
            minus.params[name] = value - eps * direction
            numeric = (self._loss(gaussians, plus, upstream) - self._loss(gaussians, minus, upstream)) / (2 * eps)
            assert np.sum(grads.params[name] * direction) == pytest.approx(numeric, rel=1e-5, abs=1e-8)

    @pytest.mark.parametrize("name", ["positions", "rotations", "log_scales"])
    def test_canonical_gradients(self, setup, rng, name):
        gaussians, field, upstream = setup
        grads = apply_deformation_backward(gaussians, field, 1.0, *upstream)
        direction = rng.normal(size=getattr(gaussians, name).shape)
        eps = 1e-6
        value = getattr(gaussians, name)
        plus = gaussians.with_params(**{name: value + eps * direction})
        minus = gaussians.with_params(**{name: value - eps * direction})
        numeric = (self._loss(plus, field, upstream) - self._loss(minus, field, upstream)) / (2 * eps)
        assert np.sum(getattr(grads, name) * direction) == pytest.approx(numeric, rel=1e-5, abs=1e-8)


class TestComposition:
    """Static block first, deformed dynamic block after it."""

    def test_static_block_is_time_invariant(self, rng):
        static = make_gaussians(rng, 5)
        dynamic = make_gaussians(rng, 3)
        dynamic.ids = np.array([20, 21, 22])
        scene = make_scene(static, dynamic, _small_field(rng, trained=True))
        for t in (0.0, 1.3, 4.0):
            snapshot = compose_scene_at_t(scene, t)
            assert len(snapshot) == 8
            np.testing.assert_array_equal(snapshot.positions[:5], static.positions)
            np.testing.assert_array_equal(snapshot.ids, [0, 1, 2, 3, 4, 20, 21, 22])

    def test_zero_field_renders_like_all_static(self, rng):
        static = make_gaussians(rng, 6)
        dynamic = make_gaussians(rng, 4)
        dynamic.ids = np.arange(6, 10)
        hybrid = make_scene(static, dynamic, _small_field(rng))
        flat = make_scene(GaussianSet.concatenate([static, dynamic]))
        pose = make_pose(size=32, focal=32.0)
        options = RenderOptions()
        for t in (0.0, 2.0):
            np.testing.assert_array_equal(render(compose_scene_at_t(hybrid, t), pose, options).color,
                                          render(compose_scene_at_t(flat, t), pose, options).color)

    def test_payloads_follow_composition_order(self, rng):
        static = make_gaussians(rng, 2)
        dynamic = make_gaussians(rng, 1)
        dynamic.ids = np.array([5])
        scene = make_scene(static, dynamic, _small_field(rng))
        snapshot = compose_scene_at_t(scene, 0.0, np.array([0.0, 0.0, 1.0]))
        np.testing.assert_array_equal(snapshot.payloads, [0.0, 0.0, 1.0])

    def test_static_only_scene(self, rng):
        static = make_gaussians(rng, 3)
        snapshot = compose_scene_at_t(make_scene(static), 2.0)
        expected = GaussianSnapshot.from_gaussian_set(static)
        np.testing.assert_array_equal(snapshot.positions, expected.positions)

    def test_extrapolation(self, rng):
        scene = make_scene(make_gaussians(rng, 1), num_frames=5)
        assert not is_extrapolated(scene, 0.0)
        assert not is_extrapolated(scene, 4.0)
        assert is_extrapolated(scene, 4.5)
        assert is_extrapolated(scene, -0.1)
