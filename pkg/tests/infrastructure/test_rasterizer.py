"""Tests for the tile rasterizer, its brute-force reference and the analytic backward pass."""

import numpy as np
import pytest

from core.exceptions import InvalidInputError
from core.models import GaussianSet, GaussianSnapshot
from core.sh import rgb_to_sh_dc
from infrastructure.rendering import RenderGrad, RenderOptions, brute_force_render, render, render_backward
from tests.fixtures import make_pose, make_snapshot

EXACT = RenderOptions(termination_transmittance=0.0)
SMOOTH = RenderOptions(min_alpha=0.0, termination_transmittance=0.0, footprint_sigma=8.0)


def _snapshot(positions, rgb, opacity, scale=0.1, payloads=None) -> GaussianSnapshot:
    """Isotropic degree-0 Gaussians with the given colors and opacities."""
    positions = np.asarray(positions, dtype=np.float64).reshape(-1, 3)
    n = len(positions)
    return GaussianSnapshot(
        positions=positions,
        rotations=np.tile([1.0, 0.0, 0.0, 0.0], (n, 1)),
        log_scales=np.full((n, 3), np.log(scale)),
        opacity_logits=np.log(np.asarray(opacity) / (1.0 - np.asarray(opacity))).reshape(n),
        sh_coeffs=rgb_to_sh_dc(np.asarray(rgb, dtype=np.float64).reshape(n, 3))[:, None, :],
        payloads=payloads,
    )


def _with(snapshot: GaussianSnapshot, name: str, value: np.ndarray) -> GaussianSnapshot:
    fields = {
        "positions": snapshot.positions,
        "rotations": snapshot.rotations,
        "log_scales": snapshot.log_scales,
        "opacity_logits": snapshot.opacity_logits,
        "sh_coeffs": snapshot.sh_coeffs,
        "payloads": snapshot.payloads,
    }
    fields[name] = value
    return GaussianSnapshot(**fields)


class TestForward:
    """Forward compositing on hand-built scenes."""

    def test_empty_snapshot_renders_background(self):
        empty = GaussianSnapshot.from_gaussian_set(GaussianSet.empty(sh_degree=1, feature_dim=4))
        out = render(empty, make_pose(size=20), RenderOptions(background=[0.2, 0.4, 0.6]))
        np.testing.assert_allclose(out.color, np.broadcast_to([0.2, 0.4, 0.6], (20, 20, 3)))
        np.testing.assert_array_equal(out.alpha, 0.0)
        np.testing.assert_array_equal(out.transmittance, 1.0)
        np.testing.assert_array_equal(out.contrib_count, 0)

    def test_everything_behind_camera_renders_background(self):
        snap = _snapshot([[0.0, 0.0, -2.0]], [[1.0, 0.0, 0.0]], [0.9])
        out = render(snap, make_pose(size=16))
        np.testing.assert_array_equal(out.alpha, 0.0)
        np.testing.assert_array_equal(out.color, 0.0)

    def test_single_gaussian_peaks_at_projected_center(self):
        snap = _snapshot([[0.0, 0.0, 2.0]], [[0.8, 0.4, 0.2]], [0.7])
        out = render(snap, make_pose(size=32))
        assert np.unravel_index(np.argmax(out.alpha), out.alpha.shape) == (16, 16)
        assert out.alpha[16, 16] == pytest.approx(0.7)
        np.testing.assert_allclose(out.color[16, 16], 0.7 * np.array([0.8, 0.4, 0.2]))
        assert out.depth[16, 16] == pytest.approx(2.0)

    def test_front_to_back_compositing(self):
        """Front red over back green over a blue background at the shared center pixel."""
        snap = _snapshot([[0.0, 0.0, 4.0], [0.0, 0.0, 2.0]], [[0.0, 1.0, 0.0], [1.0, 0.0, 0.0]], [0.5, 0.6],
                         scale=0.3)
        out = render(snap, make_pose(size=32), RenderOptions(background=[0.0, 0.0, 1.0]))
        a_front, a_back = 0.6, 0.5
        expected = np.array([a_front, (1 - a_front) * a_back, (1 - a_front) * (1 - a_back)])
        np.testing.assert_allclose(out.color[16, 16], expected, atol=1e-12)
        assert out.alpha[16, 16] == pytest.approx(a_front + (1 - a_front) * a_back)
        assert out.transmittance[16, 16] == pytest.approx((1 - a_front) * (1 - a_back))
        expected_depth = (a_front * 2.0 + (1 - a_front) * a_back * 4.0) / out.alpha[16, 16]
        assert out.depth[16, 16] == pytest.approx(expected_depth)
        assert out.contrib_count[16, 16] == 2

    def test_snapshot_order_does_not_matter(self, rng):
        snap = make_snapshot(rng, 12)
        perm = rng.permutation(12)
        shuffled = GaussianSnapshot(snap.positions[perm], snap.rotations[perm], snap.log_scales[perm],
                                    snap.opacity_logits[perm], snap.sh_coeffs[perm])
        pose = make_pose(size=32, focal=32.0)
        np.testing.assert_allclose(render(shuffled, pose).color, render(snap, pose).color, atol=1e-12)

    def test_payload_of_ones_equals_alpha(self, rng):
        snap = make_snapshot(rng, 20).with_payloads(np.ones(20))
        out = render(snap, make_pose(size=32, focal=32.0), RenderOptions(payload=True))
        np.testing.assert_allclose(out.scalar, out.alpha, atol=1e-12)

    def test_payload_requires_payloads(self, rng):
        with pytest.raises(InvalidInputError):
            render(make_snapshot(rng, 3), make_pose(), RenderOptions(payload=True))

    def test_render_degree_above_stored_rejected(self, rng):
        with pytest.raises(InvalidInputError):
            render(make_snapshot(rng, 3, sh_degree=1), make_pose(), RenderOptions(sh_degree=2))

    def test_render_below_stored_degree_uses_leading_bands(self, rng):
        snap = make_snapshot(rng, 12, sh_degree=2)
        dc_only = GaussianSnapshot(snap.positions, snap.rotations, snap.log_scales, snap.opacity_logits,
                                   snap.sh_coeffs[:, :1])
        pose = make_pose(size=24, focal=24.0)
        low = render(snap, pose, RenderOptions(sh_degree=0))
        np.testing.assert_array_equal(low.color, render(dc_only, pose).color)
        upstream = RenderGrad(color=rng.normal(size=(24, 24, 3)))
        grads = render_backward(snap, pose, RenderOptions(sh_degree=0), upstream)
        assert grads.sh_coeffs.shape == snap.sh_coeffs.shape
        assert np.any(grads.sh_coeffs[:, 0] != 0.0)
        np.testing.assert_array_equal(grads.sh_coeffs[:, 1:], 0.0)

    def test_degenerate_covariance_is_skipped(self):
        snap = _snapshot([[0.0, 0.0, 2.0], [0.1, 0.0, 3.0]], [[1.0, 1.0, 1.0]] * 2, [0.5, 0.5])
        snap = _with(snap, "log_scales", np.array([[-30.0] * 3, [np.log(0.1)] * 3]))
        out = render(snap, make_pose(size=16), RenderOptions(blur=0.0))
        assert out.skipped == 1
        assert np.all(np.isfinite(out.color))

    def test_early_termination_saturates(self):
        """A stack of opaque splats stops compositing once transmittance drops below the threshold."""
        positions = [[0.0, 0.0, 2.0 + 0.1 * i] for i in range(6)]
        snap = _snapshot(positions, [[1.0, 1.0, 1.0]] * 6, [0.9] * 6, scale=0.3)
        out = render(snap, make_pose(size=16), RenderOptions(termination_transmittance=0.005))
        assert out.contrib_count[8, 8] == 3
        assert out.transmittance[8, 8] == pytest.approx(0.001)


class TestReferenceEquivalence:
    """Tiled rendering matches the brute-force reference."""

    @pytest.mark.parametrize("seed", range(20))
    def test_random_scenes(self, seed):
        rng = np.random.default_rng(seed)
        snap = make_snapshot(rng, 30, payload=True, sh_degree=2)
        pose = make_pose(size=40, focal=36.0)
        options = EXACT.evolve(payload=True, background=rng.uniform(size=3))
        tiled, reference = render(snap, pose, options), brute_force_render(snap, pose, options)
        np.testing.assert_allclose(tiled.color, reference.color, atol=1e-10)
        np.testing.assert_allclose(tiled.alpha, reference.alpha, atol=1e-10)
        np.testing.assert_allclose(tiled.depth, reference.depth, atol=1e-10)
        np.testing.assert_allclose(tiled.scalar, reference.scalar, atol=1e-10)

    def test_sparse_scene_with_default_termination(self, rng):
        snap = make_snapshot(rng, 10, opacity=(-4.0, -2.0))
        pose = make_pose(size=32, focal=32.0)
        np.testing.assert_allclose(render(snap, pose).color, brute_force_render(snap, pose).color, atol=1e-10)

    def test_thread_count_does_not_change_result(self, rng):
        snap = make_snapshot(rng, 40, payload=True)
        pose = make_pose(size=48, focal=40.0)
        single = render(snap, pose, RenderOptions(threads=1, payload=True))
        many = render(snap, pose, RenderOptions(threads=4, payload=True))
        np.testing.assert_array_equal(single.color, many.color)
        np.testing.assert_array_equal(single.scalar, many.scalar)

        upstream = RenderGrad(color=rng.normal(size=(48, 48, 3)), scalar=rng.normal(size=(48, 48)))
        g1 = render_backward(snap, pose, RenderOptions(threads=1, payload=True), upstream)
        g4 = render_backward(snap, pose, RenderOptions(threads=4, payload=True), upstream)
        np.testing.assert_array_equal(g1.positions, g4.positions)
        np.testing.assert_array_equal(g1.payloads, g4.payloads)


class TestBackward:
    """Analytic gradients of the render against central differences."""

    SIZE = 24

    @pytest.fixture
    def scene(self, rng):
        snap = make_snapshot(rng, 5, payload=True, sh_degree=1, spread=0.25, scale=(0.1, 0.3))
        pose = make_pose(size=self.SIZE, focal=24.0)
        options = SMOOTH.evolve(payload=True, background=[0.1, 0.2, 0.3])
        return snap, pose, options

    @pytest.fixture
    def upstream(self, rng):
        return RenderGrad(
            color=rng.normal(size=(self.SIZE, self.SIZE, 3)),
            alpha=rng.normal(size=(self.SIZE, self.SIZE)),
            scalar=rng.normal(size=(self.SIZE, self.SIZE)),
        )

    @staticmethod
    def _loss(snap, pose, options, upstream) -> float:
        out = render(snap, pose, options)
        total = np.sum(upstream.color * out.color) + np.sum(upstream.alpha * out.alpha)
        total += np.sum(upstream.scalar * out.scalar)
        if upstream.depth is not None:
            total += np.sum(upstream.depth * out.depth)
        return float(total)

    def _check(self, snap, pose, options, upstream, grads, name, rng, eps=1e-6):
        base = getattr(snap, name)
        direction = rng.normal(size=base.shape)
        plus = self._loss(_with(snap, name, base + eps * direction), pose, options, upstream)
        minus = self._loss(_with(snap, name, base - eps * direction), pose, options, upstream)
        numeric = (plus - minus) / (2 * eps)
        analytic = float(np.sum(getattr(grads, name) * direction))
        assert analytic == pytest.approx(numeric, rel=1e-4, abs=1e-7), name

    @pytest.mark.parametrize("name", ["positions", "rotations", "log_scales", "opacity_logits", "sh_coeffs",
                                      "payloads"])
    def test_parameter_gradients(self, scene, upstream, rng, name):
        snap, pose, options = scene
        grads = render_backward(snap, pose, options, upstream)
        self._check(snap, pose, options, upstream, grads, name, rng)

    def test_depth_gradient(self, scene, rng):
        snap, pose, options = scene
        coverage = render(snap, pose, options).alpha > 0.2
        upstream = RenderGrad(depth=np.where(coverage, rng.normal(size=coverage.shape), 0.0))
        upstream.color = np.zeros((self.SIZE, self.SIZE, 3))
        upstream.alpha = np.zeros((self.SIZE, self.SIZE))
        upstream.scalar = np.zeros((self.SIZE, self.SIZE))
        grads = render_backward(snap, pose, options, upstream)
        self._check(snap, pose, options, upstream, grads, "positions", rng)

    def test_zero_upstream_gives_zero_gradients(self, scene):
        snap, pose, options = scene
        grads = render_backward(snap, pose, options, RenderGrad())
        for name in ("positions", "rotations", "log_scales", "opacity_logits", "sh_coeffs", "payloads"):
            np.testing.assert_array_equal(getattr(grads, name), 0.0)

    def test_brighter_target_raises_opacity(self):
        """Asking for more light over a black background pushes the opacity logit up."""
        snap = _snapshot([[0.0, 0.0, 2.0]], [[0.8, 0.8, 0.8]], [0.3])
        size = 16
        grads = render_backward(snap, make_pose(size=size), None, RenderGrad(color=-np.ones((size, size, 3))))
        assert grads.opacity_logits[0] < 0.0

    def test_invisible_gaussians_get_no_gradient(self, rng):
        snap = make_snapshot(rng, 4)
        snap = _with(snap, "positions", snap.positions * np.array([1.0, 1.0, -1.0]))
        size = 16
        grads = render_backward(snap, make_pose(size=size), None, RenderGrad(color=np.ones((size, size, 3))))
        np.testing.assert_array_equal(grads.positions, 0.0)

    def test_upstream_shape_checked(self, rng):
        with pytest.raises(InvalidInputError):
            render_backward(make_snapshot(rng, 3), make_pose(size=16), None, RenderGrad(color=np.zeros((8, 8, 3))))

    def test_scalar_gradient_requires_payload_mode(self, rng):
        with pytest.raises(InvalidInputError):
            render_backward(make_snapshot(rng, 3), make_pose(size=16), None, RenderGrad(scalar=np.zeros((16, 16))))
