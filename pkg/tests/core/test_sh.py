"""Tests for spherical-harmonics color evaluation."""

import numpy as np
import pytest

from core.constants import SH_C0
from core.exceptions import InvalidInputError
from core.sh import eval_sh, eval_sh_backward, num_sh_coeffs, rgb_to_sh_dc, sh_basis, truncate_sh


def _unit(v):
    v = np.asarray(v, dtype=np.float64)
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


class TestEvalSh:
    """Color = max(0, sum_k c_k Y_k(d) + 0.5)."""

    def test_degree_zero_is_view_independent(self, rng):
        coeffs = np.ones((1, 3))
        dirs = _unit(rng.normal(size=(8, 3)))
        colors = eval_sh(np.broadcast_to(coeffs, (8, 1, 3)), dirs, 0)
        np.testing.assert_allclose(colors, 0.5 + SH_C0, atol=1e-12)

    def test_zero_higher_bands_match_degree_zero(self, rng):
        coeffs = np.zeros((5, num_sh_coeffs(3), 3))
        coeffs[:, 0, :] = rng.normal(size=(5, 3))
        dirs = _unit(rng.normal(size=(5, 3)))
        np.testing.assert_allclose(eval_sh(coeffs, dirs, 3), eval_sh(truncate_sh(coeffs, 0), dirs, 0), atol=1e-12)

    def test_opposite_directions_negate_band_one(self, rng):
        coeffs = np.zeros((num_sh_coeffs(1), 3))
        coeffs[1:, :] = rng.uniform(-0.2, 0.2, size=(3, 3))
        d = _unit(rng.normal(size=3))
        forward = eval_sh(coeffs, d, 1) - 0.5
        backward = eval_sh(coeffs, -d, 1) - 0.5
        np.testing.assert_allclose(forward, -backward, atol=1e-12)

    def test_clamped_below_not_above(self):
        coeffs = np.array([[-10.0, 0.0, 10.0]])
        color = eval_sh(coeffs, np.array([0.0, 0.0, 1.0]), 0)
        assert color[0] == 0.0
        assert color[1] == pytest.approx(0.5)
        assert color[2] > 1.0

    def test_rgb_round_trip_through_dc(self):
        rgb = np.array([0.1, 0.5, 0.9])
        coeffs = rgb_to_sh_dc(rgb)[None, :]
        np.testing.assert_allclose(eval_sh(coeffs, np.array([1.0, 0.0, 0.0]), 0), rgb, atol=1e-12)

    def test_too_few_coefficients_rejected(self):
        with pytest.raises(InvalidInputError):
            eval_sh(np.zeros((4, 3)), np.array([0.0, 0.0, 1.0]), 2)

    def test_too_many_coefficients_rejected(self):
        with pytest.raises(InvalidInputError):
            eval_sh(np.zeros((num_sh_coeffs(2), 3)), np.array([0.0, 0.0, 1.0]), 1)
        with pytest.raises(InvalidInputError):
            eval_sh_backward(np.zeros((4, 3)), np.array([0.0, 0.0, 1.0]), 0, np.ones(3))

    def test_truncation_keeps_leading_bands(self, rng):
        coeffs = rng.normal(size=(2, num_sh_coeffs(3), 3))
        np.testing.assert_array_equal(truncate_sh(coeffs, 1), coeffs[:, :4])
        with pytest.raises(InvalidInputError):
            truncate_sh(coeffs[:, :4], 2)

    def test_degree_out_of_range_rejected(self):
        with pytest.raises(InvalidInputError):
            sh_basis(np.array([0.0, 0.0, 1.0]), 4)


@pytest.mark.parametrize("degree", [0, 1, 2, 3])
def test_backward_matches_finite_differences(rng, degree):
    """Analytic coefficient and direction gradients agree with central differences."""
    k = num_sh_coeffs(degree)
    coeffs = rng.normal(scale=0.05, size=(k, 3))
    coeffs[0] = 0.0
    d = _unit(rng.normal(size=3))
    upstream = rng.normal(size=3)

    def loss(c, v):
        return float(upstream @ eval_sh(c, v, degree))

    grad_c, grad_d = eval_sh_backward(coeffs, d, degree, upstream)
    eps = 1e-6
    for idx in np.ndindex(coeffs.shape):
        step = np.zeros_like(coeffs)
        step[idx] = eps
        numeric = (loss(coeffs + step, d) - loss(coeffs - step, d)) / (2 * eps)
        assert grad_c[idx] == pytest.approx(numeric, abs=1e-7)
    for i in range(3):
        step = np.zeros(3)
        step[i] = eps
        numeric = (loss(coeffs, d + step) - loss(coeffs, d - step)) / (2 * eps)
        assert grad_d[i] == pytest.approx(numeric, abs=1e-7)
