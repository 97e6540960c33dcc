"""Front-to-back alpha compositing of depth-sorted splats over a block of pixels.

A block is any set of pixels (a 16x16 tile or the whole image) together with the Gaussians that
may touch it, already in compositing order. Blocks are independent, which is what lets the
rasterizer run them in parallel and merge deterministically.
"""

from dataclasses import dataclass

import numpy as np


@dataclass
class BlockWeights:
    offsets: np.ndarray
    falloff: np.ndarray
    alpha: np.ndarray
    kept: np.ndarray
    transmittance: np.ndarray
    live: np.ndarray
    weights: np.ndarray
    final_transmittance: np.ndarray


@dataclass
class BlockForward:
    color: np.ndarray
    alpha: np.ndarray
    depth: np.ndarray
    scalar: np.ndarray | None
    contrib_count: np.ndarray
    transmittance: np.ndarray


@dataclass
class BlockBackward:
    means2d: np.ndarray
    conics: np.ndarray
    opacities: np.ndarray
    colors: np.ndarray
    depths: np.ndarray
    payloads: np.ndarray | None


def _accumulate(weights: np.ndarray, values: np.ndarray) -> np.ndarray:
    return np.sum(weights * values[None, :], axis=1)


def block_weights(pixels: np.ndarray, means2d: np.ndarray, conics: np.ndarray, opacities: np.ndarray,
                  footprint_sigma: float, min_alpha: float, termination: float) -> BlockWeights:
    """Per (pixel, Gaussian) compositing weights w = a * T over P pixels and K sorted Gaussians."""
    offsets = pixels[:, None, :] - means2d[None, :, :]
    dx, dy = offsets[..., 0], offsets[..., 1]
    q = conics[None, :, 0, 0] * dx * dx + 2.0 * conics[None, :, 0, 1] * dx * dy + conics[None, :, 1, 1] * dy * dy
    falloff = np.exp(-0.5 * q)
    alpha = opacities[None, :] * falloff
    kept = (q <= footprint_sigma * footprint_sigma) & (alpha >= min_alpha)
    alpha = np.where(kept, alpha, 0.0)

    one_minus = 1.0 - alpha
    inclusive = np.cumprod(one_minus, axis=1)
    transmittance = np.empty_like(inclusive)
    transmittance[:, :1] = 1.0
    transmittance[:, 1:] = inclusive[:, :-1]
    # Once T falls below the threshold the pixel is done; `live` is a prefix along each row.
    live = transmittance >= termination
    weights = np.where(live, alpha * transmittance, 0.0)
    final_transmittance = np.prod(np.where(live, one_minus, 1.0), axis=1)
    return BlockWeights(offsets, falloff, alpha, kept, transmittance, live, weights, final_transmittance)


def composite_block(bw: BlockWeights, colors: np.ndarray, depths: np.ndarray, payloads: np.ndarray | None,
                    background: np.ndarray) -> BlockForward:
    w = bw.weights
    num_pixels = w.shape[0]
    color = np.stack([_accumulate(w, colors[:, ch]) for ch in range(3)], axis=-1)
    color += background[None, :] * bw.final_transmittance[:, None]
    alpha = _accumulate(w, np.ones(w.shape[1]))
    depth_sum = _accumulate(w, depths)
    depth = np.divide(depth_sum, alpha, out=np.zeros(num_pixels), where=alpha > 0)
    scalar = _accumulate(w, payloads) if payloads is not None else None
    return BlockForward(
        color=color,
        alpha=alpha,
        depth=depth,
        scalar=scalar,
        contrib_count=np.count_nonzero(w > 0, axis=1),
        transmittance=bw.final_transmittance,
    )


def composite_block_backward(bw: BlockWeights, opacities: np.ndarray, conics: np.ndarray, colors: np.ndarray,
                             depths: np.ndarray, payloads: np.ndarray | None, background: np.ndarray,
                             grad_color: np.ndarray, grad_alpha: np.ndarray, grad_depth: np.ndarray,
                             grad_scalar: np.ndarray | None) -> BlockBackward:
    """Gradients w.r.t. the per-Gaussian screen-space quantities of one block.

    Every output pixel is linear in the weights: L = sum_k w_k G_k + B T_final, where G_k folds
    the upstream gradients of all channels and B the background term.
    """
    w = bw.weights
    alpha_img = _accumulate(w, np.ones(w.shape[1]))
    depth_sum = _accumulate(w, depths)
    has_alpha = alpha_img > 0
    grad_depth_sum = np.divide(grad_depth, alpha_img, out=np.zeros_like(grad_depth), where=has_alpha)
    grad_alpha_total = grad_alpha - np.divide(grad_depth * depth_sum, alpha_img * alpha_img,
                                              out=np.zeros_like(grad_depth), where=has_alpha)

    value_grad = grad_color @ colors.T + grad_alpha_total[:, None] + grad_depth_sum[:, None] * depths[None, :]
    if payloads is not None and grad_scalar is not None:
        value_grad = value_grad + grad_scalar[:, None] * payloads[None, :]
    background_grad = grad_color @ background

    weighted = w * value_grad
    suffix = np.cumsum(weighted[:, ::-1], axis=1)[:, ::-1] - weighted
    behind = suffix + (background_grad * bw.final_transmittance)[:, None]
    one_minus = 1.0 - bw.alpha
    grad_a = bw.transmittance * value_grad - np.divide(behind, one_minus, out=np.zeros_like(behind),
                                                        where=one_minus > 0)
    grad_a = np.where(bw.live & bw.kept, grad_a, 0.0)

    grad_opacity = np.sum(grad_a * bw.falloff, axis=0)
    grad_q = grad_a * opacities[None, :] * bw.falloff * -0.5
    dx, dy = bw.offsets[..., 0], bw.offsets[..., 1]
    cdx = conics[None, :, 0, 0] * dx + conics[None, :, 0, 1] * dy
    cdy = conics[None, :, 1, 0] * dx + conics[None, :, 1, 1] * dy
    grad_means = np.stack([np.sum(grad_q * -2.0 * cdx, axis=0), np.sum(grad_q * -2.0 * cdy, axis=0)], axis=-1)
    gxx = np.sum(grad_q * dx * dx, axis=0)
    gxy = np.sum(grad_q * dx * dy, axis=0)
    gyy = np.sum(grad_q * dy * dy, axis=0)
    grad_conics = np.stack([np.stack([gxx, gxy], -1), np.stack([gxy, gyy], -1)], -2)

    grad_colors = np.stack([np.sum(w * grad_color[:, ch, None], axis=0) for ch in range(3)], axis=-1)
    grad_depths = np.sum(w * grad_depth_sum[:, None], axis=0)
    grad_payloads = None
    if payloads is not None:
        grad_payloads = np.sum(w * grad_scalar[:, None], axis=0) if grad_scalar is not None else np.zeros(w.shape[1])
    return BlockBackward(grad_means, grad_conics, grad_opacity, grad_colors, grad_depths, grad_payloads)
