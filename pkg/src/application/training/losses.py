"""Photometric training loss: weighted L1 plus weighted (1 - SSIM)."""

from typing import NamedTuple

import numpy as np

from core.imaging import l1_loss, l1_loss_grad, ssim, ssim_grad
from infrastructure.config import PipelineConfig
from infrastructure.config.pipeline_config import LossWeights


class PhotometricLoss(NamedTuple):
    total: float
    l1: float
    ssim_loss: float
    grad: np.ndarray


def photometric_loss(rendered: np.ndarray, reference: np.ndarray, weights: LossWeights | None = None) -> PhotometricLoss:
    """Loss and dLoss/d(rendered) for one frame."""
    weights = weights or PipelineConfig().loss
    l1 = l1_loss(rendered, reference)
    ssim_term = 1.0 - ssim(rendered, reference)
    total = weights.l1 * l1 + weights.ssim * ssim_term
    grad = weights.l1 * l1_loss_grad(rendered, reference)
    if weights.ssim:
        grad = grad - weights.ssim * ssim_grad(rendered, reference)
    return PhotometricLoss(float(total), l1, ssim_term, grad)
