from dataclasses import dataclass

import numpy as np
from scipy.ndimage import uniform_filter

from core.exceptions import InvalidInputError

NORMALIZATION_PERCENTILE = 99.0
DEFAULT_ERROR_FLOOR = 0.2


@dataclass
class ErrorMapSet:
    """Per-frame photometric residuals of the static fit.

    raw: (T, H, W, 3) absolute differences; normalized: (T, H, W) in [0, 1].
    """

    raw: np.ndarray
    normalized: np.ndarray

    def __len__(self) -> int:
        return len(self.normalized)

    @property
    def is_empty(self) -> bool:
        return not np.any(self.normalized)


def normalize_error_map(raw: np.ndarray, floor: float = DEFAULT_ERROR_FLOOR) -> np.ndarray:
    """Channel mean, 3x3 box blur, divide by the frame's 99th percentile, clamp to [0, 1].

    The divisor never drops below `floor`, so a well-fitted frame keeps small values instead of
    having its residual noise stretched to 1.
    """
    gray = uniform_filter(raw.mean(axis=-1), size=3, mode="nearest")
    scale = max(float(np.percentile(gray, NORMALIZATION_PERCENTILE)), floor)
    if scale <= 0.0:
        return np.zeros_like(gray)
    return np.clip(gray / scale, 0.0, 1.0)


def compute_error_maps(renders: list[np.ndarray], references: list[np.ndarray],
                       floor: float = DEFAULT_ERROR_FLOOR) -> ErrorMapSet:
    if len(renders) != len(references):
        raise InvalidInputError(f"{len(renders)} renders for {len(references)} reference frames")
    raw = []
    for i, (rendered, reference) in enumerate(zip(renders, references)):
        rendered = np.asarray(rendered, dtype=np.float64)
        reference = np.asarray(reference, dtype=np.float64)
        if rendered.shape != reference.shape or rendered.ndim != 3:
            raise InvalidInputError(f"frame {i}: render shape {rendered.shape} != reference shape {reference.shape}")
        raw.append(np.abs(rendered - reference))
    if not raw:
        return ErrorMapSet(np.zeros((0, 0, 0, 3)), np.zeros((0, 0, 0)))
    raw = np.stack(raw)
    return ErrorMapSet(raw, np.stack([normalize_error_map(r, floor) for r in raw]))
