"""Reference bundle: the time-ordered posed frames a scene is reconstructed from."""

from dataclasses import dataclass, field

import numpy as np

from core.exceptions import BundleValidationError
from core.models.camera import CameraPose


@dataclass
class Frame:
    image: np.ndarray
    pose: CameraPose
    pointmap: np.ndarray
    featmap: np.ndarray
    dyn_mask: np.ndarray | None = None

    @property
    def valid_mask(self) -> np.ndarray:
        """Pixels whose pointmap entry is finite."""
        return np.all(np.isfinite(self.pointmap), axis=-1)

    @property
    def height(self) -> int:
        return self.image.shape[0]

    @property
    def width(self) -> int:
        return self.image.shape[1]


@dataclass
class ReferenceBundle:
    frames: list[Frame]
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.frames)

    def __iter__(self):
        return iter(self.frames)

    def __getitem__(self, index: int) -> Frame:
        return self.frames[index]

    @property
    def feature_dim(self) -> int:
        return self.frames[0].featmap.shape[-1]

    @property
    def image_size(self) -> tuple[int, int]:
        return self.frames[0].height, self.frames[0].width

    @property
    def has_masks(self) -> bool:
        return bool(self.frames) and all(f.dyn_mask is not None for f in self.frames)

    @property
    def background(self) -> np.ndarray:
        return np.asarray(self.meta.get("background", (0.0, 0.0, 0.0)), dtype=np.float64)

    def select(self, indices) -> "ReferenceBundle":
        """Sub-bundle of the given frames; timestamps keep their original values."""
        return ReferenceBundle([self.frames[i] for i in indices], dict(self.meta))

    def validate(self) -> "ReferenceBundle":
        if not self.frames:
            raise BundleValidationError("bundle has no frames")
        height, width = self.image_size
        feature_dim = self.feature_dim
        for i, frame in enumerate(self.frames):
            if frame.image.shape != (height, width, 3):
                raise BundleValidationError(f"image shape {frame.image.shape} != {(height, width, 3)}", i)
            if frame.pose.width != width or frame.pose.height != height:
                raise BundleValidationError(
                    f"pose size {frame.pose.width}x{frame.pose.height} != image {width}x{height}", i
                )
            if frame.pointmap.shape != (height, width, 3):
                raise BundleValidationError(f"pointmap shape {frame.pointmap.shape} != {(height, width, 3)}", i)
            if frame.featmap.shape != (height, width, feature_dim):
                raise BundleValidationError(
                    f"featmap shape {frame.featmap.shape} != {(height, width, feature_dim)}", i
                )
            if frame.dyn_mask is not None and frame.dyn_mask.shape != (height, width):
                raise BundleValidationError(f"mask shape {frame.dyn_mask.shape} != {(height, width)}", i)
            if not np.all(np.isfinite(frame.image)) or frame.image.min() < 0.0 or frame.image.max() > 1.0:
                raise BundleValidationError("image values must be finite and in [0, 1]", i)
            if not np.all(np.isfinite(frame.featmap)):
                raise BundleValidationError("featmap contains non-finite values", i)
            partial = np.any(np.isfinite(frame.pointmap), axis=-1) & ~frame.valid_mask
            if np.any(partial):
                raise BundleValidationError("pointmap has partially non-finite points", i)
            if frame.pose.timestamp_index != i:
                raise BundleValidationError(
                    f"timestamp {frame.pose.timestamp_index} breaks the 0..T-1 ordering", i
                )
        return self
