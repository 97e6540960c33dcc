"""Exception hierarchy shared by every layer."""

from typing import Any


class HybridSplatError(Exception):
    """Base exception for hybridsplat errors."""


class InvalidInputError(HybridSplatError, ValueError):
    """Raised when an argument has the wrong shape, range or type."""


class InvalidPoseError(InvalidInputError):
    """Raised when a camera pose violates its intrinsic or rigid-transform invariants."""


class ConfigValidationError(InvalidInputError):
    """Raised when a pipeline config, oracle spec or trajectory file fails validation."""


class BundleValidationError(InvalidInputError):
    """Raised when a reference bundle is inconsistent."""

    def __init__(self, message: str, frame: int | None = None):
        self.frame = frame
        prefix = f"frame {frame}: " if frame is not None else ""
        super().__init__(f"{prefix}{message}")


class MissingMaskError(InvalidInputError):
    """Raised when an evaluation needs ground-truth dynamic masks the bundle lacks."""


class InsufficientGeometryError(HybridSplatError):
    """Raised when a bundle holds too few valid points to initialize Gaussians."""


class OracleGenerationError(HybridSplatError):
    """Raised when the synthetic oracle cannot render a spec (e.g. camera inside a primitive)."""


class TrainingDivergedError(HybridSplatError):
    """Raised when an optimization loss becomes non-finite."""

    def __init__(self, message: str, iteration: int, checkpoint: Any = None):
        self.iteration = iteration
        self.checkpoint = checkpoint
        super().__init__(f"{message} (iteration {iteration})")


class PipelineStageError(HybridSplatError):
    """Raised when a pipeline stage fails with an unexpected error."""

    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage '{stage}' failed: {cause}")


class SceneFileError(HybridSplatError):
    """Base exception for scene file errors."""


class SceneIntegrityError(SceneFileError):
    """Raised when a scene file is truncated, corrupt or fails its checksum."""


class UnsupportedVersionError(SceneFileError):
    """Raised when a scene or bundle file declares an unknown format version."""
