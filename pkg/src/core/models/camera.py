"""Pinhole camera pose with a world-to-camera rigid transform."""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from core.exceptions import InvalidPoseError
from core.geometry import look_at_rotation

ORTHONORMAL_TOLERANCE = 1e-6


@dataclass(frozen=True, eq=False)
class CameraPose:
    """Intrinsics in pixels, row-major 4x4 world_to_cam, integer or fractional timestep."""

    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int
    world_to_cam: np.ndarray = field(repr=False)
    timestamp_index: float = 0

    def __post_init__(self):
        matrix = np.array(self.world_to_cam, dtype=np.float64).reshape(4, 4)
        matrix.setflags(write=False)
        object.__setattr__(self, "world_to_cam", matrix)
        if self.fx <= 0 or self.fy <= 0:
            raise InvalidPoseError(f"focal lengths must be positive, got fx={self.fx}, fy={self.fy}")
        if not (0 < self.cx < self.width and 0 < self.cy < self.height):
            raise InvalidPoseError(
                f"principal point ({self.cx}, {self.cy}) outside image {self.width}x{self.height}"
            )
        rot = matrix[:3, :3]
        if not np.all(np.isfinite(matrix)):
            raise InvalidPoseError("world_to_cam contains non-finite values")
        if np.max(np.abs(rot @ rot.T - np.eye(3))) > ORTHONORMAL_TOLERANCE:
            raise InvalidPoseError("rotation block is not orthonormal")
        if np.linalg.det(rot) < 0:
            raise InvalidPoseError("rotation block has determinant -1")
        if not np.allclose(matrix[3], [0.0, 0.0, 0.0, 1.0]):
            raise InvalidPoseError("last row of world_to_cam must be (0, 0, 0, 1)")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CameraPose):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    @property
    def rotation(self) -> np.ndarray:
        return self.world_to_cam[:3, :3]

    @property
    def translation(self) -> np.ndarray:
        return self.world_to_cam[:3, 3]

    @cached_property
    def camera_center(self) -> np.ndarray:
        return -self.rotation.T @ self.translation

    @cached_property
    def cam_to_world(self) -> np.ndarray:
        inv = np.eye(4)
        inv[:3, :3] = self.rotation.T
        inv[:3, 3] = self.camera_center
        return inv

    def with_time(self, t: float) -> "CameraPose":
        return CameraPose(self.fx, self.fy, self.cx, self.cy, self.width, self.height,
                          self.world_to_cam, t)

    def with_world_to_cam(self, world_to_cam: np.ndarray) -> "CameraPose":
        return CameraPose(self.fx, self.fy, self.cx, self.cy, self.width, self.height,
                          world_to_cam, self.timestamp_index)

    def to_dict(self) -> dict:
        return {
            "fx": float(self.fx), "fy": float(self.fy),
            "cx": float(self.cx), "cy": float(self.cy),
            "width": int(self.width), "height": int(self.height),
            "world_to_cam": [float(v) for v in self.world_to_cam.reshape(-1)],
            "t": self.timestamp_index,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CameraPose":
        return cls(
            fx=float(data["fx"]), fy=float(data["fy"]),
            cx=float(data["cx"]), cy=float(data["cy"]),
            width=int(data["width"]), height=int(data["height"]),
            world_to_cam=np.asarray(data["world_to_cam"], dtype=np.float64).reshape(4, 4),
            timestamp_index=data.get("t", 0),
        )

    @classmethod
    def look_at(cls, eye, target, *, width: int, height: int, fx: float, fy: float | None = None,
                up=(0.0, 0.0, 1.0), timestamp_index: float = 0) -> "CameraPose":
        rot = look_at_rotation(np.asarray(eye, dtype=np.float64), np.asarray(target, dtype=np.float64), up)
        matrix = np.eye(4)
        matrix[:3, :3] = rot
        matrix[:3, 3] = -rot @ np.asarray(eye, dtype=np.float64)
        return cls(fx, fy if fy is not None else fx, width / 2.0, height / 2.0, width, height,
                   matrix, timestamp_index)
