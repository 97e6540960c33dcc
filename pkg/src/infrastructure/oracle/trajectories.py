"""Ego trajectories in a z-up world: straight driving, lane shifts, turns and stops."""

import numpy as np

from core.exceptions import InvalidInputError
from core.models import CameraPose

WORLD_UP = np.array([0.0, 0.0, 1.0])


def forward_axis(pose: CameraPose) -> np.ndarray:
    return pose.rotation[2].copy()


def lateral_axis(pose: CameraPose) -> np.ndarray:
    """Unit vector pointing to the ego's left, parallel to the ground."""
    left = np.cross(WORLD_UP, forward_axis(pose))
    norm = np.linalg.norm(left)
    if norm < 1e-9:
        raise InvalidInputError("camera looks straight up or down; lateral axis undefined")
    return left / norm


def shift_pose(pose: CameraPose, delta: np.ndarray) -> CameraPose:
    """Same orientation, camera center moved by `delta` (world meters)."""
    matrix = np.array(pose.world_to_cam)
    matrix[:3, 3] = -pose.rotation @ (pose.camera_center + np.asarray(delta, dtype=np.float64))
    return pose.with_world_to_cam(matrix)


def _looking(eye: np.ndarray, heading: np.ndarray, *, width: int, height: int, focal: float, t: float,
             look_ahead: float, pitch_drop: float) -> CameraPose:
    target = eye + look_ahead * heading - np.array([0.0, 0.0, pitch_drop])
    return CameraPose.look_at(eye, target, width=width, height=height, fx=focal, timestamp_index=t)


def straight_trajectory(start, direction, speed: float, num_frames: int, *, width: int = 128, height: int = 128,
                        focal: float = 110.0, look_ahead: float = 10.0, pitch_drop: float = 1.0) -> list[CameraPose]:
    heading = np.asarray(direction, dtype=np.float64)
    heading = heading / np.linalg.norm(heading)
    start = np.asarray(start, dtype=np.float64)
    return [
        _looking(start + speed * t * heading, heading, width=width, height=height, focal=focal, t=t,
                 look_ahead=look_ahead, pitch_drop=pitch_drop)
        for t in range(num_frames)
    ]


def lateral_offset_trajectory(poses: list[CameraPose], offset: float) -> list[CameraPose]:
    """Shift every pose sideways by `offset` meters (positive = left)."""
    return [shift_pose(pose, offset * lateral_axis(pose)) for pose in poses]


def turning_trajectory(center, radius: float, start_angle: float, angular_speed: float, num_frames: int, *,
                       eye_height: float = 1.5, width: int = 128, height: int = 128, focal: float = 110.0,
                       look_ahead: float = 10.0, pitch_drop: float = 1.0) -> list[CameraPose]:
    """Drive along a horizontal circle; positive angular_speed turns left."""
    center = np.asarray(center, dtype=np.float64)
    poses = []
    for t in range(num_frames):
        angle = start_angle + angular_speed * t
        eye = center + np.array([radius * np.cos(angle), radius * np.sin(angle), eye_height])
        heading = np.sign(angular_speed or 1.0) * np.array([-np.sin(angle), np.cos(angle), 0.0])
        poses.append(_looking(eye, heading, width=width, height=height, focal=focal, t=t,
                              look_ahead=look_ahead, pitch_drop=pitch_drop))
    return poses


def stopping_trajectory(start, direction, speed: float, stop_frame: int, num_frames: int, *, width: int = 128,
                        height: int = 128, focal: float = 110.0, look_ahead: float = 10.0,
                        pitch_drop: float = 1.0) -> list[CameraPose]:
    """Decelerate linearly from `speed` to rest at `stop_frame`, then hold position."""
    if stop_frame < 1:
        raise InvalidInputError(f"stop_frame must be >= 1, got {stop_frame}")
    heading = np.asarray(direction, dtype=np.float64)
    heading = heading / np.linalg.norm(heading)
    start = np.asarray(start, dtype=np.float64)
    poses, travelled = [], 0.0
    for t in range(num_frames):
        poses.append(_looking(start + travelled * heading, heading, width=width, height=height, focal=focal, t=t,
                              look_ahead=look_ahead, pitch_drop=pitch_drop))
        travelled += speed * max(0.0, 1.0 - (t + 0.5) / stop_frame)
    return poses


def retime(poses: list[CameraPose], times) -> list[CameraPose]:
    return [pose.with_time(t) for pose, t in zip(poses, times, strict=True)]
