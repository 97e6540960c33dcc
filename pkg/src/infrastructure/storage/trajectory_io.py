"""Trajectory files: a JSON array of pose objects, each carrying its timestep `t`."""

import json
from pathlib import Path

from core.exceptions import ConfigValidationError, InvalidPoseError
from core.models import CameraPose
from core.utils import atomic_write_text


def dump_trajectory(poses: list[CameraPose]) -> str:
    return json.dumps([pose.to_dict() for pose in poses], indent=2)


def save_trajectory(poses: list[CameraPose], path: str | Path) -> None:
    atomic_write_text(path, dump_trajectory(poses))


def load_trajectory(path: str | Path) -> list[CameraPose]:
    try:
        entries = json.loads(Path(path).read_text())
    except FileNotFoundError as e:
        raise ConfigValidationError(f"trajectory file not found: {path}") from e
    except json.JSONDecodeError as e:
        raise ConfigValidationError(f"trajectory {path} is not valid JSON: {e}") from e
    if not isinstance(entries, list) or not entries:
        raise ConfigValidationError(f"trajectory {path} must be a non-empty JSON array")
    poses = []
    for i, entry in enumerate(entries):
        try:
            poses.append(CameraPose.from_dict(entry))
        except InvalidPoseError as e:
            raise ConfigValidationError(f"trajectory {path}, step {i}: {e}") from e
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigValidationError(f"trajectory {path}, step {i}: malformed pose ({e})") from e
    return poses
