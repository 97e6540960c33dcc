from .generator import generate_bundle, render_ground_truth
from .presets import PRESETS, crossing_obstacle_spec, fronto_parallel_sphere_spec, moving_sphere_spec, static_scene_spec, wall_spec
from .spec import JitterSpec, OracleSceneSpec, load_oracle_spec
from .trajectories import (
    lateral_axis,
    lateral_offset_trajectory,
    shift_pose,
    stopping_trajectory,
    straight_trajectory,
    turning_trajectory,
)

__all__ = [
    "PRESETS",
    "JitterSpec",
    "OracleSceneSpec",
    "crossing_obstacle_spec",
    "fronto_parallel_sphere_spec",
    "generate_bundle",
    "lateral_axis",
    "lateral_offset_trajectory",
    "load_oracle_spec",
    "moving_sphere_spec",
    "render_ground_truth",
    "shift_pose",
    "static_scene_spec",
    "stopping_trajectory",
    "straight_trajectory",
    "turning_trajectory",
    "wall_spec",
]
