"""Ready-made oracle scenes for tests and demos (z-up world, meters)."""


from infrastructure.oracle.spec import (
    Albedo,
    BoxPrimitive,
    DynamicPrimitive,
    JitterSpec,
    LinearMotion,
    OracleSceneSpec,
    PlanePrimitive,
    SpherePrimitive,
    ViewSpec,
)


def _room() -> list:
    return [
        PlanePrimitive(center=(0.0, 1.5, 0.0), axis_u=(1.0, 0.0, 0.0), axis_v=(0.0, 1.0, 0.0), half_size=(3.0, 4.0),
                       albedo=Albedo(color=(0.55, 0.55, 0.5), checker_color=(0.35, 0.35, 0.3), checker_size=0.5)),
        PlanePrimitive(center=(0.0, 5.5, 1.25), axis_u=(1.0, 0.0, 0.0), axis_v=(0.0, 0.0, 1.0), half_size=(3.0, 1.25),
                       albedo=Albedo(color=(0.75, 0.5, 0.4), checker_color=(0.55, 0.3, 0.25), checker_size=0.6)),
        PlanePrimitive(center=(-3.0, 1.5, 1.25), axis_u=(0.0, 1.0, 0.0), axis_v=(0.0, 0.0, 1.0), half_size=(4.0, 1.25),
                       albedo=Albedo(color=(0.4, 0.5, 0.7), checker_color=(0.25, 0.3, 0.5), checker_size=0.6)),
        BoxPrimitive(center=(-1.3, 2.8, 0.4), size=(0.8, 0.8, 0.8), yaw=0.4,
                     albedo=Albedo(color=(0.8, 0.7, 0.2), checker_color=(0.6, 0.5, 0.1), checker_size=0.25)),
        BoxPrimitive(center=(1.4, 3.6, 0.5), size=(0.7, 1.0, 1.0), yaw=-0.3,
                     albedo=Albedo(color=(0.3, 0.7, 0.35), checker_color=(0.2, 0.5, 0.25), checker_size=0.25)),
    ]


def _sweep_views(num_frames: int) -> list[ViewSpec]:
    views = []
    for t in range(num_frames):
        eye = (-0.4 + 0.035 * t, -2.5 + 0.06 * t, 1.3)
        views.append(ViewSpec(eye=eye, target=(0.0, 4.0, 0.5)))
    return views


def static_scene_spec(num_frames: int = 24, size: int = 128, jitter: JitterSpec | None = None) -> OracleSceneSpec:
    """Three planes and two boxes seen from a slowly advancing camera."""
    return OracleSceneSpec(width=size, height=size, focal=110.0 * size / 128, static=_room(),
                           trajectory=_sweep_views(num_frames), jitter=jitter or JitterSpec())


def moving_sphere_spec(num_frames: int = 24, size: int = 128, speed: float = 0.1,
                       jitter: JitterSpec | None = None) -> OracleSceneSpec:
    """The static room plus one sphere rolling along +x at `speed` m/frame."""
    sphere = DynamicPrimitive(
        shape=SpherePrimitive(center=(-1.0, 1.0, 0.35), radius=0.35,
                              albedo=Albedo(color=(0.9, 0.2, 0.2), checker_color=(0.95, 0.85, 0.8), checker_size=0.2)),
        motion=LinearMotion(velocity=(speed, 0.0, 0.0)),
    )
    return OracleSceneSpec(width=size, height=size, focal=110.0 * size / 128, static=_room(), dynamic=[sphere],
                           trajectory=_sweep_views(num_frames), jitter=jitter or JitterSpec())


def _road(length: float) -> PlanePrimitive:
    return PlanePrimitive(center=(0.0, length / 2, 0.0), axis_u=(1.0, 0.0, 0.0), axis_v=(0.0, 1.0, 0.0),
                          half_size=(8.0, length / 2 + 2.0),
                          albedo=Albedo(color=(0.4, 0.4, 0.42), checker_color=(0.3, 0.3, 0.32), checker_size=1.0))


def _drive_views(num_frames: int, speed: float, eye_height: float = 1.5) -> list[ViewSpec]:
    return [ViewSpec(eye=(0.0, speed * t, eye_height), target=(0.0, speed * t + 10.0, eye_height - 1.0))
            for t in range(num_frames)]


def wall_spec(num_frames: int = 12, size: int = 96) -> OracleSceneSpec:
    """A wall across the ego lane at y = 8; the camera stops short of it."""
    wall = BoxPrimitive(center=(0.0, 8.0, 1.0), size=(3.0, 0.4, 2.0),
                        albedo=Albedo(color=(0.8, 0.8, 0.75), checker_color=(0.6, 0.6, 0.55), checker_size=0.4))
    return OracleSceneSpec(width=size, height=size, focal=80.0 * size / 96, static=[_road(20.0), wall],
                           trajectory=_drive_views(num_frames, speed=0.4))


def crossing_obstacle_spec(num_frames: int = 10, size: int = 96, crossing_frame: int = 5,
                           ego_speed: float = 0.5, obstacle_speed: float = 0.8) -> OracleSceneSpec:
    """A box crossing the ego lane from the left; it sits on the lane center at `crossing_frame`."""
    lane_y = ego_speed * crossing_frame
    start_x = -obstacle_speed * crossing_frame
    obstacle = DynamicPrimitive(
        shape=BoxPrimitive(center=(start_x, lane_y, 0.45), size=(0.9, 0.9, 0.9),
                           albedo=Albedo(color=(0.2, 0.4, 0.9), checker_color=(0.1, 0.2, 0.6), checker_size=0.3)),
        motion=LinearMotion(velocity=(obstacle_speed, 0.0, 0.0)),
    )
    return OracleSceneSpec(width=size, height=size, focal=80.0 * size / 96, static=[_road(20.0)],
                           dynamic=[obstacle], trajectory=_drive_views(num_frames, speed=ego_speed))


def fronto_parallel_sphere_spec(num_frames: int = 6, size: int = 64, speed: float = 0.1) -> OracleSceneSpec:
    """Fixed camera facing +y; a sphere moves along +x in front of a back wall."""
    wall = PlanePrimitive(center=(0.0, 4.0, 0.0), axis_u=(1.0, 0.0, 0.0), axis_v=(0.0, 0.0, 1.0), half_size=(4.0, 4.0),
                          albedo=Albedo(color=(0.6, 0.6, 0.6), checker_color=(0.4, 0.4, 0.4), checker_size=0.5))
    sphere = DynamicPrimitive(shape=SpherePrimitive(center=(-0.3, 2.0, 0.0), radius=0.3,
                                                    albedo=Albedo(color=(0.9, 0.3, 0.2))),
                              motion=LinearMotion(velocity=(speed, 0.0, 0.0)))
    views = [ViewSpec(eye=(0.0, 0.0, 0.0), target=(0.0, 1.0, 0.0)) for _ in range(num_frames)]
    return OracleSceneSpec(width=size, height=size, focal=float(size), static=[wall], dynamic=[sphere],
                           trajectory=views)


PRESETS = {
    "static": static_scene_spec,
    "moving_sphere": moving_sphere_spec,
    "wall": wall_spec,
    "crossing": crossing_obstacle_spec,
}


def views_from_poses(poses) -> list[ViewSpec]:
    return [ViewSpec(eye=tuple(pose.camera_center), target=tuple(pose.camera_center + pose.rotation[2]))
            for pose in poses]


__all__ = ["PRESETS", "crossing_obstacle_spec", "fronto_parallel_sphere_spec", "moving_sphere_spec",
           "static_scene_spec", "views_from_poses", "wall_spec"]
