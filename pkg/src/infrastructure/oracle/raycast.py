"""Analytic ray-primitive intersection and Lambert shading.

Shares no code with the splatting rasterizer: it is the ground truth the rasterizer is fitted to.
"""

from dataclasses import dataclass

import numpy as np

from core.exceptions import OracleGenerationError
from core.models import CameraPose
from infrastructure.oracle.spec import Albedo, BoxPrimitive, OracleSceneSpec, PlanePrimitive, SpherePrimitive

RAY_EPS = 1e-9
AMBIENT = 0.35
DIFFUSE = 0.65


@dataclass
class Hits:
    distance: np.ndarray
    normal: np.ndarray
    color: np.ndarray
    primitive: np.ndarray

    @classmethod
    def miss(cls, count: int) -> "Hits":
        return cls(np.full(count, np.inf), np.zeros((count, 3)), np.zeros((count, 3)), np.full(count, -1))

    def merge(self, distance: np.ndarray, normal: np.ndarray, color: np.ndarray, primitive: int) -> None:
        closer = distance < self.distance
        self.distance = np.where(closer, distance, self.distance)
        self.normal = np.where(closer[:, None], normal, self.normal)
        self.color = np.where(closer[:, None], color, self.color)
        self.primitive = np.where(closer, primitive, self.primitive)


@dataclass
class OracleRender:
    image: np.ndarray
    pointmap: np.ndarray
    primitive_ids: np.ndarray
    dyn_mask: np.ndarray


def _yaw_matrix(yaw: float) -> np.ndarray:
    c, s = np.cos(yaw), np.sin(yaw)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def checker(albedo: Albedo, local: np.ndarray) -> np.ndarray:
    base = np.broadcast_to(np.asarray(albedo.color, dtype=np.float64), local.shape[:-1] + (3,))
    if albedo.checker_color is None:
        return base.copy()
    cells = np.floor(local / albedo.checker_size).astype(np.int64).sum(axis=-1)
    odd = (cells % 2 == 1)[..., None]
    return np.where(odd, np.asarray(albedo.checker_color, dtype=np.float64), base)


def intersect_plane(plane: PlanePrimitive, origin: np.ndarray, dirs: np.ndarray):
    center = np.asarray(plane.center, dtype=np.float64)
    u = np.asarray(plane.axis_u, dtype=np.float64)
    u /= np.linalg.norm(u)
    v = np.asarray(plane.axis_v, dtype=np.float64)
    v -= u * (u @ v)
    v /= np.linalg.norm(v)
    normal = np.cross(u, v)
    denom = dirs @ normal
    parallel = np.abs(denom) < 1e-12
    t = ((center - origin) @ normal) / np.where(parallel, 1.0, denom)
    points = origin + t[:, None] * dirs
    a = (points - center) @ u
    b = (points - center) @ v
    inside = ~parallel & (t > RAY_EPS) & (np.abs(a) <= plane.half_size[0]) & (np.abs(b) <= plane.half_size[1])
    distance = np.where(inside, t, np.inf)
    color = checker(plane.albedo, np.stack([a, b], axis=-1))
    return distance, np.broadcast_to(normal, dirs.shape), color


def intersect_box(box: BoxPrimitive, center: np.ndarray, origin: np.ndarray, dirs: np.ndarray):
    rot = _yaw_matrix(box.yaw)
    half = 0.5 * np.asarray(box.size, dtype=np.float64)
    local_origin = rot.T @ (origin - center)
    local_dirs = dirs @ rot
    safe = np.where(np.abs(local_dirs) < 1e-15, 1e-15, local_dirs)
    t1 = (-half - local_origin) / safe
    t2 = (half - local_origin) / safe
    near = np.minimum(t1, t2)
    far = np.maximum(t1, t2)
    t_enter = near.max(axis=1)
    t_exit = far.min(axis=1)
    hit = (t_exit >= t_enter) & (t_enter > RAY_EPS)
    axis = near.argmax(axis=1)
    rows = np.arange(len(dirs))
    local_normal = np.zeros_like(local_dirs)
    local_normal[rows, axis] = -np.sign(safe[rows, axis])
    local_points = local_origin + t_enter[:, None] * local_dirs
    color = checker(box.albedo, local_points)
    return np.where(hit, t_enter, np.inf), local_normal @ rot.T, color


def intersect_sphere(sphere: SpherePrimitive, center: np.ndarray, origin: np.ndarray, dirs: np.ndarray):
    oc = origin - center
    b = dirs @ oc
    c = oc @ oc - sphere.radius ** 2
    disc = b * b - c
    root = np.sqrt(np.maximum(disc, 0.0))
    t = -b - root
    hit = (disc >= 0) & (t > RAY_EPS)
    points = origin + t[:, None] * dirs
    normal = (points - center) / sphere.radius
    color = checker(sphere.albedo, points - center)
    return np.where(hit, t, np.inf), normal, color


def _contains(shape, center: np.ndarray, point: np.ndarray) -> bool:
    if isinstance(shape, SpherePrimitive):
        return bool(np.linalg.norm(point - center) < shape.radius)
    if isinstance(shape, BoxPrimitive):
        local = _yaw_matrix(shape.yaw).T @ (point - center)
        return bool(np.all(np.abs(local) < 0.5 * np.asarray(shape.size)))
    return False


def pixel_rays(pose: CameraPose) -> tuple[np.ndarray, np.ndarray]:
    """Camera center and unit world-space ray directions through pixel centers (row-major)."""
    ys, xs = np.mgrid[0:pose.height, 0:pose.width].astype(np.float64)
    cam_dirs = np.stack([(xs - pose.cx) / pose.fx, (ys - pose.cy) / pose.fy, np.ones_like(xs)], axis=-1)
    world = cam_dirs.reshape(-1, 3) @ pose.rotation
    return pose.camera_center, world / np.linalg.norm(world, axis=1, keepdims=True)


def trace(spec: OracleSceneSpec, pose: CameraPose, t: float) -> OracleRender:
    """Shade every pixel of `pose` with the scene at time `t`."""
    origin, dirs = pixel_rays(pose)
    hits = Hits.miss(len(dirs))
    for i, prim in enumerate(spec.static):
        if isinstance(prim, PlanePrimitive):
            hits.merge(*intersect_plane(prim, origin, dirs), primitive=i)
        else:
            center = np.asarray(prim.center, dtype=np.float64)
            if _contains(prim, center, origin):
                raise OracleGenerationError(f"camera at {origin} is inside static primitive {i}")
            hits.merge(*intersect_box(prim, center, origin, dirs), primitive=i)
    offset = len(spec.static)
    for j, dyn in enumerate(spec.dynamic):
        center = dyn.center_at(t)
        if _contains(dyn.shape, center, origin):
            raise OracleGenerationError(f"camera at {origin} is inside dynamic primitive {j} at t={t}")
        if isinstance(dyn.shape, SpherePrimitive):
            hits.merge(*intersect_sphere(dyn.shape, center, origin, dirs), primitive=offset + j)
        else:
            hits.merge(*intersect_box(dyn.shape, center, origin, dirs), primitive=offset + j)

    light = np.asarray(spec.light_dir, dtype=np.float64)
    light /= np.linalg.norm(light)
    facing = np.where((np.sum(hits.normal * dirs, axis=1) > 0)[:, None], -hits.normal, hits.normal)
    shade = AMBIENT + DIFFUSE * np.maximum(facing @ light, 0.0)
    hit = np.isfinite(hits.distance)
    color = np.where(hit[:, None], hits.color * shade[:, None], np.asarray(spec.background, dtype=np.float64))
    distance = np.where(hit, hits.distance, 0.0)
    points = np.where(hit[:, None], origin + distance[:, None] * dirs, np.nan)

    shape = (pose.height, pose.width)
    ids = hits.primitive.reshape(shape)
    return OracleRender(
        image=np.clip(color, 0.0, 1.0).reshape(shape + (3,)),
        pointmap=points.reshape(shape + (3,)),
        primitive_ids=ids,
        dyn_mask=ids >= offset,
    )
