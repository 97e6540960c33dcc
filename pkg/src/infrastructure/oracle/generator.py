"""Synthetic reference bundles with ground-truth dynamic masks."""

from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy.ndimage import gaussian_filter, map_coordinates
from scipy.spatial.transform import Rotation
from tqdm import tqdm

from core.models import CameraPose, Frame, ReferenceBundle
from core.utils import logger
from infrastructure.config.settings import settings
from infrastructure.oracle.features import oracle_features
from infrastructure.oracle.raycast import OracleRender, trace
from infrastructure.oracle.spec import JitterSpec, OracleSceneSpec

WARP_SMOOTHING = 4.0


def render_ground_truth(spec: OracleSceneSpec, pose: CameraPose, t: float | None = None) -> OracleRender:
    """Noise-free oracle render of any pose; `t` defaults to the pose's timestamp."""
    return trace(spec, pose, pose.timestamp_index if t is None else t)


def _rigid_jitter(jitter: JitterSpec, rng: np.random.Generator) -> np.ndarray:
    perturb = np.eye(4)
    perturb[:3, :3] = Rotation.from_rotvec(rng.normal(0.0, jitter.sigma_rot, size=3)).as_matrix()
    perturb[:3, 3] = rng.normal(0.0, jitter.sigma_trans, size=3)
    return perturb


def _warp_field(jitter: JitterSpec, shape: tuple[int, int], rng: np.random.Generator) -> np.ndarray:
    noise = rng.normal(size=(2,) + shape)
    smooth = np.stack([gaussian_filter(n, WARP_SMOOTHING, mode="wrap") for n in noise])
    scale = smooth.std()
    return smooth * (jitter.sigma_px / scale if scale > 0 else 0.0)


def _warp(values: np.ndarray, coords: np.ndarray, order: int) -> np.ndarray:
    if values.ndim == 2:
        return map_coordinates(values, coords, order=order, mode="nearest")
    return np.stack([map_coordinates(values[..., c], coords, order=order, mode="nearest")
                     for c in range(values.shape[-1])], axis=-1)


def _render_frame(spec: OracleSceneSpec, frame: int, seed: int) -> Frame:
    pose = spec.pose(frame)
    nominal = trace(spec, pose, frame)
    observed = nominal
    jitter = spec.jitter
    if not jitter.is_identity:
        rng = np.random.default_rng([seed, frame])
        if jitter.mode == "rigid":
            perturb = _rigid_jitter(jitter, rng)
            shown = pose.with_world_to_cam(perturb @ pose.world_to_cam)
            observed = trace(spec, shown, frame)
            # Points seen from the perturbed camera, re-expressed as if seen from the stated pose.
            to_stated = pose.cam_to_world @ perturb @ pose.world_to_cam
            pts = observed.pointmap.reshape(-1, 3)
            moved = pts @ to_stated[:3, :3].T + to_stated[:3, 3]
            observed = OracleRender(observed.image, moved.reshape(observed.pointmap.shape),
                                    observed.primitive_ids, observed.dyn_mask)
        else:
            field = _warp_field(jitter, (pose.height, pose.width), rng)
            ys, xs = np.mgrid[0:pose.height, 0:pose.width].astype(np.float64)
            coords = np.stack([ys + field[0], xs + field[1]])
            observed = OracleRender(
                image=np.clip(_warp(nominal.image, coords, order=1), 0.0, 1.0),
                pointmap=_warp(nominal.pointmap, coords, order=0),
                primitive_ids=_warp(nominal.primitive_ids, coords, order=0),
                dyn_mask=nominal.dyn_mask,
            )
    features = oracle_features(observed.image, observed.primitive_ids, spec.num_primitives, spec.feature_dim)
    return Frame(
        image=observed.image,
        pose=pose,
        pointmap=observed.pointmap,
        featmap=features,
        dyn_mask=nominal.dyn_mask.copy(),
    )


def scene_scale_hint(pointmap: np.ndarray) -> float:
    points = pointmap[np.all(np.isfinite(pointmap), axis=-1)]
    if not len(points):
        return 1.0
    return float(np.median(np.linalg.norm(points - points.mean(axis=0), axis=1)))


def generate_bundle(spec: OracleSceneSpec, seed: int = 0, threads: int | None = None) -> ReferenceBundle:
    """Render every frame of `spec`; frame i draws its jitter from a generator seeded with (seed, i)."""
    threads = threads or settings.runtime.threads
    indices = range(spec.num_frames)
    progress = dict(total=spec.num_frames, desc="oracle frames", disable=not settings.runtime.progress)
    if threads <= 1:
        frames = [_render_frame(spec, i, seed) for i in tqdm(indices, **progress)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            frames = list(tqdm(executor.map(lambda i: _render_frame(spec, i, seed), indices), **progress))
    meta = {
        "source": "oracle",
        "seed": seed,
        "background": list(spec.background),
        "scene_scale_hint": scene_scale_hint(frames[0].pointmap),
        "jitter": spec.jitter.model_dump(),
        "num_primitives": spec.num_primitives,
        "fallback_features": False,
    }
    bundle = ReferenceBundle(frames, meta).validate()
    logger.info(f"Generated oracle bundle: {spec.num_frames} frames, {spec.width}x{spec.height}, "
                f"{len(spec.static)} static and {len(spec.dynamic)} dynamic primitives")
    return bundle
