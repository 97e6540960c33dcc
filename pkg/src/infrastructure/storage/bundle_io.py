"""Reference bundle directory format.

    frames/%04d.png      8-bit RGB
    pointmaps/%04d.pfm   3-channel float32 world points, NaN = invalid
    featmaps/%04d.pfm    F planes stacked vertically in one single-channel PFM (optional)
    masks/%04d.png       0/255 dynamic mask (optional)
    poses.json           [{fx, fy, cx, cy, width, height, world_to_cam: 16 floats row-major, t}]
    meta.json            {format_version, feature_dim, scene_scale_hint, background, ...}

Camera convention: x-right, y-down, z-forward; world_to_cam maps world to camera coordinates.
"""

import json
from pathlib import Path

import numpy as np
from PIL import Image

from core.constants import BUNDLE_FORMAT_VERSION, DefaultValues
from core.exceptions import BundleValidationError, InvalidPoseError, UnsupportedVersionError
from core.models import CameraPose, Frame, ReferenceBundle
from core.utils import atomic_directory, logger
from infrastructure.oracle.features import fallback_features
from infrastructure.storage.pfm import read_pfm, read_planar_pfm, write_pfm, write_planar_pfm


def frame_name(index: int, suffix: str) -> str:
    return f"{index:04d}{suffix}"


def to_uint8(image: np.ndarray) -> np.ndarray:
    return np.clip(np.round(np.asarray(image) * 255.0), 0, 255).astype(np.uint8)


def write_png(path: Path, image: np.ndarray) -> None:
    Image.fromarray(to_uint8(image)).save(path, format="PNG")


def read_png_rgb(path: Path) -> np.ndarray:
    with Image.open(path) as img:
        return np.asarray(img.convert("RGB"), dtype=np.float64) / 255.0


def read_png_mask(path: Path) -> np.ndarray:
    with Image.open(path) as img:
        return np.asarray(img.convert("L")) >= 128


def write_bundle(bundle: ReferenceBundle, directory: str | Path) -> Path:
    """Write a bundle atomically: the target directory appears only once every file is written."""
    bundle.validate()
    directory = Path(directory)
    with atomic_directory(directory) as tmp:
        for sub in ("frames", "pointmaps", "featmaps"):
            (tmp / sub).mkdir()
        if bundle.has_masks:
            (tmp / "masks").mkdir()
        for i, frame in enumerate(bundle.frames):
            write_png(tmp / "frames" / frame_name(i, ".png"), frame.image)
            write_pfm(tmp / "pointmaps" / frame_name(i, ".pfm"), frame.pointmap)
            write_planar_pfm(tmp / "featmaps" / frame_name(i, ".pfm"), frame.featmap)
            if bundle.has_masks:
                write_png(tmp / "masks" / frame_name(i, ".png"), frame.dyn_mask.astype(np.float64))
        poses = [frame.pose.to_dict() for frame in bundle.frames]
        (tmp / "poses.json").write_text(json.dumps(poses, indent=2))
        meta = {
            **bundle.meta,
            "format_version": BUNDLE_FORMAT_VERSION,
            "feature_dim": bundle.feature_dim,
            "num_frames": len(bundle),
            "width": bundle.image_size[1],
            "height": bundle.image_size[0],
        }
        (tmp / "meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True))
    logger.info(f"Wrote bundle with {len(bundle)} frames to {directory}")
    return directory


def _load_json(path: Path):
    if not path.is_file():
        raise BundleValidationError(f"missing {path.name} in {path.parent}")
    try:
        return json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise BundleValidationError(f"{path.name} is not valid JSON: {e}") from e


def _require(path: Path, frame: int) -> Path:
    if not path.is_file():
        raise BundleValidationError(f"missing file {path.parent.name}/{path.name}", frame)
    return path


def ingest_bundle(directory: str | Path) -> ReferenceBundle:
    """Load and validate a bundle directory; any inconsistency raises BundleValidationError."""
    directory = Path(directory)
    if not directory.is_dir():
        raise BundleValidationError(f"bundle directory not found: {directory}")
    meta = _load_json(directory / "meta.json")
    version = meta.get("format_version", BUNDLE_FORMAT_VERSION)
    if version != BUNDLE_FORMAT_VERSION:
        raise UnsupportedVersionError(f"bundle format version {version} is not supported")
    pose_dicts = _load_json(directory / "poses.json")
    if not isinstance(pose_dicts, list) or not pose_dicts:
        raise BundleValidationError("poses.json must be a non-empty array")

    frame_files = sorted((directory / "frames").glob("*.png"))
    if len(frame_files) != len(pose_dicts):
        first_unmatched = min(len(frame_files), len(pose_dicts))
        raise BundleValidationError(
            f"{len(frame_files)} images but {len(pose_dicts)} poses", first_unmatched
        )

    feature_dim = int(meta.get("feature_dim", DefaultValues.FEATURE_DIM))
    has_featmaps = (directory / "featmaps").is_dir()
    has_masks = (directory / "masks").is_dir()
    if not has_featmaps:
        logger.warning(f"Bundle {directory} has no feature maps; computing fallback features from RGB")

    frames = []
    for i, pose_dict in enumerate(pose_dicts):
        try:
            pose = CameraPose.from_dict(pose_dict)
        except (KeyError, TypeError, ValueError) as e:
            if isinstance(e, InvalidPoseError):
                raise BundleValidationError(str(e), i) from e
            raise BundleValidationError(f"malformed pose entry: {e}", i) from e
        image_path = _require(directory / "frames" / frame_name(i, ".png"), i)
        image = read_png_rgb(image_path)
        pointmap = read_pfm(_require(directory / "pointmaps" / frame_name(i, ".pfm"), i))
        if pointmap.shape != image.shape:
            raise BundleValidationError(f"pointmap shape {pointmap.shape} != image shape {image.shape}", i)
        if np.any(np.isinf(pointmap)):
            raise BundleValidationError("pointmap contains infinite values", i)
        if has_featmaps:
            featmap = read_planar_pfm(_require(directory / "featmaps" / frame_name(i, ".pfm"), i), feature_dim)
        else:
            featmap = fallback_features(image, feature_dim)
        dyn_mask = read_png_mask(_require(directory / "masks" / frame_name(i, ".png"), i)) if has_masks else None
        frames.append(Frame(image=image, pose=pose, pointmap=pointmap, featmap=featmap, dyn_mask=dyn_mask))

    meta = dict(meta)
    meta["fallback_features"] = not has_featmaps
    bundle = ReferenceBundle(frames, meta).validate()
    logger.info(f"Ingested bundle {directory}: {len(bundle)} frames, {bundle.image_size[1]}x{bundle.image_size[0]}, F={feature_dim}")
    return bundle
