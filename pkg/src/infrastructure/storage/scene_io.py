"""HSPL scene files.

Layout (little-endian):
    magic "HSPL" | u32 version | u32 section count
    per section: 4-byte tag | u64 payload length | payload
    u64 CRC-64 of every preceding byte

Sections: STAT and DYNA (Gaussian sets), DEFM (deformation network, present iff the scene has
one), META (sorted-key JSON).
"""

import io
import json
import struct
from pathlib import Path

import numpy as np

from core.constants import SCENE_FILE_MAGIC, SCENE_FILE_VERSION
from core.exceptions import InvalidInputError, SceneIntegrityError, UnsupportedVersionError
from core.models import DeformationField, GaussianSet, HybridScene, MlpSpec
from core.utils import atomic_write_bytes, logger
from infrastructure.storage.crc64 import crc64

_HEADER = struct.Struct("<4sII")
_SECTION = struct.Struct("<4sQ")
_CRC = struct.Struct("<Q")
_GAUSSIAN_COUNTS = struct.Struct("<III")
_GAUSSIAN_ARRAYS = ("positions", "rotations", "log_scales", "opacity_logits", "sh_coeffs", "features", "dynamic_scores")


def _encode_gaussians(gaussians: GaussianSet) -> bytes:
    buffer = io.BytesIO()
    buffer.write(_GAUSSIAN_COUNTS.pack(len(gaussians), gaussians.sh_coeffs.shape[1], gaussians.feature_dim))
    for name in _GAUSSIAN_ARRAYS:
        buffer.write(np.ascontiguousarray(getattr(gaussians, name), dtype="<f8").tobytes())
    buffer.write(np.ascontiguousarray(gaussians.ids, dtype="<i8").tobytes())
    return buffer.getvalue()


class _Reader:
    def __init__(self, payload: bytes, what: str):
        self.payload = payload
        self.offset = 0
        self.what = what

    def take(self, size: int) -> bytes:
        if self.offset + size > len(self.payload):
            raise SceneIntegrityError(f"{self.what} section is truncated")
        chunk = self.payload[self.offset:self.offset + size]
        self.offset += size
        return chunk

    def array(self, shape: tuple[int, ...], dtype: str = "<f8") -> np.ndarray:
        count = int(np.prod(shape))
        raw = self.take(count * 8)
        return np.frombuffer(raw, dtype=dtype).astype(np.int64 if dtype == "<i8" else np.float64).reshape(shape)

    def finish(self) -> None:
        if self.offset != len(self.payload):
            raise SceneIntegrityError(f"{self.what} section has {len(self.payload) - self.offset} trailing bytes")


def _decode_gaussians(payload: bytes, what: str) -> GaussianSet:
    reader = _Reader(payload, what)
    n, k, f = _GAUSSIAN_COUNTS.unpack(reader.take(_GAUSSIAN_COUNTS.size))
    shapes = {
        "positions": (n, 3), "rotations": (n, 4), "log_scales": (n, 3), "opacity_logits": (n,),
        "sh_coeffs": (n, k, 3), "features": (n, f), "dynamic_scores": (n,),
    }
    arrays = {name: reader.array(shapes[name]) for name in _GAUSSIAN_ARRAYS}
    arrays["ids"] = reader.array((n,), "<i8")
    reader.finish()
    return GaussianSet(**arrays)


def _encode_deformation(field: DeformationField) -> bytes:
    names = sorted(field.params)
    header = {
        "spec": field.spec.model_dump(mode="json"),
        "scene_scale": field.scene_scale,
        "num_frames": field.num_frames,
        "position_freqs": field.position_freqs,
        "time_freqs": field.time_freqs,
        "metadata": field.metadata,
        "params": [[name, list(field.params[name].shape)] for name in names],
    }
    blob = json.dumps(header, sort_keys=True).encode("utf-8")
    buffer = io.BytesIO()
    buffer.write(struct.pack("<I", len(blob)))
    buffer.write(blob)
    buffer.write(np.ascontiguousarray(field.center, dtype="<f8").tobytes())
    for name in names:
        buffer.write(np.ascontiguousarray(field.params[name], dtype="<f8").tobytes())
    return buffer.getvalue()


def _decode_deformation(payload: bytes) -> DeformationField:
    reader = _Reader(payload, "DEFM")
    (length,) = struct.unpack("<I", reader.take(4))
    try:
        header = json.loads(reader.take(length).decode("utf-8"))
        spec = MlpSpec.model_validate(header["spec"])
    except (ValueError, KeyError) as e:
        raise SceneIntegrityError(f"DEFM header is malformed: {e}") from e
    center = reader.array((3,))
    params = {name: reader.array(tuple(shape)) for name, shape in header["params"]}
    reader.finish()
    return DeformationField(
        spec=spec,
        params=params,
        center=center,
        scene_scale=header["scene_scale"],
        num_frames=header["num_frames"],
        position_freqs=header["position_freqs"],
        time_freqs=header["time_freqs"],
        metadata=header.get("metadata", {}),
    )


def _encode_meta(scene: HybridScene) -> bytes:
    meta = {
        "time_range": [scene.time_range[0], scene.time_range[1]],
        "scene_scale": scene.scene_scale,
        "scene_center": [float(v) for v in scene.scene_center],
        "metadata": scene.metadata,
    }
    return json.dumps(meta, sort_keys=True).encode("utf-8")


def encode_scene(scene: HybridScene) -> bytes:
    try:
        scene.validate()
    except InvalidInputError as e:
        raise SceneIntegrityError(f"refusing to save an invalid scene: {e}") from e
    sections = [(b"STAT", _encode_gaussians(scene.static_gaussians)),
                (b"DYNA", _encode_gaussians(scene.dynamic_gaussians))]
    if scene.deformation is not None:
        sections.append((b"DEFM", _encode_deformation(scene.deformation)))
    sections.append((b"META", _encode_meta(scene)))

    buffer = io.BytesIO()
    buffer.write(_HEADER.pack(SCENE_FILE_MAGIC, SCENE_FILE_VERSION, len(sections)))
    for tag, payload in sections:
        buffer.write(_SECTION.pack(tag, len(payload)))
        buffer.write(payload)
    body = buffer.getvalue()
    return body + _CRC.pack(crc64(body))


def decode_scene(data: bytes) -> HybridScene:
    if len(data) < _HEADER.size + _CRC.size:
        raise SceneIntegrityError("scene file is truncated")
    magic, version, count = _HEADER.unpack_from(data)
    if magic != SCENE_FILE_MAGIC:
        raise SceneIntegrityError(f"bad magic {magic!r}")
    if version != SCENE_FILE_VERSION:
        raise UnsupportedVersionError(f"scene file version {version} is not supported (expected {SCENE_FILE_VERSION})")
    body, (stored_crc,) = data[:-_CRC.size], _CRC.unpack(data[-_CRC.size:])
    if crc64(body) != stored_crc:
        raise SceneIntegrityError("checksum mismatch: file is corrupt or truncated")

    sections = {}
    offset = _HEADER.size
    for _ in range(count):
        if offset + _SECTION.size > len(body):
            raise SceneIntegrityError("section table is truncated")
        tag, length = _SECTION.unpack_from(body, offset)
        offset += _SECTION.size
        if offset + length > len(body):
            raise SceneIntegrityError(f"section {tag!r} is truncated")
        if tag in sections:
            raise SceneIntegrityError(f"duplicate section {tag!r}")
        sections[tag] = body[offset:offset + length]
        offset += length
    if offset != len(body):
        raise SceneIntegrityError("unexpected bytes after the last section")
    missing = {b"STAT", b"DYNA", b"META"} - set(sections)
    if missing:
        raise SceneIntegrityError(f"missing sections: {sorted(m.decode() for m in missing)}")
    unknown = set(sections) - {b"STAT", b"DYNA", b"DEFM", b"META"}
    if unknown:
        raise SceneIntegrityError(f"unknown sections: {sorted(u.decode(errors='replace') for u in unknown)}")

    meta = json.loads(sections[b"META"].decode("utf-8"))
    scene = HybridScene(
        static_gaussians=_decode_gaussians(sections[b"STAT"], "STAT"),
        dynamic_gaussians=_decode_gaussians(sections[b"DYNA"], "DYNA"),
        deformation=_decode_deformation(sections[b"DEFM"]) if b"DEFM" in sections else None,
        time_range=(meta["time_range"][0], meta["time_range"][1]),
        scene_scale=meta["scene_scale"],
        scene_center=np.asarray(meta["scene_center"], dtype=np.float64),
        metadata=meta.get("metadata", {}),
    )
    try:
        return scene.validate()
    except InvalidInputError as e:
        raise SceneIntegrityError(f"scene file violates scene invariants: {e}") from e


def save_scene(scene: HybridScene, path: str | Path) -> Path:
    path = Path(path)
    data = encode_scene(scene)
    atomic_write_bytes(path, data)
    logger.info(f"Saved scene to {path}: {len(scene.static_gaussians)} static, "
                f"{len(scene.dynamic_gaussians)} dynamic Gaussians, {len(data)} bytes")
    return path


def load_scene(path: str | Path) -> HybridScene:
    path = Path(path)
    if not path.is_file():
        raise InvalidInputError(f"scene file not found: {path}")
    return decode_scene(path.read_bytes())
