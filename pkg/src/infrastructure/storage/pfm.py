"""Portable float map (PFM) reading and writing.

'PF' holds 3 channels, 'Pf' one. Scanlines are stored bottom-up; a negative scale marks
little-endian data. Values are 32-bit floats, NaN included.
"""

import re
from pathlib import Path

import numpy as np

from core.exceptions import InvalidInputError
from core.utils import atomic_write_bytes

_HEADER = re.compile(rb"^(PF|Pf)\s+(\d+)\s+(\d+)\s+(-?[0-9.eE+-]+)\s")


def encode_pfm(image: np.ndarray) -> bytes:
    image = np.asarray(image)
    if image.ndim == 3 and image.shape[2] == 3:
        tag = b"PF"
    elif image.ndim == 2:
        tag = b"Pf"
    else:
        raise InvalidInputError(f"PFM holds HxW or HxWx3 data, got shape {image.shape}")
    height, width = image.shape[:2]
    data = np.flipud(image).astype("<f4").tobytes()
    return tag + f"\n{width} {height}\n-1.0\n".encode("ascii") + data


def decode_pfm(buffer: bytes) -> np.ndarray:
    match = _HEADER.match(buffer)
    if match is None:
        raise InvalidInputError("not a PFM file")
    tag, width, height, scale = match.group(1), int(match.group(2)), int(match.group(3)), float(match.group(4))
    channels = 3 if tag == b"PF" else 1
    dtype = "<f4" if scale < 0 else ">f4"
    count = width * height * channels
    data = np.frombuffer(buffer, dtype=dtype, count=-1, offset=match.end())
    if data.size < count:
        raise InvalidInputError(f"PFM data truncated: expected {count} floats, found {data.size}")
    image = data[:count].reshape(height, width, channels) if channels == 3 else data[:count].reshape(height, width)
    return np.flipud(image).astype(np.float64)


def write_pfm(path: str | Path, image: np.ndarray) -> None:
    atomic_write_bytes(path, encode_pfm(image))


def read_pfm(path: str | Path) -> np.ndarray:
    return decode_pfm(Path(path).read_bytes())


def write_planar_pfm(path: str | Path, planes: np.ndarray) -> None:
    """Store an HxWxF map as one single-channel PFM of height F*H, plane 0 on top."""
    planes = np.asarray(planes)
    height, width, depth = planes.shape
    stacked = np.moveaxis(planes, -1, 0).reshape(depth * height, width)
    write_pfm(path, stacked)


def read_planar_pfm(path: str | Path, depth: int) -> np.ndarray:
    stacked = read_pfm(path)
    if stacked.ndim != 2 or stacked.shape[0] % depth:
        raise InvalidInputError(f"{path}: height {stacked.shape[0]} is not a multiple of {depth} planes")
    height = stacked.shape[0] // depth
    return np.moveaxis(stacked.reshape(depth, height, stacked.shape[1]), 0, -1)
