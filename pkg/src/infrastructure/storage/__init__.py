from .bundle_io import ingest_bundle, write_bundle
from .pfm import read_pfm, write_pfm
from .scene_io import decode_scene, encode_scene, load_scene, save_scene
from .trajectory_io import dump_trajectory, load_trajectory, save_trajectory

__all__ = [
    "decode_scene",
    "dump_trajectory",
    "encode_scene",
    "ingest_bundle",
    "load_scene",
    "load_trajectory",
    "read_pfm",
    "save_scene",
    "save_trajectory",
    "write_bundle",
    "write_pfm",
]
