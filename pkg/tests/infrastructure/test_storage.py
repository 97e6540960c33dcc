"""Tests for scene files, PFM maps, bundle directories and trajectory files."""

import json
import shutil
import struct

import numpy as np
import pytest

from core.exceptions import (
    BundleValidationError,
    ConfigValidationError,
    InvalidInputError,
    SceneIntegrityError,
    UnsupportedVersionError,
)
from application.dynamics import create_deformation_field
from infrastructure.storage import (
    decode_scene,
    encode_scene,
    ingest_bundle,
    load_scene,
    load_trajectory,
    read_pfm,
    save_scene,
    save_trajectory,
    write_bundle,
    write_pfm,
)
from infrastructure.storage.crc64 import crc64
from infrastructure.storage.pfm import decode_pfm, encode_pfm, read_planar_pfm, write_planar_pfm
from tests.fixtures import make_gaussians, make_pose, make_scene


@pytest.fixture
def hybrid_scene(rng):
    """A scene with both blocks and a trained-looking deformation field."""
    static = make_gaussians(rng, 6)
    dynamic = make_gaussians(rng, 3)
    dynamic.ids = np.array([10, 11, 12])
    dynamic.dynamic_scores = np.array([0.9, 0.8, 0.95])
    field = create_deformation_field(np.zeros(3), 2.0, 5, rng, position_freqs=2, time_freqs=2,
                                     hidden_width=8, hidden_layers=2)
    field.params = {name: value + rng.normal(size=value.shape) for name, value in field.params.items()}
    scene = make_scene(static, dynamic, field)
    scene.metadata = {"seed": 3, "representation": "hybrid", "training_psnr": 27.5}
    return scene


class TestCrc64:
    def test_check_value(self):
        assert crc64(b"123456789") == 0x995DC9BBDF1939FA

    def test_incremental(self):
        assert crc64(b"456789", crc64(b"123")) == crc64(b"123456789")


class TestSceneFile:
    """Binary scene file round-trip and integrity checks."""

    def test_round_trip_is_byte_identical(self, hybrid_scene, tmp_path):
        path = save_scene(hybrid_scene, tmp_path / "scene.hspl")
        loaded = load_scene(path)
        assert encode_scene(loaded) == path.read_bytes()
        np.testing.assert_array_equal(loaded.dynamic_gaussians.ids, [10, 11, 12])
        np.testing.assert_array_equal(loaded.static_gaussians.sh_coeffs, hybrid_scene.static_gaussians.sh_coeffs)
        assert loaded.metadata == hybrid_scene.metadata
        for name, value in hybrid_scene.deformation.params.items():
            np.testing.assert_array_equal(loaded.deformation.params[name], value)
        assert loaded.deformation.spec == hybrid_scene.deformation.spec

    def test_static_only_scene_has_no_deformation_section(self, rng):
        data = encode_scene(make_scene(make_gaussians(rng, 4)))
        assert b"DEFM" not in data
        assert decode_scene(data).deformation is None

    def test_empty_scene_round_trip(self):
        from core.models import GaussianSet

        scene = make_scene(GaussianSet.empty(sh_degree=1, feature_dim=8))
        loaded = decode_scene(encode_scene(scene))
        assert loaded.num_gaussians == 0

    def test_truncated_file_rejected(self, hybrid_scene):
        data = encode_scene(hybrid_scene)
        with pytest.raises(SceneIntegrityError):
            decode_scene(data[: len(data) // 2])

    def test_flipped_byte_rejected(self, hybrid_scene):
        data = bytearray(encode_scene(hybrid_scene))
        data[len(data) // 2] ^= 0xFF
        with pytest.raises(SceneIntegrityError):
            decode_scene(bytes(data))

    def test_unknown_version_rejected(self, hybrid_scene):
        data = bytearray(encode_scene(hybrid_scene))
        data[4:8] = struct.pack("<I", 99)
        with pytest.raises(UnsupportedVersionError):
            decode_scene(bytes(data))

    def test_bad_magic_rejected(self, hybrid_scene):
        data = b"XXXX" + encode_scene(hybrid_scene)[4:]
        with pytest.raises(SceneIntegrityError):
            decode_scene(data)

    def test_missing_file_is_a_validation_error(self, tmp_path):
        with pytest.raises(InvalidInputError):
            load_scene(tmp_path / "absent.hspl")

    def test_invalid_scene_not_written(self, rng, tmp_path):
        scene = make_scene(make_gaussians(rng, 3), make_gaussians(rng, 2))
        with pytest.raises(SceneIntegrityError):
            save_scene(scene, tmp_path / "bad.hspl")
        assert not (tmp_path / "bad.hspl").exists()


class TestPfm:
    def test_three_channel_round_trip(self, rng):
        image = rng.normal(size=(5, 7, 3))
        image[2, 3] = np.nan
        decoded = decode_pfm(encode_pfm(image))
        np.testing.assert_array_equal(decoded, image.astype(np.float32).astype(np.float64))

    def test_single_channel_file(self, rng, tmp_path):
        image = rng.normal(size=(4, 6))
        write_pfm(tmp_path / "x.pfm", image)
        np.testing.assert_allclose(read_pfm(tmp_path / "x.pfm"), image, rtol=1e-6)

    def test_rows_stored_bottom_up(self):
        image = np.array([[1.0], [2.0]])
        data = encode_pfm(image)
        assert np.frombuffer(data[-8:], dtype="<f4").tolist() == [2.0, 1.0]

    def test_planar_round_trip(self, rng, tmp_path):
        planes = rng.normal(size=(3, 4, 5))
        write_planar_pfm(tmp_path / "f.pfm", planes)
        np.testing.assert_allclose(read_planar_pfm(tmp_path / "f.pfm", 5), planes, rtol=1e-6)

    def test_garbage_rejected(self):
        with pytest.raises(InvalidInputError):
            decode_pfm(b"P6\n1 1\n255\n\x00\x00\x00")


class TestBundleDirectory:
    """write_bundle / ingest_bundle on an oracle bundle."""

    def test_round_trip(self, static_bundle, tmp_path):
        write_bundle(static_bundle, tmp_path / "bundle")
        loaded = ingest_bundle(tmp_path / "bundle")
        assert len(loaded) == len(static_bundle)
        for original, frame in zip(static_bundle, loaded):
            assert frame.pose == original.pose
            np.testing.assert_allclose(frame.image, original.image, atol=0.5 / 255 + 1e-9)
            np.testing.assert_array_equal(frame.valid_mask, original.valid_mask)
            valid = original.valid_mask
            np.testing.assert_allclose(frame.pointmap[valid], original.pointmap[valid], rtol=1e-6, atol=1e-6)
            np.testing.assert_allclose(frame.featmap, original.featmap, rtol=1e-6, atol=1e-6)
            np.testing.assert_array_equal(frame.dyn_mask, original.dyn_mask)
        assert loaded.meta["fallback_features"] is False
        np.testing.assert_allclose(loaded.background, static_bundle.background)

    def test_missing_featmaps_fall_back(self, static_bundle, tmp_path):
        write_bundle(static_bundle, tmp_path / "bundle")
        shutil.rmtree(tmp_path / "bundle" / "featmaps")
        loaded = ingest_bundle(tmp_path / "bundle")
        assert loaded.meta["fallback_features"] is True
        assert loaded.feature_dim == static_bundle.feature_dim

    def test_missing_frame_rejected(self, static_bundle, tmp_path):
        write_bundle(static_bundle, tmp_path / "bundle")
        (tmp_path / "bundle" / "frames" / "0002.png").unlink()
        with pytest.raises(BundleValidationError):
            ingest_bundle(tmp_path / "bundle")

    def test_bad_pose_reports_frame(self, static_bundle, tmp_path):
        write_bundle(static_bundle, tmp_path / "bundle")
        poses_path = tmp_path / "bundle" / "poses.json"
        poses = json.loads(poses_path.read_text())
        poses[1]["fx"] = -1.0
        poses_path.write_text(json.dumps(poses))
        with pytest.raises(BundleValidationError) as excinfo:
            ingest_bundle(tmp_path / "bundle")
        assert excinfo.value.frame == 1

    def test_unknown_format_version(self, static_bundle, tmp_path):
        write_bundle(static_bundle, tmp_path / "bundle")
        meta_path = tmp_path / "bundle" / "meta.json"
        meta = json.loads(meta_path.read_text())
        meta["format_version"] = 42
        meta_path.write_text(json.dumps(meta))
        with pytest.raises(UnsupportedVersionError):
            ingest_bundle(tmp_path / "bundle")

    def test_missing_directory(self, tmp_path):
        with pytest.raises(BundleValidationError):
            ingest_bundle(tmp_path / "nowhere")


class TestTrajectoryFile:
    def test_round_trip(self, tmp_path):
        poses = [make_pose(t=i) for i in range(3)]
        save_trajectory(poses, tmp_path / "traj.json")
        assert load_trajectory(tmp_path / "traj.json") == poses

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigValidationError):
            load_trajectory(tmp_path / "none.json")

    def test_empty_array(self, tmp_path):
        (tmp_path / "traj.json").write_text("[]")
        with pytest.raises(ConfigValidationError):
            load_trajectory(tmp_path / "traj.json")

    def test_invalid_pose(self, tmp_path):
        entry = make_pose().to_dict()
        entry["world_to_cam"][0] = 3.0
        (tmp_path / "traj.json").write_text(json.dumps([entry]))
        with pytest.raises(ConfigValidationError):
            load_trajectory(tmp_path / "traj.json")
