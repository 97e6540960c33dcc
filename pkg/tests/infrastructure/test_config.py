"""Tests for the pipeline config document and runtime settings."""

import json

import pytest

from core.exceptions import ConfigValidationError
from infrastructure.config import PipelineConfig, load_config, settings, splatting_preset
from infrastructure.config.settings import RuntimeSettings


class TestPipelineConfig:
    """Defaults and validation of the JSON config."""

    def test_defaults(self):
        config = PipelineConfig()
        assert config.representation == "hybrid"
        assert config.iterations.prepass == 3000
        assert config.iterations.score_field == 500
        assert config.learning_rates.position == pytest.approx(1.6e-4)
        assert config.decomposition.tau == 0.5
        assert config.decomposition.min_points == 8
        assert config.loss.l1 == 1.0 and config.loss.ssim == 1.0
        assert config.planning.ego_size == (4.0, 2.0, 1.5)
        assert config.holdout_frames == []

    def test_holdout_sorted_and_unique(self):
        assert PipelineConfig(holdout_frames=[7, 3, 7, 11]).holdout_frames == [3, 7, 11]

    def test_negative_holdout_rejected(self):
        with pytest.raises(ValueError):
            PipelineConfig(holdout_frames=[-1])

    def test_unknown_key_rejected(self):
        with pytest.raises(ValueError):
            PipelineConfig.model_validate({"iterations": {"prepass": 10, "warmup": 5}})

    def test_invalid_assignment_rejected(self):
        config = PipelineConfig()
        with pytest.raises(ValueError):
            config.sh_degree = 4

    def test_splatting_preset(self):
        weights = splatting_preset()
        assert (weights.l1, weights.ssim) == (0.8, 0.2)


class TestLoadConfig:
    def test_none_gives_defaults(self):
        assert load_config(None) == PipelineConfig()

    def test_partial_document(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text(json.dumps({"seed": 4, "iterations": {"hybrid": 20}, "representation": "all_static"}))
        config = load_config(path)
        assert config.seed == 4
        assert config.iterations.hybrid == 20
        assert config.iterations.prepass == 3000
        assert config.representation == "all_static"

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigValidationError):
            load_config(tmp_path / "absent.json")

    def test_bad_json(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text("{seed: 1")
        with pytest.raises(ConfigValidationError):
            load_config(path)

    def test_invalid_value(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text(json.dumps({"representation": "all_dynamic"}))
        with pytest.raises(ConfigValidationError):
            load_config(path)


def test_threads_from_environment(monkeypatch):
    monkeypatch.setenv("HYBRIDSPLAT_THREADS", "3")
    assert RuntimeSettings().threads == 3


def test_render_settings_defaults():
    assert settings.render.tile_size == 16
    assert settings.render.footprint_sigma == 3.0
    assert settings.render.termination_transmittance == pytest.approx(1 / 255)
