"""Tests for logging, error-handling decorators and atomic writes."""

import logging

import pytest

from core.exceptions import ConfigValidationError, PipelineStageError, TrainingDivergedError
from core.utils import (
    EXIT_OK,
    EXIT_RUNTIME_ERROR,
    EXIT_VALIDATION_ERROR,
    atomic_directory,
    atomic_outputs,
    atomic_write_text,
    handle_command_errors,
    handle_stage_errors,
    log_stage,
)


def test_log_stage_formats_metrics(caplog):
    with caplog.at_level(logging.INFO, logger="hybridsplat"):
        line = log_stage("prepass", loss=0.0123456789, gaussians=4096)
    assert line == "stage=prepass loss=0.0123457 gaussians=4096"
    assert line in caplog.text


class TestStageErrors:
    """handle_stage_errors keeps domain errors and wraps the rest."""

    def test_domain_error_passes_through(self):
        @handle_stage_errors("hybrid")
        def stage():
            raise TrainingDivergedError("loss is nan", iteration=12)

        with pytest.raises(TrainingDivergedError) as excinfo:
            stage()
        assert excinfo.value.iteration == 12

    def test_unexpected_error_is_wrapped(self):
        @handle_stage_errors("score_field")
        def stage():
            raise KeyError("boom")

        with pytest.raises(PipelineStageError) as excinfo:
            stage()
        assert excinfo.value.stage == "score_field"
        assert isinstance(excinfo.value.cause, KeyError)

    def test_return_value_kept(self):
        @handle_stage_errors("noop")
        def stage(x):
            return x * 2

        assert stage(21) == 42


class TestCommandErrors:
    """handle_command_errors maps outcomes to exit codes."""

    def test_success(self):
        assert handle_command_errors(lambda: None)() == EXIT_OK

    def test_validation_error(self):
        def command():
            raise ConfigValidationError("bad")

        assert handle_command_errors(command)() == EXIT_VALIDATION_ERROR

    def test_runtime_error(self):
        def command():
            raise RuntimeError("bad")

        assert handle_command_errors(command)() == EXIT_RUNTIME_ERROR


class TestAtomicWrites:
    """Outputs appear whole or not at all."""

    def test_write_text_creates_parents(self, tmp_path):
        target = tmp_path / "nested" / "out.json"
        atomic_write_text(target, "{}")
        assert target.read_text() == "{}"
        assert [p.name for p in target.parent.iterdir()] == ["out.json"]

    def test_directory_replaced_on_success(self, tmp_path):
        target = tmp_path / "frames"
        target.mkdir()
        (target / "stale.png").write_bytes(b"x")
        with atomic_directory(target) as tmp:
            (tmp / "0000.png").write_bytes(b"y")
        assert sorted(p.name for p in target.iterdir()) == ["0000.png"]

    def test_directory_untouched_on_failure(self, tmp_path):
        target = tmp_path / "frames"
        with pytest.raises(RuntimeError):
            with atomic_directory(target) as tmp:
                (tmp / "0000.png").write_bytes(b"y")
                raise RuntimeError("render failed")
        assert not target.exists()
        assert list(tmp_path.iterdir()) == []

    def test_outputs_move_in_together(self, tmp_path):
        scene, metrics = tmp_path / "out" / "scene.hspl", tmp_path / "out" / "scene.metrics.json"
        with atomic_outputs() as stage:
            stage(scene).write_bytes(b"HSPL")
            stage(metrics).write_text("{}")
            assert not scene.exists()
        assert scene.read_bytes() == b"HSPL"
        assert sorted(p.name for p in scene.parent.iterdir()) == ["scene.hspl", "scene.metrics.json"]

    def test_outputs_discarded_when_a_later_write_fails(self, tmp_path):
        scene = tmp_path / "scene.hspl"
        with pytest.raises(OSError):
            with atomic_outputs() as stage:
                stage(scene).write_bytes(b"HSPL")
                stage(tmp_path / "scene.metrics.json")
                raise OSError("disk full")
        assert list(tmp_path.iterdir()) == []

    def test_existing_outputs_kept_on_failure(self, tmp_path):
        scene = tmp_path / "scene.hspl"
        scene.write_bytes(b"old")
        with pytest.raises(RuntimeError):
            with atomic_outputs() as stage:
                stage(scene).write_bytes(b"new")
                raise RuntimeError("sidecar failed")
        assert scene.read_bytes() == b"old"
        assert [p.name for p in tmp_path.iterdir()] == ["scene.hspl"]
