"""Unit tests for settings, pipeline configs and report files."""

import json
from pathlib import Path

import pytest
from pydantic import ValidationError

from apps.core.config import Settings
from apps.core.errors import InputError
from apps.core.schemas import BaseSource, FlipTarget, PipelineConfig, Route, RunReport, Side
from apps.services.storage import ReportStorage, dump_report, load_pipeline_config

pytestmark = pytest.mark.unit

CONFIGS = Path(__file__).resolve().parents[2] / "apps" / "services" / "configs"


class TestSettings:
    def test_threads_must_be_positive(self):
        with pytest.raises(ValidationError):
            Settings(threads=0)

    def test_refinement_must_be_known(self):
        with pytest.raises(ValidationError):
            Settings(refinement="cubical")

    def test_environment_override(self, monkeypatch):
        monkeypatch.setenv("THREADS", "3")
        assert Settings().threads == 3


class TestPipelineConfig:
    def test_defaults(self):
        cfg = PipelineConfig()
        assert cfg.base.preset == "quintic"
        assert cfg.sides == [Side.F, Side.FDUAL]
        assert cfg.routes == [Route.DIRECT, Route.LES]

    def test_square_needs_a_form(self):
        with pytest.raises(ValidationError):
            PipelineConfig(routes=["square"])
        with pytest.raises(ValidationError):
            PipelineConfig(routes=["square"], forms={"fdual": "quintic"})
        cfg = PipelineConfig(sides=["fdual"], routes=["square"], forms={"fdual": "quintic"})
        assert cfg.form_for(Side.FDUAL) == "quintic"

    def test_duplicates_dropped(self):
        cfg = PipelineConfig(sides=["fdual", "f", "fdual"])
        assert cfg.sides == [Side.FDUAL, Side.F]
        with pytest.raises(ValidationError):
            PipelineConfig(routes=[])

    def test_base_path_wins_over_preset(self):
        assert BaseSource(path="base.json").preset is None
        with pytest.raises(ValidationError):
            BaseSource(preset=None)

    def test_flip_target_is_normalized(self):
        target = FlipTarget(face=[2, 0, 1], edge=[8, 7])
        assert target.face == [0, 1, 2] and target.edge == [7, 8]
        with pytest.raises(ValidationError):
            FlipTarget(face=[0, 0, 1], edge=[7, 8])

    @pytest.mark.parametrize("name", ["quintic_default", "quintic_square", "flip_default"])
    def test_bundled_configs_load(self, name):
        cfg = load_pipeline_config(CONFIGS / f"{name}.yaml")
        assert cfg.base.preset == "quintic"

    def test_bundled_flip_script(self):
        cfg = load_pipeline_config(CONFIGS / "flip_default.yaml")
        assert [t.edge for t in cfg.flips] == [[7, 8], [9, 14], [15, 16]]

    def test_bad_files(self, tmp_path):
        with pytest.raises(InputError):
            load_pipeline_config(tmp_path / "missing.yaml")
        broken = tmp_path / "broken.yaml"
        broken.write_text("sides: [f\n")
        with pytest.raises(InputError):
            load_pipeline_config(broken)
        invalid = tmp_path / "invalid.json"
        invalid.write_text(json.dumps({"refinement": "cubical"}))
        with pytest.raises(InputError):
            load_pipeline_config(invalid)


class TestReports:
    def test_dump_is_canonical(self):
        report = RunReport(config=PipelineConfig(), timings={"run": 1.5})
        text = dump_report(report)
        assert text == dump_report(RunReport(config=PipelineConfig(), timings={"run": 9.0}))
        assert "timings" not in json.loads(text)
        assert dump_report({"b": 1, "a": 2}).index('"a"') < dump_report({"b": 1, "a": 2}).index('"b"')

    def test_storage_writes_reports(self, tmp_path):
        storage = ReportStorage(tmp_path / "out")
        path = storage.write("run", {"agreement": True})
        assert path == tmp_path / "out" / "run.json"
        assert json.loads(path.read_text()) == {"agreement": True}
        timings = storage.write_timings({"les": 0.12345})
        assert json.loads(timings.read_text()) == {"les": 0.123}
        assert storage.matrices_dir().is_dir()


def test_cli_imports_are_declared():
    manifest = (Path(__file__).resolve().parents[2] / "pyproject.toml").read_text()
    cli = (Path(__file__).resolve().parents[2] / "apps" / "cli.py").read_text()
    for package in ("typer", "click"):
        assert f"import {package}" in cli
        assert f'"{package}>=' in manifest
