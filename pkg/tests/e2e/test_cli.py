"""End-to-end tests of the command-line interface."""

import json

import pytest

from apps.cli import app
from apps.core.schemas import FlipExperimentReport, LESReport, RunReport

QUIET = ["--log-level", "CRITICAL"]


def invoke(runner, *args):
    return runner.invoke(app, [*QUIET, *args])


def payload(result):
    text = result.stdout
    data, _ = json.JSONDecoder().raw_decode(text[text.index("{"):])
    return data


def test_euler(cli_runner):
    result = invoke(cli_runner, "mono", "euler")
    assert result.exit_code == 0
    data = payload(result)
    assert data["euler_characteristic"] == -200
    assert (data["positive"], data["negative"]) == (50, 250)


def test_base_build_writes_file(cli_runner, tmp_path):
    target = tmp_path / "quintic.json"
    result = invoke(cli_runner, "--out", str(tmp_path / "out"), "base", "build", "--output", str(target))
    assert result.exit_code == 0
    data = payload(result)
    assert data["polytope_cells"] == {"0": 5, "1": 10, "2": 10, "3": 5}
    assert target.exists()
    assert (tmp_path / "out" / "base.json").exists()


def test_base_validate_passes_on_quintic(cli_runner):
    result = invoke(cli_runner, "base", "validate", "--base", "quintic")
    assert result.exit_code == 0
    data = payload(result)
    assert data["passed"] is True
    assert {c["name"] for c in data["checks"] if c["passed"]} >= {"simplicity", "transvection", "euler"}


def test_mono_table_summary(cli_runner):
    result = invoke(cli_runner, "--summary", "mono", "table")
    assert result.exit_code == 0
    assert "T'_12,1: (23)(47)" in result.stdout
    assert "T'_34,4: (17)(35)" in result.stdout


def test_negative_edge_components(cli_runner):
    result = invoke(cli_runner, "mono", "components", "--scope", "negative-edge", "--edge", "(7, 8)")
    assert result.exit_code == 0
    assert payload(result)["torus_components"] == 1


def test_constant_sheaf(cli_runner):
    result = invoke(cli_runner, "cohomology", "--sheaf", "const")
    assert result.exit_code == 0
    data = payload(result)
    assert data["dims"] == [1, 0, 0, 1]
    assert data["refinement"] == "dual"


@pytest.mark.parametrize(
    "form, kernel, delta, h1",
    [("quintic", 0, 0, 101), ("cube4", 1, 1, 102)],
)
def test_square(cli_runner, form, kernel, delta, h1):
    result = invoke(
        cli_runner,
        "square",
        "--form", form,
        "--report",
        "--side", "fdual",
        "--h1-base", "101",
        "--mirror-simply-connected",
        "--rank-one-torsion-free",
    )
    assert result.exit_code == 0
    data = payload(result)
    assert (data["kernel"], data["delta"]) == (kernel, delta)
    assert data["betti"]["betti"] == [2, h1, h1, 2]


class TestInputErrors:
    def test_missing_form(self, cli_runner, monkeypatch):
        monkeypatch.setattr("apps.cli.settings.form_path", None)
        assert invoke(cli_runner, "square").exit_code == 4

    def test_unknown_form_file(self, cli_runner, tmp_path):
        assert invoke(cli_runner, "square", "--form", str(tmp_path / "nope.yaml")).exit_code == 4

    def test_square_without_hypotheses(self, cli_runner):
        result = invoke(cli_runner, "square", "--form", "quintic", "--report", "--h1-base", "101")
        assert result.exit_code == 4

    def test_boundary_flip(self, cli_runner):
        assert invoke(cli_runner, "base", "flip", "--face", "0,1,2", "--edge", "0,1").exit_code == 4

    def test_malformed_edge(self, cli_runner):
        assert invoke(cli_runner, "base", "flip", "--face", "0,1,2", "--edge", "7").exit_code == 4

    def test_threads_must_be_positive(self, cli_runner):
        assert invoke(cli_runner, "--threads", "0", "mono", "euler").exit_code == 4

    def test_unknown_config(self, cli_runner):
        assert invoke(cli_runner, "run", "--config", "no_such_config").exit_code == 4


def test_seed_reaches_the_sequence_checks(cli_runner, monkeypatch):
    seen = []

    def fake_les(base, side, refinement, threads=1, check_splitting=True, seed=0, samples=4):
        seen.append(seed)
        return LESReport(
            side=side,
            refinement=refinement,
            dims={},
            beta_ranks=[],
            beta_shape=[0, 0],
            beta_rank=0,
            beta_kernel=0,
            betti=[2, 29, 29, 2],
        )

    monkeypatch.setattr("apps.cli.assemble_les", fake_les)
    assert invoke(cli_runner, "--seed", "7", "les").exit_code == 0
    monkeypatch.setattr("apps.cli.settings.seed", 5)
    assert invoke(cli_runner, "les").exit_code == 0
    assert seen == [7, 5]


def test_disagreement_exits_with_two(cli_runner, monkeypatch):
    def disagree(self, base=None):
        return RunReport(config=self.config, agreement=False)

    monkeypatch.setattr("apps.cli.PipelineRunner.run", disagree)
    result = invoke(cli_runner, "run")
    assert result.exit_code == 2
    assert payload(result)["agreement"] is False


def test_changed_h1_exits_with_three(cli_runner, monkeypatch):
    report = FlipExperimentReport.model_validate(
        {
            "steps": [{"step": 0, "h1": {"fdual": 101}}, {"step": 1, "h1": {"fdual": 100}}],
            "invariant": {"fdual": False},
            "asserted_sides": ["fdual"],
        }
    )
    monkeypatch.setattr("apps.cli.flip_experiment", lambda cfg, show_progress=None: report)
    assert invoke(cli_runner, "flip-experiment").exit_code == 3


@pytest.mark.slow
def test_run_writes_reports(cli_runner, tmp_path):
    result = invoke(cli_runner, "--out", str(tmp_path), "--summary", "run")
    assert result.exit_code == 0
    assert "agreement: pass" in result.stdout
    saved = json.loads((tmp_path / "run.json").read_text())
    assert saved["agreement"] is True
    assert "base" in json.loads((tmp_path / "timings.json").read_text())


@pytest.mark.slow
def test_flip_experiment(cli_runner, tmp_path):
    result = invoke(cli_runner, "--no-progress", "--out", str(tmp_path), "flip-experiment")
    assert result.exit_code == 0
    data = json.loads((tmp_path / "flip_experiment.json").read_text())
    assert data["invariant"]["fdual"] is True
