import json
from types import SimpleNamespace

import pytest

from eigendesign.controllers import ArtifactFiles, ExperimentService
from eigendesign.exceptions import EXIT_CHECK_FAILED, EXIT_ERROR
from eigendesign.main import main
from eigendesign.routes import build_parser, dispatch
from eigendesign.schemas import KreinReport, KreinResponse, ResponseParams, RunConfig

SMALL_RUN = """
domain = square
n_per_side = 4
max_iter = 3
element = P1
heatmap_resolution = 64
"""


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "small.cfg"
    path.write_text(SMALL_RUN, encoding="utf-8")
    return path


def _last_json(capsys) -> dict:
    lines = [line for line in capsys.readouterr().out.splitlines() if line.startswith("{")]
    return json.loads(lines[-1])


def test_parser_accepts_documented_flags():
    args = build_parser().parse_args(["run", "--preset", "fig2a", "--config", "a.cfg", "--out", "x", "-v"])
    assert (args.command, args.preset, args.config, args.out, args.verbose) == ("run", "fig2a", "a.cfg", "x", True)
    args = build_parser().parse_args(["pencil-suite", "--seed", "7", "--trials", "10"])
    assert (args.seed, args.trials) == (7, 10)
    args = build_parser().parse_args(["export", "runs/a"])
    assert args.run_dir == "runs/a"


def test_run_writes_artifacts(config_file, tmp_path, capsys):
    out = tmp_path / "run"
    assert main(["run", "--config", str(config_file), "--out", str(out), "-q"]) == 0

    response = _last_json(capsys)
    assert response["id"] == "eigendesign.run"
    assert response["params"]["status"] == "SUCCESS"
    assert response["result"]["iterations"] == 3
    for name in ("density_vtk", "density_csv", "eigenfunction_vtk", "history_csv", "heatmap", "initial_heatmap", "mesh_vtk", "run_config"):
        assert (out / response["result"]["artifacts"][name].split("/")[-1]).exists()
    stored = RunConfig.model_validate_json((out / ArtifactFiles.RUN_CONFIG).read_text())
    assert stored.out_dir == str(out)


def test_run_is_deterministic(config_file, tmp_path):
    for name in ("first", "second"):
        assert main(["run", "--config", str(config_file), "--out", str(tmp_path / name), "-q"]) == 0
    first = (tmp_path / "first" / ArtifactFiles.HISTORY_CSV).read_bytes()
    assert first == (tmp_path / "second" / ArtifactFiles.HISTORY_CSV).read_bytes()
    assert (tmp_path / "first" / ArtifactFiles.DENSITY_CSV).read_bytes() == (tmp_path / "second" / ArtifactFiles.DENSITY_CSV).read_bytes()


def test_export_regenerates_heatmaps(config_file, tmp_path, capsys):
    out = tmp_path / "run"
    assert main(["run", "--config", str(config_file), "--out", str(out), "-q"]) == 0
    original = (out / ArtifactFiles.HEATMAP).read_bytes()
    (out / ArtifactFiles.HEATMAP).unlink()
    (out / ArtifactFiles.INITIAL_HEATMAP).unlink()
    capsys.readouterr()

    assert main(["export", str(out), "-q"]) == 0
    response = _last_json(capsys)
    assert response["id"] == "eigendesign.export"
    assert (out / ArtifactFiles.HEATMAP).read_bytes() == original
    assert (out / ArtifactFiles.INITIAL_HEATMAP).exists()


def test_export_of_missing_run(tmp_path, capsys):
    assert main(["export", str(tmp_path / "nothing"), "-q"]) == EXIT_ERROR
    response = _last_json(capsys)
    assert response["params"]["status"] == "FAILED"
    assert response["responseCode"] == "IO_FAILED"


def test_invalid_config_fails_with_line(tmp_path, capsys):
    path = tmp_path / "bad.cfg"
    path.write_text("max_iter = 3\nstepsize = -1\n", encoding="utf-8")
    assert main(["run", "--config", str(path), "-q"]) == EXIT_ERROR
    response = _last_json(capsys)
    assert response["responseCode"] == "INVALID_CONFIG"
    assert response["params"]["errmsg"].startswith("line 2:")
    assert response["result"] is None


def test_unknown_preset_fails(capsys):
    assert main(["run", "--preset", "fig9z", "-q"]) == EXIT_ERROR
    assert _last_json(capsys)["responseCode"] == "INVALID_CONFIG"


def test_verify_krein_reports_both_variants(tmp_path):
    config = RunConfig(n_boundary=24, max_iter=4, element="P1", heatmap_resolution=64, out_dir=str(tmp_path))
    report = ExperimentService().verify_krein(config, threshold=1.0).result
    assert [c.variant.value for c in report.checks] == ["min_denominator_only", "max_denominator_only"]
    assert report.passed
    assert (tmp_path / "min_denominator_only" / ArtifactFiles.DENSITY_CSV).exists()
    strict = ExperimentService().verify_krein(config, threshold=0.0).result
    assert not strict.passed


class FailingKrein(ExperimentService):
    def verify_krein(self, config, threshold=0.05):
        return KreinResponse(
            id="eigendesign.verify_krein",
            params=ResponseParams(status="SUCCESS"),
            responseCode="OK",
            result=KreinReport(threshold=threshold, checks=[], passed=False),
        )


def test_failed_check_sets_exit_code():
    args = SimpleNamespace(command="verify-krein", config=None, preset=None, out=None)
    response, exit_code = dispatch(args, FailingKrein())
    assert exit_code == EXIT_CHECK_FAILED
    assert response.result.passed is False


def test_pencil_suite_service_writes_trials(tmp_path):
    from eigendesign.pencil import PencilSuite

    suite = PencilSuite(seed=3, trials=10, n_extreme=1, n_stationary=1, n_starts=4, grid_density=101, ascent_iterations=1000)
    response = ExperimentService().pencil_suite(3, 10, tmp_path, suite=suite)
    lines = (tmp_path / ArtifactFiles.PENCIL_TRIALS).read_text().splitlines()
    assert lines[0] == "pencil,trial,lambda_low,lambda_high,margin,status"
    assert len(lines) == 1 + 10 * 12
    assert response.result.trials_csv.endswith(ArtifactFiles.PENCIL_TRIALS)


@pytest.mark.slow
def test_pencil_suite_command(tmp_path, capsys):
    assert main(["pencil-suite", "--trials", "1000", "--seed", "42", "--out", str(tmp_path), "-q"]) == 0
    assert "violations: 0" in capsys.readouterr().out.splitlines()


@pytest.mark.slow
def test_verify_krein_command(tmp_path, capsys):
    assert main(["verify-krein", "--out", str(tmp_path), "-q"]) == 0
    report = _last_json(capsys)["result"]
    assert all(check["mismatch_fraction"] <= 0.05 for check in report["checks"])
