import json
from pathlib import Path
from unittest.mock import patch

from biflow.core.config import parse_run_config
from biflow.core.result import Check, ExperimentResult
from biflow.services.run_service import RunService
from biflow.spectral.field import Field
from biflow.spectral.grid import make_grid
from biflow.spectral.snapshot import write_snapshot


def _solve_config(tmp_path, **params):
    return parse_run_config(
        {
            "grid": {"dim": 1, "points_per_axis": 64},
            "initial_data": {"generator": "single_mode", "params": {"amplitude": 0.01}},
            "solver": {"time_nodes": 16, "max_picard_iters": 20, "etd_record": 16, "horizon": 0.1},
            "params": params,
            "output_dir": str(tmp_path),
        }
    )


class TestRunService:
    """Test the service behind the run, solve and norms commands."""

    def test_run_experiment(self, tmp_path):
        """A passing experiment writes its artifacts and exits 0."""
        config = parse_run_config(
            {"experiment": "static-residual", "params": {"points": 400}, "output_dir": str(tmp_path)}
        )

        response = RunService().run(config)

        assert response["success"] is True  # nosec: B101
        assert response["exit_code"] == 0  # nosec: B101
        names = {Path(p).name for p in response["files"]}
        assert names == {"result.json", "static-residual-profiles.csv"}  # nosec: B101
        assert (Path(response["run_dir"]) / "config.json").exists()  # nosec: B101

    def test_failed_experiment_exit_code(self, tmp_path):
        """A failing verdict maps to exit code 2."""
        config = parse_run_config({"experiment": "static-residual", "output_dir": str(tmp_path)})
        failing = ExperimentResult("static-residual", checks=[Check.at_most("residual", 2.0, 1.0)])

        with patch("biflow.services.run_service.run_experiment", return_value=failing):
            response = RunService().run(config)

        assert response["success"] is False  # nosec: B101
        assert response["exit_code"] == 2  # nosec: B101
        stored = json.loads((Path(response["run_dir"]) / "result.json").read_text())
        assert stored["verdict"] == "fail"  # nosec: B101

    def test_run_error_response(self, tmp_path):
        """Configuration problems inside an experiment become error responses."""
        config = parse_run_config(
            {"experiment": "static-residual", "params": {"bogus": 1}, "output_dir": str(tmp_path)}
        )

        response = RunService().run(config)

        assert response["success"] is False  # nosec: B101
        assert response["exit_code"] == 3  # nosec: B101
        assert response["error"]["error"] == "ConfigurationError"  # nosec: B101

    def test_run_without_experiment_solves(self, tmp_path):
        """A config without an experiment falls back to a bare solve."""
        with patch.object(RunService, "solve", return_value={"exit_code": 0}) as solve:
            RunService().run(_solve_config(tmp_path))

        solve.assert_called_once()

    def test_solve_writes_snapshots(self, tmp_path):
        """Every node is stored together with the diagnostics."""
        response = RunService().solve(_solve_config(tmp_path))

        assert response["success"] is True  # nosec: B101
        run_dir = Path(response["run_dir"])
        diagnostics = json.loads((run_dir / "diagnostics.json").read_text())
        snapshots = sorted(run_dir.glob("u_*.bifl"))
        assert len(snapshots) == len(diagnostics["times"])  # nosec: B101
        assert snapshots[0].name == "u_0000.bifl"  # nosec: B101
        assert diagnostics["termination"] == "converged"  # nosec: B101

    def test_solve_with_etd(self, tmp_path):
        """The exponential integrator is selected through params."""
        response = RunService().solve(_solve_config(tmp_path, method="etd", T=0.01))

        assert response["success"] is True  # nosec: B101
        assert response["diagnostics"].metadata["method"] == "etd"  # nosec: B101

    def test_solve_rejects_unknown_params(self, tmp_path):
        """Only T and method are accepted."""
        response = RunService().solve(_solve_config(tmp_path, steps=10))

        assert response["exit_code"] == 3  # nosec: B101
        assert "unknown solve params" in response["error"]["message"]  # nosec: B101

    def test_solve_rejects_unknown_method(self, tmp_path):
        """Unknown methods are configuration errors."""
        response = RunService().solve(_solve_config(tmp_path, method="euler"))

        assert response["exit_code"] == 3  # nosec: B101

    def test_solve_needs_initial_data(self, tmp_path):
        """A bare solve without initial data is refused."""
        config = parse_run_config({"output_dir": str(tmp_path)})

        response = RunService().solve(config)

        assert response["exit_code"] == 3  # nosec: B101
        assert "initial_data" in response["error"]["message"]  # nosec: B101

    def test_norms(self, tmp_path, rng):
        """The norm report of a stored field."""
        path = tmp_path / "u.bifl"
        write_snapshot(Field(make_grid(1, 64, 8.0), rng.standard_normal(64)), path)

        response = RunService().norms(str(path))

        assert response["success"] is True  # nosec: B101
        assert response["summary"]["R"] == 2.0  # nosec: B101
        assert response["grid"]["points_per_axis"] == 64  # nosec: B101

    def test_norms_missing_file(self, tmp_path):
        """A missing snapshot is a configuration error."""
        response = RunService().norms(str(tmp_path / "missing.bifl"))

        assert response["success"] is False  # nosec: B101
        assert response["exit_code"] == 3  # nosec: B101
