from typing import Any, Dict, Optional

from biflow.core.config import RunConfig, parse_run_config
from biflow.core.enums import ExitCode, Termination, Verdict
from biflow.core.errors import BiflowError, BlowupError, ConfigurationError
from biflow.experiments.registry import run_experiment
from biflow.norms.summary import field_norm_summary
from biflow.services.artifacts import run_directory, write_result, write_solve
from biflow.services.initial_data import make_initial_data
from biflow.solver.diagnostics import SolveDiagnostics
from biflow.solver.etd import etd_solve
from biflow.solver.nonlinearity import Nonlinearity
from biflow.solver.picard import picard_solve
from biflow.spectral.snapshot import read_snapshot
from biflow.utils import load_config_file

SOLVE_METHODS = ("picard", "etd")


class RunService:

    def load(self, config_path: str, overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
        """Parse and validate a config file, CLI overrides applied first.

        Raises:
            ConfigurationError: If the file cannot be parsed or validated
        """
        return parse_run_config(load_config_file(config_path), overrides)

    def run(self, config: RunConfig) -> Dict[str, Any]:
        """Run the named experiment, or a bare solve when none is named."""
        if not config.experiment:
            return self.solve(config)
        try:
            result = run_experiment(config)
            run_dir = run_directory(config)
            files = write_result(run_dir, result)
        except BiflowError as e:
            return self._create_error_response("run", e)

        exit_code = ExitCode.EXPERIMENT_FAILED if result.verdict == Verdict.FAIL else ExitCode.OK
        return {
            "success": result.verdict != Verdict.FAIL,
            "message": f"{result.name}: {result.verdict.value}",
            "result": result,
            "run_dir": str(run_dir),
            "files": [str(p) for p in files],
            "exit_code": int(exit_code),
            "error": None,
        }

    def solve(self, config: RunConfig) -> Dict[str, Any]:
        """Solve from the configured initial data and store every node as a snapshot."""
        run_dir = None
        try:
            params = dict(config.params)
            method = params.pop("method", "picard")
            T = float(params.pop("T", config.solver.horizon))
            if params:
                raise ConfigurationError(f"unknown solve params: {', '.join(sorted(params))}; known: T, method")
            if method not in SOLVE_METHODS:
                raise ConfigurationError(f"solve method must be one of {SOLVE_METHODS}, got '{method}'")
            if config.initial_data is None:
                raise ConfigurationError("solve needs an initial_data block")

            grid = config.grid.to_grid()
            u0 = make_initial_data(config.initial_data, grid, config.seed)
            nl = config.nonlinearity
            nonlinearity = Nonlinearity.from_config(nl.kind, sigma=nl.sigma, p=nl.p)
            cfg = config.solver.to_solver_config()
            trajectory, diagnostics = self._solve(u0, T, nonlinearity, cfg, method)

            run_dir = run_directory(config)
            files = write_solve(run_dir, trajectory, diagnostics)
            diagnostics.raise_for_termination()
        except BiflowError as e:
            response = self._create_error_response("solve", e)
            if run_dir is not None:
                response["run_dir"] = str(run_dir)
            return response

        return {
            "success": True,
            "message": f"solve converged in {diagnostics.iterations} iteration(s)",
            "diagnostics": diagnostics,
            "run_dir": str(run_dir),
            "files": [str(p) for p in files],
            "exit_code": int(ExitCode.OK),
            "error": None,
        }

    def norms(self, snapshot_path: str, R: Optional[float] = None, stride: int = 4) -> Dict[str, Any]:
        """Norm report for a stored field."""
        try:
            field = read_snapshot(snapshot_path)
            summary = field_norm_summary(field, R, stride)
        except BiflowError as e:
            return self._create_error_response("norms", e)
        return {
            "success": True,
            "summary": summary,
            "grid": field.grid.to_dict(),
            "exit_code": int(ExitCode.OK),
            "error": None,
        }

    def _solve(self, u0, T, nonlinearity, cfg, method):
        if method == "picard":
            return picard_solve(u0, T, nonlinearity, cfg)
        diagnostics = SolveDiagnostics(metadata={"T": T, "method": "etd", "nonlinearity": nonlinearity.to_dict()})
        try:
            trajectory = etd_solve(u0, T, nonlinearity, cfg)
        except BlowupError as e:
            diagnostics.finish(Termination.BLOWUP, blowup_time=e.time)
            return e.trajectory, diagnostics
        diagnostics.finish(Termination.CONVERGED)
        return trajectory, diagnostics

    def _create_error_response(self, operation: str, error: BiflowError) -> Dict[str, Any]:
        """Create standardized error response."""
        return {
            "success": False,
            "message": f"Failed to {operation}",
            "error": error.to_dict(),
            "exit_code": int(error.exit_code),
        }
