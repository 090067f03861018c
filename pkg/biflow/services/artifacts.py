"""Run directories and the files written into them."""

from datetime import datetime, timezone
import json
import logging
from pathlib import Path
from typing import List, Optional, Union

from biflow.core.config import RunConfig
from biflow.core.result import ExperimentResult
from biflow.norms.trajectory import Trajectory
from biflow.solver.diagnostics import SolveDiagnostics
from biflow.spectral.snapshot import write_snapshot

logger = logging.getLogger(__name__)

RESULT_FILE = "result.json"
DIAGNOSTICS_FILE = "diagnostics.json"
CONFIG_FILE = "config.json"


def run_directory(config: RunConfig, out_dir: Optional[Union[str, Path]] = None, now: Optional[datetime] = None) -> Path:
    """Create `<out_dir>/<UTC timestamp>-<config hash>`."""
    now = now or datetime.now(timezone.utc)
    root = Path(out_dir if out_dir is not None else config.output_dir)
    path = root / f"{now.strftime('%Y%m%dT%H%M%SZ')}-{config.config_hash()}"
    path.mkdir(parents=True, exist_ok=True)
    with open(path / CONFIG_FILE, "w", encoding="utf-8") as f:
        f.write(json.dumps(config.echo(), indent=2, sort_keys=True) + "\n")
    logger.debug("Run directory %s", path)
    return path


def write_result(run_dir: Path, result: ExperimentResult) -> List[Path]:
    """result.json plus one CSV per series group."""
    path = run_dir / RESULT_FILE
    with open(path, "w", encoding="utf-8") as f:
        f.write(result.to_json() + "\n")
    return [path] + result.write_csvs(run_dir)


def write_solve(run_dir: Path, trajectory: Trajectory, diagnostics: SolveDiagnostics) -> List[Path]:
    """u_XXXX.bifl for every node and diagnostics.json with the node times."""
    written = []
    for j, field in enumerate(trajectory.fields):
        path = run_dir / f"u_{j:04d}.bifl"
        write_snapshot(field, path)
        written.append(path)
    record = diagnostics.to_dict()
    record["times"] = [float(t) for t in trajectory.times]
    path = run_dir / DIAGNOSTICS_FILE
    with open(path, "w", encoding="utf-8") as f:
        f.write(json.dumps(record, indent=2, sort_keys=True, default=str) + "\n")
    written.append(path)
    return written
