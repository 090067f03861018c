"""Options and error reporting shared by the run and solve commands."""

import json
import sys
from typing import Any, Dict, Optional

import click

from biflow.core.display import print_error


def run_options(command):
    """--threads, --out-dir, --seed and --tolerance-scale."""
    options = [
        click.option("--threads", type=int, default=None, help="Worker threads for independent jobs"),
        click.option("--out-dir", type=click.Path(file_okay=False), default=None, help="Root of run directories"),
        click.option("--seed", type=int, default=None, help="Override the config seed"),
        click.option(
            "--tolerance-scale", type=float, default=None, help="Multiply every tolerance (exploratory runs)"
        ),
    ]
    for option in reversed(options):
        command = option(command)
    return command


def overrides(threads: Optional[int], out_dir: Optional[str], seed: Optional[int], tolerance_scale: Optional[float]) -> Dict[str, Any]:
    return {"threads": threads, "output_dir": out_dir, "seed": seed, "tolerance_scale": tolerance_scale}


def fail(message: str, record: Dict[str, Any]) -> None:
    """Print the error, write its JSON record to stderr and exit with its code."""
    print_error(message, record.get("message"))
    click.echo(json.dumps(record, sort_keys=True), err=True)
    sys.exit(record.get("exit_code", 1))
