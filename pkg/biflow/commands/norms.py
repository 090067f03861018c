"""Norms command"""

import json

import click

from biflow.commands.common import fail
from biflow.core.display import print_norm_table
from biflow.services.run_service import RunService


@click.command(help="Norm report for a stored snapshot")
@click.argument("snapshot_path", type=click.Path())
@click.option("--R", "radius", type=float, default=None, help="Largest ball radius (default: box/4)")
@click.option("--stride", type=int, default=4, show_default=True, help="Center stride")
@click.option("--json", "as_json", is_flag=True, help="Print the report as JSON")
def norms(snapshot_path: str, radius, stride: int, as_json: bool):
    """Oscillation BMO, Carleson BMO_R, Morrey norm and energy of a field."""
    response = RunService().norms(snapshot_path, radius, stride)
    if response.get("error"):
        fail(response["message"], response["error"])

    summary = response["summary"]
    if as_json:
        click.echo(json.dumps(summary, indent=2, sort_keys=True))
        return
    rows = {k: v for k, v in summary.items() if k != "witnesses"}
    print_norm_table(f"Norms of {snapshot_path}", rows)
