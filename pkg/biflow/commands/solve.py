"""Solve command"""

import sys

import click
from halo import Halo

from biflow.commands.common import fail, overrides, run_options
from biflow.core.display import print_diagnostics_table, print_info, print_success
from biflow.core.errors import BiflowError
from biflow.services.run_service import RunService


@click.command(help="Solve from the configured initial data and store snapshots")
@click.argument("config_path", type=click.Path())
@run_options
def solve(config_path: str, threads, out_dir, seed, tolerance_scale):
    """Bare solve; any experiment named in the config is ignored."""
    service = RunService()
    try:
        config = service.load(config_path, overrides(threads, out_dir, seed, tolerance_scale))
    except BiflowError as e:
        fail("Invalid configuration", e.to_dict())

    spinner = Halo(text="Solving", spinner="dots", stream=sys.stderr)
    spinner.start()
    response = service.solve(config)
    spinner.stop()

    if response.get("error"):
        if response.get("run_dir"):
            print_info(f"Partial artifacts written to {response['run_dir']}")
        fail(response["message"], response["error"])

    diagnostics = response["diagnostics"]
    if diagnostics.differences:
        print_diagnostics_table("Picard iterates", diagnostics.differences, diagnostics.ratios)
    print_success(response["message"])
    print_info(f"Snapshots written to {response['run_dir']}")
