"""Run command"""

import sys

import click
from halo import Halo

from biflow.commands.common import fail, overrides, run_options
from biflow.core.display import print_info, print_result
from biflow.core.errors import BiflowError
from biflow.services.run_service import RunService


@click.command(help="Run the experiment named in a config file")
@click.argument("config_path", type=click.Path())
@run_options
def run(config_path: str, threads, out_dir, seed, tolerance_scale):
    """Run an experiment (or a bare solve) and write its artifacts."""
    service = RunService()
    try:
        config = service.load(config_path, overrides(threads, out_dir, seed, tolerance_scale))
    except BiflowError as e:
        fail("Invalid configuration", e.to_dict())

    label = config.experiment or "solve"
    spinner = Halo(text=f"Running {label}", spinner="dots", stream=sys.stderr)
    spinner.start()
    response = service.run(config)
    spinner.stop()

    if response.get("error"):
        fail(response["message"], response["error"])

    if "result" in response:
        print_result(response["result"])
    else:
        print_info(response["message"])
    print_info(f"Artifacts written to {response['run_dir']}")
    sys.exit(response["exit_code"])
