import click

from biflow.commands.list_cmd import experiments
from biflow.commands.norms import norms
from biflow.commands.run import run
from biflow.commands.solve import solve
from biflow.utils import configure_logging


@click.group()
@click.option("--verbose", is_flag=True, help="Debug logging")
def cli(verbose: bool):
    """biflow: numerical lab for the fourth-order gradient flow"""
    configure_logging(verbose)


cli.add_command(run)
cli.add_command(solve)
cli.add_command(norms)
cli.add_command(experiments)

if __name__ == "__main__":
    cli()
