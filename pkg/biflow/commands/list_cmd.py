"""List commands"""

import click
from tabulate import tabulate

from biflow.experiments.registry import EXPERIMENTS


@click.group(name="experiments")
def experiments():
    """Registered experiments"""
    pass


@experiments.command(name="list")
def list_experiments():
    """List registered experiments"""
    table = [["Experiment", "Description"]]
    table.extend([name, spec.description] for name, spec in EXPERIMENTS.items())
    click.echo(tabulate(table, headers="firstrow", tablefmt="grid"))
