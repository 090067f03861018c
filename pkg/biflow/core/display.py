from typing import Any, Dict, Iterable, List

from rich.console import Console
from rich.table import Table

from biflow.core.enums import Verdict
from biflow.core.result import Check, ExperimentResult

console = Console()
error_console = Console(stderr=True)

VERDICT_STYLE = {Verdict.PASS: "green", Verdict.FAIL: "red", Verdict.INCONCLUSIVE: "yellow"}


def print_success(message: str) -> None:
    """Print success message."""
    console.print(f"[bold green]✅ {message}[/bold green]")


def print_error(message: str, error: str = None) -> None:
    """Print error message."""
    error_console.print(f"[bold red]❌ {message}[/bold red]")
    if error:
        error_console.print(f"[red]Error: {error}[/red]")


def print_warning(message: str) -> None:
    """Print warning message."""
    console.print(f"[bold yellow]⚠️  {message}[/bold yellow]")


def print_info(message: str) -> None:
    """Print info message."""
    console.print(f"[cyan]{message}[/cyan]")


def _verdict_cell(verdict: Verdict) -> str:
    style = VERDICT_STYLE[verdict]
    return f"[{style}]{verdict.value.upper()}[/{style}]"


def print_checks_table(title: str, checks: Iterable[Check]) -> None:
    """Print a table of experiment checks."""
    table = Table(title=title, show_header=True, header_style="bold magenta")
    table.add_column("Check", style="bold blue", min_width=24)
    table.add_column("Value", justify="right")
    table.add_column("Limit", justify="right", style="dim")
    table.add_column("Verdict", width=14)

    for check in checks:
        table.add_row(check.name, f"{check.value:.6g}", f"{check.limit:.3g}", _verdict_cell(check.verdict))

    console.print(table)


def print_result(result: ExperimentResult) -> None:
    print_checks_table(f"{result.name}", result.checks)
    message = f"{result.name}: {result.verdict.value}"
    if result.verdict == Verdict.PASS:
        print_success(message)
    elif result.verdict == Verdict.FAIL:
        print_error(message)
    else:
        print_warning(message)


def print_norm_table(title: str, rows: Dict[str, Any]) -> None:
    """Print a two-column table of named norm values."""
    table = Table(title=title, show_header=True, header_style="bold magenta")
    table.add_column("Norm", style="bold blue", width=30)
    table.add_column("Value", justify="right", style="cyan")

    for name, value in rows.items():
        cell = f"{value:.6g}" if isinstance(value, (int, float)) else str(value)
        table.add_row(name, cell)

    console.print(table)


def print_diagnostics_table(title: str, differences: List[float], ratios: List[float]) -> None:
    """Print per-iterate differences and contraction ratios."""
    table = Table(title=title, show_header=True, header_style="bold magenta")
    table.add_column("Iterate", style="bold blue", width=10)
    table.add_column("||u_{j+1} - u_j||_X", justify="right")
    table.add_column("Ratio", justify="right", style="dim")

    for j, difference in enumerate(differences):
        ratio = f"{ratios[j - 1]:.3f}" if 0 < j <= len(ratios) else ""
        table.add_row(str(j + 1), f"{difference:.3e}", ratio)

    console.print(table)
