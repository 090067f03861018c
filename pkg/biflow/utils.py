"""Utility functions for the biflow CLI."""

from concurrent.futures import ThreadPoolExecutor
import logging
from pathlib import Path
import tomllib
from typing import Any, Callable, Dict, Iterable, List, TypeVar

from rich.logging import RichHandler
import yaml

from biflow.core.display import error_console
from biflow.core.errors import ConfigurationError

T = TypeVar("T")
R = TypeVar("R")


def load_config_file(path) -> Dict[str, Any]:
    """Parse a YAML or TOML config file into a key-value tree.

    Raises:
        ConfigurationError: If the file is missing, malformed or not a mapping
    """
    path = Path(path)
    if not path.exists():
        raise ConfigurationError(f"config file {path} does not exist")
    try:
        if path.suffix == ".toml":
            with open(path, "rb") as f:
                data = tomllib.load(f)
        else:
            with open(path, "r", encoding="utf-8") as f:
                data = yaml.safe_load(f)
    except (tomllib.TOMLDecodeError, yaml.YAMLError) as e:
        raise ConfigurationError(f"cannot parse {path}: {e}") from None
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigurationError(f"config file {path} must hold a mapping at top level")
    return data


def configure_logging(verbose: bool = False) -> logging.Logger:
    """Attach a rich handler writing to stderr to the package logger."""
    logger = logging.getLogger("biflow")
    level = logging.DEBUG if verbose else logging.WARNING
    if not any(isinstance(h, RichHandler) for h in logger.handlers):
        logger.addHandler(
            RichHandler(console=error_console, show_path=verbose, rich_tracebacks=True, markup=False)
        )
    logger.setLevel(level)
    logger.propagate = False
    return logger


def parallel_map(fn: Callable[[T], R], items: Iterable[T], threads: int = 1) -> List[R]:
    """Map fn over items with at most `threads` workers, preserving order."""
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(threads, len(items))) as pool:
        return list(pool.map(fn, items))
