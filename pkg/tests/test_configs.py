from pathlib import Path

import pytest

from biflow.core.config import parse_run_config
from biflow.experiments.registry import EXPERIMENTS
from biflow.utils import load_config_file

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


@pytest.mark.parametrize("path", sorted(CONFIG_DIR.iterdir()), ids=lambda p: p.name)
def test_shipped_configs_are_valid(path):
    """Every example config parses and names a registered experiment, if any."""
    config = parse_run_config(load_config_file(str(path)))

    assert config.experiment is None or config.experiment in EXPERIMENTS  # nosec: B101
