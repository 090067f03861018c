"""Tolerance handling shared by all experiments."""

from typing import Dict, Mapping, Optional

from biflow.core.errors import ConfigurationError


def resolve_tolerances(
    defaults: Mapping[str, float],
    overrides: Optional[Mapping[str, float]] = None,
    scale: float = 1.0,
) -> Dict[str, float]:
    """Defaults updated by overrides, every value multiplied by `scale`.

    Raises:
        ConfigurationError: If an override names an unknown tolerance
    """
    overrides = dict(overrides or {})
    unknown = set(overrides) - set(defaults)
    if unknown:
        raise ConfigurationError(
            f"unknown tolerances: {', '.join(sorted(unknown))}; known: {', '.join(sorted(defaults))}"
        )
    merged = dict(defaults)
    merged.update(overrides)
    return {name: float(value) * scale for name, value in merged.items()}
