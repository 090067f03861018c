"""Seeded initial-data generators."""

import logging
import math
from typing import Any, Callable, Dict, Optional, Sequence

import numpy as np

from biflow.core.config import InitialDataConfig
from biflow.core.errors import ConfigurationError
from biflow.spectral.field import Field
from biflow.spectral.grid import GridSpec
from biflow.spectral.snapshot import read_snapshot

logger = logging.getLogger(__name__)

PHASES = ("random", "locked")


def gaussian_bump(
    grid: GridSpec,
    rng: np.random.Generator = None,
    amplitude: float = 1.0,
    width: float = 1.0,
    center: Optional[Sequence[float]] = None,
) -> Field:
    """A exp(-|x - c|^2 / w^2), centered in the box by default."""
    coords = grid.coordinates()
    if center is None:
        center = [grid.box_length / 2] * grid.dim
    r2 = sum(_periodic_delta(x, c, grid.box_length) ** 2 for x, c in zip(coords, center))
    return Field(grid, amplitude * np.exp(-r2 / width**2))


def _periodic_delta(x: np.ndarray, c: float, L: float) -> np.ndarray:
    return (x - c + L / 2) % L - L / 2


def single_mode(
    grid: GridSpec,
    rng: np.random.Generator = None,
    amplitude: float = 1.0,
    mode: Optional[Sequence[int]] = None,
) -> Field:
    """A sin(2 pi m . x / L)."""
    mode = [1] + [0] * (grid.dim - 1) if mode is None else list(mode)
    if len(mode) != grid.dim:
        raise ConfigurationError(f"mode {mode} does not match grid dimension {grid.dim}")
    phase = sum(m * x for m, x in zip(mode, grid.coordinates()))
    return Field(grid, amplitude * np.sin(2 * math.pi * phase / grid.box_length))


def band_limited_noise(
    grid: GridSpec,
    rng: np.random.Generator,
    amplitude: float = 1.0,
    cutoff: Optional[int] = None,
    spectral_exponent: Optional[float] = None,
    phases: str = "random",
) -> Field:
    """Mean-zero noise supported on 1 <= |m| <= cutoff, rescaled to sup-norm `amplitude`.

    "random" phases carry modulus |m|^(-n/2); "locked" phases line up at the
    box center with modulus |m|^(-n) and a 10% random modulus jitter, which
    makes the sup-norm of grad^k S(t)a scale exactly like t^(-k/4).
    """
    if phases not in PHASES:
        raise ConfigurationError(f"phases must be one of {PHASES}, got '{phases}'")
    n = grid.points_per_axis
    cutoff = n // 3 if cutoff is None else int(cutoff)
    if not 1 <= cutoff <= n // 2 - 1:
        raise ConfigurationError(f"cutoff must lie in [1, {n // 2 - 1}], got {cutoff}")
    if spectral_exponent is None:
        spectral_exponent = grid.dim / 2.0 if phases == "random" else float(grid.dim)

    radius = np.sqrt(sum(m.astype(float) ** 2 for m in grid.mode_numbers))
    support = (radius >= 1) & (radius <= cutoff)
    modulus = np.where(support, np.maximum(radius, 1.0) ** (-spectral_exponent), 0.0)
    shape = grid.spectral_shape
    if phases == "random":
        angle = rng.uniform(0.0, 2 * math.pi, size=shape)
        modulus = modulus * rng.rayleigh(1.0, size=shape)
    else:
        center = grid.box_length / 2
        angle = -sum(k * center for k in grid.wavenumbers) * np.ones(shape)
        modulus = modulus * (1.0 + 0.1 * rng.uniform(-1.0, 1.0, size=shape))
    coefficients = modulus * np.exp(1j * angle)
    values = np.fft.irfftn(coefficients, s=grid.shape, axes=tuple(range(grid.dim)))
    values -= values.mean()
    peak = np.max(np.abs(values))
    if peak == 0:
        raise ConfigurationError("noise generator produced a zero field")
    return Field(grid, amplitude * values / peak)


def sum_of_bumps(
    grid: GridSpec,
    rng: np.random.Generator,
    amplitude: float = 1.0,
    count: int = 3,
    width: float = 1.0,
) -> Field:
    """`count` Gaussian bumps with seeded centers and signed amplitudes."""
    total = np.zeros(grid.shape)
    for _ in range(count):
        center = rng.uniform(0.0, grid.box_length, size=grid.dim)
        sign = rng.choice([-1.0, 1.0])
        total += gaussian_bump(grid, amplitude=sign * amplitude, width=width, center=center).values
    return Field(grid, total)


def log_field(
    grid: GridSpec,
    rng: np.random.Generator = None,
    amplitude: float = 2.0,
    core: float = 0.5,
    center: Optional[Sequence[float]] = None,
) -> Field:
    """amplitude * ln(sqrt(|x - c|^2 + core^2)), the log profile smoothed at the center."""
    if not core > 0:
        raise ConfigurationError(f"core radius must be positive, got {core}")
    coords = grid.coordinates()
    if center is None:
        center = [grid.box_length / 2] * grid.dim
    r2 = sum(_periodic_delta(x, c, grid.box_length) ** 2 for x, c in zip(coords, center))
    return Field(grid, 0.5 * amplitude * np.log(r2 + core**2))


GENERATORS: Dict[str, Callable[..., Field]] = {
    "gaussian_bump": gaussian_bump,
    "band_limited_noise": band_limited_noise,
    "single_mode": single_mode,
    "sum_of_bumps": sum_of_bumps,
    "log_field": log_field,
}


def generate(name: str, grid: GridSpec, seed: int = 0, **params: Any) -> Field:
    """Build a field with a named generator.

    Raises:
        ConfigurationError: If the generator is unknown or rejects its parameters
    """
    if name not in GENERATORS:
        supported = ", ".join(f"'{g}'" for g in GENERATORS)
        raise ConfigurationError(f"Generator '{name}' is not supported. Supported generators: {supported}")
    rng = np.random.default_rng(seed)
    try:
        return GENERATORS[name](grid, rng, **params)
    except TypeError as e:
        raise ConfigurationError(f"bad parameters for generator '{name}': {e}") from None


def make_initial_data(block: InitialDataConfig, grid: GridSpec, seed: int = 0) -> Field:
    """Resolve an initial-data config block into a Field on `grid`."""
    if block.snapshot is not None:
        field = read_snapshot(block.snapshot)
        if field.grid.dim != grid.dim or field.grid.points_per_axis != grid.points_per_axis:
            raise ConfigurationError(
                f"snapshot grid {field.grid} does not match configured grid {grid}"
            )
        return Field(grid, field.values)
    return generate(block.generator, grid, seed, **block.params)
