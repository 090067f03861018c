"""Periodic grids and their wavenumber tables."""

from dataclasses import dataclass
from functools import cached_property
import math
from typing import Any, Dict, Tuple

import numpy as np

from biflow.core.errors import ConfigurationError

SUPPORTED_DIMS = (1, 2, 3)
MIN_POINTS = 16


@dataclass(frozen=True)
class GridSpec:
    """Periodic box discretization standing in for the whole space.

    Attributes:
        dim: Spatial dimension (1, 2 or 3)
        points_per_axis: Samples per axis, a power of two >= 16
        box_length: Side length L of the torus
    """

    dim: int
    points_per_axis: int
    box_length: float

    def validate(self) -> tuple[bool, list[str]]:
        """Validate grid parameters.

        Returns:
            Tuple of (is_valid, error_messages)
        """
        errors = []

        if self.dim not in SUPPORTED_DIMS:
            errors.append(f"dim must be one of {SUPPORTED_DIMS}, got {self.dim}")

        n = self.points_per_axis
        if not isinstance(n, (int, np.integer)) or n < MIN_POINTS or n & (n - 1):
            errors.append(f"points_per_axis must be a power of two >= {MIN_POINTS}, got {n}")

        if not (math.isfinite(self.box_length) and self.box_length > 0):
            errors.append(f"box_length must be positive, got {self.box_length}")

        return len(errors) == 0, errors

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.points_per_axis,) * self.dim

    @property
    def spectral_shape(self) -> Tuple[int, ...]:
        n = self.points_per_axis
        return (n,) * (self.dim - 1) + (n // 2 + 1,)

    @property
    def size(self) -> int:
        return self.points_per_axis**self.dim

    @property
    def spacing(self) -> float:
        return self.box_length / self.points_per_axis

    @property
    def cell_volume(self) -> float:
        return self.spacing**self.dim

    @property
    def volume(self) -> float:
        return self.box_length**self.dim

    @property
    def k_max(self) -> float:
        """Largest resolved wavenumber 2*pi*(N/2)/L."""
        return 2 * math.pi * (self.points_per_axis // 2) / self.box_length

    @cached_property
    def axis_wavenumbers(self) -> np.ndarray:
        """k = 2*pi*m/L for m in -N/2..N/2-1, in FFT order."""
        n = self.points_per_axis
        return 2 * math.pi * np.fft.fftfreq(n, d=1.0 / n) / self.box_length

    @cached_property
    def mode_numbers(self) -> Tuple[np.ndarray, ...]:
        """Integer mode numbers per axis, broadcastable to the rfftn layout."""
        n = self.points_per_axis
        modes = []
        for axis in range(self.dim):
            if axis == self.dim - 1:
                m = np.rint(np.fft.rfftfreq(n, d=1.0 / n)).astype(np.int64)
            else:
                m = np.rint(np.fft.fftfreq(n, d=1.0 / n)).astype(np.int64)
            view = [1] * self.dim
            view[axis] = m.size
            modes.append(m.reshape(view))
        return tuple(modes)

    @cached_property
    def wavenumbers(self) -> Tuple[np.ndarray, ...]:
        scale = 2 * math.pi / self.box_length
        return tuple(scale * m.astype(float) for m in self.mode_numbers)

    @cached_property
    def k_squared(self) -> np.ndarray:
        total = np.zeros(self.spectral_shape)
        for k in self.wavenumbers:
            total = total + k**2
        return total

    @cached_property
    def k_fourth(self) -> np.ndarray:
        return self.k_squared**2

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        """True where every |m_j| <= N/3 (cubic two-thirds rule)."""
        cutoff = self.points_per_axis / 3
        keep = np.ones(self.spectral_shape, dtype=bool)
        for m in self.mode_numbers:
            keep &= np.abs(m) <= cutoff
        return keep

    def nyquist(self, axis: int) -> np.ndarray:
        """Boolean mask of the Nyquist plane along one axis."""
        return np.abs(self.mode_numbers[axis]) == self.points_per_axis // 2

    def coordinates(self) -> Tuple[np.ndarray, ...]:
        """Sample coordinates x_j = j*h on [0, L), indexing 'ij'."""
        x = np.arange(self.points_per_axis) * self.spacing
        return tuple(np.meshgrid(*([x] * self.dim), indexing="ij"))

    def centered_coordinates(self) -> Tuple[np.ndarray, ...]:
        """Coordinates shifted so the box center sits at the origin."""
        half = self.box_length / 2
        return tuple(c - half for c in self.coordinates())

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for serialization."""
        return {
            "dim": self.dim,
            "points_per_axis": int(self.points_per_axis),
            "box_length": float(self.box_length),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "GridSpec":
        """Create from dictionary."""
        return make_grid(data["dim"], data["points_per_axis"], data["box_length"])

    def refined(self, factor: int = 2) -> "GridSpec":
        """Same box with factor times more points per axis."""
        return make_grid(self.dim, self.points_per_axis * factor, self.box_length)


def make_grid(dim: int, points_per_axis: int, box_length: float) -> GridSpec:
    """Build a validated grid.

    Raises:
        ConfigurationError: If the grid parameters are invalid
    """
    grid = GridSpec(dim=int(dim), points_per_axis=points_per_axis, box_length=float(box_length))
    is_valid, errors = grid.validate()
    if not is_valid:
        raise ConfigurationError("; ".join(errors), grid=str(grid))
    return grid
