"""Discrete periodic balls: strided centers and a dyadic radius ladder."""

from dataclasses import dataclass
from functools import cached_property, lru_cache
import itertools
import logging
import math
from typing import Dict, Iterator, List, Tuple

import numpy as np

from biflow.core.errors import ConfigurationError
from biflow.spectral.grid import GridSpec

logger = logging.getLogger(__name__)

MIN_BALL_POINTS = 8
MIN_LADDER = 3
DEFAULT_STRIDE = 4
GATHER_CHUNK = 2_000_000
RADIUS_SLACK = 1e-12


@dataclass(frozen=True)
class Supremum:
    """A supremum over balls together with its witness."""

    value: float
    center: Tuple[float, ...] = ()
    radius: float = 0.0
    warnings: int = 0

    def to_dict(self) -> Dict[str, object]:
        return {
            "value": self.value,
            "center": list(self.center),
            "radius": self.radius,
            "warnings": self.warnings,
        }


class BallFamily:
    """Balls B(x, r) with x on a strided sub-grid and r = R, R/2, ... >= 2h.

    Balls are grid-point sets within periodic Euclidean distance r of the
    center. Radii whose balls hold fewer than 8 points are skipped and
    counted in `warnings`.
    """

    def __init__(
        self,
        grid: GridSpec,
        R: float,
        stride: int = DEFAULT_STRIDE,
        min_ladder: int = MIN_LADDER,
    ) -> None:
        if R > grid.box_length / 4 * (1 + RADIUS_SLACK):
            raise ConfigurationError(
                f"ball radius {R:g} exceeds a quarter of the box ({grid.box_length / 4:g})", R=R
            )
        if stride < 1 or grid.points_per_axis % stride:
            raise ConfigurationError(f"stride {stride} must divide {grid.points_per_axis}")
        self.grid = grid
        self.R = float(R)
        self.stride = stride

        ladder = []
        r = self.R
        while r >= 2 * grid.spacing * (1 - RADIUS_SLACK):
            ladder.append(r)
            r /= 2
        if len(ladder) < min_ladder:
            raise ConfigurationError(
                f"radius {R:g} gives {len(ladder)} dyadic radii above 2h={2 * grid.spacing:g}, "
                f"need at least {min_ladder}",
                R=R,
            )
        self.radii: List[float] = []
        skipped = 0
        for r in ladder:
            if len(self.offsets(r)) < MIN_BALL_POINTS:
                skipped += 1
            else:
                self.radii.append(r)
        self.warnings = skipped * self.n_centers
        if skipped:
            logger.warning("Skipped %d radii with fewer than %d points", skipped, MIN_BALL_POINTS)

    @cached_property
    def centers(self) -> np.ndarray:
        """Integer multi-indices of the centers, shape (C, dim)."""
        axis = np.arange(0, self.grid.points_per_axis, self.stride)
        return np.array(list(itertools.product(axis, repeat=self.grid.dim)), dtype=np.int64)

    @property
    def n_centers(self) -> int:
        return (self.grid.points_per_axis // self.stride) ** self.grid.dim

    def center_coordinates(self, index: int) -> Tuple[float, ...]:
        return tuple(float(c) * self.grid.spacing for c in self.centers[index])

    def offsets(self, r: float) -> np.ndarray:
        """Integer offsets d with |d| h <= r, shape (P, dim)."""
        return _ball_offsets(self.grid.dim, r / self.grid.spacing)

    def indicator(self, r: float) -> np.ndarray:
        mask = np.zeros(self.grid.shape)
        idx = tuple((self.offsets(r) % self.grid.points_per_axis).T)
        mask[idx] = 1.0
        return mask

    def ball_sums(self, values: np.ndarray, r: float) -> np.ndarray:
        """Sum of samples over B(x, r) for every center."""
        axes = tuple(range(self.grid.dim))
        # balls are symmetric, so the correlation is a plain convolution
        kernel = np.fft.rfftn(self.indicator(r), axes=axes)
        sums = np.fft.irfftn(np.fft.rfftn(values, axes=axes) * kernel, s=self.grid.shape, axes=axes)
        return sums[tuple(self.centers.T)]

    def ball_means(self, values: np.ndarray, r: float) -> np.ndarray:
        return self.ball_sums(values, r) / len(self.offsets(r))

    def gather(self, values: np.ndarray, r: float) -> Iterator[Tuple[slice, np.ndarray]]:
        """Yield (center slice, samples of shape (chunk, P)) for each chunk of centers."""
        offsets = self.offsets(r)
        n = self.grid.points_per_axis
        chunk = max(1, GATHER_CHUNK // max(len(offsets), 1))
        for start in range(0, len(self.centers), chunk):
            block = self.centers[start : start + chunk]
            idx = (block[:, None, :] + offsets[None, :, :]) % n
            yield slice(start, start + len(block)), values[tuple(np.moveaxis(idx, -1, 0))]

    def ball_count(self, r: float) -> int:
        return len(self.offsets(r))


def _ball_offsets(dim: int, radius_in_cells: float) -> np.ndarray:
    return _cached_offsets(dim, round(radius_in_cells, 9))


@lru_cache(maxsize=256)
def _cached_offsets(dim: int, radius_in_cells: float) -> np.ndarray:
    reach = radius_in_cells * (1 + RADIUS_SLACK)
    m = int(math.floor(reach))
    axis = np.arange(-m, m + 1)
    cube = np.array(list(itertools.product(axis, repeat=dim)), dtype=np.int64)
    offsets = cube[np.sum(cube.astype(float) ** 2, axis=1) <= reach**2]
    offsets.flags.writeable = False
    return offsets
