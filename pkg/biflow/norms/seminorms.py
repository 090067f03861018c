"""Mean-oscillation, Carleson-extension and Morrey seminorms of a single field."""

import logging
import math
from typing import Optional

import numpy as np

from biflow.core.errors import ConfigurationError
from biflow.norms.balls import DEFAULT_STRIDE, BallFamily, Supremum
from biflow.spectral.field import Field
from biflow.spectral.operators import gradient, semigroup_derivative

logger = logging.getLogger(__name__)

CELLS_PER_SIXTEEN = 20
TAIL_FACTOR = 1e-3
TINY = 1e-300


def _family(field: Field, R: Optional[float], stride: int) -> BallFamily:
    if R is None:
        R = field.grid.box_length / 4
    return BallFamily(field.grid, R, stride=stride)


def _best(current: Supremum, values: np.ndarray, family: BallFamily, r: float) -> Supremum:
    j = int(np.argmax(values))
    if values[j] > current.value:
        return Supremum(float(values[j]), family.center_coordinates(j), r, family.warnings)
    return current


def _mean_oscillations(family: BallFamily, values: np.ndarray, r: float) -> np.ndarray:
    means = family.ball_means(values, r)
    oscillation = np.empty_like(means)
    for block, samples in family.gather(values, r):
        oscillation[block] = np.mean(np.abs(samples - means[block, None]), axis=1)
    return oscillation


def scan_oscillation(
    field: Field, R: Optional[float] = None, stride: int = DEFAULT_STRIDE
) -> Supremum:
    family = _family(field, R, stride)
    best = Supremum(0.0, warnings=family.warnings)
    for r in family.radii:
        best = _best(best, _mean_oscillations(family, field.values, r), family, r)
    return best


def oscillation_bmo(field: Field, R: Optional[float] = None, stride: int = DEFAULT_STRIDE) -> float:
    """sup over balls of the mean of |a - a_B| on B, radii up to R."""
    return scan_oscillation(field, R, stride).value


def carleson_time_ladder(R: float, k_max: float):
    """Log-uniform cells below R^4 with 20 cells per factor 16.

    Returns:
        Tuple of (midpoints, cell widths in t, upper cell edges, floor time t0
        below which the semigroup acts as the identity on resolved modes)
    """
    t_floor = TAIL_FACTOR / k_max**4
    top = R**4
    n_cells = max(CELLS_PER_SIXTEEN, int(math.ceil(CELLS_PER_SIXTEEN * math.log(top / t_floor, 16))))
    edges = top * 16.0 ** (-np.arange(n_cells + 1) / CELLS_PER_SIXTEEN)
    lower, upper = edges[1:], edges[:-1]
    mids = np.sqrt(lower * upper)
    widths = mids * np.log(upper / lower)
    return mids, widths, upper, float(edges[-1])


def scan_carleson(
    field: Field, R: Optional[float] = None, stride: int = DEFAULT_STRIDE
) -> dict[int, Supremum]:
    """Per-k suprema of (int_0^{r^4} avg_B t^{(2k-4)/4} |grad^k S(t) a|^2 dt)^{1/2}."""
    family = _family(field, R, stride)
    grid = field.grid
    mids, widths, uppers, t0 = carleson_time_ladder(family.R, grid.k_max)
    radii = family.radii
    bounds = [r**4 * (1 + 1e-12) for r in radii]
    results = {}
    for k in (1, 2):
        weight_power = (2 * k - 4) / 4.0
        accumulated = [np.zeros(grid.shape) for _ in radii]
        for t, dt, upper in zip(mids, widths, uppers):
            density = np.sum(semigroup_derivative(field, t, k).stacked() ** 2, axis=0)
            contribution = dt * t**weight_power * density
            for i, bound in enumerate(bounds):
                if upper <= bound:
                    accumulated[i] += contribution
        tail_density = np.sum(semigroup_derivative(field, t0, k).stacked() ** 2, axis=0)
        # int_0^t0 t^(-1/2) dt = 2 sqrt(t0); int_0^t0 dt = t0
        tail_weight = 2.0 * math.sqrt(t0) if k == 1 else t0
        best = Supremum(0.0, warnings=family.warnings)
        for i, r in enumerate(radii):
            means = family.ball_means(accumulated[i] + tail_weight * tail_density, r)
            best = _best(best, np.sqrt(np.maximum(means, 0.0)), family, r)
        results[k] = best
    return results


def carleson_bmo(field: Field, R: Optional[float] = None, stride: int = DEFAULT_STRIDE) -> float:
    """Local BMO_R seminorm via the semigroup extension, summed over k = 1, 2."""
    scans = scan_carleson(field, R, stride)
    return scans[1].value + scans[2].value


def scan_morrey(
    field: Field,
    p: float = 1.0,
    lam: float = 0.0,
    R: Optional[float] = None,
    stride: int = DEFAULT_STRIDE,
) -> Supremum:
    if p < 1:
        raise ConfigurationError(f"Morrey exponent p must be >= 1, got {p}")
    if not 0 <= lam < field.grid.dim:
        raise ConfigurationError(f"Morrey index lambda must lie in [0, {field.grid.dim}), got {lam}")
    family = _family(field, R, stride)
    power = np.abs(field.values) ** p
    best = Supremum(0.0, warnings=family.warnings)
    for r in family.radii:
        integral = family.ball_sums(power, r) * field.grid.cell_volume
        values = (np.maximum(integral, 0.0) / r**lam) ** (1.0 / p)
        best = _best(best, values, family, r)
    return best


def morrey_norm(
    field: Field,
    p: float = 1.0,
    lam: float = 0.0,
    R: Optional[float] = None,
    stride: int = DEFAULT_STRIDE,
) -> float:
    """sup over balls of (r^-lambda int_B |a|^p)^(1/p)."""
    return scan_morrey(field, p, lam, R, stride).value


def poincare_ratio(field: Field, R: Optional[float] = None, stride: int = DEFAULT_STRIDE) -> float:
    """max over balls of mean |a - a_B| / (r * mean |grad a|)."""
    family = _family(field, R, stride)
    slope = gradient(field, 1).magnitude()
    worst = 0.0
    for r in family.radii:
        oscillation = _mean_oscillations(family, field.values, r)
        denominator = r * family.ball_means(slope, r)
        active = denominator > TINY
        if np.any(active):
            worst = max(worst, float(np.max(oscillation[active] / denominator[active])))
    return worst
