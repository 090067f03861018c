"""Duhamel integrals int_0^t S(t-s) N(s) ds by exponential product integration.

The source N is taken piecewise linear in s between trajectory nodes and
integrated exactly against exp(-(t-s)|k|^4) mode by mode:

    D_i = exp(-h lam) D_{i-1} + h (phi1 - phi2) N_{i-1} + h phi2 N_i,   z = -h lam
"""

import logging
from typing import Callable, List, Sequence

import numpy as np

from biflow.core.errors import DomainError
from biflow.norms.trajectory import TIME_SLACK, Trajectory
from biflow.solver.nonlinearity import (
    Nonlinearity,
    divergence_spectrum,
    smoothed_gradient,
    source_spectrum,
)
from biflow.spectral.field import Field
from biflow.spectral.grid import GridSpec

logger = logging.getLogger(__name__)

PHI1_SERIES = 1e-4
PHI2_SERIES = 1e-2


def phi1(z: np.ndarray) -> np.ndarray:
    """(e^z - 1)/z with its Taylor series near 0."""
    z = np.asarray(z, dtype=float)
    small = np.abs(z) < PHI1_SERIES
    safe = np.where(small, 1.0, z)
    return np.where(small, 1.0 + z / 2.0 + z**2 / 6.0, np.expm1(safe) / safe)


def phi2(z: np.ndarray) -> np.ndarray:
    """(e^z - 1 - z)/z^2 with its Taylor series near 0."""
    z = np.asarray(z, dtype=float)
    small = np.abs(z) < PHI2_SERIES
    safe = np.where(small, 1.0, z)
    series = 0.5 + z / 6.0 + z**2 / 24.0 + z**3 / 120.0 + z**4 / 720.0
    return np.where(small, series, (np.expm1(safe) - safe) / safe**2)


class _StepWeights:
    """exp(-h lam), h(phi1 - phi2), h phi2 per step size h, cached."""

    def __init__(self, grid: GridSpec) -> None:
        self.lam = grid.k_fourth
        self._cache = {}

    def __call__(self, h: float):
        key = float(h)
        if key not in self._cache:
            z = -h * self.lam
            p1, p2 = phi1(z), phi2(z)
            self._cache[key] = (np.exp(z), h * (p1 - p2), h * p2)
        return self._cache[key]


def product_integrate(grid: GridSpec, times: np.ndarray, sources: Sequence[np.ndarray]) -> List[np.ndarray]:
    """Spectral D(t_i) for every node from spectral sources N(t_i)."""
    weights = _StepWeights(grid)
    result = [np.zeros(grid.spectral_shape, dtype=np.complex128)]
    for i in range(1, len(times)):
        decay, w_prev, w_next = weights(times[i] - times[i - 1])
        result.append(decay * result[-1] + w_prev * sources[i - 1] + w_next * sources[i])
    return result


def integrate_to(
    grid: GridSpec, times: np.ndarray, sources: Sequence[np.ndarray], t: float
) -> np.ndarray:
    """D(t) for any t in (0, t_M], interpolating the source inside the last interval."""
    if t < 0 or t > times[-1] * (1 + TIME_SLACK):
        raise DomainError(f"t={t:g} outside the covered interval [0, {times[-1]:g}]", t=t)
    j = int(np.searchsorted(times, t, side="right")) - 1
    j = min(j, len(times) - 1)
    nodes = product_integrate(grid, times[: j + 1], sources[: j + 1])
    partial = t - times[j]
    if partial <= TIME_SLACK * max(1.0, t) or j == len(times) - 1:
        return nodes[j]
    h = times[j + 1] - times[j]
    z = -partial * grid.k_fourth
    slope = (sources[j + 1] - sources[j]) * (partial / h)
    return np.exp(z) * nodes[j] + partial * (phi1(z) * sources[j] + phi2(z) * slope)


def _sources(trajectory: Trajectory, make: Callable[[Field], np.ndarray]) -> List[np.ndarray]:
    return [make(f) for f in trajectory.fields]


def duhamel_trajectory(
    trajectory: Trajectory, nonlinearity: Nonlinearity, dealias: bool = True
) -> Trajectory:
    """G(u)(t_i) = int_0^{t_i} S(t_i - s) div F(grad u(s)) ds at every node."""
    grid = trajectory.grid
    sources = _sources(trajectory, lambda f: source_spectrum(f, nonlinearity, dealias))
    integrals = product_integrate(grid, trajectory.times, sources)
    return Trajectory(
        trajectory.times, [Field.from_spectral(grid, c) for c in integrals], check_grading=False
    )


def duhamel(
    trajectory: Trajectory, t: float, nonlinearity: Nonlinearity, dealias: bool = True
) -> Field:
    """G(u)(t) for a single time t in (0, T].

    Raises:
        DomainError: If the trajectory does not cover (0, t]
    """
    trajectory.require_cover(t)
    grid = trajectory.grid
    sources = _sources(trajectory, lambda f: source_spectrum(f, nonlinearity, dealias))
    return Field.from_spectral(grid, integrate_to(grid, trajectory.times, sources, t))


def _psi_sources(
    f: Trajectory, g: Trajectory, h: Trajectory, dealias: bool
) -> List[np.ndarray]:
    f.require_same_nodes(g, h)
    grid = f.grid
    cache = {}

    def grads(traj: Trajectory, j: int) -> np.ndarray:
        key = (id(traj), j)
        if key not in cache:
            cache[key] = smoothed_gradient(traj.fields[j], dealias)
        return cache[key]

    sources = []
    for j in range(len(f)):
        gf, gg, gh = grads(f, j), grads(g, j), grads(h, j)
        vector = np.sum(gf * gg, axis=0) * gh
        sources.append(divergence_spectrum(grid, vector, dealias))
    return sources


def trilinear_psi_trajectory(
    f: Trajectory, g: Trajectory, h: Trajectory, dealias: bool = True
) -> Trajectory:
    """Psi(f,g,h)(t_i) = int_0^{t_i} S(t_i - s) div((grad f . grad g) grad h) ds.

    Raises:
        DomainError: If the trajectories do not share grid and nodes
    """
    grid = f.grid
    integrals = product_integrate(grid, f.times, _psi_sources(f, g, h, dealias))
    return Trajectory(f.times, [Field.from_spectral(grid, c) for c in integrals], check_grading=False)


def trilinear_psi(
    f: Trajectory, g: Trajectory, h: Trajectory, t: float, dealias: bool = True
) -> Field:
    """Psi(f,g,h)(t) for a single t in (0, T]."""
    f.require_cover(t)
    grid = f.grid
    sources = _psi_sources(f, g, h, dealias)
    return Field.from_spectral(grid, integrate_to(grid, f.times, sources, t))


def linear_operator(
    a: Trajectory, b: Trajectory, f: Trajectory, sign: int, dealias: bool = True
) -> Trajectory:
    """L_{a,b} f = sign (Psi(f,a,b) + Psi(a,b,f) + Psi(b,f,a))."""
    total = (
        trilinear_psi_trajectory(f, a, b, dealias)
        + trilinear_psi_trajectory(a, b, f, dealias)
        + trilinear_psi_trajectory(b, f, a, dealias)
    )
    return total.map(lambda x: sign * x)


def bilinear_operator(a: Trajectory, f: Trajectory, sign: int, dealias: bool = True) -> Trajectory:
    """B_a(f, f) = L_{a,f} f."""
    return linear_operator(a, f, f, sign, dealias)


def semigroup_trajectory(u0: Field, times: Sequence[float]) -> Trajectory:
    """S(t_i) u0 at every node."""
    lam = u0.grid.k_fourth
    fields = [u0] + [
        Field.from_spectral(u0.grid, u0.spectral * np.exp(-t * lam)) for t in list(times)[1:]
    ]
    return Trajectory(times, fields, check_grading=False)
