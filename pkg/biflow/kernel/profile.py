"""Radial profile g of the biharmonic heat kernel b(x,t) = t^(-n/4) g(x/t^(1/4)).

Normalized to unit mass:
    n=1: g(r) = (1/pi) int_0^inf cos(r xi) exp(-xi^4) dxi
    n=2: g(r) = (1/(2 pi)) int_0^inf rho J0(r rho) exp(-rho^4) drho
"""

from dataclasses import dataclass, field
from functools import lru_cache
import logging
import math
import os
from typing import Any, Dict, Optional, Union

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.special import jvp

from biflow.core.errors import ConfigurationError, ResolutionError

logger = logging.getLogger(__name__)

SUPPORTED_DIMS = (1, 2)
TAIL_THRESHOLD = 1e-16
GAUSS_POINTS = 12
MAX_PANEL_WIDTH = 0.25
DEFAULT_MAX_PANELS = 20000
DENSE_R_MIN = 1e-3
DENSE_R_MAX = 50.0
DENSE_POINTS = 4096
CHUNK = 512


@dataclass(frozen=True)
class KernelProfile:
    """g and its radial derivatives sampled on ascending radii.

    Attributes:
        dim: Spatial dimension (1 or 2)
        radii: Ascending non-negative radii
        values: g(r)
        derivatives: Map order k -> g^(k)(r) for the orders requested
        quadrature_meta: Node counts and truncation radius in frequency
    """

    dim: int
    radii: np.ndarray
    values: np.ndarray
    derivatives: Dict[int, np.ndarray] = field(default_factory=dict)
    quadrature_meta: Dict[str, Any] = field(default_factory=dict)

    def validate(self) -> tuple[bool, list[str]]:
        errors = []
        if self.dim not in SUPPORTED_DIMS:
            errors.append(f"dim must be 1 or 2, got {self.dim}")
        if self.radii.ndim != 1 or np.any(np.diff(self.radii) <= 0):
            errors.append("radii must be strictly ascending")
        if np.any(self.radii < 0) or not np.all(np.isfinite(self.radii)):
            errors.append("radii must be finite and non-negative")
        if not np.all(np.isfinite(self.values)):
            errors.append("profile values must be finite")
        return len(errors) == 0, errors

    def derivative(self, k: int) -> np.ndarray:
        if k == 0:
            return self.values
        return self.derivatives[k]


def truncation_radius(refine: int = 1) -> float:
    """xi_max with exp(-xi_max^4) <= TAIL_THRESHOLD**refine."""
    return (-math.log(TAIL_THRESHOLD) * refine) ** 0.25


@lru_cache(maxsize=32)
def _panel_rule(xi_max: float, width: float) -> tuple[np.ndarray, np.ndarray]:
    panels = int(math.ceil(xi_max / width))
    nodes, weights = np.polynomial.legendre.leggauss(GAUSS_POINTS)
    edges = np.linspace(0.0, xi_max, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    xi = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
    w = (half[:, None] * weights[None, :]).ravel()
    return xi, w


def quadrature_rule(r_max: float, refine: int = 1, max_panels: int = DEFAULT_MAX_PANELS):
    """Panel Gauss-Legendre nodes on [0, xi_max] resolving the period 2*pi/r_max.

    Raises:
        ResolutionError: If the panel count exceeds max_panels
    """
    xi_max = truncation_radius(refine)
    width = MAX_PANEL_WIDTH
    if r_max > 0:
        width = min(width, math.pi / (2.0 * r_max))
    width /= refine
    panels = int(math.ceil(xi_max / width))
    if panels > max_panels:
        raise ResolutionError(
            f"radius {r_max:g} needs {panels} quadrature panels, budget is {max_panels}",
            r_max=r_max,
            panels=panels,
        )
    xi, w = _panel_rule(xi_max, width)
    meta = {
        "xi_max": xi_max,
        "panels": panels,
        "nodes": int(xi.size),
        "panel_width": width,
        "gauss_points": GAUSS_POINTS,
    }
    return xi, w, meta


def _integrand_kernel(r: np.ndarray, xi: np.ndarray, dim: int, k: int) -> np.ndarray:
    rx = r[:, None] * xi[None, :]
    if dim == 1:
        return xi[None, :] ** k * np.cos(rx + k * math.pi / 2)
    return xi[None, :] ** (k + 1) * jvp(0, rx, k)


def radial_derivative(
    radii: np.ndarray,
    dim: int,
    k: int = 0,
    refine: int = 1,
    max_panels: int = DEFAULT_MAX_PANELS,
) -> tuple[np.ndarray, Dict[str, Any]]:
    """g^(k)(r) by differentiating under the integral sign."""
    if dim not in SUPPORTED_DIMS:
        raise ConfigurationError(f"kernel profile supports dim 1 or 2, got {dim}")
    radii = np.asarray(radii, dtype=float)
    r_max = float(np.max(radii)) if radii.size else 0.0
    xi, w, meta = quadrature_rule(r_max, refine=refine, max_panels=max_panels)
    damped = w * np.exp(-(xi**4))
    prefactor = 1.0 / math.pi if dim == 1 else 1.0 / (2.0 * math.pi)
    flat = radii.ravel()
    out = np.empty_like(flat)
    for start in range(0, flat.size, CHUNK):
        chunk = flat[start : start + CHUNK]
        out[start : start + CHUNK] = _integrand_kernel(chunk, xi, dim, k) @ damped
    return prefactor * out.reshape(radii.shape), meta


def profile_g(
    radii,
    dim: int,
    orders=(1, 2),
    refine: int = 1,
    max_panels: int = DEFAULT_MAX_PANELS,
) -> KernelProfile:
    """Evaluate g (and the requested radial derivatives) at the given radii.

    Raises:
        ConfigurationError: If dim or radii are invalid
        ResolutionError: If the largest radius needs more panels than allowed
    """
    radii = np.atleast_1d(np.asarray(radii, dtype=float))
    if np.any(radii < 0) or not np.all(np.isfinite(radii)):
        raise ConfigurationError("profile radii must be finite and non-negative")
    values, meta = radial_derivative(radii, dim, 0, refine, max_panels)
    derivatives = {k: radial_derivative(radii, dim, k, refine, max_panels)[0] for k in orders}
    profile = KernelProfile(
        dim=dim, radii=radii, values=values, derivatives=derivatives, quadrature_meta=meta
    )
    is_valid, errors = profile.validate()
    if not is_valid:
        raise ConfigurationError("; ".join(errors))
    return profile


class DenseProfile:
    """Cubic splines of g, g', g'', g''' on [0, 50]; zero beyond."""

    def __init__(self, dim: int, points: int = DENSE_POINTS) -> None:
        radii = np.concatenate(([0.0], np.geomspace(DENSE_R_MIN, DENSE_R_MAX, points)))
        self.dim = dim
        self.profile = profile_g(radii, dim, orders=(1, 2, 3))
        self.r_max = DENSE_R_MAX
        self._splines = {}
        for k in range(4):
            values = self.profile.derivative(k)
            # even derivatives have zero slope at the origin
            bc = ((1, 0.0), "not-a-knot") if k % 2 == 0 else "not-a-knot"
            self._splines[k] = CubicSpline(radii, values, bc_type=bc)
        logger.debug("Built dense kernel profile for dim=%d (%s)", dim, self.profile.quadrature_meta)

    def __call__(self, r, k: int = 0) -> np.ndarray:
        r = np.abs(np.asarray(r, dtype=float))
        inside = r <= self.r_max
        out = np.zeros_like(r)
        out[inside] = self._splines[k](r[inside])
        return out


@lru_cache(maxsize=4)
def dense_profile(dim: int) -> DenseProfile:
    return DenseProfile(dim)


def write_profile_csv(profile: KernelProfile, path: Union[str, os.PathLike]) -> None:
    """Columns r, g, g', g'' with 17 significant digits."""
    columns = [profile.radii, profile.values]
    for k in (1, 2):
        if k not in profile.derivatives:
            raise ConfigurationError(f"profile lacks derivative order {k} for CSV output")
        columns.append(profile.derivatives[k])
    np.savetxt(
        path,
        np.column_stack(columns),
        fmt="%.17g",
        delimiter=",",
        header="r,g,g',g''",
        comments="",
    )


def g_at_origin(dim: int) -> Optional[float]:
    """Closed form g(0): Gamma(5/4)/pi in 1D, 1/(8 sqrt(pi)) in 2D."""
    if dim == 1:
        return math.gamma(1.25) / math.pi
    if dim == 2:
        return 1.0 / (8.0 * math.sqrt(math.pi))
    return None
