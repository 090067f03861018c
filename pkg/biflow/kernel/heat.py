"""Pointwise, L^1 and moment evaluations of b(x,t) and its derivatives."""

import logging
import math
from typing import Dict, Optional, Sequence

import numpy as np
from scipy.integrate import trapezoid

from biflow.core.errors import ConfigurationError, DomainError, ResolutionError
from biflow.kernel.profile import SUPPORTED_DIMS, dense_profile, radial_derivative

logger = logging.getLogger(__name__)

L1_STEP = {1: 1e-3, 2: 1e-2}
L1_EXTENT = 50.0
MOMENT_STEP = {1: 0.05, 2: 0.25}
MOMENT_EXTENT = 50.0
MOMENT_OFFSET = 1.0 / 3.0
SMALL_R = 1e-8


def _check_time(t: float) -> None:
    if not t > 0:
        raise DomainError(f"kernel time must be positive, got {t}", t=t)


def _check_dim(dim: int) -> None:
    if dim not in SUPPORTED_DIMS:
        raise ConfigurationError(f"kernel evaluation supports dim 1 or 2, got {dim}")


def _check_order(k: int) -> None:
    if k not in (0, 1, 2, 3):
        raise ConfigurationError(f"kernel derivative order must be 0..3, got {k}")


def kernel_value(x, t: float, dim: int):
    """b(x,t) = t^(-n/4) g(|x|/t^(1/4)) from the cached dense profile.

    Args:
        x: A point (scalar in 1D, length-2 vector in 2D) or an array of radii
        t: Positive time
        dim: 1 or 2

    Returns:
        Kernel value(s) with the shape of the radial argument
    """
    _check_time(t)
    _check_dim(dim)
    r = _radius(x, dim)
    value = t ** (-dim / 4.0) * dense_profile(dim)(r / t**0.25)
    return float(value) if np.ndim(value) == 0 else value


def _radius(x, dim: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if dim == 2 and x.ndim >= 1 and x.shape[-1] == 2:
        return np.linalg.norm(x, axis=-1)
    return np.abs(x)


def radial_tensor_norm(r: np.ndarray, derivs: Dict[int, np.ndarray], k: int, dim: int) -> np.ndarray:
    """Frobenius norm of grad^k of a radial function from its radial derivatives."""
    if k == 0:
        return np.abs(derivs[0])
    if dim == 1 or k == 1:
        return np.abs(derivs[k])
    r = np.asarray(r, dtype=float)
    safe = np.where(r > SMALL_R, r, 1.0)
    if k == 2:
        tangential = np.where(r > SMALL_R, derivs[1] / safe, derivs[2])
        return np.sqrt(derivs[2] ** 2 + tangential**2)
    mixed = np.where(r > SMALL_R, derivs[2] / safe - derivs[1] / safe**2, 0.0)
    return np.sqrt(derivs[3] ** 2 + 3.0 * mixed**2)


def kernel_gradient_norm(r, t: float, k: int, dim: int):
    """|grad^k b| at distance r from the origin."""
    _check_time(t)
    _check_dim(dim)
    _check_order(k)
    profile = dense_profile(dim)
    y = np.abs(np.asarray(r, dtype=float)) / t**0.25
    derivs = {j: profile(y, j) for j in range(4)}
    value = t ** (-(dim + k) / 4.0) * radial_tensor_norm(y, derivs, k, dim)
    return float(value) if np.ndim(value) == 0 else value


def kernel_derivative_l1(k: int, t: float, dim: int, step: Optional[float] = None) -> float:
    """||grad^k b(.,t)||_{L^1} by trapezoid on a physical radial grid.

    The integrand is evaluated by direct quadrature of the profile integral,
    not by the interpolated profile.

    Raises:
        DomainError: If t <= 0
        ResolutionError: If the quadrature cannot resolve the grid extent
    """
    _check_time(t)
    _check_dim(dim)
    _check_order(k)
    step = L1_STEP[dim] if step is None else step
    scale = t**0.25
    extent = L1_EXTENT * scale
    x = np.arange(0.0, extent + step / 2, step)
    y = x / scale
    orders = {0, k} if dim == 1 else set(range(k + 1))
    derivs = {j: radial_derivative(y, dim, j)[0] for j in orders}
    integrand = t ** (-(dim + k) / 4.0) * radial_tensor_norm(y, derivs, k, dim)
    if dim == 1:
        total = 2.0 * trapezoid(integrand, x)
    else:
        total = 2.0 * math.pi * trapezoid(integrand * x, x)
    if not math.isfinite(total):
        raise ResolutionError(f"L1 quadrature for k={k}, t={t} did not converge")
    return float(total)


def moment_axis(t: float, dim: int) -> np.ndarray:
    """Quadrature nodes of moment_check, offset by a third of a step.

    The offset keeps the nodes asymmetric about 0, so the odd moment is not
    cancelled by the symmetry of the grid alone.
    """
    _check_time(t)
    _check_dim(dim)
    scale = t**0.25
    step = MOMENT_STEP[dim] * scale
    extent = MOMENT_EXTENT * scale
    return np.arange(-extent, extent + step / 2, step) + MOMENT_OFFSET * step


def moment_check(t: float, dim: int) -> tuple[float, float]:
    """Mass and first-derivative integral of b(.,t).

    Returns:
        Tuple of (mass, grad_moment) where grad_moment is the Euclidean norm
        of the integral of grad b
    """
    profile = dense_profile(dim)
    scale = t**0.25
    axis = moment_axis(t, dim)
    if dim == 1:
        y = axis / scale
        b = profile(y, 0) / scale
        db = np.sign(y) * profile(y, 1) / scale**2
        return float(trapezoid(b, axis)), float(abs(trapezoid(db, axis)))
    xx, yy = np.meshgrid(axis, axis, indexing="ij")
    r = np.hypot(xx, yy) / scale
    b = profile(r, 0) / scale**2
    radial = profile(r, 1) / scale**3
    safe = np.where(r > 0, r, 1.0)
    gx = np.where(r > 0, radial * xx / (safe * scale), 0.0)
    gy = np.where(r > 0, radial * yy / (safe * scale), 0.0)
    mass = trapezoid(trapezoid(b, axis, axis=1), axis)
    mx = trapezoid(trapezoid(gx, axis, axis=1), axis)
    my = trapezoid(trapezoid(gy, axis, axis=1), axis)
    return float(mass), float(math.hypot(mx, my))


def pointwise_bound_scan(
    dim: int, k: int, times: Sequence[float], x_max: float = 10.0, samples: int = 4001
) -> np.ndarray:
    """max over |x| <= x_max of |grad^k b(x,t)| (t^(1/4)+|x|)^(n+k), one value per t."""
    _check_dim(dim)
    _check_order(k)
    x = np.linspace(0.0, x_max, samples)
    constants = []
    for t in times:
        weight = (t**0.25 + x) ** (dim + k)
        constants.append(float(np.max(kernel_gradient_norm(x, t, k, dim) * weight)))
    return np.asarray(constants)
