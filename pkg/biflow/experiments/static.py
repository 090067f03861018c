"""Residual of the radial static equation Delta^2 u = div F(grad u) in four dimensions.

With s = ln r and F(xi) = -|xi|^2 xi the two sides read

    Delta^2 u   = r^-4 (u_ssss - 4 u_ss)
    div F(grad u) = -3 r^-4 u_s^2 u_ss

so u = +-2 ln r makes both vanish and u = r^2 leaves 48 r^2.
"""

from dataclasses import dataclass
import logging
import math
from typing import Mapping, Optional

import numpy as np

from biflow.core.errors import ConfigurationError
from biflow.core.result import Check, ExperimentResult
from biflow.experiments.base import resolve_tolerances

logger = logging.getLogger(__name__)

STATIC_DIM = 4
MIN_PROFILE_POINTS = 200
R_WINDOW = (0.5, 50.0)
STENCIL_SPAN = 0.05
LOG_SPACING_RTOL = 1e-6
DEFAULT_TOLERANCES = {"residual": 1e-6, "discrimination": 1e3}


@dataclass(frozen=True)
class RadialProfile:
    """A radial function u(r) sampled on log-spaced radii.

    Attributes:
        dim: Ambient dimension (4)
        radii: Strictly ascending, log-uniform radii inside [0.5, 50]
        values: u at each radius
    """

    dim: int
    radii: np.ndarray
    values: np.ndarray

    def validate(self) -> tuple[bool, list[str]]:
        """Validate the profile.

        Returns:
            Tuple of (is_valid, error_messages)
        """
        errors = []
        radii = np.asarray(self.radii, dtype=float)
        if self.dim != STATIC_DIM:
            errors.append(f"dim must be {STATIC_DIM}, got {self.dim}")
        if radii.ndim != 1 or radii.shape != np.shape(self.values):
            errors.append("radii and values must be 1-D arrays of equal length")
            return False, errors
        if radii.size < MIN_PROFILE_POINTS:
            errors.append(f"profile needs at least {MIN_PROFILE_POINTS} points, got {radii.size}")
        if radii.size and (radii[0] < R_WINDOW[0] * (1 - 1e-12) or radii[-1] > R_WINDOW[1] * (1 + 1e-12)):
            errors.append(f"radii must lie in [{R_WINDOW[0]}, {R_WINDOW[1]}]")
        steps = np.diff(np.log(radii)) if np.all(radii > 0) else np.array([-1.0])
        if np.any(steps <= 0):
            errors.append("radii must be positive and strictly ascending")
        elif steps.size and np.max(np.abs(steps - steps.mean())) > LOG_SPACING_RTOL * steps.mean():
            errors.append("radii must be log-uniformly spaced")
        if not np.all(np.isfinite(self.values)):
            errors.append("values must be finite")
        return len(errors) == 0, errors

    @property
    def log_step(self) -> float:
        return float(math.log(self.radii[-1] / self.radii[0]) / (len(self.radii) - 1))


def log_profile(
    sign: int = 1,
    points: int = 1000,
    r_min: float = R_WINDOW[0],
    r_max: float = R_WINDOW[1],
) -> RadialProfile:
    """The static profile sign * 2 ln r."""
    radii = np.geomspace(r_min, r_max, points)
    return RadialProfile(STATIC_DIM, radii, sign * 2.0 * np.log(radii))


def power_profile(exponent: float = 2.0, points: int = 1000) -> RadialProfile:
    """r^exponent, a non-static comparison profile."""
    radii = np.geomspace(*R_WINDOW, points)
    return RadialProfile(STATIC_DIM, radii, radii**exponent)


def _stencils(u: np.ndarray, stride: int, H: float):
    """First, second and fourth s-derivatives on the interior, fourth order in H."""
    c = 3 * stride
    n = len(u)

    def at(j: int) -> np.ndarray:
        return u[c + j * stride : n - c + j * stride]

    first = (-at(2) + 8 * at(1) - 8 * at(-1) + at(-2)) / (12 * H)
    second = (-at(2) + 16 * at(1) - 30 * at(0) + 16 * at(-1) - at(-2)) / (12 * H**2)
    fourth = (-at(3) + 12 * at(2) - 39 * at(1) + 56 * at(0) - 39 * at(-1) + 12 * at(-2) - at(-3)) / (6 * H**4)
    return slice(c, n - c), first, second, fourth


def static_residual(
    profile: RadialProfile,
    tolerances: Optional[Mapping[str, float]] = None,
    tolerance_scale: float = 1.0,
) -> ExperimentResult:
    """max |Delta^2 u - div F(grad u)| over the interior of the profile.

    The stencil stride is the smallest multiple of the log step reaching 0.05,
    which keeps the fourth difference away from the rounding floor.

    Raises:
        ConfigurationError: If the profile is invalid or too coarse
    """
    is_valid, errors = profile.validate()
    if not is_valid:
        raise ConfigurationError("invalid radial profile: " + "; ".join(errors))
    tol = resolve_tolerances({"residual": DEFAULT_TOLERANCES["residual"]}, tolerances, tolerance_scale)

    ds = profile.log_step
    stride = max(1, math.ceil(STENCIL_SPAN / ds - 1e-9))
    H = stride * ds
    if len(profile.radii) <= 6 * stride:
        raise ConfigurationError("profile too short for the finite-difference stencil")
    interior, u_s, u_ss, u_ssss = _stencils(np.asarray(profile.values, dtype=float), stride, H)
    r = np.asarray(profile.radii)[interior]
    lhs = (u_ssss - 4.0 * u_ss) / r**4
    rhs = -3.0 * u_s**2 * u_ss / r**4
    residual = np.abs(lhs - rhs)
    worst = float(np.max(residual))
    logger.info("Static residual %.3e with stencil stride %d", worst, stride)

    return ExperimentResult(
        name="static-residual",
        inputs={"dim": profile.dim, "points": len(profile.radii), "r_min": float(profile.radii[0]), "r_max": float(profile.radii[-1])},
        series={"residual": {"r": r.tolist(), "lhs": lhs.tolist(), "rhs": rhs.tolist(), "residual": residual.tolist()}},
        checks=[Check.at_most("residual", worst, tol["residual"], r_at_max=float(r[int(np.argmax(residual))]))],
        tolerances=tol,
        metadata={"stride": stride, "H": H},
    )


def static_study(
    points: int = 1000,
    tolerances: Optional[Mapping[str, float]] = None,
    tolerance_scale: float = 1.0,
) -> ExperimentResult:
    """+-2 ln r must be static; r^2 must leave a residual `discrimination` times larger."""
    tol = resolve_tolerances(DEFAULT_TOLERANCES, tolerances, tolerance_scale)
    overrides = {"residual": tol["residual"]}
    plus = static_residual(log_profile(1, points), overrides)
    minus = static_residual(log_profile(-1, points), overrides)
    quadratic = static_residual(power_profile(2.0, points), overrides)

    floor = max(plus.check("residual").value, minus.check("residual").value)
    contrast = quadratic.check("residual").value / max(floor, tol["residual"])
    checks = [
        Check("plus_log:residual", **_fields(plus.check("residual"))),
        Check("minus_log:residual", **_fields(minus.check("residual"))),
        Check.at_least("discrimination", contrast, tol["discrimination"]),
    ]
    return ExperimentResult(
        name="static-residual",
        inputs={"points": points},
        series={
            "profiles": {
                "r": plus.series["residual"]["r"],
                "plus_log": plus.series["residual"]["residual"],
                "minus_log": minus.series["residual"]["residual"],
                "r_squared": quadratic.series["residual"]["residual"],
            }
        },
        checks=checks,
        tolerances=tol,
        metadata={"r_squared_residual": quadratic.check("residual").value, "stride": plus.metadata["stride"]},
    )


def _fields(check: Check) -> dict:
    return {"value": check.value, "limit": check.limit, "verdict": check.verdict, "details": check.details}
