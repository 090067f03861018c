"""Scaling invariance a_lambda(x) = a(lambda x), u_lambda(x, t) = u(lambda x, lambda^4 t)."""

import logging
from typing import Mapping, Optional, Sequence

import numpy as np

from biflow.core.config import SolverConfig
from biflow.core.enums import NonlinearityKind
from biflow.core.errors import ConfigurationError
from biflow.core.result import Check, ExperimentResult
from biflow.experiments.base import resolve_tolerances
from biflow.norms.seminorms import carleson_bmo
from biflow.solver.nonlinearity import Nonlinearity
from biflow.solver.picard import picard_solve
from biflow.spectral.field import Field
from biflow.spectral.grid import make_grid

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCES = {"norm_identity": 0.02, "equivariance": 0.02}


def rescale(a: Field, lam: float) -> Field:
    """a(lambda .) on the box of side L / lambda, sharing a's samples."""
    grid = a.grid
    small = make_grid(grid.dim, grid.points_per_axis, grid.box_length / lam)
    return Field(small, a.values)


def _relative(lhs: float, rhs: float) -> float:
    scale = max(abs(lhs), abs(rhs))
    return 0.0 if scale == 0.0 else abs(lhs - rhs) / scale


def scaling_check(
    a: Field,
    lam: float = 2.0,
    radii: Optional[Sequence[float]] = None,
    T: float = 1.0,
    nonlinearity: Optional[Nonlinearity] = None,
    cfg: Optional[SolverConfig] = None,
    tolerances: Optional[Mapping[str, float]] = None,
    tolerance_scale: float = 1.0,
) -> ExperimentResult:
    """Compare ||a_lambda||_{BMO_R} with ||a||_{BMO_{lambda R}} and u_lambda with the solve of a_lambda.

    Radii are taken on the rescaled box and default to L / (4 lambda^j), j = 1..3.
    """
    if lam != 2.0:
        raise ConfigurationError(f"scaling check runs on nested grids with lambda = 2, got {lam}")
    tol = resolve_tolerances(DEFAULT_TOLERANCES, tolerances, tolerance_scale)
    nonlinearity = nonlinearity or Nonlinearity(NonlinearityKind.CUBIC_COERCIVE)
    if not nonlinearity.is_cubic:
        raise ConfigurationError("scaling invariance holds for the cubic nonlinearity only")
    cfg = (cfg or SolverConfig()).require_valid()

    scaled = rescale(a, lam)
    L = a.grid.box_length
    if radii is None:
        radii = [L / (4 * lam**j) for j in (1, 2, 3) if L / (4 * lam**j) >= 8 * scaled.grid.spacing]
    radii = list(radii)
    if not radii:
        raise ConfigurationError(f"grid of {a.grid.points_per_axis} points is too coarse for the scaling check")
    lhs = [carleson_bmo(scaled, R, stride=cfg.stride) for R in radii]
    rhs = [carleson_bmo(a, lam * R, stride=cfg.stride) for R in radii]
    errors = [_relative(x, y) for x, y in zip(lhs, rhs)]
    checks = [Check.at_most("norm_identity", max(errors), tol["norm_identity"])]

    u, diag_u = picard_solve(a, T, nonlinearity, cfg)
    u_scaled, diag_scaled = picard_solve(scaled, T / lam**4, nonlinearity, cfg)
    reference = u.final.values
    peak = float(np.max(np.abs(reference)))
    mismatch = float(np.max(np.abs(u_scaled.final.values - reference)))
    equivariance = mismatch / peak if peak > 0 else mismatch
    if diag_u.converged and diag_scaled.converged:
        checks.append(Check.at_most("solver_equivariance", equivariance, tol["equivariance"]))
    else:
        checks.append(
            Check.inconclusive(
                "solver_equivariance",
                equivariance,
                tol["equivariance"],
                termination=[diag_u.termination.value, diag_scaled.termination.value],
            )
        )
    logger.info("Scaling: norm identity %.3e, equivariance %.3e", max(errors), equivariance)

    return ExperimentResult(
        name="scaling-check",
        inputs={"grid": a.grid.to_dict(), "lambda": lam, "T": T, "nonlinearity": nonlinearity.to_dict()},
        series={"norm_identity": {"R": radii, "scaled": lhs, "original": rhs, "relative_error": errors}},
        checks=checks,
        tolerances=tol,
        metadata={"equivariance": equivariance, "picard_iterations": [diag_u.iterations, diag_scaled.iterations]},
    )
