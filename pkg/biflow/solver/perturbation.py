"""The perturbation equation for w = u - v around a solution u.

For a cubic F with sign sigma, expanding Psi(u - w, u - w, u - w) gives

    w = S(t) w0 + L_{u,u} w - B_u(w, w) + sigma Psi(w, w, w),

which is solved by direct iteration from w = S(t) w0.
"""

import logging
import math
from typing import Optional, Tuple

from biflow.core.config import SolverConfig
from biflow.core.enums import Termination
from biflow.core.errors import ConfigurationError, SmallnessViolationError
from biflow.norms.solution import xt_norm
from biflow.norms.trajectory import Trajectory
from biflow.solver.diagnostics import SolveDiagnostics
from biflow.solver.duhamel import (
    bilinear_operator,
    linear_operator,
    semigroup_trajectory,
    trilinear_psi_trajectory,
)
from biflow.solver.nonlinearity import Nonlinearity
from biflow.spectral.field import Field

logger = logging.getLogger(__name__)

DIVERGENCE_GROWTH = 1e3
GROWING_STREAK = 3


def perturbation_solve(
    u: Trajectory,
    w0: Field,
    nonlinearity: Nonlinearity,
    cfg: Optional[SolverConfig] = None,
) -> Tuple[Trajectory, SolveDiagnostics]:
    """Solve for w on the nodes of u.

    Raises:
        ConfigurationError: If the nonlinearity is not cubic
        SmallnessViolationError: If S(.)w0 exceeds the smallness budget or
            the iteration diverges
    """
    if not nonlinearity.is_cubic:
        raise ConfigurationError("perturbation solve needs a cubic nonlinearity")
    cfg = (cfg or SolverConfig()).require_valid()
    T = u.T
    sign = nonlinearity.sign * nonlinearity.strength
    forcing = semigroup_trajectory(w0, u.times)

    diagnostics = SolveDiagnostics()
    extension = xt_norm(forcing, T, stride=cfg.stride).total
    diagnostics.extension_norm = extension
    diagnostics.within_budget = extension <= cfg.smallness_budget
    if not diagnostics.within_budget:
        raise SmallnessViolationError(
            f"perturbation extension norm {extension:.4g} exceeds budget {cfg.smallness_budget:.4g}",
            extension_norm=extension,
        )

    current = forcing
    if sign == 0:
        diagnostics.record(extension, 0.0)
        diagnostics.finish(Termination.CONVERGED)
        return current, diagnostics

    growing = 0
    for iteration in range(1, cfg.max_picard_iters + 1):
        following = (
            forcing
            + linear_operator(u, u, current, sign, cfg.dealias)
            - bilinear_operator(u, current, sign, cfg.dealias)
            + trilinear_psi_trajectory(current, current, current, cfg.dealias).map(
                lambda x: sign * x
            )
        )
        difference = xt_norm(following - current, T, stride=cfg.stride).total
        norm = xt_norm(following, T, stride=cfg.stride).total
        diagnostics.record(norm, difference)
        logger.debug("Perturbation iterate %d: difference %.3e", iteration, difference)
        current = following

        if not math.isfinite(difference) or norm > DIVERGENCE_GROWTH * max(extension, 1e-300):
            growing = GROWING_STREAK
        elif diagnostics.ratios and diagnostics.ratios[-1] > 1.0:
            growing += 1
        else:
            growing = 0
        if growing >= GROWING_STREAK:
            raise SmallnessViolationError(
                f"perturbation iteration diverges (difference {difference:.3e})",
                iterations=iteration,
            )
        if difference <= cfg.picard_tol:
            diagnostics.finish(Termination.CONVERGED)
            return current, diagnostics

    diagnostics.finish(Termination.MAX_ITERS)
    return current, diagnostics
