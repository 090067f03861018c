"""Fixed-point iteration u_{j+1} = S(t)u0 + G(u_j) on a graded time grid."""

import logging
import math
from typing import Optional, Tuple

import numpy as np

from biflow.core.config import SolverConfig
from biflow.core.enums import Termination
from biflow.norms.solution import xt_norm
from biflow.norms.trajectory import Trajectory, graded_times
from biflow.solver.diagnostics import SolveDiagnostics
from biflow.solver.duhamel import duhamel_trajectory, semigroup_trajectory
from biflow.solver.nonlinearity import Nonlinearity
from biflow.spectral.field import Field
from biflow.spectral.operators import gradient

logger = logging.getLogger(__name__)


def scale_invariant_gradient(trajectory: Trajectory) -> Tuple[float, float]:
    """max over nodes of t^(1/4) ||grad u(t)||_inf and the node attaining it."""
    best, when = 0.0, 0.0
    for t, f in list(trajectory)[1:]:
        value = t**0.25 * gradient(f, 1).sup_norm()
        if not math.isfinite(value):
            return math.inf, t
        if value > best:
            best, when = value, t
    return best, when


def first_crossing(trajectory: Trajectory, threshold: float) -> Optional[float]:
    for t, f in list(trajectory)[1:]:
        value = t**0.25 * gradient(f, 1).sup_norm()
        if not (math.isfinite(value) and value <= threshold):
            return t
    return None


def _finite(trajectory: Trajectory) -> bool:
    return all(np.all(np.isfinite(f.values)) for f in trajectory.fields)


def picard_solve(
    u0: Field,
    T: float,
    nonlinearity: Nonlinearity,
    cfg: Optional[SolverConfig] = None,
    times: Optional[np.ndarray] = None,
) -> Tuple[Trajectory, SolveDiagnostics]:
    """Mild solution on (0, T] by Picard iteration.

    Iterates until the X_T norm of the successive difference drops below
    `cfg.picard_tol`. Non-convergence and blow-up are reported through the
    diagnostics' termination, never raised.

    Returns:
        Tuple of (latest iterate, diagnostics)
    """
    cfg = (cfg or SolverConfig()).require_valid()
    if times is None:
        times = graded_times(T, cfg.time_nodes, cfg.grading_ratio)
    linear = semigroup_trajectory(u0, times)

    diagnostics = SolveDiagnostics()
    extension = xt_norm(linear, T, stride=cfg.stride).total
    diagnostics.extension_norm = extension
    diagnostics.within_budget = extension <= cfg.smallness_budget
    diagnostics.metadata.update({"T": T, "nodes": len(times), "nonlinearity": nonlinearity.to_dict()})
    if not diagnostics.within_budget:
        logger.warning(
            "Extension norm %.4g exceeds smallness budget %.4g", extension, cfg.smallness_budget
        )

    current = Trajectory(linear.times, linear.fields)
    for iteration in range(1, cfg.max_picard_iters + 1):
        correction = duhamel_trajectory(current, nonlinearity, cfg.dealias)
        following = linear + correction
        if not _finite(following):
            diagnostics.record(math.inf, math.inf)
            diagnostics.finish(
                Termination.BLOWUP, blowup_time=first_crossing(following, cfg.blowup_threshold)
            )
            return following, diagnostics

        difference = xt_norm(following - current, T, stride=cfg.stride).total
        diagnostics.record(xt_norm(following, T, stride=cfg.stride).total, difference)
        logger.debug("Picard iterate %d: ||u_{j+1} - u_j||_X = %.3e", iteration, difference)
        current = following

        peak, _ = scale_invariant_gradient(current)
        if peak > cfg.blowup_threshold:
            diagnostics.finish(
                Termination.BLOWUP, blowup_time=first_crossing(current, cfg.blowup_threshold)
            )
            return current, diagnostics
        if difference <= cfg.picard_tol:
            diagnostics.finish(Termination.CONVERGED)
            return current, diagnostics

    diagnostics.finish(Termination.MAX_ITERS)
    logger.warning("Picard iteration stopped after %d iterations", cfg.max_picard_iters)
    return current, diagnostics
