"""Cross-checks of the mild solver against its oracle and its own identities."""

import logging
import math
from typing import Mapping, Optional, Sequence

import numpy as np

from biflow.core.config import SolverConfig
from biflow.core.result import Check, ExperimentResult
from biflow.experiments.base import resolve_tolerances
from biflow.norms.solution import xt_norm
from biflow.norms.trajectory import graded_times
from biflow.solver.duhamel import duhamel_trajectory, semigroup_trajectory, trilinear_psi_trajectory
from biflow.solver.etd import etd_solve
from biflow.solver.nonlinearity import Nonlinearity
from biflow.solver.picard import picard_solve
from biflow.spectral.field import Field
from biflow.spectral.operators import apply_semigroup
from biflow.utils import parallel_map

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCES = {
    "contraction": 0.55,
    "max_iterations": 12,
    "duhamel_factor": 1.0,
    "identity_factor": 10.0,
    "oracle_factor": 10.0,
    "c2_spread": 0.5,
    "lipschitz": 6.0,
    "linear_flow": 1e-12,
}
FD_STEP = 1e-6


def fd_jacobian(nonlinearity: Nonlinearity, xi: np.ndarray) -> np.ndarray:
    """Central-difference Jacobians of F at a batch of points xi, shape (P, n) -> (P, n, n)."""
    P, n = xi.shape
    jac = np.empty((P, n, n))
    for j in range(n):
        step = np.zeros(n)
        step[j] = FD_STEP
        forward = nonlinearity.flux((xi + step).T).T
        backward = nonlinearity.flux((xi - step).T).T
        jac[:, :, j] = (forward - backward) / (2 * FD_STEP)
    return jac


def lipschitz_constant(
    nonlinearity: Nonlinearity, dim: int, pairs: int = 10_000, radius: float = 10.0, seed: int = 0
) -> float:
    """max |DF(a) - DF(b)| / ((|a| + |b|) |a - b|) over random pairs in the ball of `radius`."""
    rng = np.random.default_rng(seed)

    def sample() -> np.ndarray:
        direction = rng.normal(size=(pairs, dim))
        direction /= np.linalg.norm(direction, axis=1, keepdims=True)
        return direction * radius * rng.uniform(0.0, 1.0, size=(pairs, 1)) ** (1.0 / dim)

    a, b = sample(), sample()
    difference = np.linalg.norm(fd_jacobian(nonlinearity, a) - fd_jacobian(nonlinearity, b), axis=(1, 2))
    scale = (np.linalg.norm(a, axis=1) + np.linalg.norm(b, axis=1)) * np.linalg.norm(a - b, axis=1)
    active = scale > 1e-3
    return float(np.max(difference[active] / scale[active]))


def _case(u0: Field, T: float, nonlinearity: Nonlinearity, cfg: SolverConfig) -> dict:
    times = graded_times(T, cfg.time_nodes, cfg.grading_ratio)
    u, diagnostics = picard_solve(u0, T, nonlinearity, cfg, times=times)
    linear = semigroup_trajectory(u0, times)
    correction = duhamel_trajectory(u, nonlinearity, cfg.dealias)
    duhamel_residual = (u - linear).sup_difference(correction)

    identity_residual = math.nan
    if nonlinearity.is_cubic:
        sign = nonlinearity.sign * nonlinearity.strength
        psi = trilinear_psi_trajectory(u, u, u, cfg.dealias).map(lambda x: sign * x)
        identity_residual = (u - linear).sup_difference(psi)

    oracle = etd_solve(u0, T, nonlinearity, cfg)
    oracle_gap = (oracle.final - u.final).sup_norm()

    norm = xt_norm(u, T, stride=cfg.stride).total
    g_norm = xt_norm(correction, T, stride=cfg.stride).total
    c2 = g_norm / norm**3 if norm > 0 else math.nan
    return {
        "converged": diagnostics.converged,
        "within_budget": diagnostics.within_budget,
        "iterations": diagnostics.iterations,
        "max_ratio": diagnostics.max_ratio(skip=0),
        "duhamel": duhamel_residual,
        "identity": identity_residual,
        "oracle": oracle_gap,
        "c2": c2,
        "extension": diagnostics.extension_norm,
    }


def solver_checks(
    cases: Sequence[Field],
    nonlinearity: Nonlinearity,
    T: float = 1.0,
    cfg: Optional[SolverConfig] = None,
    tolerances: Optional[Mapping[str, float]] = None,
    tolerance_scale: float = 1.0,
    threads: int = 1,
) -> ExperimentResult:
    """Picard against ETD, contraction, Duhamel consistency, the cubic identity and C2.

    Contraction is only certified for cases inside the smallness budget.
    """
    cfg = (cfg or SolverConfig()).require_valid()
    tol = resolve_tolerances(DEFAULT_TOLERANCES, tolerances, tolerance_scale)
    results = parallel_map(lambda u0: _case(u0, T, nonlinearity, cfg), cases, threads)

    def column(key: str) -> list:
        return [float(r[key]) for r in results]

    small = [r for r in results if r["within_budget"]]
    checks = [
        Check.at_least("converged", float(sum(r["converged"] for r in results)), float(len(results))),
        Check.at_most("duhamel_consistency", max(column("duhamel")), tol["duhamel_factor"] * cfg.picard_tol),
        Check.at_most("oracle_agreement", max(column("oracle")), tol["oracle_factor"] * cfg.picard_tol),
    ]
    if small:
        checks.append(Check.at_most("contraction", max(r["max_ratio"] for r in small), tol["contraction"]))
        checks.append(Check.at_most("iterations", float(max(r["iterations"] for r in small)), tol["max_iterations"]))
    else:
        checks.append(Check.inconclusive("contraction", math.nan, tol["contraction"], reason="no case within budget"))
    if nonlinearity.is_cubic:
        checks.append(
            Check.at_most("trilinear_identity", max(column("identity")), tol["identity_factor"] * cfg.picard_tol)
        )
        checks.append(
            Check.at_most("lipschitz", lipschitz_constant(nonlinearity, cases[0].grid.dim), tol["lipschitz"])
        )
    c2 = [c for c in column("c2") if math.isfinite(c) and c > 0]
    if len(c2) > 1:
        checks.append(Check.relative_spread("c2_spread", c2, tol["c2_spread"]))

    u0 = cases[0]
    linear = etd_solve(u0, T, Nonlinearity.linear(), cfg)
    checks.append(Check.at_most("linear_flow", (linear.final - apply_semigroup(u0, T)).sup_norm(), tol["linear_flow"]))

    series = {"cases": {key: column(key) for key in ("extension", "iterations", "max_ratio", "duhamel", "identity", "oracle", "c2")}}
    series["cases"]["case"] = list(range(len(results)))
    return ExperimentResult(
        name="solver-checks",
        inputs={"grid": u0.grid.to_dict(), "cases": len(cases), "T": T, "nonlinearity": nonlinearity.to_dict(), "solver": cfg.to_dict()},
        series=series,
        checks=checks,
        tolerances=tol,
        metadata={"C2": float(np.mean(c2)) if c2 else None},
    )
