"""Numerical verification of the kernel moments, pointwise bounds and L^1 scaling."""

import logging
from typing import Mapping, Optional

import numpy as np

from biflow.core.result import Check, ExperimentResult
from biflow.experiments.base import resolve_tolerances
from biflow.kernel.heat import kernel_derivative_l1, moment_check, pointwise_bound_scan

logger = logging.getLogger(__name__)

MOMENT_TIMES = (0.1, 1.0, 10.0)
L1_TIMES = (0.25, 1.0, 4.0)
SCAN_TIMES = tuple(np.geomspace(0.1, 4.0, 7))
ORDERS = (0, 1, 2, 3)


def default_tolerances(dim: int) -> dict:
    return {
        "mass": 1e-6 if dim == 1 else 1e-5,
        "grad_moment": 1e-6 if dim == 1 else 1e-5,
        "pointwise_spread": 0.10,
        "l1_spread": 0.01,
        "l1_overshoot": 0.5,
    }


def verify_kernel(
    dim: int,
    tolerances: Optional[Mapping[str, float]] = None,
    tolerance_scale: float = 1.0,
) -> ExperimentResult:
    """Moments at t in {0.1, 1, 10}, pointwise-bound scan and L^1 scaling for k <= 3."""
    tol = resolve_tolerances(default_tolerances(dim), tolerances, tolerance_scale)
    checks = []
    moments = {"t": [], "mass": [], "grad_moment": []}
    for t in MOMENT_TIMES:
        mass, grad_moment = moment_check(t, dim)
        moments["t"].append(t)
        moments["mass"].append(mass)
        moments["grad_moment"].append(grad_moment)
        checks.append(Check.at_most(f"mass_error_t={t:g}", abs(mass - 1.0), tol["mass"]))
        checks.append(Check.at_most(f"grad_moment_t={t:g}", abs(grad_moment), tol["grad_moment"]))

    pointwise = {"k": [], "t": [], "constant": []}
    for k in ORDERS:
        constants = pointwise_bound_scan(dim, k, SCAN_TIMES)
        pointwise["k"].extend([k] * len(SCAN_TIMES))
        pointwise["t"].extend(SCAN_TIMES)
        pointwise["constant"].extend(constants.tolist())
        checks.append(
            Check.relative_spread(
                f"pointwise_constant_k={k}",
                constants,
                tol["pointwise_spread"],
                mean=float(np.mean(constants)),
            )
        )

    l1 = {"k": [], "t": [], "l1": [], "scaled": []}
    for k in ORDERS:
        scaled = []
        for t in L1_TIMES:
            value = kernel_derivative_l1(k, t, dim)
            l1["k"].append(k)
            l1["t"].append(t)
            l1["l1"].append(value)
            scaled.append(value * t ** (k / 4.0))
        l1["scaled"].extend(scaled)
        checks.append(Check.relative_spread(f"l1_scaling_k={k}", scaled, tol["l1_spread"]))
        if k == 0:
            checks.append(Check.at_least("l1_mass_lower", min(l1["l1"][-3:]), 1.0 - tol["mass"]))
            checks.append(Check.at_most("l1_mass_upper", max(l1["l1"][-3:]), 1.0 + tol["l1_overshoot"]))

    logger.info("Kernel verification dim=%d finished", dim)
    return ExperimentResult(
        name="verify-kernel",
        inputs={"dim": dim},
        series={"moments": moments, "pointwise": pointwise, "l1": l1},
        checks=checks,
        tolerances=tol,
        metadata={
            "l1_constants": {
                str(k): float(np.mean(l1["scaled"][3 * k : 3 * k + 3])) for k in ORDERS
            }
        },
    )
