"""Empirical constants of the BMO seminorms over a randomized family."""

import logging
import math
from typing import Mapping, Optional, Sequence

import numpy as np

from biflow.core.result import Check, ExperimentResult, relative_spread
from biflow.experiments.base import resolve_tolerances
from biflow.norms.seminorms import carleson_bmo, oscillation_bmo, poincare_ratio
from biflow.spectral.field import Field
from biflow.utils import parallel_map

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCES = {"domination_spread": 0.2, "stride_agreement": 0.05}


def _relative(coarse: float, fine: float) -> float:
    return 0.0 if fine == 0.0 else abs(coarse - fine) / abs(fine)


def bmo_family(
    fields: Sequence[Field],
    R: Optional[float] = None,
    stride: int = 4,
    tolerances: Optional[Mapping[str, float]] = None,
    tolerance_scale: float = 1.0,
    threads: int = 1,
) -> ExperimentResult:
    """Carleson domination by oscillation at 2R, stride refinement and the Poincare constant.

    R defaults to an eighth of the box so that 2R stays inside the ball family.
    """
    tol = resolve_tolerances(DEFAULT_TOLERANCES, tolerances, tolerance_scale)
    grid = fields[0].grid
    R = grid.box_length / 8 if R is None else R

    def measure(a: Field) -> dict:
        carleson = carleson_bmo(a, R, stride=stride)
        oscillation = oscillation_bmo(a, 2 * R, stride=stride)
        return {
            "carleson": carleson,
            "oscillation": oscillation,
            "carleson_fine": carleson_bmo(a, R, stride=1),
            "oscillation_fine": oscillation_bmo(a, 2 * R, stride=1),
            "poincare": poincare_ratio(a, 2 * R, stride=stride),
        }

    rows = parallel_map(measure, fields, threads)
    constants = [r["carleson"] / r["oscillation"] if r["oscillation"] > 0 else math.inf for r in rows]
    stride_error = [
        max(_relative(r["carleson"], r["carleson_fine"]), _relative(r["oscillation"], r["oscillation_fine"]))
        for r in rows
    ]
    poincare = [r["poincare"] for r in rows]
    logger.info("Domination constants spread %.3f", relative_spread(constants))

    checks = [
        Check.relative_spread("domination_spread", constants, tol["domination_spread"]),
        Check.at_most("stride_agreement", max(stride_error), tol["stride_agreement"]),
        Check.at_most("poincare_finite", 0.0 if all(math.isfinite(p) for p in poincare) else 1.0, 0.0),
    ]
    series = {"family": {key: [r[key] for r in rows] for key in rows[0]}}
    series["family"].update({"constant": constants, "stride_error": stride_error})
    return ExperimentResult(
        name="bmo-family",
        inputs={"grid": grid.to_dict(), "R": R, "stride": stride, "draws": len(fields)},
        series=series,
        checks=checks,
        tolerances=tol,
        metadata={
            "domination_constant": float(np.mean(constants)),
            "poincare_constant": float(max(poincare)),
        },
    )
