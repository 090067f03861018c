"""Blow-up probes over an amplitude ladder."""

import logging
import math
from typing import Optional, Sequence

from biflow.core.config import SolverConfig
from biflow.core.errors import ConfigurationError
from biflow.core.result import Check, ExperimentResult
from biflow.solver.etd import blowup_probe
from biflow.solver.nonlinearity import Nonlinearity
from biflow.spectral.field import Field
from biflow.utils import parallel_map

logger = logging.getLogger(__name__)


def amplitude_ladder(first: float, count: int) -> list:
    """0 followed by first, 2 first, 4 first, ..."""
    if not first > 0 or count < 1:
        raise ConfigurationError(f"amplitude ladder needs first > 0 and count >= 1, got {first}, {count}")
    return [0.0] + [first * 2.0**j for j in range(count)]


def blowup_sweep(
    shape: Field,
    nonlinearity: Nonlinearity,
    amplitudes: Optional[Sequence[float]] = None,
    cfg: Optional[SolverConfig] = None,
    threads: int = 1,
) -> ExperimentResult:
    """blowup_probe on amplitude * shape / ||shape||_inf for every amplitude.

    Passes iff the zero-amplitude run stays below threshold and the detected
    crossing times do not increase with the amplitude.
    """
    cfg = (cfg or SolverConfig()).require_valid()
    peak = shape.sup_norm()
    if peak == 0.0:
        raise ConfigurationError("blow-up sweep needs a non-zero shape")
    amplitudes = sorted(float(a) for a in (amplitudes if amplitudes is not None else amplitude_ladder(1.0, 5)))

    reports = parallel_map(
        lambda a: blowup_probe(shape * (a / peak), nonlinearity, cfg), amplitudes, threads
    )
    detected = [1.0 if r.detected else 0.0 for r in reports]
    t_star = [r.t_star if r.t_star is not None else math.nan for r in reports]
    for a, r in zip(amplitudes, reports):
        logger.info("Amplitude %.4g: %s", a, f"crossing at t={r.t_star:.4g}" if r.detected else "no crossing")

    crossings = [t for t in t_star if not math.isnan(t)]
    increases = sum(1 for a, b in zip(crossings, crossings[1:]) if b > a * (1 + 1e-9))
    checks = [Check.at_most("monotone_crossing_times", float(increases), 0.0)]
    if 0.0 in amplitudes:
        checks.insert(0, Check.at_most("zero_data_quiet", detected[amplitudes.index(0.0)], 0.0))

    return ExperimentResult(
        name="blowup-sweep",
        inputs={"grid": shape.grid.to_dict(), "amplitudes": amplitudes, "nonlinearity": nonlinearity.to_dict(), "horizon": cfg.horizon},
        series={
            "sweep": {
                "amplitude": amplitudes,
                "detected": detected,
                "t_star": t_star,
                "horizon": [r.horizon for r in reports],
            }
        },
        checks=checks,
        metadata={"growth": {str(a): r.to_dict() for a, r in zip(amplitudes, reports)}},
    )
