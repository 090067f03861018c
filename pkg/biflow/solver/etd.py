"""First-order exponential time differencing, used as an independent oracle."""

from dataclasses import dataclass, field
import logging
import math
from typing import Callable, List, Optional, Sequence

import numpy as np

from biflow.core.config import SolverConfig
from biflow.core.enums import ETD_DIVERGENCE_LIMIT
from biflow.core.errors import BlowupError, ConfigurationError, ResolutionError
from biflow.norms.trajectory import Trajectory
from biflow.solver.duhamel import phi1
from biflow.solver.nonlinearity import Nonlinearity, source_spectrum
from biflow.spectral.field import Field
from biflow.spectral.operators import gradient

logger = logging.getLogger(__name__)

Monitor = Callable[[float, Field], bool]


@dataclass
class _Run:
    times: List[float]
    fields: List[Field]
    stopped_at: Optional[float] = None

    def trajectory(self) -> Trajectory:
        return Trajectory(self.times, self.fields, check_grading=False)


def _etd_run(
    u0: Field,
    t_start: float,
    t_end: float,
    nonlinearity: Nonlinearity,
    steps: int,
    cfg: SolverConfig,
    monitor: Optional[Monitor] = None,
) -> _Run:
    grid = u0.grid
    dt = (t_end - t_start) / steps
    z = -dt * grid.k_fourth
    decay = np.exp(z)
    weight = dt * phi1(z)
    record_every = max(1, int(math.ceil(steps / cfg.etd_record)))

    coefficients = u0.spectral
    current = u0
    run = _Run([t_start], [u0])
    for m in range(1, steps + 1):
        source = source_spectrum(current, nonlinearity, cfg.dealias)
        coefficients = decay * coefficients + weight * source
        current = Field.from_spectral(grid, coefficients)
        t = t_start + m * dt if m < steps else t_end
        sup = float(np.max(np.abs(current.values)))
        if not (math.isfinite(sup) and sup <= ETD_DIVERGENCE_LIMIT):
            run.times.append(t)
            run.fields.append(current)
            raise BlowupError(
                f"ETD field sup-norm exceeded {ETD_DIVERGENCE_LIMIT:g} at t={t:.6g}",
                time=t,
                trajectory=run.trajectory(),
            )
        if m % record_every == 0 or m == steps:
            run.times.append(t)
            run.fields.append(current)
        if monitor is not None and monitor(t, current):
            if run.times[-1] != t:
                run.times.append(t)
                run.fields.append(current)
            run.stopped_at = t
            break
    return run


def etd_solve(
    u0: Field,
    T: float,
    nonlinearity: Nonlinearity,
    cfg: Optional[SolverConfig] = None,
    monitor: Optional[Monitor] = None,
) -> Trajectory:
    """ETD1 solution on [0, T] with Richardson step-halving.

    The step count doubles from `cfg.etd_steps` until two successive final
    states agree to `cfg.etd_tol` in sup-norm. A monitor returning True
    stops the run early and skips further halving.

    Raises:
        ResolutionError: If the halving budget is exhausted
        BlowupError: If the sup-norm leaves the finite range
    """
    cfg = (cfg or SolverConfig()).require_valid()
    steps = cfg.etd_steps
    coarse = _etd_run(u0, 0.0, T, nonlinearity, steps, cfg, monitor)
    if coarse.stopped_at is not None or nonlinearity.is_linear:
        return coarse.trajectory()
    for halving in range(1, cfg.max_halvings + 1):
        steps *= 2
        fine = _etd_run(u0, 0.0, T, nonlinearity, steps, cfg, monitor)
        if fine.stopped_at is not None:
            return fine.trajectory()
        change = (fine.fields[-1] - coarse.fields[-1]).sup_norm()
        logger.debug("ETD halving %d (%d steps): change %.3e", halving, steps, change)
        if change <= cfg.etd_tol:
            return fine.trajectory()
        coarse = fine
    raise ResolutionError(
        f"ETD step-halving did not reach {cfg.etd_tol:g} within {cfg.max_halvings} halvings",
        steps=steps,
    )


@dataclass
class BlowupReport:
    """Outcome of a blow-up probe.

    Attributes:
        detected: Whether the threshold was crossed
        t_star: First crossing time, if any
        horizon: Time reached by the probe
        times: Growth curve abscissae
        growth: t^(1/4) ||grad u(t)||_inf along the run
    """

    detected: bool
    t_star: Optional[float]
    horizon: float
    times: List[float] = field(default_factory=list)
    growth: List[float] = field(default_factory=list)

    def to_dict(self):
        return {
            "detected": self.detected,
            "t_star": self.t_star,
            "horizon": self.horizon,
            "times": self.times,
            "growth": self.growth,
        }


def blowup_probe(
    u0: Field,
    nonlinearity: Nonlinearity,
    cfg: Optional[SolverConfig] = None,
    t_first: float = 1e-2,
) -> BlowupReport:
    """Run ETD on horizons t_first, 2 t_first, ... up to cfg.horizon, watching t^(1/4)||grad u||_inf.

    Returns a report whether or not blow-up is detected.
    """
    cfg = (cfg or SolverConfig()).require_valid()
    if nonlinearity.coercive and not nonlinearity.is_linear:
        logger.warning("Blow-up probe on a coercive nonlinearity")
    report = BlowupReport(detected=False, t_star=None, horizon=0.0, times=[0.0], growth=[0.0])

    def monitor(t: float, f: Field) -> bool:
        value = t**0.25 * gradient(f, 1).sup_norm()
        report.times.append(t)
        report.growth.append(value)
        return not (math.isfinite(value) and value <= cfg.blowup_threshold)

    start, state = 0.0, u0
    end = min(t_first, cfg.horizon)
    while start < cfg.horizon:
        try:
            run = _etd_run(state, start, end, nonlinearity, cfg.etd_steps, cfg, monitor)
        except BlowupError as e:
            report.detected, report.t_star, report.horizon = True, e.time, e.time
            return report
        if run.stopped_at is not None:
            report.detected, report.t_star, report.horizon = True, run.stopped_at, run.stopped_at
            return report
        start, state = end, run.fields[-1]
        report.horizon = end
        end = min(2 * end, cfg.horizon)
    return report


def etd_segments(
    u0: Field,
    breakpoints: Sequence[float],
    nonlinearity: Nonlinearity,
    cfg: Optional[SolverConfig] = None,
) -> Trajectory:
    """ETD1 across [b_0, b_1], [b_1, b_2], ... with cfg.etd_steps steps per segment.

    Used for long horizons where a single uniform step would waste work on
    the late, slowly varying part. No step-halving is attempted.

    Raises:
        ConfigurationError: If the breakpoints do not start at 0 and ascend
        BlowupError: If the sup-norm leaves the finite range
    """
    cfg = (cfg or SolverConfig()).require_valid()
    breakpoints = [float(b) for b in breakpoints]
    if len(breakpoints) < 2 or breakpoints[0] != 0.0 or any(
        b <= a for a, b in zip(breakpoints, breakpoints[1:])
    ):
        raise ConfigurationError(f"breakpoints must start at 0 and ascend, got {breakpoints}")
    times, fields = [0.0], [u0]
    state = u0
    for start, end in zip(breakpoints, breakpoints[1:]):
        run = _etd_run(state, start, end, nonlinearity, cfg.etd_steps, cfg)
        times.extend(run.times[1:])
        fields.extend(run.fields[1:])
        state = run.fields[-1]
        logger.debug("ETD segment [%g, %g] done, sup %.3e", start, end, state.sup_norm())
    return Trajectory(times, fields, check_grading=False)
