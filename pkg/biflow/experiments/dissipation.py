"""Energy dissipation, long-time decay and the perturbation energy growth."""

import logging
import math
from typing import Mapping, Optional, Sequence

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.stats import linregress

from biflow.core.config import SolverConfig
from biflow.core.errors import BlowupError, ConfigurationError, SmallnessViolationError
from biflow.core.result import Check, ExperimentResult
from biflow.experiments.base import resolve_tolerances
from biflow.norms.energy import energy, gradient_lp
from biflow.norms.solution import xt_norm
from biflow.norms.trajectory import Trajectory, graded_times
from biflow.solver.duhamel import semigroup_trajectory
from biflow.solver.etd import etd_segments, etd_solve
from biflow.solver.nonlinearity import Nonlinearity
from biflow.spectral.field import Field
from biflow.spectral.operators import gradient

logger = logging.getLogger(__name__)

DISSIPATION_TOLERANCES = {"energy_slack": 1e-8, "gradient_slack": 1e-6}
DECAY_TOLERANCES = {"residual_fraction": 0.1}
PERTURBATION_TOLERANCES = {"beta_max": 0.25}
DECAY_BREAKPOINTS = (0.0, 1.0, 10.0, 100.0, 1000.0)


def decay_proxy(trajectory: Trajectory) -> np.ndarray:
    """s(t) = t^(1/4) ||grad u||_inf + t^(1/2) ||grad^2 u||_inf at every node."""
    values = []
    for t, f in trajectory:
        values.append(t**0.25 * gradient(f, 1).sup_norm() + t**0.5 * gradient(f, 2).sup_norm())
    return np.array(values)


def _laplacian_l2_sq(field: Field) -> float:
    lap = Field.from_spectral(field.grid, -field.grid.k_squared * field.spectral)
    return float(np.sum(lap.values**2) * field.grid.cell_volume)


def _require_cubic(nonlinearity: Nonlinearity) -> None:
    if not nonlinearity.is_cubic:
        raise ConfigurationError(f"experiment needs a cubic nonlinearity, got {nonlinearity.kind.value}")


class _StepLog:
    """ETD monitor keeping E and ||grad u||_{L^4} after every step of the latest pass.

    A time at or before the last logged one means step-halving restarted the
    run, so the log rewinds to the initial state.
    """

    def __init__(self, u0: Field, sign: int) -> None:
        self.sign = sign
        self.times = [0.0]
        self.energies = [energy(u0, sign)]
        self.slopes = [gradient_lp(u0, 4.0)]

    def __call__(self, t: float, field: Field) -> bool:
        if t <= self.times[-1]:
            del self.times[1:], self.energies[1:], self.slopes[1:]
        self.times.append(t)
        self.energies.append(energy(field, self.sign))
        self.slopes.append(gradient_lp(field, 4.0))
        return False

    def __len__(self) -> int:
        return len(self.times) - 1

    def sampled(self, nodes: int) -> dict:
        """Every ceil(steps / nodes)-th entry plus the last."""
        every = max(1, int(math.ceil(len(self) / nodes)))
        keep = list(range(0, len(self.times), every))
        if keep[-1] != len(self.times) - 1:
            keep.append(len(self.times) - 1)
        return {
            "t": [self.times[i] for i in keep],
            "energy": [self.energies[i] for i in keep],
            "grad_l4": [self.slopes[i] for i in keep],
        }


def dissipation_run(
    u0: Field,
    nonlinearity: Nonlinearity,
    T: float = 1.0,
    cfg: Optional[SolverConfig] = None,
    tolerances: Optional[Mapping[str, float]] = None,
    tolerance_scale: float = 1.0,
) -> ExperimentResult:
    """Record E(u(t)) and ||grad u(t)||_{L^4} after every ETD step.

    Coercive runs pass iff no single step raises E by more than
    `energy_slack` and ||grad u||_{L^4} never exceeds its initial value by
    more than `gradient_slack`. The stored curves keep `cfg.etd_record`
    samples of the step log. Non-coercive runs keep the curves and take their
    verdict from decay_run.
    """
    _require_cubic(nonlinearity)
    cfg = (cfg or SolverConfig()).require_valid()
    tol = resolve_tolerances(DISSIPATION_TOLERANCES, tolerances, tolerance_scale)
    inputs = {"grid": u0.grid.to_dict(), "T": T, "nonlinearity": nonlinearity.to_dict()}
    checks = []
    log = _StepLog(u0, nonlinearity.sign)
    try:
        etd_solve(u0, T, nonlinearity, cfg, monitor=log)
    except BlowupError as e:
        logger.error("Blow-up at t=%.4g during dissipation run", e.time)
        checks.append(Check.at_most("no_blowup", 1.0, 0.0, time=e.time))

    energies = np.array(log.energies)
    slopes = np.array(log.slopes)
    series = {"curves": log.sampled(cfg.etd_record)}
    metadata = {"steps_checked": len(log)}

    if nonlinearity.coercive:
        increase = float(np.max(np.diff(energies), initial=0.0))
        excess = float(np.max(slopes, initial=0.0) - slopes[0])
        checks.append(Check.at_most("energy_monotone", increase, tol["energy_slack"]))
        checks.append(Check.at_most("grad_l4_bounded", excess, tol["gradient_slack"]))
    else:
        decay = decay_run(u0, nonlinearity, cfg=cfg, tolerance_scale=tolerance_scale)
        checks.extend(decay.checks)
        series["decay"] = decay.series["decay"]
        metadata["decay"] = decay.metadata

    return ExperimentResult(
        name="dissipation-run",
        inputs=inputs,
        series=series,
        checks=checks,
        tolerances=tol,
        metadata=metadata,
    )


def decay_run(
    u0: Field,
    nonlinearity: Nonlinearity,
    breakpoints: Sequence[float] = DECAY_BREAKPOINTS,
    cfg: Optional[SolverConfig] = None,
    tolerances: Optional[Mapping[str, float]] = None,
    tolerance_scale: float = 1.0,
) -> ExperimentResult:
    """Pass iff s(t) at the last breakpoint is at most `residual_fraction` of its peak.

    Raises:
        SmallnessViolationError: If ||S(.)u0||_{X_1} exceeds the smallness budget
    """
    _require_cubic(nonlinearity)
    cfg = (cfg or SolverConfig()).require_valid()
    tol = resolve_tolerances(DECAY_TOLERANCES, tolerances, tolerance_scale)

    extension = xt_norm(semigroup_trajectory(u0, graded_times(1.0, cfg.time_nodes)), 1.0, stride=cfg.stride).total
    if extension > cfg.smallness_budget:
        raise SmallnessViolationError(
            f"initial data extension norm {extension:.4g} exceeds the smallness budget {cfg.smallness_budget:.4g}",
            extension_norm=extension,
        )

    inputs = {"grid": u0.grid.to_dict(), "breakpoints": list(breakpoints), "nonlinearity": nonlinearity.to_dict()}
    try:
        trajectory = etd_segments(u0, breakpoints, nonlinearity, cfg)
    except BlowupError as e:
        logger.error("Blow-up at t=%.4g during decay run", e.time)
        proxy = decay_proxy(e.trajectory)
        return ExperimentResult(
            name="decay-run",
            inputs=inputs,
            series={"decay": {"t": list(e.trajectory.times), "s": proxy.tolist()}},
            checks=[Check.at_most("no_blowup", 1.0, 0.0, time=e.time)],
            tolerances=tol,
            metadata={"extension_norm": extension, "blowup_time": e.time},
        )

    proxy = decay_proxy(trajectory)
    peak = float(np.max(proxy))
    final = float(proxy[-1])
    if peak == 0.0:
        check = Check.at_most("residual_fraction", 0.0, tol["residual_fraction"], trivial=True)
    else:
        check = Check.at_most("residual_fraction", final / peak, tol["residual_fraction"], peak=peak, final=final)
    return ExperimentResult(
        name="decay-run",
        inputs=inputs,
        series={"decay": {"t": list(trajectory.times), "s": proxy.tolist()}},
        checks=[check],
        tolerances=tol,
        metadata={"extension_norm": extension, "peak_time": float(trajectory.times[int(np.argmax(proxy))])},
    )


def decay_amplitude_scan(
    shape: Field,
    nonlinearity: Nonlinearity,
    amplitudes: Sequence[float],
    breakpoints: Sequence[float] = DECAY_BREAKPOINTS,
    cfg: Optional[SolverConfig] = None,
    tolerance_scale: float = 1.0,
) -> ExperimentResult:
    """decay_run on amplitude * shape / ||shape||_inf; reports the largest passing amplitude."""
    peak = shape.sup_norm()
    if peak == 0.0:
        raise ConfigurationError("amplitude scan needs a non-zero shape")
    amplitudes = sorted(float(a) for a in amplitudes)
    outcomes, fractions = [], []
    largest = None
    for amplitude in amplitudes:
        try:
            run = decay_run(shape * (amplitude / peak), nonlinearity, breakpoints, cfg, tolerance_scale=tolerance_scale)
        except SmallnessViolationError as e:
            logger.info("Amplitude %.3g beyond budget: %s", amplitude, e)
            outcomes.append("beyond_budget")
            fractions.append(math.nan)
            continue
        outcomes.append(run.verdict.value)
        fractions.append(run.checks[0].value if run.checks[0].name == "residual_fraction" else math.nan)
        if run.passed:
            largest = amplitude

    if largest is None:
        check = Check.inconclusive("largest_passing_amplitude", 0.0, 0.0)
    else:
        check = Check.at_least("largest_passing_amplitude", largest, 0.0)
    return ExperimentResult(
        name="decay-run",
        inputs={"grid": shape.grid.to_dict(), "amplitudes": amplitudes, "nonlinearity": nonlinearity.to_dict()},
        series={"amplitude_scan": {"amplitude": amplitudes, "residual_fraction": fractions}},
        checks=[check],
        metadata={"outcomes": outcomes, "largest_passing_amplitude": largest},
    )


def perturbation_energy(
    f0: Field,
    g0: Field,
    nonlinearity: Nonlinearity,
    segments: int = 6,
    cfg: Optional[SolverConfig] = None,
    tolerances: Optional[Mapping[str, float]] = None,
    tolerance_scale: float = 1.0,
) -> ExperimentResult:
    """Growth of ||f(t)||_{L^2}^2 for f = u - g, u from f0 + g0 and g from g0.

    Both runs are sampled on t_k = e^k, k = 0..segments; the growth exponent
    beta of ||f(t)||^2 <= C t^beta is fitted for t >= 1.
    """
    _require_cubic(nonlinearity)
    if not nonlinearity.coercive:
        raise ConfigurationError("perturbation energy runs on the coercive nonlinearity")
    cfg = (cfg or SolverConfig()).require_valid()
    tol = resolve_tolerances(PERTURBATION_TOLERANCES, tolerances, tolerance_scale)
    breakpoints = [0.0] + [math.exp(k) for k in range(segments + 1)]
    u = etd_segments(f0 + g0, breakpoints, nonlinearity, cfg)
    g = etd_segments(g0, breakpoints, nonlinearity, cfg)
    f = u - g

    times = np.array(f.times)
    l2 = np.array([float(np.sum(x.values**2) * x.grid.cell_volume) for x in f.fields])
    laplace = np.array([_laplacian_l2_sq(x) for x in f.fields])
    dissipated = cumulative_trapezoid(laplace, times, initial=0.0)

    sampled = [f.node_index(t) for t in breakpoints[1:]]
    t_k, l2_k = times[sampled], l2[sampled]
    positive = l2_k > 0
    if positive.sum() < 3:
        beta = 0.0
        check = Check.at_most("beta", beta, tol["beta_max"], trivial=True)
    else:
        fit = linregress(np.log(t_k[positive]), np.log(l2_k[positive]))
        beta = float(fit.slope)
        check = Check.at_most("beta", beta, tol["beta_max"], r_squared=fit.rvalue**2)

    return ExperimentResult(
        name="perturbation-energy",
        inputs={"grid": f0.grid.to_dict(), "segments": segments, "nonlinearity": nonlinearity.to_dict()},
        series={
            "sampled": {"t": t_k.tolist(), "f_l2_sq": l2_k.tolist(), "laplace_integral": dissipated[sampled].tolist()}
        },
        checks=[check],
        tolerances=tol,
        metadata={"beta": beta},
    )
