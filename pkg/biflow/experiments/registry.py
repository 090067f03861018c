"""Named experiments the CLI can run from a config file."""

from dataclasses import dataclass
import logging
from typing import Any, Callable, Dict, List, Optional

from biflow.core.config import RunConfig
from biflow.core.errors import ConfigurationError
from biflow.core.result import Check, ExperimentResult
from biflow.experiments.blowup import amplitude_ladder, blowup_sweep
from biflow.experiments.dissipation import (
    decay_amplitude_scan,
    decay_run,
    dissipation_run,
    perturbation_energy,
)
from biflow.experiments.kernel import verify_kernel
from biflow.experiments.norms_checks import bmo_family
from biflow.experiments.scaling import scaling_check
from biflow.experiments.smoothing import extension_bound, smoothing_study
from biflow.experiments.solver_checks import solver_checks
from biflow.experiments.stability import stability_run
from biflow.experiments.static import static_study
from biflow.services.initial_data import generate, make_initial_data
from biflow.solver.nonlinearity import Nonlinearity
from biflow.spectral.field import Field

logger = logging.getLogger(__name__)

Runner = Callable[[RunConfig, int], ExperimentResult]

LOCKED_NOISE = {"generator": "band_limited_noise", "params": {"phases": "locked"}}
SMALL_NOISE = {"generator": "band_limited_noise", "params": {"amplitude": 0.01}}
SMALL_BUMP = {"generator": "gaussian_bump", "params": {"amplitude": 0.02, "width": 1.0}}
MODERATE_BUMP = {"generator": "gaussian_bump", "params": {"amplitude": 0.5, "width": 1.0}}
SMALL_PERTURBATION = {"generator": "band_limited_noise", "params": {"amplitude": 1e-3}}


@dataclass(frozen=True)
class ExperimentSpec:
    """A registered experiment.

    Attributes:
        name: Kebab-case name used in config files
        description: One line shown by `biflow experiments list`
        runner: Builds inputs from a RunConfig and runs the experiment
    """

    name: str
    description: str
    runner: Runner


def _params(config: RunConfig, **defaults: Any) -> Dict[str, Any]:
    unknown = set(config.params) - set(defaults)
    if unknown:
        raise ConfigurationError(
            f"unknown params for '{config.experiment}': {', '.join(sorted(unknown))}; "
            f"known: {', '.join(sorted(defaults)) or 'none'}"
        )
    merged = dict(defaults)
    merged.update(config.params)
    return merged


def _nonlinearity(config: RunConfig) -> Nonlinearity:
    nl = config.nonlinearity
    return Nonlinearity.from_config(nl.kind, sigma=nl.sigma, p=nl.p)


def _field(config: RunConfig, default: Dict[str, Any], seed_offset: int = 0, block: Optional[Any] = None) -> Field:
    grid = config.grid.to_grid()
    seed = config.seed + seed_offset
    if block is not None:
        return make_initial_data(block, grid, seed)
    return generate(default["generator"], grid, seed, **default["params"])


def _family(config: RunConfig, default: Dict[str, Any], draws: int) -> List[Field]:
    if draws < 1:
        raise ConfigurationError(f"draws must be >= 1, got {draws}")
    return [_field(config, default, i, config.initial_data) for i in range(draws)]


def _common(config: RunConfig) -> Dict[str, Any]:
    return {"tolerances": config.tolerances, "tolerance_scale": config.tolerance_scale}


def _run_verify_kernel(config: RunConfig, threads: int) -> ExperimentResult:
    _params(config)
    return verify_kernel(config.grid.dim, **_common(config))


def _run_smoothing(config: RunConfig, threads: int) -> ExperimentResult:
    p = _params(config, draws=5, t_min=1e-3, t_max=1e-1, samples=21)
    fields = _family(config, LOCKED_NOISE, p.pop("draws"))
    return smoothing_study(fields, threads=threads, **p, **_common(config))


def _run_extension(config: RunConfig, threads: int) -> ExperimentResult:
    p = _params(config, draws=5, T=1.0)
    fields = _family(config, SMALL_NOISE, p["draws"])
    cfg = config.solver.to_solver_config()
    return extension_bound(
        fields, p["T"], cfg.time_nodes, cfg.stride, threads=threads, **_common(config)
    )


def _run_scaling(config: RunConfig, threads: int) -> ExperimentResult:
    p = _params(config, T=1.0, radii=None)
    a = _field(config, SMALL_NOISE, block=config.initial_data)
    return scaling_check(
        a, 2.0, p["radii"], p["T"], _nonlinearity(config), config.solver.to_solver_config(), **_common(config)
    )


def _run_bmo_family(config: RunConfig, threads: int) -> ExperimentResult:
    p = _params(config, draws=10, R=None)
    fields = _family(config, {"generator": "band_limited_noise", "params": {}}, p["draws"])
    return bmo_family(fields, p["R"], config.solver.stride, threads=threads, **_common(config))


def _run_solver_checks(config: RunConfig, threads: int) -> ExperimentResult:
    p = _params(config, draws=10, T=1.0)
    cases = _family(config, SMALL_NOISE, p["draws"])
    return solver_checks(
        cases, _nonlinearity(config), p["T"], config.solver.to_solver_config(), threads=threads, **_common(config)
    )


def _run_dissipation(config: RunConfig, threads: int) -> ExperimentResult:
    p = _params(config, T=1.0)
    u0 = _field(config, MODERATE_BUMP, block=config.initial_data)
    return dissipation_run(u0, _nonlinearity(config), p["T"], config.solver.to_solver_config(), **_common(config))


def _run_decay(config: RunConfig, threads: int) -> ExperimentResult:
    p = _params(config, amplitudes=None, breakpoints=[0.0, 1.0, 10.0, 100.0, 1000.0])
    u0 = _field(config, SMALL_BUMP, block=config.initial_data)
    cfg = config.solver.to_solver_config()
    if p["amplitudes"] is not None:
        return decay_amplitude_scan(
            u0, _nonlinearity(config), p["amplitudes"], p["breakpoints"], cfg, config.tolerance_scale
        )
    return decay_run(u0, _nonlinearity(config), p["breakpoints"], cfg, **_common(config))


def _run_static(config: RunConfig, threads: int) -> ExperimentResult:
    p = _params(config, points=1000)
    return static_study(p["points"], **_common(config))


def _run_stability(config: RunConfig, threads: int) -> ExperimentResult:
    p = _params(config, T=1.0, sweep=[1.0, 0.5, 0.25])
    u0 = _field(config, SMALL_BUMP, block=config.initial_data)
    perturbation = _field(config, SMALL_PERTURBATION, 1, config.perturbation)
    return stability_run(
        u0,
        u0 + perturbation,
        _nonlinearity(config),
        p["T"],
        p["sweep"],
        config.solver.to_solver_config(),
        threads=threads,
        **_common(config),
    )


def _run_perturbation_energy(config: RunConfig, threads: int) -> ExperimentResult:
    p = _params(config, segments=6)
    g0 = _field(config, SMALL_BUMP, block=config.initial_data)
    f0 = _field(config, SMALL_PERTURBATION, 1, config.perturbation)
    return perturbation_energy(
        f0, g0, _nonlinearity(config), p["segments"], config.solver.to_solver_config(), **_common(config)
    )


def _run_blowup(config: RunConfig, threads: int) -> ExperimentResult:
    p = _params(config, first_amplitude=1.0, count=5, amplitudes=None)
    shape = _field(config, MODERATE_BUMP, block=config.initial_data)
    amplitudes = p["amplitudes"] or amplitude_ladder(p["first_amplitude"], p["count"])
    return blowup_sweep(shape, _nonlinearity(config), amplitudes, config.solver.to_solver_config(), threads)


ROBUSTNESS_TARGETS = ("scaling-check", "bmo-family", "solver-checks")


def _run_robustness(config: RunConfig, threads: int) -> ExperimentResult:
    """Re-run the scaling, domination and contraction checks with N and the time nodes doubled."""
    _params(config)
    refined = config.model_copy(
        update={
            "grid": config.grid.model_copy(update={"points_per_axis": 2 * config.grid.points_per_axis}),
            "solver": config.solver.model_copy(update={"time_nodes": 2 * config.solver.time_nodes}),
        }
    )
    checks = []
    verdicts = {"experiment": [], "base": [], "refined": []}
    for name in ROBUSTNESS_TARGETS:
        runner = EXPERIMENTS[name].runner
        base = runner(config.model_copy(update={"experiment": name}), threads)
        fine = runner(refined.model_copy(update={"experiment": name}), threads)
        verdicts["experiment"].append(name)
        verdicts["base"].append(base.verdict.value)
        verdicts["refined"].append(fine.verdict.value)
        checks.append(Check.at_most(f"{name}:base_passes", 0.0 if base.passed else 1.0, 0.0))
        checks.append(
            Check.at_most(f"{name}:verdict_unchanged", 0.0 if base.verdict == fine.verdict else 1.0, 0.0)
        )
    return ExperimentResult(
        name="discretization-robustness",
        inputs={"grid": config.grid.model_dump(), "refined_points": refined.grid.points_per_axis},
        checks=checks,
        metadata={"verdicts": verdicts},
    )


EXPERIMENTS: Dict[str, ExperimentSpec] = {
    spec.name: spec
    for spec in (
        ExperimentSpec("verify-kernel", "Kernel moments, pointwise bounds and L1 scaling", _run_verify_kernel),
        ExperimentSpec("smoothing-exponents", "Slopes of the semigroup smoothing rates", _run_smoothing),
        ExperimentSpec("extension-bound", "Constant of ||S(.)a||_X against ||a||_BMO", _run_extension),
        ExperimentSpec("scaling-check", "Scaling identity of BMO_R and solver equivariance", _run_scaling),
        ExperimentSpec("bmo-family", "Carleson domination, stride refinement, Poincare constant", _run_bmo_family),
        ExperimentSpec("solver-checks", "Picard contraction, ETD agreement and solution identities", _run_solver_checks),
        ExperimentSpec("dissipation-run", "Energy dissipation along an ETD run", _run_dissipation),
        ExperimentSpec("decay-run", "Long-time decay of small solutions", _run_decay),
        ExperimentSpec("static-residual", "Residual of the +-2 ln r static solutions", _run_static),
        ExperimentSpec("stability-run", "Linear response of the solution map", _run_stability),
        ExperimentSpec("perturbation-energy", "Growth exponent of the perturbation energy", _run_perturbation_energy),
        ExperimentSpec("blowup-sweep", "Blow-up probes over an amplitude ladder", _run_blowup),
        ExperimentSpec(
            "discretization-robustness", "Scaling, domination and contraction under refinement", _run_robustness
        ),
    )
}


def get_experiment(name: str) -> ExperimentSpec:
    """Look up a registered experiment.

    Raises:
        ConfigurationError: If the name is not registered
    """
    if name not in EXPERIMENTS:
        supported = ", ".join(f"'{n}'" for n in EXPERIMENTS)
        raise ConfigurationError(f"Experiment '{name}' is not supported. Supported experiments: {supported}")
    return EXPERIMENTS[name]


def run_experiment(config: RunConfig, threads: Optional[int] = None) -> ExperimentResult:
    """Run the experiment a validated config names."""
    if not config.experiment:
        raise ConfigurationError("config names no experiment")
    spec = get_experiment(config.experiment)
    threads = config.threads if threads is None else threads
    logger.info("Running %s with %d thread(s)", spec.name, threads)
    result = spec.runner(config, threads)
    result.inputs.setdefault("config", config.echo())
    return result
