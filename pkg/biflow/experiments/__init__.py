from biflow.experiments.blowup import blowup_sweep
from biflow.experiments.dissipation import (
    decay_amplitude_scan,
    decay_run,
    dissipation_run,
    perturbation_energy,
)
from biflow.experiments.kernel import verify_kernel
from biflow.experiments.norms_checks import bmo_family
from biflow.experiments.registry import EXPERIMENTS, get_experiment, run_experiment
from biflow.experiments.scaling import scaling_check
from biflow.experiments.smoothing import extension_bound, smoothing_exponents, smoothing_study
from biflow.experiments.solver_checks import solver_checks
from biflow.experiments.stability import stability_run
from biflow.experiments.static import RadialProfile, log_profile, static_residual

__all__ = [
    "EXPERIMENTS",
    "RadialProfile",
    "blowup_sweep",
    "bmo_family",
    "decay_amplitude_scan",
    "decay_run",
    "dissipation_run",
    "extension_bound",
    "get_experiment",
    "log_profile",
    "perturbation_energy",
    "run_experiment",
    "scaling_check",
    "smoothing_exponents",
    "smoothing_study",
    "solver_checks",
    "stability_run",
    "static_residual",
    "verify_kernel",
]
