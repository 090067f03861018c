from biflow.solver.diagnostics import SolveDiagnostics
from biflow.solver.duhamel import (
    bilinear_operator,
    duhamel,
    duhamel_trajectory,
    linear_operator,
    semigroup_trajectory,
    trilinear_psi,
    trilinear_psi_trajectory,
)
from biflow.solver.etd import BlowupReport, blowup_probe, etd_segments, etd_solve
from biflow.solver.nonlinearity import Nonlinearity, evaluate_F, source_spectrum
from biflow.solver.perturbation import perturbation_solve
from biflow.solver.picard import picard_solve, scale_invariant_gradient

__all__ = [
    "BlowupReport",
    "Nonlinearity",
    "SolveDiagnostics",
    "bilinear_operator",
    "blowup_probe",
    "duhamel",
    "duhamel_trajectory",
    "etd_segments",
    "etd_solve",
    "evaluate_F",
    "linear_operator",
    "perturbation_solve",
    "picard_solve",
    "scale_invariant_gradient",
    "semigroup_trajectory",
    "source_spectrum",
    "trilinear_psi",
    "trilinear_psi_trajectory",
]
