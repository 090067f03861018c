from biflow.norms.balls import BallFamily, Supremum
from biflow.norms.energy import energy, gradient_lp
from biflow.norms.seminorms import (
    carleson_bmo,
    morrey_norm,
    oscillation_bmo,
    poincare_ratio,
    scan_carleson,
    scan_morrey,
    scan_oscillation,
)
from biflow.norms.solution import NormReport, lpt_norm, xt_norm
from biflow.norms.summary import field_norm_summary
from biflow.norms.trajectory import Trajectory, graded_times, shift

__all__ = [
    "BallFamily",
    "NormReport",
    "Supremum",
    "Trajectory",
    "carleson_bmo",
    "energy",
    "field_norm_summary",
    "graded_times",
    "gradient_lp",
    "lpt_norm",
    "morrey_norm",
    "oscillation_bmo",
    "poincare_ratio",
    "scan_carleson",
    "scan_morrey",
    "scan_oscillation",
    "shift",
    "xt_norm",
]
