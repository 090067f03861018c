"""One-shot norm report for a stored field."""

from typing import Any, Dict, Optional

from biflow.norms.balls import DEFAULT_STRIDE
from biflow.norms.energy import energy, gradient_lp
from biflow.norms.seminorms import scan_carleson, scan_morrey, scan_oscillation
from biflow.spectral.field import Field
from biflow.spectral.operators import gradient


def field_norm_summary(field: Field, R: Optional[float] = None, stride: int = DEFAULT_STRIDE) -> Dict[str, Any]:
    """Oscillation BMO, Carleson BMO_R, Morrey M_{1,n-1} and the coercive energy of a field.

    R defaults to a quarter of the box. Each supremum comes with its witness ball.
    """
    R = field.grid.box_length / 4 if R is None else R
    oscillation = scan_oscillation(field, R, stride)
    carleson = scan_carleson(field, R, stride)
    morrey = scan_morrey(field, p=1.0, lam=field.grid.dim - 1, R=R, stride=stride)
    return {
        "R": R,
        "stride": stride,
        "sup_norm": field.sup_norm(),
        "gradient_sup": gradient(field, 1).sup_norm(),
        "gradient_l4": gradient_lp(field, 4.0),
        "oscillation_bmo": oscillation.value,
        "carleson_bmo": carleson[1].value + carleson[2].value,
        "morrey": morrey.value,
        "energy": energy(field, 1),
        "witnesses": {
            "oscillation_bmo": oscillation.to_dict(),
            "carleson_k1": carleson[1].to_dict(),
            "carleson_k2": carleson[2].to_dict(),
            "morrey": morrey.to_dict(),
        },
    }
