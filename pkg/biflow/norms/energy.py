import numpy as np

from biflow.core.errors import ConfigurationError
from biflow.spectral.field import Field
from biflow.spectral.operators import gradient


def energy(field: Field, sign: int = 1) -> float:
    """Riemann sum of 1/2 |grad^2 u|^2 + sign * 1/4 |grad u|^4."""
    if sign not in (1, -1):
        raise ConfigurationError(f"energy sign must be +1 or -1, got {sign}")
    hessian = np.sum(gradient(field, 2).stacked() ** 2, axis=0)
    slope = np.sum(gradient(field, 1).stacked() ** 2, axis=0)
    density = 0.5 * hessian + sign * 0.25 * slope**2
    return float(np.sum(density) * field.grid.cell_volume)


def gradient_lp(field: Field, p: float = 4.0) -> float:
    """||grad u||_{L^p}."""
    magnitude = gradient(field, 1).magnitude()
    return float((np.sum(magnitude**p) * field.grid.cell_volume) ** (1.0 / p))
