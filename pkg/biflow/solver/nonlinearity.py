"""The flux F and the nonlinear source div F(grad u)."""

from dataclasses import dataclass
import logging

import numpy as np

from biflow.core.enums import NonlinearityKind
from biflow.core.errors import ConfigurationError
from biflow.spectral.field import Field, TensorField
from biflow.spectral.operators import derivative_multiplier, tensor_from_spectral

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Nonlinearity:
    """F(xi) = sigma |xi|^(p-2) xi, scaled by `strength`.

    The cubic kinds fix p = 4 with sigma = +1 (coercive) or -1
    (non-coercive). strength = 0 gives the linear flow.
    """

    kind: NonlinearityKind
    sigma: int = 1
    p: float = 4.0
    strength: float = 1.0

    def __post_init__(self) -> None:
        if self.kind == NonlinearityKind.CUBIC_COERCIVE:
            object.__setattr__(self, "sigma", 1)
            object.__setattr__(self, "p", 4.0)
        elif self.kind == NonlinearityKind.CUBIC_NONCOERCIVE:
            object.__setattr__(self, "sigma", -1)
            object.__setattr__(self, "p", 4.0)
        elif self.sigma not in (1, -1) or not self.p > 2:
            raise ConfigurationError(
                f"power nonlinearity needs sigma in (+1, -1) and p > 2, got sigma={self.sigma}, p={self.p}"
            )

    @classmethod
    def from_config(cls, kind: str, sigma: int = 1, p: float = 4.0) -> "Nonlinearity":
        try:
            kind_enum = NonlinearityKind.from_string(kind)
        except ValueError as e:
            raise ConfigurationError(str(e)) from None
        return cls(kind_enum, sigma=sigma, p=p)

    @classmethod
    def linear(cls) -> "Nonlinearity":
        return cls(NonlinearityKind.CUBIC_COERCIVE, strength=0.0)

    @property
    def sign(self) -> int:
        return self.sigma

    @property
    def is_cubic(self) -> bool:
        return self.kind.is_cubic

    @property
    def is_linear(self) -> bool:
        return self.strength == 0.0

    @property
    def coercive(self) -> bool:
        return self.sigma > 0

    def flux(self, xi: np.ndarray) -> np.ndarray:
        """F applied along the leading (vector) axis of xi."""
        xi = np.asarray(xi, dtype=float)
        norm_sq = np.sum(xi**2, axis=0)
        if self.p == 4.0:
            scale = norm_sq
        else:
            scale = norm_sq ** ((self.p - 2) / 2.0)
        return self.strength * self.sigma * scale * xi

    def jacobian(self, xi: np.ndarray) -> np.ndarray:
        """DF(xi) for a single vector xi."""
        xi = np.asarray(xi, dtype=float)
        norm_sq = float(xi @ xi)
        eye = np.eye(xi.size)
        if norm_sq == 0.0:
            return np.zeros((xi.size, xi.size))
        power = (self.p - 2) / 2.0
        return self.strength * self.sigma * (
            norm_sq**power * eye + (self.p - 2) * norm_sq ** (power - 1) * np.outer(xi, xi)
        )

    def to_dict(self):
        return {"kind": self.kind.value, "sigma": self.sigma, "p": self.p, "strength": self.strength}


def evaluate_F(grad: TensorField, nonlinearity: Nonlinearity, dealias: bool = True) -> TensorField:
    """Pointwise F of an order-1 tensor; dealiased on output when requested."""
    if grad.order != 1:
        raise ConfigurationError(f"F acts on gradients (order 1), got order {grad.order}")
    flux = nonlinearity.flux(grad.stacked())
    components = []
    for values in flux:
        component = Field(grad.grid, values, check_finite=False)
        if dealias:
            component = Field.from_spectral(
                grad.grid, component.spectral * grad.grid.dealias_mask
            )
        components.append(component)
    return TensorField(grad.grid, 1, components)


def smoothed_gradient(field: Field, dealias: bool = True) -> np.ndarray:
    """grad u stacked as (dim, ...) from (optionally dealiased) coefficients."""
    coefficients = field.spectral
    if dealias:
        coefficients = coefficients * field.grid.dealias_mask
    return tensor_from_spectral(field.grid, coefficients, 1).stacked()


def divergence_spectrum(grid, vector: np.ndarray, dealias: bool = True) -> np.ndarray:
    """Coefficients of div V for a stacked physical vector field V."""
    axes = tuple(range(grid.dim))
    total = np.zeros(grid.spectral_shape, dtype=np.complex128)
    for axis in range(grid.dim):
        counts = tuple(1 if a == axis else 0 for a in range(grid.dim))
        total = total + np.fft.rfftn(vector[axis], axes=axes) * derivative_multiplier(grid, counts)
    if dealias:
        total = total * grid.dealias_mask
    return total


def source_spectrum(field: Field, nonlinearity: Nonlinearity, dealias: bool = True) -> np.ndarray:
    """Coefficients of div F(grad u), dealiased before and after the product."""
    grid = field.grid
    if nonlinearity.is_linear:
        return np.zeros(grid.spectral_shape, dtype=np.complex128)
    flux = nonlinearity.flux(smoothed_gradient(field, dealias))
    return divergence_spectrum(grid, flux, dealias)
