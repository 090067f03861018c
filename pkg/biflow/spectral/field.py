"""Immutable sampled fields on a periodic grid."""

from functools import cached_property
import itertools
from typing import Dict, Iterator, Sequence, Tuple, Union

import numpy as np

from biflow.core.errors import ConfigurationError, DomainError
from biflow.spectral.grid import GridSpec

Scalar = Union[int, float, np.floating]


class Field:
    """Real samples on a grid with lazily computed rfftn coefficients."""

    def __init__(self, grid: GridSpec, values: np.ndarray, check_finite: bool = True) -> None:
        values = np.array(values, dtype=np.float64, copy=True)
        if values.shape != grid.shape:
            if values.size != grid.size:
                raise ConfigurationError(
                    f"values of size {values.size} do not fit grid of shape {grid.shape}"
                )
            values = values.reshape(grid.shape)
        if check_finite and not np.all(np.isfinite(values)):
            raise DomainError("field values must be finite")
        values.flags.writeable = False
        self.grid = grid
        self.values = values

    @classmethod
    def zeros(cls, grid: GridSpec) -> "Field":
        return cls(grid, np.zeros(grid.shape))

    @classmethod
    def constant(cls, grid: GridSpec, value: float) -> "Field":
        return cls(grid, np.full(grid.shape, float(value)))

    @classmethod
    def from_spectral(cls, grid: GridSpec, coefficients: np.ndarray) -> "Field":
        """Inverse-transform Hermitian coefficients and keep them cached."""
        coefficients = np.array(coefficients, dtype=np.complex128, copy=True)
        values = np.fft.irfftn(coefficients, s=grid.shape, axes=tuple(range(grid.dim)))
        field = cls(grid, values, check_finite=False)
        coefficients.flags.writeable = False
        field.__dict__["spectral"] = coefficients
        return field

    @cached_property
    def spectral(self) -> np.ndarray:
        coefficients = np.fft.rfftn(self.values, axes=tuple(range(self.grid.dim)))
        coefficients.flags.writeable = False
        return coefficients

    def _check_grid(self, other: "Field") -> None:
        if other.grid != self.grid:
            raise DomainError("fields live on different grids")

    def __add__(self, other: Union["Field", Scalar]) -> "Field":
        if isinstance(other, Field):
            self._check_grid(other)
            return Field(self.grid, self.values + other.values, check_finite=False)
        return Field(self.grid, self.values + float(other), check_finite=False)

    __radd__ = __add__

    def __sub__(self, other: Union["Field", Scalar]) -> "Field":
        if isinstance(other, Field):
            self._check_grid(other)
            return Field(self.grid, self.values - other.values, check_finite=False)
        return Field(self.grid, self.values - float(other), check_finite=False)

    def __neg__(self) -> "Field":
        return Field(self.grid, -self.values, check_finite=False)

    def __mul__(self, scalar: Scalar) -> "Field":
        if isinstance(scalar, Field):
            return NotImplemented
        return Field(self.grid, self.values * float(scalar), check_finite=False)

    __rmul__ = __mul__

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def lp_norm(self, p: float) -> float:
        """Riemann-sum L^p norm with cell-volume weight."""
        if np.isinf(p):
            return self.sup_norm()
        return float((np.sum(np.abs(self.values) ** p) * self.grid.cell_volume) ** (1.0 / p))

    def mean(self) -> float:
        return float(np.mean(self.values))

    def l2_relative_error(self, other: "Field") -> float:
        self._check_grid(other)
        scale = np.linalg.norm(other.values)
        diff = np.linalg.norm(self.values - other.values)
        return float(diff / scale) if scale > 0 else float(diff)

    def __repr__(self) -> str:
        return f"Field(grid={self.grid}, sup={self.sup_norm():.3e})"


class TensorField:
    """dim**order component fields indexed by tuples of axes."""

    def __init__(self, grid: GridSpec, order: int, components: Sequence[Field]) -> None:
        if order not in (1, 2, 3):
            raise ConfigurationError(f"tensor order must be 1, 2 or 3, got {order}")
        components = tuple(components)
        if len(components) != grid.dim**order:
            raise ConfigurationError(
                f"order-{order} tensor on a {grid.dim}D grid needs {grid.dim**order} "
                f"components, got {len(components)}"
            )
        self.grid = grid
        self.order = order
        self.components = components

    def indices(self) -> Iterator[Tuple[int, ...]]:
        return itertools.product(range(self.grid.dim), repeat=self.order)

    def component(self, *index: int) -> Field:
        flat = 0
        for axis in index:
            flat = flat * self.grid.dim + axis
        return self.components[flat]

    def as_dict(self) -> Dict[Tuple[int, ...], Field]:
        return dict(zip(self.indices(), self.components))

    def stacked(self) -> np.ndarray:
        """Component values stacked along a leading axis."""
        return np.stack([c.values for c in self.components])

    def magnitude(self) -> np.ndarray:
        """Pointwise Frobenius norm."""
        return np.sqrt(np.sum(self.stacked() ** 2, axis=0))

    def sup_norm(self) -> float:
        return float(np.max(self.magnitude()))

    def is_zero(self, atol: float = 0.0) -> bool:
        return all(c.sup_norm() <= atol for c in self.components)
