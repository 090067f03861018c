"""Spectral derivatives, the biharmonic semigroup and dealiasing."""

import itertools
import logging
from typing import Sequence, Tuple, Union

import numpy as np

from biflow.core.errors import DomainError, UnsupportedOrderError
from biflow.spectral.field import Field, TensorField
from biflow.spectral.grid import GridSpec

logger = logging.getLogger(__name__)

MAX_DERIVATIVE_ORDER = 4
MultiIndex = Union[int, Sequence[int]]


def _normalize_index(grid: GridSpec, multi_index: MultiIndex) -> Tuple[int, ...]:
    if isinstance(multi_index, (int, np.integer)):
        multi_index = (int(multi_index),)
    index = tuple(int(a) for a in multi_index)
    if len(index) != grid.dim:
        raise UnsupportedOrderError(
            f"multi-index {index} does not match grid dimension {grid.dim}"
        )
    if any(a < 0 for a in index):
        raise UnsupportedOrderError(f"multi-index {index} has negative entries")
    if sum(index) > MAX_DERIVATIVE_ORDER:
        raise UnsupportedOrderError(
            f"derivative order {sum(index)} exceeds {MAX_DERIVATIVE_ORDER}", order=sum(index)
        )
    return index


def derivative_multiplier(grid: GridSpec, multi_index: Tuple[int, ...]) -> np.ndarray:
    """(i k)^alpha with the Nyquist plane zeroed on odd axes."""
    multiplier = np.ones(grid.spectral_shape, dtype=np.complex128)
    for axis, power in enumerate(multi_index):
        if power == 0:
            continue
        factor = (1j * grid.wavenumbers[axis]) ** power
        if power % 2:
            factor = np.where(grid.nyquist(axis), 0.0, factor)
        multiplier = multiplier * factor
    return multiplier


def semigroup_multiplier(grid: GridSpec, t: float) -> np.ndarray:
    return np.exp(-t * grid.k_fourth)


def derivative(field: Field, multi_index: MultiIndex) -> Field:
    """Partial derivative d^alpha of a field, |alpha| <= 4."""
    index = _normalize_index(field.grid, multi_index)
    if not any(index):
        return field
    return Field.from_spectral(
        field.grid, field.spectral * derivative_multiplier(field.grid, index)
    )


def _index_counts(grid: GridSpec, axes: Tuple[int, ...]) -> Tuple[int, ...]:
    counts = [0] * grid.dim
    for axis in axes:
        counts[axis] += 1
    return tuple(counts)


def tensor_from_spectral(grid: GridSpec, coefficients: np.ndarray, order: int) -> TensorField:
    """All order-k derivatives of the field with the given coefficients."""
    cache = {}
    components = []
    for axes in itertools.product(range(grid.dim), repeat=order):
        counts = _index_counts(grid, axes)
        if counts not in cache:
            cache[counts] = Field.from_spectral(
                grid, coefficients * derivative_multiplier(grid, counts)
            )
        components.append(cache[counts])
    return TensorField(grid, order, components)


def gradient(field: Field, order: int = 1) -> TensorField:
    """The tensor grad^order of a field, order 1..3."""
    if order not in (1, 2, 3):
        raise UnsupportedOrderError(f"gradient order must be 1, 2 or 3, got {order}")
    return tensor_from_spectral(field.grid, field.spectral, order)


def apply_semigroup(field: Field, t: float) -> Field:
    """S(t) = exp(-t (-Laplace)^2) as the multiplier exp(-t|k|^4)."""
    if t < 0:
        raise DomainError(f"semigroup time must be non-negative, got {t}", t=t)
    if t == 0:
        return field
    return Field.from_spectral(field.grid, field.spectral * semigroup_multiplier(field.grid, t))


def semigroup_derivative(field: Field, t: float, k: int) -> TensorField:
    """grad^k S(t) field for t > 0."""
    if t <= 0:
        raise DomainError(f"smoothed derivative requires t > 0, got {t}", t=t)
    if k not in (1, 2, 3):
        raise UnsupportedOrderError(f"semigroup derivative order must be 1, 2 or 3, got {k}")
    smoothed = field.spectral * semigroup_multiplier(field.grid, t)
    return tensor_from_spectral(field.grid, smoothed, k)


def dealias(field: Field) -> Field:
    """Zero every mode with some |m_j| > N/3."""
    return Field.from_spectral(field.grid, field.spectral * field.grid.dealias_mask)


def divergence(vector: TensorField) -> Field:
    """Spectral divergence of an order-1 tensor."""
    if vector.order != 1:
        raise UnsupportedOrderError(f"divergence needs an order-1 tensor, got order {vector.order}")
    grid = vector.grid
    total = np.zeros(grid.spectral_shape, dtype=np.complex128)
    for axis, component in enumerate(vector.components):
        counts = tuple(1 if a == axis else 0 for a in range(grid.dim))
        total = total + component.spectral * derivative_multiplier(grid, counts)
    return Field.from_spectral(grid, total)
