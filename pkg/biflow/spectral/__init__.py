from biflow.spectral.field import Field, TensorField
from biflow.spectral.grid import GridSpec, make_grid
from biflow.spectral.operators import (
    apply_semigroup,
    dealias,
    derivative,
    divergence,
    gradient,
    semigroup_derivative,
)
from biflow.spectral.snapshot import read_snapshot, write_snapshot

__all__ = [
    "Field",
    "GridSpec",
    "TensorField",
    "apply_semigroup",
    "dealias",
    "derivative",
    "divergence",
    "gradient",
    "make_grid",
    "read_snapshot",
    "semigroup_derivative",
    "write_snapshot",
]
