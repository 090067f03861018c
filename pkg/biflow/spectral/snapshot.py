"""BIFL binary field snapshots.

Layout: 16-byte little-endian header (magic b"BIFL", u8 dim, 3 reserved
bytes, u32 points_per_axis, f32 box_length) followed by float64 samples
in row-major order.
"""

import logging
import os
import struct
from typing import Union

import numpy as np

from biflow.core.errors import ConfigurationError
from biflow.spectral.field import Field
from biflow.spectral.grid import make_grid

logger = logging.getLogger(__name__)

MAGIC = b"BIFL"
HEADER = struct.Struct("<4sB3xIf")

PathLike = Union[str, os.PathLike]


def write_snapshot(field: Field, path: PathLike) -> None:
    grid = field.grid
    header = HEADER.pack(MAGIC, grid.dim, grid.points_per_axis, grid.box_length)
    with open(path, "wb") as f:
        f.write(header)
        f.write(np.ascontiguousarray(field.values, dtype="<f8").tobytes(order="C"))
    logger.debug("Wrote snapshot %s (%s)", path, grid)


def read_snapshot(path: PathLike) -> Field:
    """Load a snapshot written by write_snapshot.

    Raises:
        ConfigurationError: If the header or payload is malformed
    """
    try:
        with open(path, "rb") as f:
            raw = f.read()
    except OSError as e:
        raise ConfigurationError(f"cannot read snapshot {path}: {e.strerror or e}") from None
    if len(raw) < HEADER.size:
        raise ConfigurationError(f"snapshot {path} is shorter than its header")
    magic, dim, points, box_length = HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise ConfigurationError(f"snapshot {path} has bad magic {magic!r}")
    grid = make_grid(dim, points, box_length)
    payload = np.frombuffer(raw, dtype="<f8", offset=HEADER.size)
    if payload.size != grid.size:
        raise ConfigurationError(
            f"snapshot {path} holds {payload.size} samples, header announces {grid.size}"
        )
    return Field(grid, payload.astype(np.float64).reshape(grid.shape))
