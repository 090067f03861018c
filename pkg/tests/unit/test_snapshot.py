import numpy as np
import pytest

from biflow.core.errors import ConfigurationError
from biflow.spectral.field import Field
from biflow.spectral.grid import make_grid
from biflow.spectral.snapshot import HEADER, MAGIC, read_snapshot, write_snapshot


@pytest.fixture
def field(rng):
    grid = make_grid(2, 16, 8.0)
    return Field(grid, rng.standard_normal(grid.shape))


class TestSnapshot:
    """Test BIFL snapshot files."""

    def test_round_trip(self, field, tmp_path):
        """Samples and grid survive a write/read cycle."""
        path = tmp_path / "u.bifl"

        write_snapshot(field, path)
        loaded = read_snapshot(path)

        assert loaded.grid == field.grid  # nosec: B101
        assert np.array_equal(loaded.values, field.values)  # nosec: B101

    def test_file_size(self, field, tmp_path):
        """The file is a 16-byte header plus float64 samples."""
        path = tmp_path / "u.bifl"

        write_snapshot(field, path)

        assert HEADER.size == 16  # nosec: B101
        assert path.stat().st_size == 16 + 8 * field.grid.size  # nosec: B101
        assert path.read_bytes()[:4] == MAGIC  # nosec: B101

    def test_bad_magic(self, field, tmp_path):
        """A file with the wrong magic is rejected."""
        path = tmp_path / "u.bifl"
        write_snapshot(field, path)
        raw = bytearray(path.read_bytes())
        raw[:4] = b"NOPE"
        path.write_bytes(bytes(raw))

        with pytest.raises(ConfigurationError, match="bad magic"):
            read_snapshot(path)

    def test_truncated_payload(self, field, tmp_path):
        """A payload shorter than announced is rejected."""
        path = tmp_path / "u.bifl"
        write_snapshot(field, path)
        path.write_bytes(path.read_bytes()[:-8])

        with pytest.raises(ConfigurationError, match="samples"):
            read_snapshot(path)

    def test_short_header(self, tmp_path):
        """A file shorter than the header is rejected."""
        path = tmp_path / "u.bifl"
        path.write_bytes(b"BIFL")

        with pytest.raises(ConfigurationError, match="header"):
            read_snapshot(path)

    def test_missing_file(self, tmp_path):
        """A missing file is reported as a configuration error."""
        with pytest.raises(ConfigurationError, match="cannot read"):
            read_snapshot(tmp_path / "absent.bifl")
