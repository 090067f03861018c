import math

import numpy as np
import pytest

from biflow.core.errors import ConfigurationError, DomainError
from biflow.norms.solution import NormReport, lpt_norm, xt_norm
from biflow.norms.trajectory import Trajectory, graded_times, shift, trapezoid_weights
from biflow.spectral.field import Field


def _steady(grid, times):
    (x,) = grid.coordinates()
    u = Field(grid, np.sin(x))
    return Trajectory(times, [u] * len(times))


class TestGradedTimes:
    """Test graded time nodes."""

    def test_layout(self):
        """A geometric block below tau is followed by a uniform block."""
        times = graded_times(1.0, 8)

        assert np.allclose(  # nosec: B101
            times, [0, 1 / 64, 1 / 32, 1 / 16, 1 / 8, 0.25, 0.5, 0.75, 1.0]
        )

    def test_grading_bound(self):
        """Consecutive positive nodes grow by at most a factor two."""
        times = graded_times(3.0, 64)

        ratios = times[2:] / times[1:-1]

        assert ratios.max() <= 2.0 + 1e-12  # nosec: B101
        assert times[-1] == 3.0  # nosec: B101

    @pytest.mark.parametrize("T, M, q", [(0.0, 8, 2.0), (1.0, 1, 2.0), (1.0, 8, 3.0)])
    def test_invalid_arguments(self, T, M, q):
        """Bad horizons, node counts or ratios are rejected."""
        with pytest.raises(ConfigurationError):
            graded_times(T, M, q)


class TestTrapezoidWeights:
    """Test time quadrature weights."""

    def test_weights_integrate_one(self):
        """Weights sum to the length of the integration window."""
        times = np.array([0.0, 1.0, 2.0, 3.0])

        assert trapezoid_weights(times, 2.5).sum() == pytest.approx(2.5)  # nosec: B101
        assert trapezoid_weights(times, 3.0).sum() == pytest.approx(3.0)  # nosec: B101

    def test_first_interval_uses_right_value(self):
        """The interval (0, t_1] is weighted entirely at t_1."""
        weights = trapezoid_weights(np.array([0.0, 1.0, 2.0]), 0.5)

        assert weights.tolist() == [0.0, 0.5, 0.0]  # nosec: B101

    def test_cut_interval(self):
        """A window ending inside an interval interpolates linearly."""
        weights = trapezoid_weights(np.array([0.0, 1.0, 2.0, 3.0]), 2.5)

        assert np.allclose(weights, [0.0, 1.5, 0.875, 0.125])  # nosec: B101


class TestTrajectory:
    """Test trajectory validation and manipulation."""

    def test_must_start_at_zero(self, grid_1d):
        """Trajectories start at t = 0."""
        zero = Field.zeros(grid_1d)

        with pytest.raises(DomainError, match="t=0"):
            Trajectory([0.5, 1.0], [zero, zero])

    def test_must_ascend(self, grid_1d):
        """Node times are strictly ascending."""
        zero = Field.zeros(grid_1d)

        with pytest.raises(DomainError, match="ascending"):
            Trajectory([0.0, 1.0, 1.0], [zero, zero, zero])

    def test_grading_enforced(self, grid_1d):
        """Positive nodes may not jump by more than a factor two."""
        zero = Field.zeros(grid_1d)

        with pytest.raises(DomainError, match="grading"):
            Trajectory([0.0, 1.0, 3.0], [zero, zero, zero])

    def test_grading_can_be_skipped(self, grid_1d):
        """Uniform grids are accepted when grading is not checked."""
        zero = Field.zeros(grid_1d)

        traj = Trajectory([0.0, 1.0, 3.0], [zero, zero, zero], check_grading=False)

        assert traj.T == 3.0  # nosec: B101

    def test_shift(self, grid_1d):
        """Shifting by a node restarts the clock there."""
        traj = _steady(grid_1d, [0.0, 0.5, 1.0])

        shifted = shift(traj, 0.5)

        assert shifted.times.tolist() == [0.0, 0.5]  # nosec: B101
        assert shifted.initial is traj.fields[1]  # nosec: B101

    def test_shift_off_node(self, grid_1d):
        """Shifts must land on a node."""
        traj = _steady(grid_1d, [0.0, 0.5, 1.0])

        with pytest.raises(DomainError):
            traj.shift(0.3)

    def test_sup_difference(self, grid_1d):
        """The node-wise sup distance of a trajectory to itself is zero."""
        traj = _steady(grid_1d, [0.0, 0.5, 1.0])

        assert traj.sup_difference(traj) == 0.0  # nosec: B101
        assert (traj - traj).final.sup_norm() == 0.0  # nosec: B101


class TestSolutionNorms:
    """Test the X_T and L_T^p norms."""

    def test_zero_trajectory(self, grid_1d):
        """The zero trajectory has zero norm."""
        traj = Trajectory.zeros(grid_1d, graded_times(1.0, 8))

        assert xt_norm(traj, 1.0).total == 0.0  # nosec: B101

    def test_pointwise_components(self, grid_1d):
        """For a frozen sin(x) both pointwise components peak at t = 1 with value one."""
        report = xt_norm(_steady(grid_1d, [0.0, 0.5, 1.0]), 1.0)

        assert report.n_inf[1] == pytest.approx(1.0)  # nosec: B101
        assert report.n_inf[2] == pytest.approx(1.0)  # nosec: B101
        assert report.argmax["n_inf_1"]["t"] == 1.0  # nosec: B101

    def test_total_is_recomputed(self):
        """The report total is the sum of its components."""
        report = NormReport({1: 1.0, 2: 2.0}, {1: 0.5, 2: 0.25}, total=100.0)

        assert report.total == pytest.approx(3.75)  # nosec: B101
        assert "n_carleson" in report.to_json()  # nosec: B101

    def test_radius_clamped_to_box(self, grid_1d):
        """A large horizon clamps the Carleson radius to a quarter box."""
        traj = Trajectory.zeros(grid_1d, graded_times(100.0, 8))

        report = xt_norm(traj, 100.0)

        assert report.metadata["clamped"] is True  # nosec: B101
        assert report.metadata["R"] == pytest.approx(grid_1d.box_length / 4)  # nosec: B101

    def test_horizon_must_be_covered(self, grid_1d):
        """Norms beyond the trajectory end are rejected."""
        traj = Trajectory.zeros(grid_1d, graded_times(1.0, 8))

        with pytest.raises(DomainError):
            xt_norm(traj, 2.0)

    def test_lpt_norm_single_mode(self, grid_1d):
        """For frozen sin(x), the L^2 norm is sqrt(pi) (1 + t^(1/4) + t^(1/2)) at t = 1."""
        value = lpt_norm(_steady(grid_1d, [0.0, 0.5, 1.0]), 2, 1.0)

        assert value == pytest.approx(3 * math.sqrt(math.pi), rel=1e-12)  # nosec: B101

    def test_lpt_norm_named_exponents(self, grid_1d):
        """'n' resolves to the dimension and 'inf' to the sup norm."""
        traj = _steady(grid_1d, [0.0, 0.5, 1.0])

        assert lpt_norm(traj, "inf", 1.0) == pytest.approx(3.0)  # nosec: B101
        assert lpt_norm(traj, "n", 1.0) == pytest.approx(lpt_norm(traj, 1, 1.0))  # nosec: B101

    def test_lpt_norm_unsupported_exponent(self, grid_1d):
        """Exponents other than 2, 4, n and inf are rejected."""
        with pytest.raises(ConfigurationError):
            lpt_norm(_steady(grid_1d, [0.0, 0.5, 1.0]), 3, 1.0)
