import math

import numpy as np
import pytest

from biflow.core.enums import NonlinearityKind, Termination
from biflow.core.errors import BlowupError, ConfigurationError, NonConvergenceError
from biflow.norms.solution import xt_norm
from biflow.norms.trajectory import graded_times
from biflow.services.initial_data import band_limited_noise
from biflow.solver.diagnostics import SolveDiagnostics
from biflow.solver.duhamel import (
    duhamel,
    duhamel_trajectory,
    phi1,
    phi2,
    semigroup_trajectory,
    trilinear_psi_trajectory,
)
from biflow.solver.etd import blowup_probe, etd_segments, etd_solve
from biflow.solver.nonlinearity import Nonlinearity, evaluate_F, source_spectrum
from biflow.solver.picard import picard_solve
from biflow.spectral.field import Field, TensorField
from biflow.spectral.operators import apply_semigroup

COERCIVE = Nonlinearity(NonlinearityKind.CUBIC_COERCIVE)
NONCOERCIVE = Nonlinearity(NonlinearityKind.CUBIC_NONCOERCIVE)


class TestNonlinearity:
    """Test the flux F."""

    def test_cubic_flux(self):
        """|xi|^2 xi at (2, 0) is (8, 0)."""
        assert COERCIVE.flux(np.array([2.0, 0.0])).tolist() == [8.0, 0.0]  # nosec: B101

    def test_power_flux(self):
        """p = 3 with sigma = -1 maps (0, 3) to (0, -9)."""
        F = Nonlinearity(NonlinearityKind.POWER, sigma=-1, p=3.0)

        assert np.allclose(F.flux(np.array([0.0, 3.0])), [0.0, -9.0])  # nosec: B101

    def test_cubic_kinds_fix_parameters(self):
        """The cubic kinds override sigma and p."""
        F = Nonlinearity(NonlinearityKind.CUBIC_NONCOERCIVE, sigma=1, p=7.0)

        assert F.sigma == -1  # nosec: B101
        assert F.p == 4.0  # nosec: B101
        assert F.coercive is False  # nosec: B101

    def test_power_needs_super_quadratic(self):
        """Power fluxes need p > 2."""
        with pytest.raises(ConfigurationError):
            Nonlinearity(NonlinearityKind.POWER, p=2.0)

    def test_unknown_kind(self):
        """Unknown kinds are configuration errors."""
        with pytest.raises(ConfigurationError, match="not supported"):
            Nonlinearity.from_config("quintic")

    def test_jacobian_matches_finite_difference(self):
        """DF agrees with central differences of F."""
        F = Nonlinearity(NonlinearityKind.POWER, sigma=1, p=3.5)
        xi = np.array([0.3, -1.2])
        h = 1e-6
        columns = [
            (F.flux(xi + h * e) - F.flux(xi - h * e)) / (2 * h) for e in np.eye(2)
        ]

        assert np.allclose(F.jacobian(xi), np.column_stack(columns), atol=1e-7)  # nosec: B101

    def test_evaluate_F_on_constant_gradient(self, grid_2d):
        """A constant gradient (2, 0) gives the constant flux (8, 0)."""
        grad = TensorField(
            grid_2d, 1, [Field.constant(grid_2d, 2.0), Field.constant(grid_2d, 0.0)]
        )

        flux = evaluate_F(grad, COERCIVE)

        assert np.allclose(flux.component(0).values, 8.0)  # nosec: B101
        assert np.allclose(flux.component(1).values, 0.0)  # nosec: B101

    def test_linear_flow_has_no_source(self, small_noise):
        """strength = 0 switches the nonlinearity off."""
        source = source_spectrum(small_noise, Nonlinearity.linear())

        assert not np.any(source)  # nosec: B101


class TestPhiFunctions:
    """Test the exponential integrator weights."""

    @pytest.mark.parametrize("z", [-1e-6, -5e-5, -0.5, -30.0])
    def test_phi1(self, z):
        """phi1(z) = (e^z - 1)/z on both branches."""
        assert phi1(z) == pytest.approx(math.expm1(z) / z, rel=1e-10)  # nosec: B101

    @pytest.mark.parametrize("z", [-1e-3, -5e-3, -0.5, -30.0])
    def test_phi2(self, z):
        """phi2(z) = (e^z - 1 - z)/z^2 on both branches."""
        assert phi2(z) == pytest.approx((math.expm1(z) - z) / z**2, rel=1e-8)  # nosec: B101

    def test_limits_at_zero(self):
        """phi1(0) = 1 and phi2(0) = 1/2."""
        assert phi1(0.0) == 1.0  # nosec: B101
        assert phi2(0.0) == 0.5  # nosec: B101


class TestDuhamel:
    """Test Duhamel integrals and the trilinear form."""

    def test_zero_trajectory(self, grid_1d):
        """The Duhamel term of the zero trajectory vanishes."""
        traj = semigroup_trajectory(Field.zeros(grid_1d), graded_times(1.0, 16))

        result = duhamel_trajectory(traj, COERCIVE)

        assert result.final.sup_norm() == 0.0  # nosec: B101

    def test_single_time_matches_node(self, small_noise):
        """duhamel at a node equals the node value of the trajectory version."""
        traj = semigroup_trajectory(small_noise, graded_times(1.0, 16))

        at_node = duhamel(traj, traj.times[10], COERCIVE)
        full = duhamel_trajectory(traj, COERCIVE)

        assert np.allclose(at_node.values, full.fields[10].values, atol=1e-15)  # nosec: B101

    def test_cubic_flux_is_trilinear_diagonal(self, small_noise):
        """G(u) = sigma Psi(u, u, u) for the cubic kinds."""
        traj = semigroup_trajectory(small_noise, graded_times(1.0, 16))

        for F in (COERCIVE, NONCOERCIVE):
            direct = duhamel_trajectory(traj, F)
            psi = trilinear_psi_trajectory(traj, traj, traj)
            gap = direct.sup_difference(psi.map(lambda x: F.sigma * x))

            assert gap <= 1e-14 * max(1.0, direct.final.sup_norm())  # nosec: B101

    def test_psi_symmetric_in_first_two_slots(self, grid_1d, rng):
        """Psi(f, g, h) = Psi(g, f, h)."""
        times = graded_times(0.5, 16)
        f = semigroup_trajectory(Field(grid_1d, 0.01 * rng.standard_normal(grid_1d.shape)), times)
        g = semigroup_trajectory(Field(grid_1d, 0.01 * rng.standard_normal(grid_1d.shape)), times)
        h = semigroup_trajectory(Field(grid_1d, 0.01 * rng.standard_normal(grid_1d.shape)), times)

        a = trilinear_psi_trajectory(f, g, h)
        b = trilinear_psi_trajectory(g, f, h)

        assert a.sup_difference(b) <= 1e-16  # nosec: B101


class TestPicard:
    """Test the fixed-point solver."""

    def test_zero_data(self, grid_1d, fast_solver):
        """Zero data converges in one iteration to zero."""
        traj, diagnostics = picard_solve(Field.zeros(grid_1d), 1.0, COERCIVE, fast_solver)

        assert diagnostics.converged  # nosec: B101
        assert diagnostics.iterations == 1  # nosec: B101
        assert traj.final.sup_norm() == 0.0  # nosec: B101

    def test_small_data_contracts(self, small_noise, fast_solver):
        """Small data converges with contracting differences."""
        traj, diagnostics = picard_solve(small_noise, 1.0, COERCIVE, fast_solver)

        assert diagnostics.converged  # nosec: B101
        assert diagnostics.max_ratio() < 0.55  # nosec: B101
        assert traj.T == 1.0  # nosec: B101

    def test_contraction_near_budget(self, rng, grid_1d, fast_solver):
        """Data with extension norm just inside the budget contracts at rate <= 0.55 within 12 iterates."""
        noise = band_limited_noise(grid_1d, rng, amplitude=1.0, cutoff=8)
        times = graded_times(1.0, fast_solver.time_nodes, fast_solver.grading_ratio)
        unit = xt_norm(semigroup_trajectory(noise, times), 1.0, stride=fast_solver.stride).total
        u0 = noise * (0.09 / unit)

        _, diagnostics = picard_solve(u0, 1.0, COERCIVE, fast_solver)

        assert diagnostics.within_budget  # nosec: B101
        assert diagnostics.extension_norm == pytest.approx(0.09, rel=1e-8)  # nosec: B101
        assert diagnostics.converged  # nosec: B101
        assert 2 <= diagnostics.iterations <= 12  # nosec: B101
        assert diagnostics.ratios  # nosec: B101
        assert diagnostics.max_ratio(skip=0) <= 0.55  # nosec: B101

    def test_invalid_config(self, grid_1d, fast_solver):
        """Invalid settings are rejected before solving."""
        with pytest.raises(ConfigurationError, match="time_nodes"):
            picard_solve(Field.zeros(grid_1d), 1.0, COERCIVE, fast_solver.replace(time_nodes=4))

    @pytest.mark.slow
    def test_agrees_with_etd(self, small_noise, fast_solver):
        """Picard and the ETD oracle agree on small data."""
        traj, diagnostics = picard_solve(small_noise, 0.1, COERCIVE, fast_solver)
        oracle = etd_solve(small_noise, 0.1, COERCIVE, fast_solver)

        gap = (traj.final - oracle.final).sup_norm()

        assert diagnostics.converged  # nosec: B101
        assert gap <= 1e-4 * small_noise.sup_norm()  # nosec: B101


class TestETD:
    """Test the exponential time differencing oracle."""

    def test_linear_flow_is_exact(self, small_noise, fast_solver):
        """Without a nonlinearity ETD reproduces the semigroup."""
        traj = etd_solve(small_noise, 0.1, Nonlinearity.linear(), fast_solver)

        expected = apply_semigroup(small_noise, 0.1)

        assert np.allclose(traj.final.values, expected.values, atol=1e-13)  # nosec: B101
        assert traj.T == pytest.approx(0.1)  # nosec: B101

    def test_segments_cover_breakpoints(self, small_noise, fast_solver):
        """Segmented runs end at the last breakpoint with matching nodes."""
        traj = etd_segments(small_noise, [0.0, 0.01, 0.1], Nonlinearity.linear(), fast_solver)

        assert traj.T == pytest.approx(0.1)  # nosec: B101
        assert traj.node_index(0.01) > 0  # nosec: B101
        assert np.allclose(  # nosec: B101
            traj.final.values, apply_semigroup(small_noise, 0.1).values, atol=1e-13
        )

    def test_segments_need_ascending_breakpoints(self, small_noise, fast_solver):
        """Breakpoints start at zero and ascend."""
        with pytest.raises(ConfigurationError):
            etd_segments(small_noise, [0.0, 1.0, 0.5], COERCIVE, fast_solver)
        with pytest.raises(ConfigurationError):
            etd_segments(small_noise, [0.5, 1.0], COERCIVE, fast_solver)

    def test_probe_on_zero_data(self, grid_1d, fast_solver):
        """Zero data never blows up and reaches the horizon."""
        report = blowup_probe(Field.zeros(grid_1d), NONCOERCIVE, fast_solver.replace(horizon=0.1))

        assert report.detected is False  # nosec: B101
        assert report.t_star is None  # nosec: B101
        assert report.horizon == pytest.approx(0.1)  # nosec: B101


class TestDiagnostics:
    """Test solve bookkeeping."""

    def test_ratios(self):
        """Ratios are successive difference quotients."""
        diagnostics = SolveDiagnostics()
        for difference in (1.0, 0.5, 0.125):
            diagnostics.record(1.0, difference)

        assert diagnostics.ratios == [0.5, 0.25]  # nosec: B101
        assert diagnostics.max_ratio(skip=0) == 0.5  # nosec: B101
        assert diagnostics.iterations == 3  # nosec: B101

    def test_finish_once(self):
        """The termination is set exactly once."""
        diagnostics = SolveDiagnostics()
        diagnostics.finish(Termination.CONVERGED)

        with pytest.raises(RuntimeError):
            diagnostics.finish(Termination.MAX_ITERS)

    def test_raise_for_termination(self):
        """Non-converged solves map to their exceptions."""
        stalled = SolveDiagnostics()
        stalled.record(1.0, 1.0)
        stalled.finish(Termination.MAX_ITERS)
        exploded = SolveDiagnostics()
        exploded.finish(Termination.BLOWUP, blowup_time=0.3)
        done = SolveDiagnostics()
        done.finish(Termination.CONVERGED)

        with pytest.raises(NonConvergenceError):
            stalled.raise_for_termination()
        with pytest.raises(BlowupError) as excinfo:
            exploded.raise_for_termination()
        assert excinfo.value.time == 0.3  # nosec: B101
        done.raise_for_termination()

    def test_to_dict(self):
        """Serialized diagnostics carry the termination value."""
        diagnostics = SolveDiagnostics()
        diagnostics.finish(Termination.CONVERGED)

        assert diagnostics.to_dict()["termination"] == "converged"  # nosec: B101
