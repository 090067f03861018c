import math

import numpy as np
import pytest

from biflow.core.config import parse_run_config
from biflow.core.enums import NonlinearityKind, Verdict
from biflow.core.errors import ConfigurationError, SmallnessViolationError
from biflow.experiments.base import resolve_tolerances
from biflow.experiments.blowup import amplitude_ladder, blowup_sweep
from biflow.experiments.dissipation import (
    decay_amplitude_scan,
    decay_run,
    dissipation_run,
    perturbation_energy,
)
from biflow.experiments.kernel import verify_kernel
from biflow.experiments.norms_checks import bmo_family
from biflow.experiments.registry import EXPERIMENTS, get_experiment, run_experiment
from biflow.experiments.scaling import rescale, scaling_check
from biflow.experiments.smoothing import extension_bound, smoothing_exponents
from biflow.experiments.solver_checks import fd_jacobian, lipschitz_constant, solver_checks
from biflow.experiments.stability import stability_run
from biflow.experiments.static import (
    RadialProfile,
    log_profile,
    power_profile,
    static_residual,
    static_study,
)
from biflow.services.initial_data import band_limited_noise, gaussian_bump, single_mode
from biflow.solver.nonlinearity import Nonlinearity
from biflow.spectral.field import Field
from biflow.spectral.grid import make_grid

COERCIVE = Nonlinearity(NonlinearityKind.CUBIC_COERCIVE)
NONCOERCIVE = Nonlinearity(NonlinearityKind.CUBIC_NONCOERCIVE)


class TestTolerances:
    """Test tolerance resolution."""

    def test_defaults_scaled(self):
        """Every tolerance is multiplied by the scale."""
        tol = resolve_tolerances({"a": 1.0, "b": 2.0}, {"b": 3.0}, scale=0.5)

        assert tol == {"a": 0.5, "b": 1.5}  # nosec: B101

    def test_unknown_override(self):
        """Overrides must name a declared tolerance."""
        with pytest.raises(ConfigurationError, match="unknown tolerances"):
            resolve_tolerances({"a": 1.0}, {"z": 1.0})


class TestStaticResidual:
    """Test the radial static-solution check."""

    @pytest.mark.parametrize("sign", [1, -1])
    def test_log_profiles_are_static(self, sign):
        """+-2 ln r solve the static equation to rounding."""
        result = static_residual(log_profile(sign))

        assert result.passed  # nosec: B101
        assert result.check("residual").value < 1e-6  # nosec: B101

    def test_quadratic_profile_is_not_static(self):
        """r^2 leaves the residual 48 r^2."""
        result = static_residual(power_profile(2.0))
        r = np.array(result.series["residual"]["r"])
        residual = np.array(result.series["residual"]["residual"])

        assert result.verdict == Verdict.FAIL  # nosec: B101
        assert np.allclose(residual, 48 * r**2, rtol=1e-3)  # nosec: B101

    def test_study_passes(self):
        """The study separates the static profiles from r^2."""
        result = static_study()

        assert result.passed  # nosec: B101
        assert result.check("discrimination").value >= 1e3  # nosec: B101

    def test_profile_validation(self):
        """Dimension, point count and spacing are checked."""
        radii = np.linspace(0.5, 50.0, 300)
        uneven = RadialProfile(4, radii, np.log(radii))
        short = log_profile(points=50)
        wrong_dim = RadialProfile(3, short.radii, short.values)

        assert "radii must be log-uniformly spaced" in uneven.validate()[1]  # nosec: B101
        assert short.validate()[0] is False  # nosec: B101
        assert wrong_dim.validate()[0] is False  # nosec: B101
        with pytest.raises(ConfigurationError, match="invalid radial profile"):
            static_residual(uneven)

    def test_window_enforced(self):
        """Radii outside [0.5, 50] are rejected."""
        profile = log_profile(r_min=0.1, r_max=50.0)

        assert profile.validate()[0] is False  # nosec: B101


class TestScaling:
    """Test the scaling check."""

    def test_rescale_shares_samples(self, small_noise):
        """a(2 .) lives on half the box with the same samples."""
        scaled = rescale(small_noise, 2.0)

        assert scaled.grid.box_length == pytest.approx(small_noise.grid.box_length / 2)  # nosec: B101
        assert np.array_equal(scaled.values, small_noise.values)  # nosec: B101

    def test_noise_is_scale_invariant(self, small_noise, fast_solver):
        """Norm identity and solver equivariance hold to rounding."""
        result = scaling_check(small_noise, cfg=fast_solver)

        assert result.passed  # nosec: B101
        assert result.check("norm_identity").value < 1e-8  # nosec: B101

    def test_only_lambda_two(self, small_noise):
        """Nested grids need lambda = 2."""
        with pytest.raises(ConfigurationError):
            scaling_check(small_noise, lam=3.0)

    def test_only_cubic(self, small_noise):
        """Power fluxes are not scale invariant."""
        power = Nonlinearity(NonlinearityKind.POWER, p=3.0)

        with pytest.raises(ConfigurationError, match="cubic"):
            scaling_check(small_noise, nonlinearity=power)


class TestDecay:
    """Test the decay experiments."""

    def test_zero_data_passes_trivially(self, grid_1d, fast_solver):
        """Zero data has a zero decay proxy."""
        result = decay_run(Field.zeros(grid_1d), NONCOERCIVE, cfg=fast_solver)

        assert result.passed  # nosec: B101
        assert result.check("residual_fraction").details["trivial"] is True  # nosec: B101

    def test_small_bump_decays(self, grid_1d, fast_solver):
        """A small bump decays to a fraction of its peak proxy."""
        u0 = gaussian_bump(grid_1d, amplitude=0.01, width=1.0)

        result = decay_run(u0, NONCOERCIVE, cfg=fast_solver)

        assert result.passed  # nosec: B101
        assert result.series["decay"]["t"][-1] == pytest.approx(1000.0)  # nosec: B101

    def test_large_data_refused(self, bump, fast_solver):
        """Data outside the smallness budget is refused."""
        with pytest.raises(SmallnessViolationError):
            decay_run(100.0 * bump, NONCOERCIVE, cfg=fast_solver)

    def test_amplitude_scan_records_budget(self, bump, fast_solver):
        """Amplitudes beyond the budget are recorded, not raised."""
        result = decay_amplitude_scan(bump, NONCOERCIVE, [0.01, 100.0], cfg=fast_solver)

        assert result.metadata["outcomes"][1] == "beyond_budget"  # nosec: B101
        assert result.metadata["largest_passing_amplitude"] == 0.01  # nosec: B101

    def test_needs_cubic(self, bump, fast_solver):
        """Decay runs are defined for the cubic kinds."""
        power = Nonlinearity(NonlinearityKind.POWER, p=3.0)

        with pytest.raises(ConfigurationError):
            decay_run(bump, power, cfg=fast_solver)

    @pytest.mark.slow
    def test_coercive_energy_dissipates(self, bump, fast_solver):
        """The coercive energy does not increase along the run."""
        result = dissipation_run(bump, COERCIVE, T=0.01, cfg=fast_solver)

        energies = result.series["curves"]["energy"]

        assert result.passed  # nosec: B101
        assert energies[-1] < energies[0]  # nosec: B101

    @pytest.mark.parametrize("jump, expected", [(0.0, True), (2e-6, False)])
    def test_energy_checked_between_recorded_nodes(self, grid_1d, fast_solver, mocker, jump, expected):
        """A rise of E on a single step that the stored curve skips still fails the check."""
        calls = []

        def stepped_energy(field, sign=1):
            calls.append(field)
            i = len(calls) - 1
            return 1.0 - 1e-6 * i + (jump if i == 5 else 0.0)

        mocker.patch("biflow.experiments.dissipation.energy", side_effect=stepped_energy)
        u0 = gaussian_bump(grid_1d, amplitude=0.01)

        result = dissipation_run(u0, Nonlinearity.linear(), T=0.01, cfg=fast_solver)

        curve = result.series["curves"]["energy"]
        assert result.metadata["steps_checked"] == fast_solver.etd_steps  # nosec: B101
        assert len(curve) < fast_solver.etd_steps  # nosec: B101
        assert all(b < a for a, b in zip(curve, curve[1:]))  # nosec: B101
        assert result.check("energy_monotone").passed is expected  # nosec: B101


class TestSmoothing:
    """Test the smoothing-rate fit."""

    def test_single_low_mode_shows_no_rate(self):
        """A single low mode is barely smoothed, so the t^(-k/4) rate is not observed."""
        result = smoothing_exponents(single_mode(make_grid(1, 256, 2 * math.pi)))

        assert result.verdict != Verdict.PASS  # nosec: B101
        assert len(result.series["sup_norms"]["t"]) == 21  # nosec: B101


class TestExtensionBound:
    """Test the extension constant over a family."""

    def test_repeated_field_is_stable(self, small_noise):
        """A family of one repeated field has zero spread."""
        result = extension_bound([small_noise, small_noise], T=1.0, time_nodes=16)

        assert result.passed  # nosec: B101
        assert result.check("constant_spread").value == 0.0  # nosec: B101
        assert result.metadata["C1"] > 0  # nosec: B101


class TestBmoFamily:
    """Test Carleson domination over a family."""

    def test_records_constants(self, small_noise):
        """One row per field with finite domination and Poincare constants."""
        result = bmo_family([small_noise])

        row = result.series["family"]
        assert len(row["constant"]) == 1  # nosec: B101
        assert math.isfinite(result.metadata["domination_constant"])  # nosec: B101
        assert result.check("domination_spread").passed  # nosec: B101
        assert result.check("poincare_finite").passed  # nosec: B101

    def test_strides_agree_on_smooth_fields(self, rng):
        """Stride-4 centers reproduce the stride-1 seminorms on well-resolved fields."""
        grid = make_grid(1, 256, 2 * math.pi)
        fields = [band_limited_noise(grid, rng, cutoff=3) for _ in range(3)]

        result = bmo_family(fields, stride=4)

        assert len(result.series["family"]["stride_error"]) == 3  # nosec: B101
        assert result.check("stride_agreement").passed  # nosec: B101
        assert max(result.series["family"]["stride_error"]) <= 0.05  # nosec: B101


class TestSolverChecks:
    """Test the solver cross-checks and their Jacobian helpers."""

    def test_fd_jacobian_matches_closed_form(self):
        """Central differences reproduce |xi|^2 I + 2 xi xi^T for the cubic."""
        xi = np.random.default_rng(7).normal(size=(50, 2))

        jac = fd_jacobian(COERCIVE, xi)

        expected = np.stack([COERCIVE.jacobian(x) for x in xi])
        closed = np.einsum("p,ij->pij", np.sum(xi**2, axis=1), np.eye(2)) + 2 * np.einsum(
            "pi,pj->pij", xi, xi
        )
        assert np.allclose(expected, closed, atol=1e-12)  # nosec: B101
        assert np.allclose(jac, closed, atol=1e-6)  # nosec: B101

    def test_fd_jacobian_sign(self):
        """The non-coercive cubic has the negated Jacobian."""
        xi = np.random.default_rng(8).normal(size=(10, 2))

        assert np.allclose(  # nosec: B101
            fd_jacobian(NONCOERCIVE, xi), -fd_jacobian(COERCIVE, xi), atol=1e-6
        )

    def test_lipschitz_constant_in_one_dimension(self):
        """For F = xi^3 the ratio 3|a + b| / (|a| + |b|) peaks at 3."""
        assert lipschitz_constant(COERCIVE, 1) == pytest.approx(3.0, abs=1e-2)  # nosec: B101

    def test_lipschitz_constant_in_two_dimensions(self):
        """In 2D collinear pairs push the constant towards sqrt(10), well below 6."""
        value = lipschitz_constant(COERCIVE, 2)

        assert 3.0 <= value <= 6.0  # nosec: B101

    def test_lipschitz_constant_of_linear_flow(self):
        """A vanishing flux has a vanishing constant."""
        assert lipschitz_constant(Nonlinearity.linear(), 2, pairs=100) == 0.0  # nosec: B101

    @pytest.mark.slow
    def test_small_cases_pass(self, grid_1d, small_noise, fast_solver):
        """Small data converges and matches the oracle, Duhamel and the cubic identity."""
        cases = [small_noise, gaussian_bump(grid_1d, amplitude=0.02)]

        result = solver_checks(cases, COERCIVE, T=0.1, cfg=fast_solver)

        for name in (
            "converged",
            "duhamel_consistency",
            "oracle_agreement",
            "trilinear_identity",
            "lipschitz",
            "linear_flow",
        ):
            assert result.check(name).passed, name  # nosec: B101
        assert result.series["cases"]["case"] == [0, 1]  # nosec: B101
        assert all(e <= fast_solver.smallness_budget for e in result.series["cases"]["extension"])  # nosec: B101


class TestPerturbationEnergy:
    """Test the perturbation energy growth fit."""

    def test_zero_perturbation(self, grid_1d, fast_solver):
        """Without a perturbation f vanishes and the fit is trivial."""
        g0 = gaussian_bump(grid_1d, amplitude=0.02)

        result = perturbation_energy(Field.zeros(grid_1d), g0, COERCIVE, segments=2, cfg=fast_solver)

        assert result.passed  # nosec: B101
        assert result.metadata["beta"] == 0.0  # nosec: B101
        assert result.series["sampled"]["f_l2_sq"] == [0.0, 0.0, 0.0]  # nosec: B101

    def test_needs_coercive_cubic(self, grid_1d):
        """Only the coercive cubic is supported."""
        zero = Field.zeros(grid_1d)

        with pytest.raises(ConfigurationError):
            perturbation_energy(zero, zero, NONCOERCIVE)
        with pytest.raises(ConfigurationError):
            perturbation_energy(zero, zero, Nonlinearity.from_config("power", p=4.0))


class TestBlowupSweep:
    """Test the blow-up sweep."""

    def test_amplitude_ladder(self):
        """The ladder starts at zero and doubles."""
        assert amplitude_ladder(0.5, 3) == [0.0, 0.5, 1.0, 2.0]  # nosec: B101

    def test_ladder_arguments(self):
        """The first amplitude is positive and the count at least one."""
        with pytest.raises(ConfigurationError):
            amplitude_ladder(0.0, 3)

    def test_zero_shape_rejected(self, grid_1d, fast_solver):
        """The shape must be non-zero."""
        with pytest.raises(ConfigurationError):
            blowup_sweep(Field.zeros(grid_1d), NONCOERCIVE, [0.0, 1.0], fast_solver)

    def test_quiet_sweep(self, bump, fast_solver):
        """Zero and tiny amplitudes stay below the threshold."""
        result = blowup_sweep(bump, NONCOERCIVE, [0.0, 1e-3], fast_solver.replace(horizon=0.05))

        assert result.passed  # nosec: B101
        assert result.series["sweep"]["detected"] == [0.0, 0.0]  # nosec: B101


class TestRegistry:
    """Test experiment lookup and dispatch."""

    def test_all_experiments_registered(self):
        """Every experiment is reachable by name."""
        assert set(EXPERIMENTS) == {  # nosec: B101
            "verify-kernel",
            "smoothing-exponents",
            "extension-bound",
            "scaling-check",
            "bmo-family",
            "solver-checks",
            "dissipation-run",
            "decay-run",
            "static-residual",
            "stability-run",
            "perturbation-energy",
            "blowup-sweep",
            "discretization-robustness",
        }

    def test_unknown_experiment(self):
        """Unknown names list the supported experiments."""
        with pytest.raises(ConfigurationError, match="Supported experiments"):
            get_experiment("warp-drive")

    def test_unknown_params(self):
        """Experiment parameters are checked against the declared ones."""
        config = parse_run_config({"experiment": "static-residual", "params": {"bogus": 1}})

        with pytest.raises(ConfigurationError, match="unknown params"):
            run_experiment(config)

    def test_run_echoes_config(self):
        """Results carry the config they were produced from."""
        config = parse_run_config({"experiment": "static-residual", "params": {"points": 400}})

        result = run_experiment(config)

        assert result.passed  # nosec: B101
        assert result.inputs["config"]["experiment"] == "static-residual"  # nosec: B101

    def test_missing_experiment(self):
        """A config without an experiment cannot be dispatched."""
        with pytest.raises(ConfigurationError):
            run_experiment(parse_run_config({}))


@pytest.mark.slow
class TestKernelVerification:
    """Test the kernel verification experiment end to end."""

    def test_one_dimensional_kernel(self):
        """The 1D kernel passes its moment, pointwise and L^1 checks."""
        result = verify_kernel(1)

        assert result.passed  # nosec: B101

    def test_tightened_tolerances_fail(self):
        """Tightening every tolerance far below rounding makes the run fail."""
        result = verify_kernel(1, tolerance_scale=1e-12)

        assert result.verdict == Verdict.FAIL  # nosec: B101


class TestStability:
    """Test the stability sweep."""

    def test_data_equal_modulo_constants(self, small_noise, fast_solver):
        """Data differing by a constant give the same solution in X_T."""
        result = stability_run(small_noise, small_noise + 3.0, COERCIVE, T=0.5, cfg=fast_solver)

        assert result.passed  # nosec: B101
        assert result.metadata["coincident"] is True  # nosec: B101

    @pytest.mark.slow
    def test_linear_response(self, small_noise, grid_1d, fast_solver):
        """||u - v||_X scales with the size of the data difference."""
        direction = band_limited_noise(grid_1d, np.random.default_rng(7), amplitude=1e-3)

        result = stability_run(small_noise, small_noise + direction, COERCIVE, T=0.5, cfg=fast_solver)

        assert result.check("ratio_finite").passed  # nosec: B101
        assert result.check("ratio_spread").passed  # nosec: B101
