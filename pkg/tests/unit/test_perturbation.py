import numpy as np
import pytest

from biflow.core.enums import NonlinearityKind
from biflow.core.errors import ConfigurationError, SmallnessViolationError
from biflow.services.initial_data import band_limited_noise
from biflow.solver.nonlinearity import Nonlinearity
from biflow.solver.perturbation import perturbation_solve
from biflow.solver.picard import picard_solve
from biflow.spectral.field import Field

COERCIVE = Nonlinearity(NonlinearityKind.CUBIC_COERCIVE)


class TestPerturbationSolve:
    """Test the perturbation equation around a solution."""

    def test_zero_perturbation(self, small_noise, fast_solver):
        """A zero perturbation stays zero."""
        u, _ = picard_solve(small_noise, 0.5, COERCIVE, fast_solver)

        w, diagnostics = perturbation_solve(u, Field.zeros(small_noise.grid), COERCIVE, fast_solver)

        assert diagnostics.converged  # nosec: B101
        assert w.final.sup_norm() == 0.0  # nosec: B101

    def test_linear_flow_returns_forcing(self, small_noise, fast_solver):
        """Without a nonlinearity w is the free evolution of w0."""
        u, _ = picard_solve(small_noise, 0.5, COERCIVE, fast_solver)
        w0 = 0.1 * small_noise

        w, diagnostics = perturbation_solve(u, w0, Nonlinearity.linear(), fast_solver)

        assert diagnostics.iterations == 1  # nosec: B101
        assert w.initial is w0  # nosec: B101

    def test_needs_cubic(self, small_noise, fast_solver):
        """Power nonlinearities have no trilinear expansion."""
        u, _ = picard_solve(small_noise, 0.5, COERCIVE, fast_solver)
        power = Nonlinearity(NonlinearityKind.POWER, p=3.0)

        with pytest.raises(ConfigurationError, match="cubic"):
            perturbation_solve(u, small_noise, power, fast_solver)

    def test_large_perturbation_rejected(self, small_noise, fast_solver):
        """Perturbations outside the smallness budget are refused."""
        u, _ = picard_solve(small_noise, 0.5, COERCIVE, fast_solver)

        with pytest.raises(SmallnessViolationError):
            perturbation_solve(u, 1000.0 * small_noise, COERCIVE, fast_solver)

    @pytest.mark.slow
    def test_matches_difference_of_solutions(self, grid_1d, fast_solver):
        """w = u - v where v solves from u0 - w0."""
        rng_u, rng_w = (np.random.default_rng(seed) for seed in (5, 6))
        u0 = band_limited_noise(grid_1d, rng_u, amplitude=0.01)
        w0 = band_limited_noise(grid_1d, rng_w, amplitude=1e-3)
        u, _ = picard_solve(u0, 0.5, COERCIVE, fast_solver)
        v, _ = picard_solve(u0 - w0, 0.5, COERCIVE, fast_solver, times=u.times)

        w, diagnostics = perturbation_solve(u, w0, COERCIVE, fast_solver)

        assert diagnostics.converged  # nosec: B101
        assert w.sup_difference(u - v) <= 1e-6  # nosec: B101
