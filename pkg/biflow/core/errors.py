"""Exception hierarchy; every error carries the exit code the CLI reports."""

from typing import Any, Dict, Optional

from biflow.core.enums import ExitCode


class BiflowError(Exception):
    """Base class for all lab errors."""

    exit_code: ExitCode = ExitCode.CONFIGURATION

    def __init__(self, message: str, **details: Any) -> None:
        super().__init__(message)
        self.message = message
        self.details = details

    def to_dict(self) -> Dict[str, Any]:
        """Structured form written to stderr by the CLI."""
        record = {
            "error": type(self).__name__,
            "message": self.message,
            "exit_code": int(self.exit_code),
        }
        if self.details:
            record["details"] = {k: _plain(v) for k, v in self.details.items()}
        return record


class ConfigurationError(BiflowError, ValueError):
    """Invalid grid, config file or argument."""

    exit_code = ExitCode.CONFIGURATION


class UnsupportedOrderError(ConfigurationError):
    """Derivative order beyond what the operator supports."""


class DomainError(BiflowError, ValueError):
    """Argument outside the mathematical domain (t <= 0, uncovered interval, ...)."""

    exit_code = ExitCode.CONFIGURATION


class ResolutionError(BiflowError):
    """Quadrature or step-halving budget exhausted."""

    exit_code = ExitCode.RESOLUTION


class NonConvergenceError(BiflowError):
    """Iteration stopped at max_iters without meeting its tolerance."""

    exit_code = ExitCode.RESOLUTION


class SmallnessViolationError(NonConvergenceError):
    """Data outside the smallness budget or a diverging perturbation iteration."""


class BlowupError(BiflowError):
    """Scale-invariant gradient crossed the blow-up threshold."""

    exit_code = ExitCode.BLOWUP

    def __init__(
        self, message: str, time: Optional[float] = None, trajectory: Any = None, **details: Any
    ) -> None:
        super().__init__(message, time=time, **details)
        self.time = time
        self.trajectory = trajectory


def _plain(value: Any) -> Any:
    if isinstance(value, (int, float, str, bool)) or value is None:
        return value
    try:
        return float(value)
    except (TypeError, ValueError):
        return str(value)
