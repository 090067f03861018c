from enum import Enum, IntEnum


class NonlinearityKind(Enum):
    """Supported nonlinearities F."""

    CUBIC_COERCIVE = "cubic_coercive"
    CUBIC_NONCOERCIVE = "cubic_noncoercive"
    POWER = "power"

    @classmethod
    def from_string(cls, kind_str: str) -> "NonlinearityKind":
        """Convert string to NonlinearityKind enum with validation.

        Args:
            kind_str: Kind string to convert

        Returns:
            NonlinearityKind enum value

        Raises:
            ValueError: If kind string is not supported
        """
        kind_map = {kind.value: kind for kind in cls}

        if kind_str not in kind_map:
            supported = ", ".join(f"'{k}'" for k in kind_map.keys())
            raise ValueError(
                f"Nonlinearity '{kind_str}' is not supported. Supported kinds: {supported}"
            )

        return kind_map[kind_str]

    @property
    def is_cubic(self) -> bool:
        """Whether F is one of the two cubic prototypes."""
        return self in (NonlinearityKind.CUBIC_COERCIVE, NonlinearityKind.CUBIC_NONCOERCIVE)


class Termination(Enum):
    """How a solve ended."""

    CONVERGED = "converged"
    MAX_ITERS = "max_iters"
    BLOWUP = "blowup"


class Verdict(Enum):
    """Experiment outcome."""

    PASS = "pass"
    FAIL = "fail"
    INCONCLUSIVE = "inconclusive"

    @classmethod
    def combine(cls, verdicts) -> "Verdict":
        """Fail dominates inconclusive, which dominates pass."""
        verdicts = list(verdicts)
        if cls.FAIL in verdicts:
            return cls.FAIL
        if cls.INCONCLUSIVE in verdicts:
            return cls.INCONCLUSIVE
        return cls.PASS


class ExitCode(IntEnum):
    """Process exit codes of the CLI."""

    OK = 0
    EXPERIMENT_FAILED = 2
    CONFIGURATION = 3
    RESOLUTION = 4
    BLOWUP = 5


# Constants
DEFAULT_PICARD_TOL = 1e-6
DEFAULT_BLOWUP_THRESHOLD = 1e3
DEFAULT_SMALLNESS_BUDGET = 0.1
ETD_DIVERGENCE_LIMIT = 1e6
