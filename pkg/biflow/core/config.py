"""Solver settings and the declarative run configuration."""

from dataclasses import asdict, dataclass, fields
import hashlib
import json
import logging
import math
from typing import Any, Dict, Optional

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    ValidationError,
    create_model,
    field_validator,
    model_validator,
)

from biflow.core.enums import (
    DEFAULT_BLOWUP_THRESHOLD,
    DEFAULT_PICARD_TOL,
    DEFAULT_SMALLNESS_BUDGET,
    NonlinearityKind,
)
from biflow.core.errors import ConfigurationError
from biflow.spectral.grid import GridSpec, make_grid

logger = logging.getLogger(__name__)


@dataclass
class SolverConfig:
    """Settings shared by the Picard, ETD and perturbation solvers.

    Attributes:
        time_nodes: Number M of positive graded time nodes
        grading_ratio: Geometric ratio q of the graded block near t = 0
        max_picard_iters: Iteration cap for fixed-point solves
        picard_tol: X_T-norm tolerance on successive iterates
        dealias: Apply the cubic two-thirds rule around nonlinear products
        blowup_threshold: Bound on t^(1/4) ||grad u||_inf
        smallness_budget: Bound on ||S(.)u0||_X for the contraction start
        horizon: Default final time T
        etd_steps: Initial number of ETD steps over the horizon
        etd_tol: Sup-norm agreement required between step halvings
        max_halvings: Step-halving budget of the ETD oracle
        etd_record: Maximum number of recorded ETD nodes
        stride: Ball-center stride for X_T norms
    """

    time_nodes: int = 64
    grading_ratio: float = 2.0
    max_picard_iters: int = 30
    picard_tol: float = DEFAULT_PICARD_TOL
    dealias: bool = True
    blowup_threshold: float = DEFAULT_BLOWUP_THRESHOLD
    smallness_budget: float = DEFAULT_SMALLNESS_BUDGET
    horizon: float = 1.0
    etd_steps: int = 1000
    etd_tol: float = 1e-6
    max_halvings: int = 4
    etd_record: int = 128
    stride: int = 4

    def validate(self) -> tuple[bool, list[str]]:
        """Validate configuration.

        Returns:
            Tuple of (is_valid, error_messages)
        """
        errors = []

        if self.time_nodes < 16:
            errors.append("time_nodes must be >= 16")
        if not 1.0 < self.grading_ratio <= 2.0:
            errors.append("grading_ratio must lie in (1, 2]")
        if self.max_picard_iters < 1:
            errors.append("max_picard_iters must be >= 1")
        if not self.picard_tol > 0:
            errors.append("picard_tol must be positive")
        if not self.blowup_threshold > 0:
            errors.append("blowup_threshold must be positive")
        if not self.smallness_budget > 0:
            errors.append("smallness_budget must be positive")
        if not (math.isfinite(self.horizon) and self.horizon > 0):
            errors.append("horizon must be positive")
        if self.etd_steps < 1000:
            errors.append("etd_steps must be >= 1000")
        if not self.etd_tol > 0:
            errors.append("etd_tol must be positive")
        if self.max_halvings < 0:
            errors.append("max_halvings must be >= 0")
        if self.etd_record < 2:
            errors.append("etd_record must be >= 2")
        if self.stride < 1:
            errors.append("stride must be >= 1")

        return len(errors) == 0, errors

    def require_valid(self) -> "SolverConfig":
        is_valid, errors = self.validate()
        if not is_valid:
            raise ConfigurationError("; ".join(errors))
        return self

    def replace(self, **changes: Any) -> "SolverConfig":
        data = self.to_dict()
        data.update(changes)
        return SolverConfig.from_dict(data)

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for serialization."""
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SolverConfig":
        """Create from dictionary."""
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigurationError(f"unknown solver settings: {', '.join(sorted(unknown))}")
        return cls(**data)


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class GridConfig(_Strict):
    dim: int = 1
    points_per_axis: int = 256
    box_length: float = 2 * math.pi

    def to_grid(self) -> GridSpec:
        return make_grid(self.dim, self.points_per_axis, self.box_length)


class NonlinearityConfig(_Strict):
    kind: str = NonlinearityKind.CUBIC_COERCIVE.value
    sigma: int = 1
    p: float = 4.0

    @field_validator("kind")
    @classmethod
    def _known_kind(cls, value: str) -> str:
        return NonlinearityKind.from_string(value).value

    @field_validator("sigma")
    @classmethod
    def _unit_sign(cls, value: int) -> int:
        if value not in (1, -1):
            raise ValueError("sigma must be +1 or -1")
        return value

    @field_validator("p")
    @classmethod
    def _super_quadratic(cls, value: float) -> float:
        if not value > 2:
            raise ValueError("power nonlinearity needs p > 2")
        return value


class InitialDataConfig(_Strict):
    generator: Optional[str] = None
    params: Dict[str, Any] = Field(default_factory=dict)
    snapshot: Optional[str] = None

    @model_validator(mode="after")
    def _one_source(self) -> "InitialDataConfig":
        if (self.generator is None) == (self.snapshot is None):
            raise ValueError("initial data needs exactly one of 'generator' or 'snapshot'")
        return self


class _SolverSettingsBase(_Strict):
    def to_solver_config(self) -> SolverConfig:
        return SolverConfig.from_dict(self.model_dump()).require_valid()


# Mirrors the fields, types and defaults of SolverConfig.
SolverSettings = create_model(
    "SolverSettings",
    __base__=_SolverSettingsBase,
    __module__=__name__,
    **{f.name: (f.type, f.default) for f in fields(SolverConfig)},
)


class RunConfig(_Strict):
    """Everything one `biflow run` or `biflow solve` needs."""

    experiment: Optional[str] = None
    grid: GridConfig = Field(default_factory=GridConfig)
    nonlinearity: NonlinearityConfig = Field(default_factory=NonlinearityConfig)
    initial_data: Optional[InitialDataConfig] = None
    perturbation: Optional[InitialDataConfig] = None
    solver: SolverSettings = Field(default_factory=SolverSettings)
    tolerances: Dict[str, float] = Field(default_factory=dict)
    params: Dict[str, Any] = Field(default_factory=dict)
    seed: int = 0
    output_dir: str = "runs"
    threads: int = 1
    tolerance_scale: float = 1.0

    @field_validator("threads")
    @classmethod
    def _positive_threads(cls, value: int) -> int:
        if value < 1:
            raise ValueError("threads must be >= 1")
        return value

    @field_validator("tolerance_scale")
    @classmethod
    def _positive_scale(cls, value: float) -> float:
        if not value > 0:
            raise ValueError("tolerance_scale must be positive")
        return value

    @model_validator(mode="after")
    def _preconditions(self) -> "RunConfig":
        self.grid.to_grid()
        self.solver.to_solver_config()
        return self

    def echo(self) -> Dict[str, Any]:
        """Canonical JSON-ready copy of the config."""
        return self.model_dump(mode="json")

    def config_hash(self) -> str:
        canonical = json.dumps(self.echo(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:12]


def parse_run_config(data: Dict[str, Any], overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    """Validate a raw key-value tree, applying CLI overrides first.

    Raises:
        ConfigurationError: If validation fails or keys are unknown
    """
    data = dict(data or {})
    for key, value in (overrides or {}).items():
        if value is not None:
            data[key] = value
    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        problems = "; ".join(
            f"{'.'.join(str(p) for p in err['loc']) or 'config'}: {err['msg']}" for err in e.errors()
        )
        raise ConfigurationError(f"invalid configuration: {problems}") from None
