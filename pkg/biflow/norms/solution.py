"""Space-time norms of trajectories: X_T and the auxiliary L_T^p."""

from dataclasses import asdict, dataclass, field
import json
import logging
import math
from typing import Any, Dict, Optional, Union

import numpy as np

from biflow.core.errors import ConfigurationError
from biflow.norms.balls import DEFAULT_STRIDE, MIN_LADDER, BallFamily
from biflow.norms.trajectory import Trajectory, trapezoid_weights
from biflow.spectral.operators import gradient

logger = logging.getLogger(__name__)


@dataclass
class NormReport:
    """Components of the X_T norm and where each supremum is attained.

    Attributes:
        n_inf: k -> sup_t t^{k/4} ||grad^k u||_inf
        n_carleson: k -> sup_{x, r <= R} (int_0^{r^4} avg_B |grad^k u|^{4/k})^{k/4}
        argmax: Witness per component (time, or center and radius)
        total: Sum of the four components
        metadata: Horizon, radius actually used, stride, warnings
    """

    n_inf: Dict[int, float]
    n_carleson: Dict[int, float]
    argmax: Dict[str, Dict[str, Any]] = field(default_factory=dict)
    total: float = 0.0
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        """Total is always recomputed from the components."""
        self.total = float(sum(self.n_inf.values()) + sum(self.n_carleson.values()))

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for serialization."""
        data = asdict(self)
        data["n_inf"] = {str(k): v for k, v in self.n_inf.items()}
        data["n_carleson"] = {str(k): v for k, v in self.n_carleson.items()}
        return data

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def xt_norm(
    trajectory: Trajectory,
    T: float,
    R: Optional[float] = None,
    stride: int = DEFAULT_STRIDE,
) -> NormReport:
    """X_T norm of a trajectory.

    The Carleson radius defaults to T^(1/4) and is clamped to a quarter of
    the box; the clamp is recorded in the report metadata.

    Raises:
        DomainError: If the trajectory does not cover (0, T]
    """
    trajectory.require_cover(T)
    traj = trajectory.up_to(T)
    grid = traj.grid
    times = traj.times
    positive = range(1, len(times))

    n_inf: Dict[int, float] = {}
    n_carleson: Dict[int, float] = {}
    argmax: Dict[str, Dict[str, Any]] = {}
    gradients = {k: [None] + [gradient(traj.fields[j], k) for j in positive] for k in (1, 2)}

    for k in (1, 2):
        weighted = [0.0] + [times[j] ** (k / 4.0) * gradients[k][j].sup_norm() for j in positive]
        j = int(np.argmax(weighted))
        n_inf[k] = float(weighted[j])
        argmax[f"n_inf_{k}"] = {"t": float(times[j])}

    requested = T**0.25 if R is None else R
    radius = min(requested, grid.box_length / 4)
    metadata: Dict[str, Any] = {
        "T": float(T),
        "R_requested": float(requested),
        "R": float(radius),
        "clamped": radius < requested,
        "stride": stride,
        "nodes": len(times),
    }
    try:
        family = BallFamily(grid, radius, stride=stride, min_ladder=1)
    except ConfigurationError as e:
        logger.warning("No Carleson balls for X_T norm: %s", e.message)
        metadata["warnings"] = 1
        return NormReport(n_inf, {1: 0.0, 2: 0.0}, argmax, metadata=metadata)

    metadata["warnings"] = family.warnings
    metadata["radii"] = list(family.radii)
    if len(family.radii) < MIN_LADDER:
        metadata["short_ladder"] = True

    for k in (1, 2):
        densities = [None] + [gradients[k][j].magnitude() ** (4.0 / k) for j in positive]
        best = (0.0, (), 0.0)
        for r in family.radii:
            weights = trapezoid_weights(times, r**4)
            integral = np.zeros(grid.shape)
            for j in positive:
                if weights[j]:
                    integral += weights[j] * densities[j]
            values = np.maximum(family.ball_means(integral, r), 0.0) ** (k / 4.0)
            c = int(np.argmax(values))
            if values[c] > best[0]:
                best = (float(values[c]), family.center_coordinates(c), r)
        n_carleson[k] = best[0]
        argmax[f"n_carleson_{k}"] = {"center": list(best[1]), "radius": best[2]}

    report = NormReport(n_inf, n_carleson, argmax, metadata=metadata)
    logger.debug("X_T norm on (0, %g]: %.6g", T, report.total)
    return report


def _resolve_p(p: Union[int, float, str], dim: int) -> float:
    if isinstance(p, str):
        key = p.strip().lower()
        if key == "n":
            return float(dim)
        if key in ("inf", "infinity"):
            return math.inf
        try:
            p = float(key)
        except ValueError:
            raise ConfigurationError(f"unsupported exponent p={p!r}") from None
    p = float(p)
    if p not in (2.0, 4.0, float(dim), math.inf):
        raise ConfigurationError(f"unsupported exponent p={p}; use 2, 4, n or inf")
    return p


def lpt_norm(trajectory: Trajectory, p: Union[int, float, str], T: float) -> float:
    """sup over nodes in (0, T] of ||f||_p + t^(1/4)||grad f||_p + t^(1/2)||grad^2 f||_p.

    Raises:
        ConfigurationError: If p is not one of 2, 4, n, inf
        DomainError: If the trajectory does not cover (0, T]
    """
    exponent = _resolve_p(p, trajectory.grid.dim)
    trajectory.require_cover(T)
    traj = trajectory.up_to(T)
    grid = traj.grid
    best = 0.0
    for t, f in list(traj)[1:]:
        value = f.lp_norm(exponent)
        for k in (1, 2):
            magnitude = gradient(f, k).magnitude()
            if math.isinf(exponent):
                norm = float(np.max(magnitude))
            else:
                norm = float((np.sum(magnitude**exponent) * grid.cell_volume) ** (1 / exponent))
            value += t ** (k / 4.0) * norm
        best = max(best, value)
    return best
