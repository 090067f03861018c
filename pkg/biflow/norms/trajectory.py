"""Time-graded sequences of fields."""

import logging
from typing import Callable, Iterator, Sequence, Tuple

import numpy as np

from biflow.core.errors import ConfigurationError, DomainError
from biflow.spectral.field import Field
from biflow.spectral.grid import GridSpec

logger = logging.getLogger(__name__)

MAX_GRADING_RATIO = 2.0
TIME_SLACK = 1e-12


class Trajectory:
    """u(., t_j) on nodes 0 = t_0 < t_1 < ... < t_M = T.

    Args:
        times: Strictly ascending node times starting at 0
        fields: One Field per node, all on the same grid
        check_grading: Enforce t_{j+1}/t_j <= 2 for t_j > 0
    """

    def __init__(
        self, times: Sequence[float], fields: Sequence[Field], check_grading: bool = True
    ) -> None:
        times = np.asarray(times, dtype=float)
        fields = tuple(fields)
        if times.ndim != 1 or len(times) != len(fields) or len(times) < 2:
            raise DomainError("trajectory needs matching times and fields, at least two nodes")
        if times[0] != 0.0:
            raise DomainError(f"trajectory must start at t=0, got {times[0]}")
        if np.any(np.diff(times) <= 0):
            raise DomainError("trajectory times must be strictly ascending")
        grid = fields[0].grid
        if any(f.grid != grid for f in fields):
            raise DomainError("all trajectory fields must share one grid")
        if check_grading:
            positive = times[1:]
            ratios = positive[1:] / positive[:-1]
            if ratios.size and np.max(ratios) > MAX_GRADING_RATIO * (1 + TIME_SLACK):
                raise DomainError(
                    f"grading ratio {np.max(ratios):.3f} exceeds {MAX_GRADING_RATIO}"
                )
        times.flags.writeable = False
        self.times = times
        self.fields = fields
        self.grid: GridSpec = grid

    def __len__(self) -> int:
        return len(self.times)

    def __iter__(self) -> Iterator[Tuple[float, Field]]:
        return zip(self.times.tolist(), self.fields)

    @property
    def T(self) -> float:
        return float(self.times[-1])

    @property
    def initial(self) -> Field:
        return self.fields[0]

    @property
    def final(self) -> Field:
        return self.fields[-1]

    def covers(self, T: float) -> bool:
        return self.T >= T * (1 - TIME_SLACK)

    def require_cover(self, T: float) -> None:
        if not T > 0:
            raise DomainError(f"horizon must be positive, got {T}")
        if not self.covers(T):
            raise DomainError(f"trajectory ends at {self.T:g}, does not cover (0, {T:g}]", T=T)

    def node_index(self, t: float) -> int:
        """Index of the node equal to t (within rounding)."""
        j = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[j] - t) > TIME_SLACK * max(1.0, abs(t)):
            raise DomainError(f"t={t:g} is not a trajectory node", t=t)
        return j

    def field_at(self, t: float) -> Field:
        return self.fields[self.node_index(t)]

    def up_to(self, T: float) -> "Trajectory":
        """Nodes with t <= T."""
        self.require_cover(T)
        stop = int(np.searchsorted(self.times, T * (1 + TIME_SLACK), side="right"))
        return Trajectory(self.times[:stop], self.fields[:stop], check_grading=False)

    def map(self, fn: Callable[[Field], Field]) -> "Trajectory":
        return Trajectory(self.times, [fn(f) for f in self.fields], check_grading=False)

    def combine(self, other: "Trajectory", fn: Callable[[Field, Field], Field]) -> "Trajectory":
        self.require_same_nodes(other)
        return Trajectory(
            self.times, [fn(a, b) for a, b in zip(self.fields, other.fields)], check_grading=False
        )

    def __sub__(self, other: "Trajectory") -> "Trajectory":
        return self.combine(other, lambda a, b: a - b)

    def __add__(self, other: "Trajectory") -> "Trajectory":
        return self.combine(other, lambda a, b: a + b)

    def require_same_nodes(self, *others: "Trajectory") -> None:
        for other in others:
            if other.grid != self.grid:
                raise DomainError("trajectories live on different grids")
            if len(other.times) != len(self.times) or np.any(
                np.abs(other.times - self.times) > TIME_SLACK * np.maximum(1.0, self.times)
            ):
                raise DomainError("trajectories have different time nodes")

    def shift(self, t: float) -> "Trajectory":
        """u(t + .) on the nodes at or after t."""
        return shift(self, t)

    def sup_difference(self, other: "Trajectory") -> float:
        """max over nodes of ||u - v||_inf."""
        self.require_same_nodes(other)
        return max((a - b).sup_norm() for a, b in zip(self.fields, other.fields))

    @classmethod
    def zeros(cls, grid: GridSpec, times: Sequence[float]) -> "Trajectory":
        zero = Field.zeros(grid)
        return cls(times, [zero] * len(times), check_grading=False)


def shift(trajectory: Trajectory, t: float) -> Trajectory:
    """Time-shifted copy; grading is not re-validated.

    Raises:
        DomainError: If t is negative or not a node with a later node after it
    """
    if t < 0:
        raise DomainError(f"shift must be non-negative, got {t}")
    j = trajectory.node_index(t)
    if j >= len(trajectory) - 1:
        raise DomainError(f"shift by {t:g} leaves fewer than two nodes")
    times = trajectory.times[j:] - trajectory.times[j]
    return Trajectory(times, trajectory.fields[j:], check_grading=False)


def graded_times(T: float, M: int, q: float = 2.0) -> np.ndarray:
    """0, a geometric block of M//2 nodes below tau = T/(M - M//2), then tau, 2 tau, ..., T.

    Raises:
        ConfigurationError: If T <= 0, M < 2 or q is outside (1, 2]
    """
    if not T > 0:
        raise ConfigurationError(f"horizon must be positive, got {T}")
    if M < 2:
        raise ConfigurationError(f"need at least two time nodes, got {M}")
    if not 1.0 < q <= MAX_GRADING_RATIO:
        raise ConfigurationError(f"grading ratio must lie in (1, 2], got {q}")
    n_geo = M // 2
    n_uni = M - n_geo
    tau = T / n_uni
    geometric = tau * q ** np.arange(-n_geo, 0, dtype=float)
    uniform = tau * np.arange(1, n_uni + 1, dtype=float)
    uniform[-1] = T
    return np.concatenate(([0.0], geometric, uniform))


def trapezoid_weights(times: np.ndarray, upper: float) -> np.ndarray:
    """Weights w with sum_j w_j q_j = integral over (0, upper] of the node interpolant.

    The interval (0, t_1] uses the value at t_1; beyond that the interpolant
    is piecewise linear and the last interval may be cut at `upper`.
    """
    times = np.asarray(times, dtype=float)
    weights = np.zeros_like(times)
    if upper <= 0 or len(times) < 2:
        return weights
    first = min(times[1], upper)
    weights[1] += first
    for j in range(1, len(times) - 1):
        a, b = times[j], times[j + 1]
        if a >= upper:
            break
        if b <= upper:
            weights[j] += 0.5 * (b - a)
            weights[j + 1] += 0.5 * (b - a)
        else:
            theta = (upper - a) / (b - a)
            span = upper - a
            weights[j] += 0.5 * span * (2 - theta)
            weights[j + 1] += 0.5 * span * theta
            break
    return weights
