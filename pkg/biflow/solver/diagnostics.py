"""Per-solve bookkeeping."""

from dataclasses import dataclass, field
import json
import math
from typing import Any, Dict, List, Optional

from biflow.core.enums import Termination
from biflow.core.errors import BlowupError, BiflowError, NonConvergenceError


@dataclass
class SolveDiagnostics:
    """Iterate norms, successive differences and contraction ratios of a solve.

    Attributes:
        iterate_norms: X_T norm of every iterate u_1, u_2, ...
        differences: X_T norm of u_{j+1} - u_j
        ratios: differences[j+1] / differences[j] where both are defined
        termination: Set exactly once by `finish`
        within_budget: Whether ||S(.)u0||_X was inside the smallness budget
    """

    iterate_norms: List[float] = field(default_factory=list)
    differences: List[float] = field(default_factory=list)
    ratios: List[float] = field(default_factory=list)
    termination: Optional[Termination] = None
    within_budget: bool = True
    extension_norm: float = 0.0
    blowup_time: Optional[float] = None
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def iterations(self) -> int:
        return len(self.differences)

    @property
    def converged(self) -> bool:
        return self.termination == Termination.CONVERGED

    def record(self, iterate_norm: float, difference: float) -> None:
        self.iterate_norms.append(float(iterate_norm))
        if self.differences:
            previous = self.differences[-1]
            if previous > 0 and math.isfinite(previous):
                self.ratios.append(float(difference) / previous)
        self.differences.append(float(difference))

    def finish(self, termination: Termination, blowup_time: Optional[float] = None) -> None:
        if self.termination is not None:
            raise RuntimeError(f"termination already set to {self.termination.value}")
        self.termination = termination
        self.blowup_time = blowup_time

    def max_ratio(self, skip: int = 1) -> float:
        """Largest contraction ratio from iterate `skip + 1` on."""
        tail = self.ratios[skip:]
        return max(tail) if tail else 0.0

    def raise_for_termination(self) -> None:
        """Turn a non-converged termination into the matching exception."""
        if self.termination == Termination.MAX_ITERS:
            raise NonConvergenceError(
                f"no convergence after {self.iterations} iterations",
                last_difference=self.differences[-1] if self.differences else None,
            )
        if self.termination == Termination.BLOWUP:
            raise BlowupError("blow-up threshold crossed", time=self.blowup_time)
        if self.termination is None:
            raise BiflowError("solve has no termination recorded")

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for serialization."""
        return {
            "iterate_norms": self.iterate_norms,
            "differences": self.differences,
            "ratios": self.ratios,
            "termination": self.termination.value if self.termination else None,
            "within_budget": self.within_budget,
            "extension_norm": self.extension_norm,
            "blowup_time": self.blowup_time,
            "iterations": self.iterations,
            "metadata": self.metadata,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)
