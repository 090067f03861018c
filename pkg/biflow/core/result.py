"""Single result type for all experiments."""

from dataclasses import dataclass, field
import json
import math
import os
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np

from biflow.core.enums import Verdict
from biflow.core.errors import ConfigurationError


@dataclass
class Check:
    """One declared tolerance and whether it was met.

    Attributes:
        name: Short identifier of the check
        value: Measured quantity
        limit: Tolerance the quantity is compared against
        verdict: Outcome of the comparison
        details: Free-form context (witnesses, ratios, ...)
    """

    name: str
    value: float
    limit: float
    verdict: Verdict
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict == Verdict.PASS

    @classmethod
    def at_most(cls, name: str, value: float, limit: float, **details: Any) -> "Check":
        ok = math.isfinite(value) and value <= limit
        return cls(name, float(value), float(limit), Verdict.PASS if ok else Verdict.FAIL, details)

    @classmethod
    def at_least(cls, name: str, value: float, limit: float, **details: Any) -> "Check":
        ok = math.isfinite(value) and value >= limit
        return cls(name, float(value), float(limit), Verdict.PASS if ok else Verdict.FAIL, details)

    @classmethod
    def relative_spread(cls, name: str, values: Sequence[float], limit: float, **details: Any) -> "Check":
        """Largest relative deviation of the values from their mean."""
        return cls.at_most(name, relative_spread(values), limit, **details)

    @classmethod
    def inconclusive(cls, name: str, value: float, limit: float, **details: Any) -> "Check":
        return cls(name, float(value), float(limit), Verdict.INCONCLUSIVE, details)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "value": _json_float(self.value),
            "limit": _json_float(self.limit),
            "verdict": self.verdict.value,
            "details": _jsonable(self.details),
        }


def relative_spread(values: Sequence[float]) -> float:
    values = np.asarray(values, dtype=float)
    if values.size == 0 or not np.all(np.isfinite(values)):
        return math.inf
    mean = float(np.mean(values))
    if mean == 0.0:
        return 0.0 if np.all(values == 0.0) else math.inf
    return float(np.max(np.abs(values - mean)) / abs(mean))


@dataclass
class ExperimentResult:
    """Unified result for all experiments.

    Attributes:
        name: Registered experiment name
        inputs: Config echo and experiment arguments
        series: Group name -> column name -> values (plot-ready)
        checks: Every declared tolerance with its outcome
        tolerances: Tolerances in force after scaling
        verdict: Pass only if every check passed
        metadata: Measured constants and other context
    """

    name: str
    inputs: Dict[str, Any] = field(default_factory=dict)
    series: Dict[str, Dict[str, List[float]]] = field(default_factory=dict)
    checks: List[Check] = field(default_factory=list)
    tolerances: Dict[str, float] = field(default_factory=dict)
    verdict: Optional[Verdict] = None
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        """Validate series shapes and derive the verdict from the checks."""
        for group, columns in self.series.items():
            lengths = {len(v) for v in columns.values()}
            if len(lengths) > 1:
                raise ConfigurationError(f"series group '{group}' has columns of unequal length")
        if self.verdict is None:
            self.verdict = Verdict.combine(c.verdict for c in self.checks)

    @property
    def passed(self) -> bool:
        return self.verdict == Verdict.PASS

    def check(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for serialization."""
        return {
            "name": self.name,
            "verdict": self.verdict.value,
            "inputs": _jsonable(self.inputs),
            "tolerances": _jsonable(self.tolerances),
            "checks": [c.to_dict() for c in self.checks],
            "metadata": _jsonable(self.metadata),
            "series": {
                group: {column: [_json_float(v) for v in values] for column, values in cols.items()}
                for group, cols in self.series.items()
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def write_csvs(self, directory: Union[str, os.PathLike]) -> List[Path]:
        """One CSV per series group, 17 significant digits."""
        directory = Path(directory)
        written = []
        for group, columns in sorted(self.series.items()):
            path = directory / f"{self.name}-{group}.csv"
            names = list(columns)
            rows = zip(*(columns[n] for n in names))
            with open(path, "w", encoding="utf-8", newline="\n") as f:
                f.write(",".join(names) + "\n")
                for row in rows:
                    f.write(",".join(_csv_float(v) for v in row) + "\n")
            written.append(path)
        return written


def _csv_float(value: Any) -> str:
    return format(float(value), ".17g")


def _json_float(value: Any) -> Any:
    value = float(value)
    if math.isfinite(value):
        return value
    return str(value)


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, Verdict):
        return value.value
    if isinstance(value, (bool, str)) or value is None:
        return value
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return _json_float(value)
    return str(value)
