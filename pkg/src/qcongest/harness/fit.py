"""Log-log least-squares fits of a cost column against n."""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from ..netmodel import ParameterError
from .records import RunRecord, column_values


@dataclass(frozen=True)
class ScalingFit:
    column: str
    slope: float
    intercept: float
    residual: float
    n_min: int
    n_max: int
    points: tuple[tuple[int, float], ...]

    def predict(self, n: float) -> float:
        return 2.0 ** (self.intercept + self.slope * np.log2(n))

    def as_dict(self) -> dict:
        return {
            "column": self.column,
            "slope": self.slope,
            "intercept": self.intercept,
            "residual": self.residual,
            "n_min": self.n_min,
            "n_max": self.n_max,
            "points": [list(p) for p in self.points],
        }


def fit_points(ns, values, column: str = "value") -> ScalingFit:
    """Fit log2(mean value per n) = intercept + slope * log2(n)."""
    groups: dict[int, list[float]] = defaultdict(list)
    for n, v in zip(ns, values):
        groups[int(n)].append(float(v))
    if len(groups) < 3:
        raise ParameterError("scaling fit needs at least 3 distinct n values")
    xs = np.array(sorted(groups))
    means = np.array([np.mean(groups[n]) for n in xs])
    if np.any(means <= 0):
        raise ParameterError(f"column {column!r} has a nonpositive mean; log fit undefined")
    lx, ly = np.log2(xs), np.log2(means)
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = float(np.sqrt(np.mean((ly - (intercept + slope * lx)) ** 2)))
    return ScalingFit(
        column, float(slope), float(intercept), resid, int(xs[0]), int(xs[-1]),
        tuple((int(n), float(m)) for n, m in zip(xs, means)),
    )


def fit_scaling(records: list[RunRecord], column: str = "total_msgs") -> ScalingFit:
    return fit_points([r.n for r in records], column_values(records, column), column)
