"""Discretized function-valued time series."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["FunctionalSeries", "ValueGrid", "NORMS"]

NORMS = ("l1", "l2", "sup")


@dataclass(frozen=True)
class ValueGrid:
    """Layout of the flattened value dimension: d curves on m grid points."""

    d: int = 1
    m: int = 1

    @property
    def p(self) -> int:
        return self.d * self.m

    def spatial_points(self) -> np.ndarray:
        """Grid points j/(m-1), or [0] for scalar values."""
        if self.m == 1:
            return np.zeros(1)
        return np.arange(self.m) / (self.m - 1)


@dataclass(frozen=True)
class FunctionalSeries:
    """n observations of a (flattened) P-dimensional value on [0, 1].

    times are strictly increasing stamps in [0, 1]; the default
    constructor places them equidistantly with step 1/n.
    """

    times: np.ndarray
    values: np.ndarray
    value_grid: ValueGrid = field(default_factory=ValueGrid)
    norm: str = "l2"

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        values = np.atleast_2d(np.asarray(self.values, dtype=float))
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)
        if times.ndim != 1 or times.size < 1:
            raise ValueError("times must be a non-empty 1d array")
        if np.any(np.diff(times) <= 0):
            raise ValueError("times must be strictly increasing")
        if times[0] < 0.0 or times[-1] > 1.0:
            raise ValueError("times must lie in [0, 1]")
        if values.shape[0] != times.size:
            raise ValueError("values must have one row per time stamp")
        if not np.all(np.isfinite(values)):
            raise ValueError("values must be finite")
        if self.value_grid.p != values.shape[1]:
            raise ValueError(
                f"value_grid implies P={self.value_grid.p}, "
                f"got {values.shape[1]} columns")
        if self.norm not in NORMS:
            raise ValueError(f"norm must be one of {NORMS}")

    @classmethod
    def equidistant(cls, values, value_grid: ValueGrid | None = None,
                    norm: str = "l2") -> "FunctionalSeries":
        """Series on the stamps i/n, i = 0, ..., n-1."""
        values = np.atleast_2d(np.asarray(values, dtype=float))
        n = values.shape[0]
        if value_grid is None:
            value_grid = ValueGrid(1, values.shape[1])
        return cls(np.arange(n) / n, values, value_grid, norm)

    @property
    def n(self) -> int:
        return self.times.size

    @property
    def p(self) -> int:
        return self.values.shape[1]

    def subset(self, idx) -> "FunctionalSeries":
        """Sub-series at the given (sorted) indices; times keep their stamps."""
        idx = np.asarray(idx)
        return FunctionalSeries(self.times[idx], self.values[idx],
                                self.value_grid, self.norm)


def discretized_norm(rows: np.ndarray, norm: str) -> np.ndarray:
    """Row-wise discretized norm: l1 mean |.|, l2 root mean square, sup max |.|."""
    rows = np.atleast_2d(rows)
    a = np.abs(rows)
    if norm == "l1":
        return a.mean(axis=1)
    if norm == "l2":
        return np.sqrt((a * a).mean(axis=1))
    if norm == "sup":
        return a.max(axis=1)
    raise ValueError(f"norm must be one of {NORMS}")
