"""Error metrics, residual norms, CUSUM localization and window embedding."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .estimators import Estimate
from .series import FunctionalSeries, ValueGrid, discretized_norm

__all__ = [
    "MetricReport", "CusumResult", "ShapeMismatch", "InputTooShort",
    "mse", "mae", "metric_report", "residual_norms", "cusum",
    "detect_peaks", "sliding_embed",
]


class ShapeMismatch(ValueError):
    """Estimate and truth (or series and smoothed) shapes differ."""


class InputTooShort(ValueError):
    """Raw signal too short for the requested window embedding."""


@dataclass(frozen=True)
class MetricReport:
    mse: float
    mae: float
    per_time: np.ndarray  # squared-norm error at each time stamp


def _diff(est, truth) -> np.ndarray:
    est = np.atleast_2d(np.asarray(est, dtype=float))
    truth = np.atleast_2d(np.asarray(truth, dtype=float))
    if est.shape != truth.shape:
        raise ShapeMismatch(f"shapes {est.shape} and {truth.shape} differ")
    return est - truth


def mse(est, truth) -> float:
    """Mean over time of the squared discretized L2 norm of the error."""
    d = _diff(est, truth)
    return float((d * d).mean())


def mae(est, truth) -> float:
    """Mean over time of the discretized L1 norm of the error."""
    return float(np.abs(_diff(est, truth)).mean())


def metric_report(est, truth) -> MetricReport:
    d = _diff(est, truth)
    per_time = (d * d).mean(axis=1)
    return MetricReport(float(per_time.mean()), float(np.abs(d).mean()),
                        per_time)


def residual_norms(series: FunctionalSeries, smoothed: Estimate,
                   norm: str | None = None) -> np.ndarray:
    """Norm of the residual curve X_i - mu_hat(t_i) at each time stamp."""
    if smoothed.mu_hat.shape != series.values.shape:
        raise ShapeMismatch(
            f"series {series.values.shape} vs smoothed {smoothed.mu_hat.shape}")
    return discretized_norm(series.values - smoothed.mu_hat,
                            norm or series.norm)


@dataclass(frozen=True)
class CusumResult:
    process: np.ndarray
    argmax_index: int
    max_value: float


def cusum(z) -> CusumResult:
    """Mean-anchored CUSUM process; its |.|-argmax locates a level shift.

    process[k] = (partial sum through k - fraction of total) / sqrt(n),
    so the last entry is zero and adding a constant to z changes nothing.
    """
    z = np.asarray(z, dtype=float)
    n = z.size
    if n < 2:
        raise ValueError("need at least 2 observations")
    csum = np.cumsum(z)
    k = np.arange(1, n + 1)
    process = (csum - k / n * csum[-1]) / np.sqrt(n)
    # smallest index attaining the max; values within rounding noise of
    # the max count as ties (a constant series is genuinely flat)
    absproc = np.abs(process)
    tol = 1e-12 * max(1.0, float(absproc.max()))
    amax = int(np.argmax(absproc >= absproc.max() - tol))
    return CusumResult(process, amax, float(process[amax]))


def detect_peaks(z, threshold_multiplier: float = 5.0) -> list[tuple[int, int]]:
    """Maximal index runs where z exceeds median + multiplier * MAD.

    Returns half-open-free inclusive (start, stop) index pairs in order.
    """
    z = np.asarray(z, dtype=float)
    if z.size < 3:
        raise ValueError("need at least 3 observations")
    med = np.median(z)
    mad = np.median(np.abs(z - med))
    above = np.r_[0, (z > med + threshold_multiplier * mad).astype(int), 0]
    starts = np.flatnonzero(np.diff(above) == 1)
    stops = np.flatnonzero(np.diff(above) == -1) - 1
    return [(int(a), int(b)) for a, b in zip(starts, stops)]


def sliding_embed(raw: np.ndarray, stride: int, m: int,
                  norm: str = "l2") -> FunctionalSeries:
    """Embed an N x d signal into overlapping windows of m samples.

    Observation i (1-based, i = 1, ..., floor(N/stride) - (m-1)) collects
    the 1-based samples stride*i + j for j = 0, ..., m-1, flattened
    channel-major to a d*m vector.
    """
    raw = np.asarray(raw, dtype=float)
    if raw.ndim == 1:
        raw = raw[:, None]
    big_n, d = raw.shape
    if stride < 1 or m < 1:
        raise ValueError("stride and m must be >= 1")
    n = big_n // stride - (m - 1)
    if n < 1:
        raise InputTooShort(
            f"signal of length {big_n} too short for stride {stride}, m {m}")
    values = np.empty((n, d * m))
    for i in range(1, n + 1):
        window = raw[stride * i - 1:stride * i - 1 + m]
        values[i - 1] = window.T.reshape(-1)
    return FunctionalSeries(np.arange(1, n + 1) / n, values,
                            ValueGrid(d, m), norm)
