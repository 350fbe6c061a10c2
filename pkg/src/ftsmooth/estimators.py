"""Kernel smoothers for function-valued time series.

Local linear fits solve, at each evaluation point t, the weighted least
squares problem with weights K((t_i - t)/h); the intercept estimates the
mean and the slope its time derivative. The Jackknife variants combine
fits at bandwidths h and h/sqrt(2) so the leading bias terms cancel.
Nadaraya-Watson is the local constant fit, with a finite-difference
derivative on equidistant grids.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kernels import Kernel, quartic
from .series import FunctionalSeries

__all__ = [
    "SmoothConfig", "Estimate", "WeightStats",
    "SingularFit", "BandwidthTooSmall", "EmptyWindow", "NonEquidistant",
    "weight_stats", "local_linear", "nadaraya_watson", "nw_derivative",
    "jackknife_mean", "jackknife_derivative",
    "JACKKNIFE_DERIV_COEF_SMALL", "JACKKNIFE_DERIV_COEF_LARGE",
]

_SQRT2 = np.sqrt(2.0)

# Derivative Jackknife weights sqrt(2)/(sqrt(2)-1) and 1/(sqrt(2)-1);
# they differ by exactly one.
JACKKNIFE_DERIV_COEF_SMALL = _SQRT2 / (_SQRT2 - 1.0)
JACKKNIFE_DERIV_COEF_LARGE = 1.0 / (_SQRT2 - 1.0)

# denom <= tol * S0^2 marks a degenerate window; relative in S0 so the
# test does not depend on the 1/(nh) normalization.
_SINGULAR_RTOL = 1e-12


class SingularFit(ValueError):
    """Local linear normal equations are degenerate at some t."""

    def __init__(self, t: float, bandwidth: float | None = None):
        self.t = t
        self.bandwidth = bandwidth
        extra = f" (bandwidth {bandwidth:g})" if bandwidth is not None else ""
        super().__init__(f"singular local linear fit at t={t:g}{extra}")


class BandwidthTooSmall(ValueError):
    """Some kernel window contains fewer than two time stamps."""

    def __init__(self, t: float, bandwidth: float | None = None):
        self.t = t
        self.bandwidth = bandwidth
        extra = f" (bandwidth {bandwidth:g})" if bandwidth is not None else ""
        super().__init__(f"window at t={t:g} has < 2 points{extra}")


class EmptyWindow(ValueError):
    """Nadaraya-Watson window contains no time stamps."""

    def __init__(self, t: float):
        self.t = t
        super().__init__(f"empty kernel window at t={t:g}")


class NonEquidistant(ValueError):
    """Finite-difference derivative requires an equidistant grid."""


@dataclass(frozen=True)
class SmoothConfig:
    """Bandwidth on the rescaled time axis plus the kernel."""

    bandwidth: float
    kernel: Kernel = None  # type: ignore[assignment]

    def __post_init__(self):
        if not 0.0 < self.bandwidth <= 1.0:
            raise ValueError("bandwidth must be in (0, 1]")
        if self.kernel is None:
            object.__setattr__(self, "kernel", quartic())


@dataclass(frozen=True)
class Estimate:
    """Smoothed mean (and optionally derivative) curves.

    interior_mask marks t in [h, 1-h], where windows are untruncated.
    """

    times: np.ndarray
    mu_hat: np.ndarray
    dmu_hat: np.ndarray | None
    interior_mask: np.ndarray
    bandwidth: float


@dataclass(frozen=True)
class WeightStats:
    """Kernel-weighted design moments S_l and data moments R_l at one t."""

    S0: float
    S1: float
    S2: float
    S3: float
    R0: np.ndarray
    R1: np.ndarray

    @property
    def denom(self) -> float:
        return self.S0 * self.S2 - self.S1 ** 2


def _components(times: np.ndarray, values: np.ndarray,
                eval_times: np.ndarray, h: float, kernel: Kernel):
    """Unnormalized S0..S2, R0, R1 and window counts at each eval point.

    Vectorized over evaluation points; the 1/(nh) factor cancels in every
    estimator and is applied only by weight_stats.
    """
    u = (times[None, :] - eval_times[:, None]) / h
    w = kernel(u)
    counts = (np.abs(u) <= 1.0).sum(axis=1)
    wu = w * u
    s0 = w.sum(axis=1)
    s1 = wu.sum(axis=1)
    s2 = (wu * u).sum(axis=1)
    r0 = w @ values
    r1 = wu @ values
    return s0, s1, s2, r0, r1, counts


def weight_stats(series: FunctionalSeries, t: float,
                 cfg: SmoothConfig) -> WeightStats:
    """Normalized kernel moments at a single evaluation point."""
    if not 0.0 <= t <= 1.0:
        raise ValueError("t must be in [0, 1]")
    h = cfg.bandwidth
    u = (series.times - t) / h
    w = cfg.kernel(u)
    scale = 1.0 / (series.n * h)
    wu = w * u
    return WeightStats(
        S0=float(w.sum() * scale),
        S1=float(wu.sum() * scale),
        S2=float((wu * u).sum() * scale),
        S3=float((wu * u * u).sum() * scale),
        R0=(w @ series.values) * scale,
        R1=(wu @ series.values) * scale,
    )


def _interior_mask(eval_times: np.ndarray, h: float) -> np.ndarray:
    return (eval_times >= h) & (eval_times <= 1.0 - h)


def local_linear(series: FunctionalSeries, cfg: SmoothConfig,
                 eval_times: np.ndarray | None = None) -> Estimate:
    """Local linear mean and derivative estimates.

    Estimates are produced at every evaluation point, including boundary
    points with truncated windows; interior_mask records where the
    untruncated-window guarantees apply.
    """
    if eval_times is None:
        eval_times = series.times
    eval_times = np.asarray(eval_times, dtype=float)
    h = cfg.bandwidth
    s0, s1, s2, r0, r1, counts = _components(
        series.times, series.values, eval_times, h, cfg.kernel)

    if np.any(counts < 2):
        t_bad = float(eval_times[np.argmax(counts < 2)])
        raise BandwidthTooSmall(t_bad, h)
    denom = s0 * s2 - s1 ** 2
    bad = denom <= _SINGULAR_RTOL * s0 ** 2
    if np.any(bad):
        raise SingularFit(float(eval_times[np.argmax(bad)]), h)

    mu = (s2[:, None] * r0 - s1[:, None] * r1) / denom[:, None]
    dmu = (s0[:, None] * r1 - s1[:, None] * r0) / (h * denom[:, None])
    return Estimate(eval_times, mu, dmu, _interior_mask(eval_times, h), h)


def nadaraya_watson(series: FunctionalSeries, cfg: SmoothConfig,
                    eval_times: np.ndarray | None = None) -> Estimate:
    """Kernel-weighted local average (mean only)."""
    if eval_times is None:
        eval_times = series.times
    eval_times = np.asarray(eval_times, dtype=float)
    h = cfg.bandwidth
    u = (series.times[None, :] - eval_times[:, None]) / h
    w = cfg.kernel(u)
    s0 = w.sum(axis=1)
    empty = s0 <= 0.0
    if np.any(empty):
        raise EmptyWindow(float(eval_times[np.argmax(empty)]))
    mu = (w @ series.values) / s0[:, None]
    return Estimate(eval_times, mu, None, _interior_mask(eval_times, h), h)


def nw_derivative(est: Estimate) -> Estimate:
    """Finite-difference derivative of a mean estimate on an equidistant grid.

    Central differences at interior indices, one-sided at both ends.
    """
    t = est.times
    if t.size < 2:
        raise NonEquidistant("need at least 2 time stamps")
    steps = np.diff(t)
    step = steps[0]
    if np.max(np.abs(steps - step)) > 1e-9 * step:
        raise NonEquidistant("time stamps are not equidistant")
    mu = est.mu_hat
    dmu = np.empty_like(mu)
    dmu[1:-1] = (mu[2:] - mu[:-2]) / (2.0 * step)
    dmu[0] = (mu[1] - mu[0]) / step
    dmu[-1] = (mu[-1] - mu[-2]) / step
    return Estimate(t, mu, dmu, est.interior_mask, est.bandwidth)


def _jackknife_pair(series, cfg, eval_times):
    small = SmoothConfig(cfg.bandwidth / _SQRT2, cfg.kernel)
    fit_small = local_linear(series, small, eval_times)
    fit_large = local_linear(series, cfg, eval_times)
    return fit_small, fit_large


def jackknife_mean(series: FunctionalSeries, cfg: SmoothConfig,
                   eval_times: np.ndarray | None = None) -> Estimate:
    """Bias-reduced mean: 2 * fit(h/sqrt(2)) - fit(h)."""
    fit_small, fit_large = _jackknife_pair(series, cfg, eval_times)
    mu = 2.0 * fit_small.mu_hat - fit_large.mu_hat
    return Estimate(fit_large.times, mu, None,
                    fit_large.interior_mask, cfg.bandwidth)


def jackknife_derivative(series: FunctionalSeries, cfg: SmoothConfig,
                         eval_times: np.ndarray | None = None) -> Estimate:
    """Bias-reduced derivative with weights sqrt(2)/(sqrt(2)-1), 1/(sqrt(2)-1)."""
    fit_small, fit_large = _jackknife_pair(series, cfg, eval_times)
    dmu = (JACKKNIFE_DERIV_COEF_SMALL * fit_small.dmu_hat
           - JACKKNIFE_DERIV_COEF_LARGE * fit_large.dmu_hat)
    mu = 2.0 * fit_small.mu_hat - fit_large.mu_hat
    return Estimate(fit_large.times, mu, dmu,
                    fit_large.interior_mask, cfg.bandwidth)
