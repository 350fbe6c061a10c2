"""Synthetic function-valued time series and the Monte Carlo benchmark loop.

Two smooth mean surfaces with analytic time derivatives, seven error
processes built from Brownian motion / Brownian bridge innovations and a
compact integral operator, and a seeded replication loop that selects the
bandwidth per estimator by cross-validation and aggregates MSE/MAE and
fit times.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .analysis import mae, mse
from .bandwidth import CvConfig, cross_validate
from .estimators import (BandwidthTooSmall, EmptyWindow, SingularFit,
                         SmoothConfig, jackknife_derivative, local_linear,
                         nadaraya_watson, nw_derivative)
from .kernels import Kernel, quartic
from .series import FunctionalSeries, ValueGrid

__all__ = [
    "MeanOperator", "mu1", "mu2", "ERROR_PROCESSES", "SimSpec",
    "ResultRow", "ResultsTable",
    "sample_bm", "sample_bb", "apply_rho", "gen_errors", "gen_series",
    "monte_carlo",
]

ERROR_PROCESSES = ("bm", "bb", "farbm", "farbb", "tvbm", "tvfar1", "tvfar2",
                   "none")

# Burn-in for the autoregressive processes: the operator has norm < 1,
# so 50 iterations forget the start value to below 1e-6.
FAR_BURN_IN = 50

_RHO_SCALE = 0.3 * np.sqrt(6.0)


@dataclass(frozen=True)
class MeanOperator:
    """Smooth mean surface with its analytic time derivative."""

    id: str
    eval: callable  # (t, x) -> value
    d_eval: callable  # (t, x) -> time derivative

    def on_grid(self, times: np.ndarray, x: np.ndarray):
        """Mean and derivative sampled on times x grid."""
        tt, xx = np.meshgrid(times, x, indexing="ij")
        return self.eval(tt, xx), self.d_eval(tt, xx)


def mu1() -> MeanOperator:
    """sin(2 pi x) + t^2."""
    return MeanOperator(
        "mu1",
        eval=lambda t, x: np.sin(2.0 * np.pi * x) + t ** 2,
        d_eval=lambda t, x: 2.0 * t + 0.0 * x,
    )


def _phi(x):
    return -8.0 * x ** 4 + 16.0 * x ** 3 - 11.0 * x ** 2 + 3.0 * x + 1.0


def mu2() -> MeanOperator:
    """phi(x) + (t - 1/2)^2 + sin(10 pi t)/10 + 3/4."""
    return MeanOperator(
        "mu2",
        eval=lambda t, x: (_phi(x) + (t - 0.5) ** 2
                           + 0.1 * np.sin(10.0 * np.pi * t) + 0.75),
        d_eval=lambda t, x: (2.0 * (t - 0.5)
                             + np.pi * np.cos(10.0 * np.pi * t) + 0.0 * x),
    )


def flat() -> MeanOperator:
    """Constant mean, exactly reproduced by every estimator; for debugging."""
    return MeanOperator(
        "flat",
        eval=lambda t, x: 1.0 + 0.0 * t + 0.0 * x,
        d_eval=lambda t, x: 0.0 * t + 0.0 * x,
    )


MEAN_OPERATORS = {"mu1": mu1, "mu2": mu2, "flat": flat}


@dataclass(frozen=True)
class SimSpec:
    mean: MeanOperator
    errors: str
    n: int
    m: int
    reps: int
    master_seed: int

    def __post_init__(self):
        if self.errors not in ERROR_PROCESSES:
            raise ValueError(f"errors must be one of {ERROR_PROCESSES}")
        if self.n < 10:
            raise ValueError("n must be >= 10")
        if self.m < 2:
            raise ValueError("m must be >= 2")
        if self.reps < 1:
            raise ValueError("reps must be >= 1")


def _rng(master_seed: int, rep: int, stream: int) -> np.random.Generator:
    """Counter-based derived stream: order- and parallelism-independent."""
    return np.random.default_rng(
        np.random.SeedSequence([master_seed, rep, stream]))


def sample_bm(m: int, rng: np.random.Generator) -> np.ndarray:
    """Brownian motion on the grid j/(m-1): W(0)=0, unit variance at 1."""
    if m < 2:
        raise ValueError("m must be >= 2")
    inc = rng.standard_normal(m - 1) / np.sqrt(m - 1)
    out = np.empty(m)
    out[0] = 0.0
    np.cumsum(inc, out=out[1:])
    return out


def sample_bb(m: int, rng: np.random.Generator) -> np.ndarray:
    """Brownian bridge B(t) = W(t) - t W(1) from a fresh motion."""
    w = sample_bm(m, rng)
    t = np.arange(m) / (m - 1)
    return w - t * w[-1]


def _trapezoid_weights(m: int) -> np.ndarray:
    w = np.full(m, 1.0 / (m - 1))
    w[0] *= 0.5
    w[-1] *= 0.5
    return w


def rho_matrix(m: int) -> np.ndarray:
    """Discretized integral operator with kernel 0.3 sqrt(6) min(x, y)."""
    x = np.arange(m) / (m - 1)
    return (_RHO_SCALE * np.minimum.outer(x, x)) * _trapezoid_weights(m)


def apply_rho(f: np.ndarray) -> np.ndarray:
    """Apply the min-kernel integral operator by trapezoidal quadrature."""
    f = np.asarray(f, dtype=float)
    return rho_matrix(f.shape[-1]) @ f


def _innovations(process: str, count: int, m: int,
                 rng: np.random.Generator) -> np.ndarray:
    sampler = sample_bb if process in ("bb", "farbb") else sample_bm
    return np.stack([sampler(m, rng) for _ in range(count)])


def _sigma(t):
    return t + 0.5


def gen_errors(process: str, n: int, m: int, rng: np.random.Generator,
               burn_in: int = FAR_BURN_IN) -> np.ndarray:
    """n x m matrix of centered error curves.

    Autoregressive variants start from a fresh innovation and discard
    burn_in iterations; time-varying coefficients use the emitted stamp
    i/n, frozen at sigma(1/n) during burn-in.
    """
    if process == "none":
        return np.zeros((n, m))
    if process in ("bm", "bb"):
        return _innovations(process, n, m, rng)
    if process == "tvbm":
        eta = _innovations("bm", n, m, rng)
        t = np.arange(n) / n
        return _sigma(t)[:, None] * eta

    if process not in ("farbm", "farbb", "tvfar1", "tvfar2"):
        raise ValueError(f"unknown error process {process!r}")
    rho = rho_matrix(m)
    eta = _innovations(process, burn_in + n + 1, m, rng)
    eps = eta[0]  # start value: a fresh innovation
    out = np.empty((n, m))
    for step in range(1, burn_in + n + 1):
        emitted = step - burn_in - 1  # >= 0 once burn-in is over
        t = (emitted / n) if emitted >= 0 else (1.0 / n)
        if process in ("farbm", "farbb"):
            eps = rho @ eps + eta[step]
        elif process == "tvfar1":
            eps = rho @ eps + _sigma(t) * eta[step]
        else:  # tvfar2
            eps = _sigma(t) * (rho @ eps) + eta[step]
        if emitted >= 0:
            out[emitted] = eps
    return out


def gen_series(spec: SimSpec, rep: int):
    """One replication: observed series plus mean/derivative ground truth."""
    if not 0 <= rep < spec.reps:
        raise ValueError("rep out of range")
    times = np.arange(spec.n) / spec.n
    x = np.arange(spec.m) / (spec.m - 1)
    truth_mu, truth_dmu = spec.mean.on_grid(times, x)
    errors = gen_errors(spec.errors, spec.n, spec.m,
                        _rng(spec.master_seed, rep, 0))
    series = FunctionalSeries(times, truth_mu + errors,
                              ValueGrid(1, spec.m), "l2")
    return series, truth_mu, truth_dmu


@dataclass(frozen=True)
class ResultRow:
    estimator: str
    target: str  # "mu" or "dmu"
    n: int
    m: int
    reps: int
    mean_mse: float
    sd_mse: float
    mean_mae: float
    sd_mae: float
    mean_fit_ms: float


@dataclass
class ResultsTable:
    rows: list[ResultRow] = field(default_factory=list)
    failures: dict[str, int] = field(default_factory=dict)

    def row(self, estimator: str, target: str) -> ResultRow:
        for r in self.rows:
            if r.estimator == estimator and r.target == target:
                return r
        raise KeyError((estimator, target))


def _fit_with_derivative(name: str, series: FunctionalSeries,
                         cfg: SmoothConfig):
    if name == "ll":
        return local_linear(series, cfg)
    if name == "jackknife":
        return jackknife_derivative(series, cfg)
    if name == "nw":
        return nw_derivative(nadaraya_watson(series, cfg))
    raise ValueError(f"unknown estimator {name!r}")


def _run_rep(spec: SimSpec, rep: int, estimators, cv: CvConfig,
             kernel: Kernel):
    series, truth_mu, truth_dmu = gen_series(spec, rep)
    out = {}
    for name in estimators:
        try:
            report = cross_validate(
                series, CvConfig(cv.k, cv.grid_size, name, cv.fold_scheme),
                kernel)
            t0 = time.perf_counter()
            est = _fit_with_derivative(name, series,
                                       SmoothConfig(report.best_h, kernel))
            fit_ms = (time.perf_counter() - t0) * 1e3
        except (SingularFit, BandwidthTooSmall, EmptyWindow) as exc:
            out[name] = exc
            continue
        out[name] = (mse(est.mu_hat, truth_mu), mae(est.mu_hat, truth_mu),
                     mse(est.dmu_hat, truth_dmu),
                     mae(est.dmu_hat, truth_dmu), fit_ms)
    return out


def monte_carlo(spec: SimSpec, estimators=("ll", "jackknife", "nw"),
                cv: CvConfig | None = None, kernel: Kernel | None = None,
                threads: int = 0) -> ResultsTable:
    """Replicate, select bandwidths, fit and aggregate errors.

    Results are independent of thread count: every replication draws from
    its own derived seed and the reduction runs in replication order.
    """
    if cv is None:
        cv = CvConfig()
    if kernel is None:
        kernel = quartic()
    estimators = tuple(estimators)

    def work(rep):
        return _run_rep(spec, rep, estimators, cv, kernel)

    if threads == 1:
        per_rep = [work(rep) for rep in range(spec.reps)]
    else:
        workers = threads if threads > 0 else None
        with ThreadPoolExecutor(max_workers=workers) as pool:
            per_rep = list(pool.map(work, range(spec.reps)))

    table = ResultsTable()
    for name in estimators:
        records = [r[name] for r in per_rep if not isinstance(r[name], Exception)]
        table.failures[name] = spec.reps - len(records)
        if not records:
            continue
        arr = np.array(records)  # columns: mse_mu, mae_mu, mse_dmu, mae_dmu, ms
        for target, (c_mse, c_mae) in (("mu", (0, 1)), ("dmu", (2, 3))):
            table.rows.append(ResultRow(
                estimator=name, target=target, n=spec.n, m=spec.m,
                reps=len(records),
                mean_mse=float(arr[:, c_mse].mean()),
                sd_mse=float(arr[:, c_mse].std()),
                mean_mae=float(arr[:, c_mae].mean()),
                sd_mae=float(arr[:, c_mae].std()),
                mean_fit_ms=float(arr[:, 4].mean()),
            ))
    return table
