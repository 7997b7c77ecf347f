"""Maximum-likelihood fitting of the family to complete samples."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import minimize
from scipy.special import log_ndtr

from . import core
from .baselines import Baseline
from .core import OxgParams
from .errors import DataError, DegenerateDataError, ParameterError

__all__ = ["Dataset", "FitOptions", "FitResult", "aic", "fit", "log_likelihood", "score"]

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


@dataclass(frozen=True)
class Dataset:
    observations: tuple[float, ...]
    name: str = "data"

    def __post_init__(self):
        obs = tuple(float(v) for v in self.observations)
        if not obs:
            raise DataError(f"dataset {self.name!r} is empty")
        for i, v in enumerate(obs):
            if not math.isfinite(v):
                raise DataError(f"observation {i} of {self.name!r} is not finite: {v}", index=i)
        object.__setattr__(self, "observations", obs)

    @property
    def values(self) -> np.ndarray:
        return np.asarray(self.observations, dtype=float)

    def __len__(self) -> int:
        return len(self.observations)


def _check_support(base: Baseline, x: np.ndarray):
    lo, hi = base.support
    bad = np.flatnonzero((x <= lo) | (x >= hi))
    if bad.size:
        i = int(bad[0])
        raise DataError(
            f"observation {i} (= {x[i]}) lies outside the {base.kind} support ({lo}, {hi})",
            index=i,
        )


def log_likelihood(params: OxgParams, data: Dataset) -> float:
    """Total log-likelihood; the sum of the closed-form log density."""
    x = data.values
    _check_support(params.baseline, x)
    return math.fsum(np.asarray(core.log_pdf(params, x)).tolist())


# ------------------------------------------------------------------- score
def _log_g_and_sf_partials(base: Baseline, x: np.ndarray):
    """Analytic ``d log g / d xi_k`` and ``d log(1 - G) / d xi_k``, shape (k, n)."""
    if base.kind == "exponential":
        theta = base.params[0]
        return np.array([1.0 / theta - x]), np.array([-x])
    if base.kind == "uniform":
        theta = base.params[0]
        return np.array([np.full_like(x, -1.0 / theta)]), np.array([1.0 / (theta - x) - 1.0 / theta])
    if base.kind == "burr_xii":
        a, th = base.params
        xa = x**a
        L = np.log1p(xa)
        dL_da = xa * np.log(x) / (1.0 + xa)
        dlg = np.array([1.0 / a + np.log(x) - (th + 1.0) * dL_da, 1.0 / th - L])
        dls = np.array([-th * dL_da, -L])
        return dlg, dls
    mu, sigma = base.params
    z = (x - mu) / sigma
    mills = np.exp(-0.5 * z * z - _LOG_SQRT_2PI - log_ndtr(-z))
    dlg = np.array([z / sigma, (z * z - 1.0) / sigma])
    dls = np.array([mills / sigma, mills * z / sigma])
    return dlg, dls


def _odds_partials(base: Baseline, x: np.ndarray, rel_step: float = 1e-6) -> np.ndarray:
    """``d V / d xi_k`` by central differences, shape (k, n)."""
    out = []
    for k, p in enumerate(base.params):
        h = rel_step * max(abs(p), 1.0)
        up = list(base.params)
        dn = list(base.params)
        up[k] = p + h
        dn[k] = p - h
        out.append((base.with_params(up).odds(x) - base.with_params(dn).odds(x)) / (2.0 * h))
    return np.array(out)


def score(params: OxgParams, data: Dataset) -> np.ndarray:
    """Gradient of the log-likelihood, ordered ``(lambda, *xi)``.

    ``U_lambda`` includes the derivative of ``sum log(1 + lam V^2 / 2)``.
    """
    x = data.values
    base = params.baseline
    _check_support(base, x)
    lam = params.lam
    n = x.size
    V = base.odds(x)
    bump = 1.0 + 0.5 * lam * V * V
    u_lam = 2.0 * n / lam - n / (1.0 + lam) - math.fsum(V) + math.fsum(0.5 * V * V / bump)
    dlg, dls = _log_g_and_sf_partials(base, x)
    dV = _odds_partials(base, x)
    u_xi = [
        math.fsum(dlg[k]) - 2.0 * math.fsum(dls[k]) + math.fsum(lam * V * dV[k] / bump) - lam * math.fsum(dV[k])
        for k in range(len(base.params))
    ]
    return np.array([u_lam, *u_xi])


# --------------------------------------------------------------------- fit
@dataclass(frozen=True)
class FitOptions:
    max_starts: int = 8
    max_iterations: int = 2000
    xatol: float = 1e-9
    fatol: float = 1e-10
    score_tol: float = 1e-4
    initial_step: float = 0.25
    lambda_starts: tuple[float, ...] = (1.0, 0.1, 10.0)


@dataclass(frozen=True)
class FitResult:
    params: OxgParams
    log_likelihood: float
    aic: float
    iterations: int
    converged: bool
    score_norm: float
    restarts_used: int
    n_params: int
    dataset: str = ""
    start_log_likelihoods: tuple[float, ...] = field(default=(), repr=False)

    def to_dict(self) -> dict:
        return {
            "params": self.params.to_dict(),
            "log_likelihood": self.log_likelihood,
            "aic": self.aic,
            "converged": self.converged,
            "iterations": self.iterations,
            "score_norm": self.score_norm,
            "restarts_used": self.restarts_used,
            "n_params": self.n_params,
            "dataset": self.dataset,
        }


def aic(fit_or_loglik, k: int | None = None) -> float:
    """Akaike information criterion ``2k - 2 l``.

    Accepts a :class:`FitResult` or a raw ``(log_likelihood, k)`` pair.
    """
    if isinstance(fit_or_loglik, FitResult):
        return 2.0 * fit_or_loglik.n_params - 2.0 * fit_or_loglik.log_likelihood
    if k is None:
        raise TypeError("aic(log_likelihood, k) needs the parameter count")
    return 2.0 * k - 2.0 * float(fit_or_loglik)


class _Transform:
    """Unconstrained coordinates <-> natural parameters for one baseline."""

    def __init__(self, kind: str, data_max: float):
        self.kind = kind
        self.data_max = data_max

    def to_params(self, q) -> OxgParams:
        lam = math.exp(q[0])
        if self.kind == "uniform":
            xi = (self.data_max + math.exp(q[1]),)
        elif self.kind == "normal":
            xi = (q[1], math.exp(q[2]))
        else:
            xi = tuple(math.exp(v) for v in q[1:])
        return OxgParams(lam, Baseline(self.kind, xi))

    def from_natural(self, lam: float, xi: Sequence[float]) -> np.ndarray:
        if self.kind == "uniform":
            rest = [math.log(xi[0] - self.data_max)]
        elif self.kind == "normal":
            rest = [xi[0], math.log(xi[1])]
        else:
            rest = [math.log(v) for v in xi]
        return np.array([math.log(lam), *rest])

    def jacobian_diag(self, params: OxgParams) -> np.ndarray:
        """``d natural / d q`` (diagonal)."""
        xi = params.baseline.params
        if self.kind == "uniform":
            rest = [xi[0] - self.data_max]
        elif self.kind == "normal":
            rest = [1.0, xi[1]]
        else:
            rest = list(xi)
        return np.array([params.lam, *rest])


def _baseline_guesses(kind: str, x: np.ndarray) -> list[tuple[float, ...]]:
    if kind == "exponential":
        return [(1.0 / x.mean(),), (1.0 / float(np.median(x)),)]
    if kind == "uniform":
        return [(1.05 * x.max(),), (2.0 * x.max(),)]
    if kind == "burr_xii":
        return [(1.0, 1.0), (1.0, 2.0), (2.0, 1.0), (2.0, 2.0)]
    return [(float(x.mean()), float(x.std(ddof=1)))]


def fit(data: Dataset, baseline_kind: str, options: FitOptions | None = None) -> FitResult:
    """Maximise the log-likelihood with multi-start Nelder-Mead.

    Positive parameters are searched on the log scale, the uniform ``theta``
    as ``max(data) + exp(eta)``, the normal ``mu`` unchanged.  The best start
    wins; ties go to the earlier start.
    """
    options = options or FitOptions()
    kind = Baseline(baseline_kind, _dummy_params(baseline_kind)).kind
    x = data.values
    if np.all(x == x[0]):
        raise DegenerateDataError(f"all observations of {data.name!r} are equal")
    _check_support(Baseline(kind, _dummy_params(kind, x)), x)
    tf = _Transform(kind, float(x.max()))

    def objective(q):
        try:
            params = tf.to_params(q)
        except (ParameterError, OverflowError):
            return math.inf
        with np.errstate(all="ignore"):
            val = -float(np.sum(core.log_pdf(params, x)))
        return val if math.isfinite(val) else math.inf

    starts = [
        (lam, xi) for lam in options.lambda_starts for xi in _baseline_guesses(kind, x)
    ][: options.max_starts]

    best = None
    start_lls = []
    for idx, (lam0, xi0) in enumerate(starts):
        q0 = tf.from_natural(lam0, xi0)
        start_lls.append(-objective(q0))
        simplex = np.vstack([q0] + [q0 + options.initial_step * e for e in np.eye(q0.size)])
        res = minimize(
            objective,
            q0,
            method="Nelder-Mead",
            options={
                "initial_simplex": simplex,
                "xatol": options.xatol,
                "fatol": options.fatol,
                "maxiter": options.max_iterations,
                "maxfev": 50 * options.max_iterations,
            },
        )
        if best is None or res.fun < best[0].fun:
            best = (res, idx)

    res, _ = best
    params = tf.to_params(res.x)
    ll = log_likelihood(params, data)
    grad = score(params, data) * tf.jacobian_diag(params)
    score_norm = float(np.max(np.abs(grad))) / len(data)
    k = 1 + len(params.baseline.params)
    return FitResult(
        params=params,
        log_likelihood=ll,
        aic=2.0 * k - 2.0 * ll,
        iterations=int(res.nit),
        converged=bool(res.success) and score_norm <= options.score_tol,
        score_norm=score_norm,
        restarts_used=len(starts),
        n_params=k,
        dataset=data.name,
        start_log_likelihoods=tuple(start_lls),
    )


def _dummy_params(kind: str, x: np.ndarray | None = None) -> tuple[float, ...]:
    """Placeholder parameters used only to resolve a kind and its support."""
    if kind in ("burr_xii", "burr-xii"):
        return (1.0, 1.0)
    if kind == "normal":
        return (0.0, 1.0)
    if kind == "uniform" and x is not None:
        return (float(np.max(x)) * 2.0 + 1.0,)
    return (1.0,)
