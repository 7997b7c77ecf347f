"""Baseline distributions plugged into the odds-xgamma generator.

Each baseline exposes its cdf ``G``, density ``g``, survival ``1 - G``, the
odds ``G / (1 - G)`` and a quantile, all vectorised over ``x``.  Tail
quantities are computed directly (never as ``1 - G``) so that the odds stay
accurate where the generator maps them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import log_ndtr, ndtr, ndtri, xlogy

from .errors import DomainError, InfiniteOddsError, ParameterError

__all__ = [
    "BASELINE_KINDS",
    "Baseline",
    "baseline_cdf",
    "baseline_odds",
    "baseline_pdf",
    "baseline_quantile",
    "make_baseline",
]

# CLI/config name -> canonical kind, number of parameters, parameter names
_KINDS = {
    "uniform": ("uniform", ("theta",)),
    "exponential": ("exponential", ("theta",)),
    "burr-xii": ("burr_xii", ("alpha", "theta")),
    "burr_xii": ("burr_xii", ("alpha", "theta")),
    "normal": ("normal", ("mu", "sigma")),
}
BASELINE_KINDS = ("uniform", "exponential", "burr_xii", "normal")

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


@dataclass(frozen=True)
class Baseline:
    """An immutable baseline model ``G(x; xi)``.

    Parameters are positional in the order ``[theta]`` (uniform, exponential),
    ``[alpha, theta]`` (Burr XII) and ``[mu, sigma]`` (normal).
    """

    kind: str
    params: tuple[float, ...]

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ParameterError(f"unknown baseline kind {self.kind!r}")
        kind, names = _KINDS[self.kind]
        object.__setattr__(self, "kind", kind)
        params = tuple(float(p) for p in self.params)
        if len(params) != len(names):
            raise ParameterError(
                f"{kind} baseline takes {len(names)} parameter(s) {names}, got {len(params)}"
            )
        if not all(math.isfinite(p) for p in params):
            raise ParameterError(f"{kind} parameters must be finite, got {params}")
        positive = names if kind != "normal" else ("sigma",)
        for name, value in zip(names, params):
            if name in positive and value <= 0.0:
                raise ParameterError(f"{kind} parameter {name} must be > 0, got {value}")
        object.__setattr__(self, "params", params)

    # ------------------------------------------------------------------ meta
    @property
    def param_names(self) -> tuple[str, ...]:
        return _KINDS[self.kind][1]

    @property
    def support(self) -> tuple[float, float]:
        if self.kind == "uniform":
            return 0.0, self.params[0]
        if self.kind == "normal":
            return -math.inf, math.inf
        return 0.0, math.inf

    @property
    def nonnegative(self) -> bool:
        return self.support[0] >= 0.0

    def with_params(self, params: Sequence[float]) -> "Baseline":
        return Baseline(self.kind, tuple(params))

    def to_dict(self) -> dict:
        return {"kind": self.kind, **dict(zip(self.param_names, self.params))}

    # ------------------------------------------------------ log-space pieces
    def _masks(self, x):
        lo, hi = self.support
        return x <= lo, x >= hi

    def logpdf(self, x):
        """``log g(x)``; ``-inf`` outside the support."""
        x = np.asarray(x, dtype=float)
        lo, hi = self.support
        # the finite lower endpoint keeps its limiting density value
        inside = (x >= lo) & (x < hi)
        with np.errstate(all="ignore"):
            if self.kind == "uniform":
                out = np.full_like(x, -math.log(self.params[0]))
            elif self.kind == "exponential":
                theta = self.params[0]
                out = math.log(theta) - theta * x
            elif self.kind == "burr_xii":
                a, th = self.params
                out = (
                    math.log(a * th)
                    + xlogy(a - 1.0, x)
                    - (th + 1.0) * np.log1p(x**a)
                )
            else:
                mu, sigma = self.params
                z = (x - mu) / sigma
                out = -0.5 * z * z - _LOG_SQRT_2PI - math.log(sigma)
        return np.where(inside, out, -np.inf)

    def logcdf(self, x):
        x = np.asarray(x, dtype=float)
        below, above = self._masks(x)
        with np.errstate(all="ignore"):
            if self.kind == "uniform":
                out = np.log(x / self.params[0])
            elif self.kind == "exponential":
                out = np.log(-np.expm1(-self.params[0] * x))
            elif self.kind == "burr_xii":
                a, th = self.params
                out = np.log(-np.expm1(-th * np.log1p(x**a)))
            else:
                mu, sigma = self.params
                out = log_ndtr((x - mu) / sigma)
        out = np.where(below, -np.inf, out)
        return np.where(above, 0.0, out)

    def logsf(self, x):
        x = np.asarray(x, dtype=float)
        below, above = self._masks(x)
        with np.errstate(all="ignore"):
            if self.kind == "uniform":
                theta = self.params[0]
                out = np.log((theta - x) / theta)
            elif self.kind == "exponential":
                out = -self.params[0] * x
            elif self.kind == "burr_xii":
                a, th = self.params
                out = -th * np.log1p(x**a)
            else:
                mu, sigma = self.params
                out = log_ndtr(-(x - mu) / sigma)
        out = np.where(below, 0.0, out)
        return np.where(above, -np.inf, out)

    def log_odds(self, x):
        """``log(G / (1 - G))`` without forming ``1 - G``."""
        x = np.asarray(x, dtype=float)
        below, above = self._masks(x)
        with np.errstate(all="ignore"):
            if self.kind == "uniform":
                out = np.log(x) - np.log(self.params[0] - x)
            elif self.kind == "exponential":
                # log(expm1(s)) for s = theta * x, overflow-free
                s = self.params[0] * x
                out = np.where(s < 30.0, np.log(np.expm1(s)), s + np.log1p(-np.exp(-s)))
            elif self.kind == "burr_xii":
                a, th = self.params
                s = th * np.log1p(x**a)
                out = np.where(s < 30.0, np.log(np.expm1(s)), s + np.log1p(-np.exp(-s)))
            else:
                mu, sigma = self.params
                z = (x - mu) / sigma
                out = log_ndtr(z) - log_ndtr(-z)
        out = np.where(below, -np.inf, out)
        return np.where(above, np.inf, out)

    # --------------------------------------------------------- plain values
    def pdf(self, x):
        return np.exp(self.logpdf(x))

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "normal":
            mu, sigma = self.params
            return ndtr((x - mu) / sigma)
        return np.exp(self.logcdf(x))

    def sf(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "normal":
            mu, sigma = self.params
            return ndtr(-(x - mu) / sigma)
        return np.exp(self.logsf(x))

    def odds(self, x):
        """Odds ``G/(1-G)``, vectorised; ``inf`` at or above the upper bound."""
        x = np.asarray(x, dtype=float)
        with np.errstate(all="ignore"):
            if self.kind == "uniform":
                theta = self.params[0]
                out = x / (theta - x)
            elif self.kind == "exponential":
                out = np.expm1(self.params[0] * x)
            elif self.kind == "burr_xii":
                a, th = self.params
                out = np.expm1(th * np.log1p(x**a))
            else:
                out = np.exp(self.log_odds(x))
        below, above = self._masks(x)
        out = np.where(below, 0.0, out)
        return np.where(above, np.inf, out)

    def quantile(self, u):
        """Inverse cdf for ``u`` in (0, 1)."""
        u = np.asarray(u, dtype=float)
        if np.any(~((u > 0.0) & (u < 1.0))):
            raise DomainError(f"quantile needs 0 < u < 1, got {u}")
        if self.kind == "uniform":
            return u * self.params[0]
        if self.kind == "exponential":
            return -np.log1p(-u) / self.params[0]
        if self.kind == "burr_xii":
            a, th = self.params
            return np.expm1(-np.log1p(-u) / th) ** (1.0 / a)
        mu, sigma = self.params
        return mu + sigma * ndtri(u)

    def quantile_from_odds(self, t):
        """``x`` with ``G(x)/(1-G(x)) = t``; exact for large ``t`` where
        ``t/(1+t)`` would round to 1."""
        t = np.asarray(t, dtype=float)
        with np.errstate(all="ignore"):
            if self.kind == "uniform":
                theta = self.params[0]
                x = theta * t / (1.0 + t)
            elif self.kind == "exponential":
                x = np.log1p(t) / self.params[0]
            elif self.kind == "burr_xii":
                a, th = self.params
                x = np.expm1(np.log1p(t) / th) ** (1.0 / a)
            else:
                mu, sigma = self.params
                # pick the better conditioned tail of ndtri
                z = np.where(t <= 1.0, ndtri(t / (1.0 + t)), -ndtri(1.0 / (1.0 + t)))
                x = mu + sigma * z
        lo, hi = self.support
        x = np.where(t <= 0.0, lo, x)
        return np.where(np.isinf(t), hi, x)


def make_baseline(kind: str, params: Sequence[float]) -> Baseline:
    return Baseline(kind, tuple(params))


def _scalar_or_array(value, x):
    return float(value) if np.ndim(x) == 0 else value


def baseline_cdf(model: Baseline, x):
    """``G(x; xi)``, clamped to 0 below and 1 above the support."""
    return _scalar_or_array(model.cdf(x), x)


def baseline_pdf(model: Baseline, x):
    return _scalar_or_array(model.pdf(x), x)


def baseline_quantile(model: Baseline, u):
    return _scalar_or_array(model.quantile(u), u)


def baseline_odds(model: Baseline, x):
    """``G/(1-G)``.  Raises :class:`InfiniteOddsError` at or above the upper bound."""
    xa = np.asarray(x, dtype=float)
    if np.any(xa >= model.support[1]):
        raise InfiniteOddsError(
            f"odds are infinite at x >= {model.support[1]} for the {model.kind} baseline"
        )
    return _scalar_or_array(model.odds(xa), x)
