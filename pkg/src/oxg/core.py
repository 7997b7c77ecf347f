"""Closed-form evaluation of the odds-xgamma-G family.

With ``t = G(x)/(1 - G(x))`` the baseline odds, a member of the family has

    S(x) = (1 + lam + lam*t + lam**2 * t**2 / 2) / (1 + lam) * exp(-lam*t)
    f(x) = lam**2 / (1 + lam) * g / (1 - G)**2 * (1 + lam/2 * t**2) * exp(-lam*t)

Everything is evaluated in log space so the far tail (huge odds) neither
overflows nor cancels.  All functions accept scalars or arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammainc

from .baselines import Baseline
from .errors import DomainError, ParameterError
from .quadrature import integrate

__all__ = [
    "OxgParams",
    "XGammaGenerator",
    "cdf",
    "density_critical_points",
    "hazard",
    "log_pdf",
    "pdf",
    "quantile",
    "reversed_hazard",
    "sample",
    "survival",
]


@dataclass(frozen=True)
class OxgParams:
    """Family shape ``lam`` together with a baseline carrying ``xi``."""

    lam: float
    baseline: Baseline

    def __post_init__(self):
        lam = float(self.lam)
        if not (math.isfinite(lam) and lam > 0.0):
            raise ParameterError(f"lambda must be positive and finite, got {self.lam}")
        object.__setattr__(self, "lam", lam)

    @property
    def support(self) -> tuple[float, float]:
        return self.baseline.support

    def to_dict(self) -> dict:
        return {"lambda": self.lam, "baseline": self.baseline.to_dict()}


@dataclass(frozen=True)
class XGammaGenerator:
    """The xgamma density ``r(t)`` on ``t > 0`` driving the family.

    It is the mixture ``lam/(1+lam) * Exp(lam) + 1/(1+lam) * Gamma(3, lam)``.
    """

    lam: float

    def pdf(self, t):
        t = np.asarray(t, dtype=float)
        lam = self.lam
        with np.errstate(all="ignore"):
            out = lam**2 / (1.0 + lam) * (1.0 + 0.5 * lam * t * t) * np.exp(-lam * t)
        return np.where(t < 0.0, 0.0, out)

    def log_sf(self, t):
        return _log_tail(self.lam, np.asarray(t, dtype=float))

    def sf(self, t):
        return np.exp(self.log_sf(t))

    def log_hazard(self, t):
        """``log(r(t) / S_T(t))``; the derivative of ``-log S_T``."""
        lam = self.lam
        t = np.asarray(t, dtype=float)
        return 2.0 * math.log(lam) + _log1p_half_sq(lam, t) - _log_poly(lam, t)


# ----------------------------------------------------------------- helpers
def _log1p_half_sq(lam, t, log_t=None):
    """``log(1 + lam/2 * t**2)`` without overflow for huge ``t``."""
    with np.errstate(all="ignore"):
        if log_t is None:
            log_t = np.log(t)
        big = log_t > 300.0
        direct = np.log1p(0.5 * lam * np.where(big, 0.0, t) ** 2)
        asym = np.logaddexp(0.0, math.log(0.5 * lam) + 2.0 * log_t)
    return np.where(big, asym, direct)


def _log_poly(lam, t, log_t=None):
    """``log(1 + lam + lam*t + lam**2 t**2 / 2)``."""
    with np.errstate(all="ignore"):
        if log_t is None:
            log_t = np.log(t)
        big = log_t > 300.0
        ts = np.where(big, 0.0, t)
        direct = np.log1p(lam + lam * ts + 0.5 * lam * lam * ts * ts)
        asym = 2.0 * log_t + math.log(0.5 * lam * lam) + np.log1p(
            (1.0 + lam) * np.exp(-2.0 * log_t) * 2.0 / (lam * lam)
            + 2.0 * np.exp(-log_t) / lam
        )
    return np.where(big, asym, direct)


def _log_tail(lam, t, log_t=None):
    """``log S_T(t)`` for the xgamma generator; ``-inf`` for infinite odds."""
    with np.errstate(all="ignore"):
        out = _log_poly(lam, t, log_t) - math.log1p(lam) - lam * t
    out = np.where(np.isinf(t), -np.inf, out)
    return np.where(t <= 0.0, 0.0, out)


def _scalar(value, x):
    return float(value) if np.ndim(x) == 0 else value


def _pieces(params: OxgParams, x):
    x = np.asarray(x, dtype=float)
    base = params.baseline
    log_t = base.log_odds(x)
    with np.errstate(all="ignore"):
        t = np.exp(log_t)
    return x, base, t, log_t


# ------------------------------------------------------------- operations
def log_survival(params: OxgParams, x):
    x, _, t, log_t = _pieces(params, x)
    return _scalar(_log_tail(params.lam, t, log_t), x)


def survival(params: OxgParams, x):
    """Survival function ``S(x)``; 1 below the support, 0 at/above the top."""
    return _scalar(np.exp(log_survival(params, x)), np.asarray(x))


def cdf(params: OxgParams, x):
    """Distribution function ``F(x) = 1 - S(x)``.

    The lower half uses the generator mixture directly, which keeps full
    relative accuracy for tiny ``F``; the upper half uses ``-expm1(log S)``.
    """
    x_arr, _, t, log_t = _pieces(params, x)
    log_s = _log_tail(params.lam, t, log_t)
    with np.errstate(all="ignore"):
        head = np.exp(_log_head(params.lam, t))
    out = np.where(log_s > -math.log(2.0), head, -np.expm1(log_s))
    out = np.where(t <= 0.0, 0.0, out)
    return _scalar(out, x)


def log_pdf(params: OxgParams, x):
    """Log density, assembled term by term without exponentiating the odds."""
    x, base, t, log_t = _pieces(params, x)
    lam = params.lam
    with np.errstate(all="ignore"):
        out = (
            2.0 * math.log(lam)
            - math.log1p(lam)
            + base.logpdf(x)
            - 2.0 * base.logsf(x)
            + _log1p_half_sq(lam, t, log_t)
            - lam * t
        )
    lo, hi = base.support
    out = np.where((x < lo) | (x >= hi) | np.isinf(t), -np.inf, out)
    return _scalar(out, x)


def pdf(params: OxgParams, x):
    return _scalar(np.exp(np.asarray(log_pdf(params, x))), np.asarray(x))


def _log_hazard(params: OxgParams, x):
    x, base, t, log_t = _pieces(params, x)
    lam = params.lam
    with np.errstate(all="ignore"):
        return (
            2.0 * math.log(lam)
            + base.logpdf(x)
            - 2.0 * base.logsf(x)
            + _log1p_half_sq(lam, t, log_t)
            - _log_poly(lam, t, log_t)
        )


def hazard(params: OxgParams, x):
    """Hazard rate from its own closed form (no ``f/S`` division)."""
    x_arr = np.asarray(x, dtype=float)
    lo, hi = params.support
    if np.any((x_arr < lo) | (x_arr >= hi)):
        raise DomainError(f"hazard needs x inside the support ({lo}, {hi})")
    return _scalar(np.exp(_log_hazard(params, x_arr)), x)


def reversed_hazard(params: OxgParams, x):
    """``f(x) / F(x)``; raises where ``F(x) = 0``."""
    x_arr = np.asarray(x, dtype=float)
    lo, hi = params.support
    if np.any((x_arr <= lo) | (x_arr >= hi)):
        raise DomainError(f"reversed hazard needs x inside the support ({lo}, {hi})")
    F = np.asarray(cdf(params, x_arr))
    if np.any(F <= 0.0):
        raise DomainError("reversed hazard is undefined where F(x) = 0")
    return _scalar(np.asarray(pdf(params, x_arr)) / F, x)


# --------------------------------------------------------------- quantile
def _log_head(lam, t):
    """``log F_T(t)`` from the mixture form, accurate for tiny ``t``.

    ``F_T = (lam * (1 - e^{-lam t}) + P(3, lam t)) / (1 + lam)`` with ``P``
    the regularised lower incomplete gamma; both terms are positive so
    nothing cancels.
    """
    with np.errstate(all="ignore"):
        return np.log(lam * -np.expm1(-lam * t) + gammainc(3.0, lam * t)) - math.log1p(lam)


def _bracketed_newton(phi, dphi, lo, hi, x, max_iter=200):
    """Root of an increasing ``phi`` inside ``[lo, hi]``, vectorised.

    Newton steps that leave the bracket are replaced by bisection.  An exact
    zero of ``phi`` is accepted as is.
    """
    eps = np.finfo(float).eps
    for _ in range(max_iter):
        val = phi(x)
        lo = np.where(val < 0.0, x, lo)
        hi = np.where(val > 0.0, x, hi)
        with np.errstate(all="ignore"):
            newton = x - val / dphi(x)
        ok = (newton > lo) & (newton < hi) & np.isfinite(newton)
        exact = val == 0.0
        x_new = np.where(exact, x, np.where(ok, newton, 0.5 * (lo + hi)))
        scale = np.maximum(np.abs(x_new), 1.0)
        done = exact | (np.abs(x_new - x) <= 4.0 * eps * scale) | (hi - lo <= 4.0 * eps * scale)
        x = x_new
        if np.all(done):
            break
    return x


def _solve_odds(lam: float, u: np.ndarray) -> np.ndarray:
    """Odds ``t`` with ``F_T(t) = u`` for the xgamma generator.

    Below the median the equation ``log F_T = log u`` is solved in ``log t``
    (the lower tail is nearly linear there); above it ``log S_T = log(1-u)``
    is solved in ``t``.  Both sides are monotone, so a doubling bracket
    always exists.
    """
    gen = XGammaGenerator(lam)
    t = np.empty_like(u)
    low = u <= 0.5

    if np.any(low):
        ul = u[low]
        target = np.log(ul)

        def phi(s):
            return _log_head(lam, np.exp(s)) - target

        def dphi(s):
            tt = np.exp(s)
            return np.exp(s + np.log(gen.pdf(tt)) - _log_head(lam, tt))

        # F_T(t) ~ lam^2 t / (1 + lam) near zero
        s0 = np.log(ul * (1.0 + lam) / lam**2)
        lo, hi = s0 - 1.0, s0 + 1.0
        step = 1.0
        for _ in range(64):
            below, above = phi(lo) > 0.0, phi(hi) < 0.0
            if not (np.any(below) or np.any(above)):
                break
            step *= 2.0
            lo = np.where(below, lo - step, lo)
            hi = np.where(above, hi + step, hi)
        t[low] = np.exp(_bracketed_newton(phi, dphi, lo, hi, np.clip(s0, lo, hi)))

    if np.any(~low):
        target = np.log1p(-u[~low])

        def phi(tt):
            return target - _log_tail(lam, tt)

        def dphi(tt):
            return np.exp(gen.log_hazard(tt))

        lo = np.zeros_like(target)
        hi = np.ones_like(target)
        for _ in range(2000):
            short = phi(hi) < 0.0
            if not np.any(short):
                break
            lo = np.where(short, hi, lo)
            hi = np.where(short, 2.0 * hi, hi)
        t[~low] = _bracketed_newton(phi, dphi, lo, hi, 0.5 * (lo + hi))
    return t


def quantile(params: OxgParams, u):
    """Inverse cdf: solve for the odds in the generator, then map back through
    the baseline."""
    u_arr = np.asarray(u, dtype=float)
    if np.any(~((u_arr > 0.0) & (u_arr < 1.0))):
        raise DomainError(f"quantile needs 0 < u < 1, got {u}")
    t = _solve_odds(params.lam, np.atleast_1d(u_arr).astype(float))
    x = params.baseline.quantile_from_odds(t)
    return float(x[0]) if u_arr.ndim == 0 else x.reshape(u_arr.shape)


def sample(params: OxgParams, n: int, seed=None) -> np.ndarray:
    """Inverse-transform sampling from a seeded ``numpy`` generator.

    ``seed`` may be an integer or an existing ``numpy.random.Generator``.
    """
    if n < 0:
        raise DomainError("sample size must be >= 0")
    if n == 0:
        return np.empty(0)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    u = rng.random(n)
    # random() can return exactly 0
    u = np.where(u == 0.0, np.finfo(float).tiny, u)
    return quantile(params, u)


# ---------------------------------------------------------- density shape
def _dlog_pdf(params: OxgParams, x: np.ndarray) -> np.ndarray:
    base = params.baseline
    lam = params.lam
    h = np.maximum(1e-6, 1e-6 * np.abs(x))
    g = base.pdf(x)
    lo, hi = base.support
    # one-sided differences where the stencil would leave the support
    left = np.where(x - h > lo, x - h, x)
    right = np.where(x + h < hi, x + h, x)
    dg = (base.pdf(right) - base.pdf(left)) / (right - left)
    G = base.cdf(x)
    Gbar = base.sf(x)
    t = base.odds(x)
    with np.errstate(all="ignore"):
        return (
            dg / g
            + 2.0 * g / Gbar
            + (lam * g * G / Gbar**3) / (1.0 + 0.5 * lam * t * t)
            - lam * g / Gbar**2
        )


def density_critical_points(params: OxgParams, grid_size: int = 2048):
    """Roots of ``d/dx log f`` on the central ``(1e-6, 1 - 1e-6)`` probability
    range, each classified ``"max"`` or ``"min"``.

    ``g'`` comes from central differences.  An empty list means the density
    is monotone over the scanned range.
    """
    lo_x = quantile(params, 1e-6)
    hi_x = quantile(params, 1.0 - 1e-6)
    xs = np.linspace(lo_x, hi_x, grid_size)
    d = _dlog_pdf(params, xs)
    found = []
    for k in range(grid_size - 1):
        a, b = d[k], d[k + 1]
        if not (np.isfinite(a) and np.isfinite(b)) or a == 0.0 or np.sign(a) == np.sign(b):
            continue
        left, right = xs[k], xs[k + 1]
        fa = a
        while right - left > 1e-9:
            mid = 0.5 * (left + right)
            fm = float(_dlog_pdf(params, np.array([mid]))[0])
            if np.sign(fm) == np.sign(fa):
                left, fa = mid, fm
            else:
                right = mid
        found.append((float(0.5 * (left + right)), "max" if a > 0.0 else "min"))
    return found


def family_cdf_by_generator(params: OxgParams, x: float) -> float:
    """``F(x)`` as the generator integral ``int_0^{odds(x)} r(t) dt``."""
    t = float(params.baseline.odds(x))
    if t <= 0.0:
        return 0.0
    gen = XGammaGenerator(params.lam)
    return integrate(gen.pdf, 0.0, t, 1e-13, 1e-13).value
