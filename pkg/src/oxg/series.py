"""Mixture-series summaries of the family and their quadrature counterparts.

The density expands as a double mixture of exp-G kernels ``g * G**n``::

    f = sum_ij w_ij g G^(i+j) + sum_ik w_ik g G^(i+k+2)

Every ``method="series"`` routine truncates these sums under a
:class:`TruncationPolicy`; every ``method="quadrature"`` routine integrates
the closed-form density directly and serves as the oracle.

Series terms are formed from log-magnitudes and signs, grouped into blocks of
equal power of ``G`` (anti-diagonals ``i + j = const``) and reduced with
``math.fsum`` in a fixed order, so truncated values are reproducible.  When
the tail test fails a :class:`~oxg.errors.NonConvergenceError` is raised with
the truncated value attached.

Term-by-term integration over the *whole* support does not converge in
general (the kernel integrals grow like ``n**(i+1)`` while the weights only
decay like ``1/i!``); such series raise instead of returning a number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np

from . import core
from .baselines import Baseline
from .core import OxgParams
from .errors import DomainError, NonConvergenceError, UnsupportedError
from .quadrature import integrate

__all__ = [
    "CurvePoint",
    "MixtureWeights",
    "MomentSet",
    "OrderStatSpec",
    "ReliabilityInputs",
    "TruncationPolicy",
    "bonferroni",
    "cdf_series",
    "incomplete_moment",
    "lorenz",
    "mean_deviations",
    "mgf",
    "mixture_weights",
    "moment_set",
    "order_stat_pdf",
    "order_stat_pdf_series",
    "pdf_series",
    "raw_moment",
    "renyi_entropy",
    "residual_moment",
    "reversed_residual_moment",
    "stress_strength_R",
]

Method = Literal["series", "quadrature"]

QUAD_ABS_TOL = 1e-13
QUAD_REL_TOL = 1e-12
# consecutive small blocks needed to accept a tail; individual power
# coefficients can vanish exactly (both c_1 and c_2 do at lam = 2)
TAIL_RUN = 3


@dataclass(frozen=True)
class TruncationPolicy:
    """Index caps and tail tolerance for every truncated sum.

    ``fixed_caps`` sums the full index rectangle; ``adaptive_until_tail``
    walks the complete anti-diagonal blocks and stops once three consecutive
    blocks fall below ``tail_tolerance`` relative to the partial sum.  In both
    modes a failed tail test raises ``NonConvergenceError``.
    """

    max_index_per_sum: int = 40
    tail_tolerance: float = 1e-10
    mode: Literal["fixed_caps", "adaptive_until_tail"] = "adaptive_until_tail"

    def __post_init__(self):
        if int(self.max_index_per_sum) < 1:
            raise ValueError("max_index_per_sum must be >= 1")
        if not self.tail_tolerance > 0.0:
            raise ValueError("tail_tolerance must be > 0")
        if self.mode not in ("fixed_caps", "adaptive_until_tail"):
            raise ValueError(f"unknown truncation mode {self.mode!r}")
        object.__setattr__(self, "max_index_per_sum", int(self.max_index_per_sum))


DEFAULT_POLICY = TruncationPolicy()


# ---------------------------------------------------------------- weights
def _log_binom(n: int, k: int) -> float:
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


@dataclass(frozen=True)
class MixtureWeights:
    """``w_ij`` and ``w_ik`` up to the policy caps.

    ``log_ij``/``log_ik`` hold log-magnitudes; the sign of both is
    ``(-1)**i``.  ``w_ij`` multiplies ``g G^(i+j)``, ``w_ik`` multiplies
    ``g G^(i+k+2)``.
    """

    lam: float
    log_ij: np.ndarray
    log_ik: np.ndarray

    @property
    def cap(self) -> int:
        return self.log_ij.shape[0] - 1

    @property
    def w_ij(self) -> np.ndarray:
        return self._signs() * np.exp(self.log_ij)

    @property
    def w_ik(self) -> np.ndarray:
        return self._signs() * np.exp(self.log_ik)

    def _signs(self):
        i = np.arange(self.cap + 1)[:, None]
        return np.where(i % 2 == 0, 1.0, -1.0)

    def terms_of_power(self, n: int):
        """Signed weights contributing to ``g G^n``, ordered by ``i``.

        Yields ``(sign, log_magnitude)`` pairs from both families.
        """
        cap = self.cap
        out = []
        for i in range(min(n, cap) + 1):
            j = n - i
            if j <= cap:
                out.append((-1.0 if i % 2 else 1.0, self.log_ij[i, j]))
            k = n - i - 2
            if 0 <= k <= cap:
                out.append((-1.0 if i % 2 else 1.0, self.log_ik[i, k]))
        return out

    @property
    def max_power(self) -> int:
        return 2 * self.cap + 2

    def power_coefficient(self, n: int) -> float:
        """Collected coefficient of ``g G^n`` within the caps."""
        return math.fsum(s * math.exp(lw) for s, lw in self.terms_of_power(n))


def mixture_weights(lam: float, policy: TruncationPolicy = DEFAULT_POLICY) -> MixtureWeights:
    """Weights of the exp-G mixture for shape ``lam``, built in log space."""
    if not lam > 0.0:
        raise DomainError(f"lambda must be > 0, got {lam}")
    cap = policy.max_index_per_sum
    log_lam = math.log(lam)
    log_norm = math.log1p(lam)
    log_ij = np.empty((cap + 1, cap + 1))
    log_ik = np.empty((cap + 1, cap + 1))
    for i in range(cap + 1):
        base = -math.lgamma(i + 1) - log_norm
        for j in range(cap + 1):
            log_ij[i, j] = base + _log_binom(i + j + 1, j) + (i + 2) * log_lam
            log_ik[i, j] = base + _log_binom(i + j + 3, j) + (i + 3) * log_lam - math.log(2.0)
    return MixtureWeights(lam, log_ij, log_ik)


def _signed_log(value: float):
    if value == 0.0:
        return 0.0, -math.inf
    return math.copysign(1.0, value), math.log(abs(value))


def _blocks_sum(
    block: Callable[[int], float],
    n_complete: int,
    policy: TruncationPolicy,
    what: str,
    n_total: int | None = None,
) -> float:
    """Reduce ``block(0), block(1), ...`` under the policy's stopping rule.

    Only the first ``n_complete`` blocks hold every term of their power, so
    only they take part in the tail test.  ``fixed_caps`` additionally sums
    the partial blocks up to ``n_total`` (the rest of the index rectangle).
    """
    n_total = n_complete if n_total is None else n_total
    blocks: list[float] = []
    small = 0
    for n in range(n_complete):
        b = block(n)
        blocks.append(b)
        partial = math.fsum(blocks)
        small = small + 1 if abs(b) <= policy.tail_tolerance * abs(partial) else 0
        if policy.mode == "adaptive_until_tail" and small >= TAIL_RUN:
            return partial
    if policy.mode == "fixed_caps":
        blocks.extend(block(n) for n in range(n_complete, n_total))
    partial = math.fsum(blocks)
    if policy.mode == "fixed_caps" and small >= TAIL_RUN:
        return partial
    raise NonConvergenceError(
        f"{what}: series tail test failed within caps "
        f"(max_index_per_sum={policy.max_index_per_sum})",
        value=partial,
        terms=len(blocks),
    )


def _mixture_sum(
    weights: MixtureWeights,
    kernel: Callable[[int], float],
    policy: TruncationPolicy,
    what: str,
) -> float:
    """``sum_n sum_{terms of power n} w * kernel(n)`` with per-term logs."""

    def block(n):
        k_sign, k_log = _signed_log(kernel(n))
        if k_sign == 0.0:
            return 0.0
        return math.fsum(
            s * k_sign * math.exp(lw + k_log) for s, lw in weights.terms_of_power(n)
        )

    return _blocks_sum(block, weights.cap + 1, policy, what, weights.max_power + 1)


# -------------------------------------------------------- pdf / cdf series
def pdf_series(params: OxgParams, x: float, policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    """Density from the truncated exp-G mixture."""
    base = params.baseline
    lo, hi = base.support
    if x < lo or x >= hi:
        raise DomainError(f"x={x} outside the support ({lo}, {hi})")
    log_g = float(base.logpdf(x))
    log_G = float(base.logcdf(x))
    weights = mixture_weights(params.lam, policy)
    return _mixture_sum(
        weights,
        lambda n: math.exp(log_g + n * log_G) if n else math.exp(log_g),
        policy,
        "pdf_series",
    )


def cdf_series(params: OxgParams, x: float, policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    """Distribution function from the mixture integrated term by term.

    The antiderivative of ``g G^n`` is ``G^(n+1) / (n+1)``.
    """
    base = params.baseline
    lo, hi = base.support
    if x <= lo:
        return 0.0
    if x >= hi:
        raise DomainError(f"x={x} at or above the upper support bound")
    log_G = float(base.logcdf(x))
    weights = mixture_weights(params.lam, policy)
    return _mixture_sum(
        weights,
        lambda n: math.exp((n + 1) * log_G) / (n + 1),
        policy,
        "cdf_series",
    )


# ------------------------------------------------------ quadrature helpers
def _quad(f, a, b, what="integral"):
    res = integrate(f, a, b, QUAD_ABS_TOL, QUAD_REL_TOL)
    if not res.converged:
        raise NonConvergenceError(
            f"{what}: quadrature did not converge (error estimate {res.abs_error_estimate:.3g})",
            value=res.value,
        )
    return res.value


def _pdf_weighted(params: OxgParams, weight):
    def f(x):
        with np.errstate(all="ignore"):
            out = weight(x) * np.exp(core.log_pdf(params, x))
        return np.where(np.isfinite(out), out, 0.0)

    return f


def _kernel_integral(base: Baseline, r: int, n: int, a: float, b: float, shift: float = 0.0) -> float:
    """``int_a^b (x - shift)^r g(x) G(x)^n dx`` by quadrature."""

    def f(x):
        with np.errstate(all="ignore"):
            out = (x - shift) ** r * np.exp(base.logpdf(x) + n * base.logcdf(x))
        return np.where(np.isfinite(out), out, 0.0)

    return _quad(f, a, b, f"kernel integral (r={r}, n={n})")


def _cached(fn):
    cache: dict[int, float] = {}

    def kernel(n):
        if n not in cache:
            cache[n] = fn(n)
        return cache[n]

    return kernel


def _check_method(method):
    if method not in ("series", "quadrature"):
        raise UnsupportedError(f"unknown method {method!r}")


# ----------------------------------------------------------------- moments
def raw_moment(
    params: OxgParams,
    r: int,
    method: Method = "quadrature",
    policy: TruncationPolicy = DEFAULT_POLICY,
) -> float:
    """``E[X^r]``.

    The series form sums ``w * I_n`` with ``I_n = int x^r g G^n``; for the
    uniform baseline ``I_n = theta^r / (n + r + 1)``, otherwise each ``I_n``
    is a quadrature.
    """
    _check_method(method)
    if r < 0:
        raise DomainError("moment order must be >= 0")
    if r == 0:
        return 1.0
    base = params.baseline
    lo, hi = base.support
    if method == "quadrature":
        res = integrate(_pdf_weighted(params, lambda x: x**r), lo, hi, QUAD_ABS_TOL, QUAD_REL_TOL)
        if not res.converged:
            raise NonConvergenceError(
                f"moment of order {r} appears divergent: quadrature failed "
                f"(error estimate {res.abs_error_estimate:.3g})",
                value=res.value,
            )
        return res.value

    weights = mixture_weights(params.lam, policy)
    if base.kind == "uniform":
        theta = base.params[0]
        kernel = lambda n: theta**r / (n + r + 1)  # noqa: E731
    else:
        kernel = _cached(lambda n: _kernel_integral(base, r, n, lo, hi))

    return _mixture_sum(weights, kernel, policy, f"raw_moment(r={r})")


@dataclass(frozen=True)
class MomentSet:
    raw_moments: tuple[float, float, float, float]
    mean: float
    variance: float
    skewness: float
    kurtosis: float
    method: str

    def to_dict(self) -> dict:
        return {
            "raw_moments": list(self.raw_moments),
            "mean": self.mean,
            "variance": self.variance,
            "skewness": self.skewness,
            "kurtosis": self.kurtosis,
            "method": self.method,
        }


def moment_set(
    params: OxgParams,
    method: Method = "quadrature",
    policy: TruncationPolicy = DEFAULT_POLICY,
) -> MomentSet:
    """First four raw moments with mean, variance, skewness and kurtosis."""
    m1, m2, m3, m4 = (raw_moment(params, r, method, policy) for r in (1, 2, 3, 4))
    var = m2 - m1 * m1
    if var < -1e-9:
        raise NonConvergenceError(f"negative variance {var} from {method} moments", value=var)
    var = max(var, 0.0)
    if var > 0.0:
        skew = (m3 - 3.0 * m2 * m1 + 2.0 * m1**3) / var**1.5
        kurt = (m4 - 4.0 * m3 * m1 + 6.0 * m2 * m1**2 - 3.0 * m1**4) / var**2
    else:
        skew = kurt = math.nan
    return MomentSet((m1, m2, m3, m4), m1, var, skew, kurt, method)


def mgf(
    params: OxgParams,
    t: float,
    policy: TruncationPolicy = DEFAULT_POLICY,
    method: Method = "quadrature",
) -> float:
    """Moment generating function as the truncated Taylor series
    ``sum_r t^r mu'_r / r!`` with ``r <= max_index_per_sum``.

    ``method`` selects how the raw moments themselves are computed.
    """
    if t == 0.0:
        return 1.0

    def term(r):
        mu = raw_moment(params, r, method, policy)
        return math.exp(r * math.log(abs(t)) - math.lgamma(r + 1)) * math.copysign(1.0, t) ** r * mu

    return _blocks_sum(term, policy.max_index_per_sum + 1, policy, f"mgf(t={t})")


def incomplete_moment(
    params: OxgParams,
    r: int,
    t: float,
    method: Method = "quadrature",
    policy: TruncationPolicy = DEFAULT_POLICY,
) -> float:
    """``int_lower^t x^r f(x) dx``.

    For the uniform baseline the series kernels are
    ``t^(n+r+1) / (theta^(n+1) (n+r+1))``; other baselines integrate each
    kernel numerically.
    """
    _check_method(method)
    base = params.baseline
    lo, hi = base.support
    if t <= lo:
        return 0.0
    if t >= hi:
        return raw_moment(params, r, method, policy)
    if method == "quadrature":
        return _quad(_pdf_weighted(params, lambda x: x**r), lo, t, "incomplete moment")

    weights = mixture_weights(params.lam, policy)
    if base.kind == "uniform":
        theta = base.params[0]
        log_ratio = math.log(t / theta)

        def kernel(n):
            return theta**r * math.exp((n + r + 1) * log_ratio) / (n + r + 1)
    else:
        kernel = _cached(lambda n: _kernel_integral(base, r, n, lo, t))

    return _mixture_sum(weights, kernel, policy, f"incomplete_moment(r={r}, t={t})")


def mean_deviations(
    params: OxgParams,
    policy: TruncationPolicy = DEFAULT_POLICY,
    method: Method = "quadrature",
) -> tuple[float, float]:
    """Mean deviations about the mean and about the median.

    ``delta1 = 2 mu F(mu) - 2 m1(mu)`` and ``delta2 = mu - 2 m1(M)``, with
    ``m1`` the first incomplete moment and ``M`` the median.
    """
    mu = raw_moment(params, 1, method, policy)
    median = core.quantile(params, 0.5)
    delta1 = 2.0 * mu * core.cdf(params, mu) - 2.0 * incomplete_moment(params, 1, mu, method, policy)
    delta2 = mu - 2.0 * incomplete_moment(params, 1, median, method, policy)
    return delta1, delta2


@dataclass(frozen=True)
class CurvePoint:
    p: float
    value: float


def _require_nonnegative(params: OxgParams, what: str):
    if not params.baseline.nonnegative:
        raise UnsupportedError(f"{what} needs a nonnegative support; {params.baseline.kind} is not")


def lorenz(
    params: OxgParams,
    p: float,
    policy: TruncationPolicy = DEFAULT_POLICY,
    method: Method = "quadrature",
) -> float:
    """Lorenz curve ``L(p) = m1(x_p) / mu`` with ``x_p`` the ``p``-quantile."""
    _require_nonnegative(params, "Lorenz curve")
    if not 0.0 < p < 1.0:
        raise DomainError(f"Lorenz curve needs 0 < p < 1, got {p}")
    x_p = core.quantile(params, p)
    return incomplete_moment(params, 1, x_p, method, policy) / raw_moment(params, 1, method, policy)


def bonferroni(
    params: OxgParams,
    p: float,
    policy: TruncationPolicy = DEFAULT_POLICY,
    method: Method = "quadrature",
) -> float:
    _require_nonnegative(params, "Bonferroni curve")
    return lorenz(params, p, policy, method) / p


def lorenz_curve(params, ps, policy=DEFAULT_POLICY, method="quadrature") -> list[CurvePoint]:
    return [CurvePoint(float(p), lorenz(params, p, policy, method)) for p in ps]


def bonferroni_curve(params, ps, policy=DEFAULT_POLICY, method="quadrature") -> list[CurvePoint]:
    return [CurvePoint(float(p), bonferroni(params, p, policy, method)) for p in ps]


# ----------------------------------------------------------------- entropy
def renyi_entropy(
    params: OxgParams,
    beta: float,
    method: Method = "quadrature",
    policy: TruncationPolicy = DEFAULT_POLICY,
) -> float:
    """Renyi entropy ``log(int f^beta) / (1 - beta)``.

    The series form is only defined for integer ``beta >= 2``; it expands
    ``exp(-lam*beta*t)`` and ``(1 - G)^-(i + 2j + 2beta)`` and needs
    ``K(n) = int g^beta G^n dx`` for each power ``n = i + 2j + k``.
    """
    _check_method(method)
    if not beta > 0.0 or beta == 1.0:
        raise DomainError(f"Renyi entropy needs beta > 0 and beta != 1, got {beta}")
    base = params.baseline
    lo, hi = base.support
    if method == "quadrature":

        def f(x):
            with np.errstate(all="ignore"):
                out = np.exp(beta * core.log_pdf(params, x))
            return np.where(np.isfinite(out), out, 0.0)

        return math.log(_quad(f, lo, hi, "Renyi integral")) / (1.0 - beta)

    if float(beta) != int(beta) or beta < 2:
        raise UnsupportedError("the Renyi series is only available for integer beta >= 2")
    b = int(beta)
    lam = params.lam
    cap = policy.max_index_per_sum
    log_lam = math.log(lam)
    if base.kind == "uniform":
        theta = base.params[0]
        kernel = lambda n: theta ** (1 - b) / (n + 1)  # noqa: E731
    else:
        cache: dict[int, float] = {}

        def kernel(n):
            if n not in cache:

                def f(x, n=n):
                    with np.errstate(all="ignore"):
                        out = np.exp(b * base.logpdf(x) + n * base.logcdf(x))
                    return np.where(np.isfinite(out), out, 0.0)

                cache[n] = _quad(f, lo, hi, f"Renyi kernel n={n}")
            return cache[n]

    def block(n):
        terms = []
        for i in range(min(n, cap) + 1):
            for j in range(b + 1):
                k = n - i - 2 * j
                if k < 0 or k > cap:
                    continue
                log_mag = (
                    (i + j) * log_lam
                    + i * math.log(b)
                    - math.lgamma(i + 1)
                    - j * math.log(2.0)
                    + _log_binom(b, j)
                    + _log_binom(i + 2 * j + 2 * b - 1 + k, k)
                )
                terms.append((-1.0 if i % 2 else 1.0) * math.exp(log_mag))
        if not terms:
            return 0.0
        return math.fsum(terms) * kernel(n)

    total = _blocks_sum(block, cap + 1, policy, f"renyi_entropy(beta={b})", 2 * cap + 2 * b + 1)
    integral = math.exp(b * (2.0 * log_lam - math.log1p(lam))) * total
    if not integral > 0.0:
        raise NonConvergenceError("Renyi series produced a non-positive integral", value=integral)
    return math.log(integral) / (1.0 - b)


# -------------------------------------------------------- order statistics
@dataclass(frozen=True)
class OrderStatSpec:
    r: int
    n: int

    def __post_init__(self):
        if not (1 <= self.r <= self.n):
            raise DomainError(f"order statistic needs 1 <= r <= n, got r={self.r}, n={self.n}")

    @property
    def log_multiplier(self) -> float:
        return math.lgamma(self.n + 1) - math.lgamma(self.r) - math.lgamma(self.n - self.r + 1)


def order_stat_pdf(params: OxgParams, spec: OrderStatSpec, x):
    """Density of the ``r``-th of ``n`` order statistics,
    ``M F^(r-1) (1-F)^(n-r) f``, evaluated in log space."""
    x_arr = np.asarray(x, dtype=float)
    log_s = np.asarray(core.log_survival(params, x_arr))
    with np.errstate(all="ignore"):
        log_F = np.log(-np.expm1(log_s))
        out = np.asarray(core.log_pdf(params, x_arr)) + spec.log_multiplier
        if spec.r > 1:
            out = out + (spec.r - 1) * log_F
        if spec.n > spec.r:
            out = out + (spec.n - spec.r) * log_s
        val = np.exp(out)
    val = np.where(np.isfinite(val), val, 0.0)
    return float(val) if x_arr.ndim == 0 else val


def order_stat_pdf_series(
    params: OxgParams,
    spec: OrderStatSpec,
    x: float,
    policy: TruncationPolicy = DEFAULT_POLICY,
) -> float:
    """Expanded order-statistic density: binomial sums over ``s`` and ``k``
    with ``exp(-(k+1) lam t)`` expanded as a power series in the odds."""
    base = params.baseline
    lo, hi = base.support
    if x < lo or x >= hi:
        raise DomainError(f"x={x} outside the support ({lo}, {hi})")
    lam = params.lam
    r, n = spec.r, spec.n
    t = float(base.odds(x))
    g_over = math.exp(float(base.logpdf(x)) - 2.0 * float(base.logsf(x)))
    poly = (1.0 + lam + lam * t + 0.5 * lam * lam * t * t) / (1.0 + lam)
    bump = 1.0 + 0.5 * lam * t * t
    pref = math.exp(spec.log_multiplier) * lam * lam / (1.0 + lam) * g_over * bump
    cap = policy.max_index_per_sum
    total = []
    converged = True
    for s in range(n - r + 1):
        for k in range(r + s):
            outer = (-1.0) ** (s + k) * math.comb(n - r, s) * math.comb(r + s - 1, k) * poly**k
            a = lam * (k + 1) * t
            terms = []
            small = 0
            for i in range(cap + 1):
                term = (-1.0) ** i * math.exp(i * math.log(a) - math.lgamma(i + 1)) if a > 0 else float(i == 0)
                terms.append(term)
                partial = math.fsum(terms)
                small = small + 1 if abs(term) <= policy.tail_tolerance * abs(partial) else 0
                if policy.mode == "adaptive_until_tail" and small >= TAIL_RUN:
                    break
            if small < TAIL_RUN:
                converged = False
            total.append(outer * math.fsum(terms))
    value = pref * math.fsum(total)
    if not converged:
        raise NonConvergenceError("order_stat_pdf_series: exponential expansion did not converge", value=value)
    return value


# ------------------------------------------------- stress-strength reliability
@dataclass(frozen=True)
class ReliabilityInputs:
    """Strength ``X1 ~ (lambda1, xi)`` and stress ``X2 ~ (lambda2, xi)``."""

    lambda1: float
    lambda2: float
    baseline: Baseline

    def __post_init__(self):
        for name in ("lambda1", "lambda2"):
            v = float(getattr(self, name))
            if not (math.isfinite(v) and v > 0.0):
                raise DomainError(f"{name} must be positive, got {v}")
            object.__setattr__(self, name, v)


def stress_strength_R(
    inputs: ReliabilityInputs,
    method: Method = "quadrature",
    policy: TruncationPolicy = DEFAULT_POLICY,
) -> float:
    """``R = P(X2 < X1) = int f1(x) F2(x) dx``.

    The series form pairs the density weights of ``X1`` with the integrated
    weights of ``X2``: with ``u = G(x)`` each pair contributes
    ``p q / ((m + 1)(n + m + 2))`` for density power ``n`` and cdf power
    ``m + 1``.
    """
    _check_method(method)
    p1 = OxgParams(inputs.lambda1, inputs.baseline)
    p2 = OxgParams(inputs.lambda2, inputs.baseline)
    if method == "quadrature":
        lo, hi = inputs.baseline.support

        def f(x):
            with np.errstate(all="ignore"):
                out = np.exp(core.log_pdf(p1, x)) * core.cdf(p2, x)
            return np.where(np.isfinite(out), out, 0.0)

        return _quad(f, lo, hi, "stress-strength integral")

    w1 = mixture_weights(inputs.lambda1, policy)
    w2 = mixture_weights(inputs.lambda2, policy)
    top = w1.max_power
    a = [w1.power_coefficient(n) for n in range(top + 1)]
    b = [w2.power_coefficient(m) for m in range(top + 1)]

    def block(total_power):
        terms = []
        for n in range(max(0, total_power - top), min(total_power, top) + 1):
            m = total_power - n
            terms.append(a[n] * b[m] / ((m + 1) * (n + m + 2)))
        return math.fsum(terms)

    return _blocks_sum(block, w1.cap + 1, policy, "stress_strength_R", 2 * top + 1)


# ----------------------------------------------------------- residual life
def residual_moment(
    params: OxgParams,
    r: int,
    t: float,
    method: Method = "quadrature",
    policy: TruncationPolicy = DEFAULT_POLICY,
) -> float:
    """``E[(X - t)^r | X > t]``.

    The uniform baseline has closed-form series kernels; other baselines
    integrate each kernel numerically.
    """
    _check_method(method)
    base = params.baseline
    lo, hi = base.support
    if not (t < hi):
        raise DomainError(f"t={t} must lie below the upper support bound")
    t_eff = max(t, lo) if math.isfinite(lo) else t
    surv = core.survival(params, t_eff)
    if surv <= 1e-300:
        raise DomainError(f"survival at t={t} vanishes; residual moment undefined")
    if method == "quadrature":
        num = _quad(_pdf_weighted(params, lambda x: (x - t) ** r), t_eff, hi, "residual moment")
        return num / surv
    weights = mixture_weights(params.lam, policy)
    if base.kind == "uniform":
        theta = base.params[0]

        def kernel(n):
            parts = []
            for u in range(r + 1):
                m = n + r - u + 1
                parts.append(
                    math.comb(r, u) * (-t) ** u * (theta**m - t**m) / (m * theta ** (n + 1))
                )
            return math.fsum(parts)
    else:
        kernel = _cached(lambda n: _kernel_integral(base, r, n, t_eff, hi, shift=t))

    return _mixture_sum(weights, kernel, policy, f"residual_moment(r={r}, t={t})") / surv


def reversed_residual_moment(
    params: OxgParams,
    r: int,
    t: float,
    method: Method = "quadrature",
    policy: TruncationPolicy = DEFAULT_POLICY,
) -> float:
    """``E[(t - X)^r | X < t]``, with kernels as in :func:`residual_moment`."""
    _check_method(method)
    base = params.baseline
    lo, hi = base.support
    if not (t > lo):
        raise DomainError(f"t={t} must lie above the lower support bound")
    t_eff = min(t, hi)
    F = core.cdf(params, t_eff)
    if F <= 1e-300:
        raise DomainError(f"cdf at t={t} vanishes; reversed residual moment undefined")
    if method == "quadrature":
        num = _quad(_pdf_weighted(params, lambda x: (t - x) ** r), lo, t_eff, "reversed residual moment")
        return num / F
    weights = mixture_weights(params.lam, policy)
    if base.kind == "uniform":
        theta = base.params[0]
        log_ratio = math.log(t_eff / theta)

        def kernel(n):
            inner = math.fsum((-1) ** u * math.comb(r, u) / (n + u + 1) for u in range(r + 1))
            return t**r * math.exp((n + 1) * log_ratio) * inner
    else:
        # (t - x)^r = (-1)^r (x - t)^r
        kernel = _cached(lambda n: (-1) ** r * _kernel_integral(base, r, n, lo, t_eff, shift=t))

    return _mixture_sum(weights, kernel, policy, f"reversed_residual_moment(r={r}, t={t})") / F
