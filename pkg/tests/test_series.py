import math

import numpy as np
import pytest
from scipy import integrate as sp_integrate
from scipy.special import eval_genlaguerre

from oxg import core, series
from oxg.baselines import Baseline
from oxg.core import OxgParams
from oxg.errors import DomainError, NonConvergenceError, UnsupportedError
from oxg.series import OrderStatSpec, ReliabilityInputs, TruncationPolicy


def uni(lam, theta=1.0):
    return OxgParams(lam, Baseline("uniform", (theta,)))


def expo(lam, theta=1.0):
    return OxgParams(lam, Baseline("exponential", (theta,)))


def oracle(f, a, b):
    """Independent scipy QUADPACK integral used as the reference value."""
    val, _ = sp_integrate.quad(f, a, b, epsabs=1e-13, epsrel=1e-12, limit=500)
    return val


def series_or_partial(fn):
    try:
        return fn()
    except NonConvergenceError as exc:
        return exc.value


DIVERGENT = (
    "term-by-term integration over the whole support diverges: the power "
    "coefficients grow like generalised Laguerre polynomials while the "
    "kernel integrals decay only polynomially"
)


# ------------------------------------------------------------- weights
def test_weight_examples():
    w = series.mixture_weights(1.0)
    assert w.w_ij[0, 0] == pytest.approx(0.5, abs=1e-15)
    assert w.w_ik[0, 0] == pytest.approx(0.25, abs=1e-15)
    lam = 2.7
    w = series.mixture_weights(lam)
    assert w.w_ij[0, 0] == pytest.approx(lam**2 / (1 + lam), rel=1e-14)
    assert w.w_ij[2, 3] == pytest.approx(
        (1 / 2) * math.comb(6, 3) * lam**4 / (1 + lam), rel=1e-13
    )
    assert w.w_ik[1, 2] == pytest.approx(-math.comb(6, 2) * lam**4 / (2 * (1 + lam)), rel=1e-13)


@pytest.mark.parametrize("lam", [0.3, 1.0, 2.0, 4.5])
def test_power_coefficients_match_laguerre_generating_function(lam):
    # g/(1-G)^2 (1 + lam t^2 / 2) e^{-lam t} expands through the Laguerre
    # generating function sum L_n^(a)(lam) G^n = e^{-lam G/(1-G)} / (1-G)^(a+1)
    w = series.mixture_weights(lam)
    for n in range(25):
        expected = lam**2 / (1 + lam) * eval_genlaguerre(n, 1, lam)
        if n >= 2:
            expected += lam**3 / (2 * (1 + lam)) * eval_genlaguerre(n - 2, 3, lam)
        # the alternating sum can only be as accurate as its largest terms allow
        magnitude = sum(math.exp(lw) for _, lw in w.terms_of_power(n))
        assert abs(w.power_coefficient(n) - expected) <= 1e-14 * magnitude + 1e-15


def test_large_caps_stay_finite():
    w = series.mixture_weights(3.0, TruncationPolicy(max_index_per_sum=200))
    assert np.all(np.isfinite(w.w_ij)) and np.all(np.isfinite(w.w_ik))


def test_policy_validation():
    with pytest.raises(ValueError):
        TruncationPolicy(max_index_per_sum=0)
    with pytest.raises(ValueError):
        TruncationPolicy(tail_tolerance=0.0)
    with pytest.raises(ValueError):
        TruncationPolicy(mode="forever")


# ------------------------------------------------------------ pdf / cdf
@pytest.mark.parametrize(
    "params,x",
    [(uni(1.0), 0.3), (expo(0.5), 0.5), (uni(0.5), 0.4), (uni(0.5), 0.5)],
)
def test_pdf_series_matches_closed_form(params, x):
    assert series.pdf_series(params, x) == pytest.approx(core.pdf(params, x), abs=1e-8)


def test_pdf_series_at_lower_support():
    for p in (uni(0.8), expo(1.3)):
        assert series.pdf_series(p, 0.0) == pytest.approx(core.pdf(p, 0.0), rel=1e-14)
    assert series.cdf_series(uni(0.8), 0.0) == 0.0


def test_cdf_series_matches_closed_form():
    assert series.cdf_series(uni(1.0), 0.5) == pytest.approx(core.cdf(uni(1.0), 0.5), abs=1e-8)


def test_cdf_series_derivative_is_pdf_series():
    p = uni(0.7)
    h = 1e-5
    for x in (0.2, 0.3, 0.45):
        fd = (series.cdf_series(p, x + h) - series.cdf_series(p, x - h)) / (2 * h)
        assert fd == pytest.approx(series.pdf_series(p, x), abs=1e-5)


def test_larger_caps_reach_larger_odds():
    p = uni(0.5)
    with pytest.raises(NonConvergenceError):
        series.pdf_series(p, 0.7)
    wide = TruncationPolicy(max_index_per_sum=120)
    assert series.pdf_series(p, 0.7, wide) == pytest.approx(core.pdf(p, 0.7), abs=1e-8)


def test_large_lambda_odds_flags_non_convergence():
    # lam * odds = 180: the alternating terms dwarf the density
    with pytest.raises(NonConvergenceError):
        series.pdf_series(uni(20.0), 0.9)


def test_series_reproducible_bit_for_bit():
    p = uni(0.9)
    assert series.pdf_series(p, 0.37) == series.pdf_series(p, 0.37)
    assert series.cdf_series(p, 0.37) == series.cdf_series(p, 0.37)


def test_fixed_caps_mode_agrees():
    p = uni(0.5)
    fixed = TruncationPolicy(mode="fixed_caps")
    assert series.pdf_series(p, 0.4, fixed) == pytest.approx(core.pdf(p, 0.4), abs=1e-8)


def test_exact_zero_coefficients_do_not_stop_the_series():
    # at lam = 2 the G^1 and G^2 coefficients vanish exactly
    w = series.mixture_weights(2.0)
    assert abs(w.power_coefficient(1)) < 1e-14 and abs(w.power_coefficient(2)) < 1e-14
    with pytest.raises(NonConvergenceError):
        series.raw_moment(uni(2.0), 1, method="series")


# -------------------------------------------------------------- moments
def test_raw_moment_quadrature_against_oracle():
    p = uni(1.0)
    expected = oracle(lambda x: x * core.pdf(p, x), 0.0, 1.0)
    assert series.raw_moment(p, 1) == pytest.approx(expected, abs=1e-10)
    assert series.raw_moment(p, 0) == 1.0


def test_raw_moment_scale_property():
    for r in (1, 2, 3):
        assert series.raw_moment(uni(1.3, 2.5), r) == pytest.approx(
            2.5**r * series.raw_moment(uni(1.3, 1.0), r), rel=1e-10
        )


def test_second_moment_dominates_square_of_mean():
    for p in (uni(1.0), expo(0.4), OxgParams(1.2, Baseline("burr_xii", (3.0, 2.0)))):
        assert series.raw_moment(p, 2) >= series.raw_moment(p, 1) ** 2


@pytest.mark.xfail(strict=True, raises=NonConvergenceError, reason=DIVERGENT)
def test_raw_moment_series_matches_quadrature():
    p = uni(1.0)
    assert series.raw_moment(p, 1, method="series") == pytest.approx(series.raw_moment(p, 1), abs=1e-6)


def test_moment_set_shape_invariant_under_scale():
    a = series.moment_set(uni(0.8, 1.0))
    b = series.moment_set(uni(0.8, 3.0))
    assert b.skewness == pytest.approx(a.skewness, rel=1e-9)
    assert b.kurtosis == pytest.approx(a.kurtosis, rel=1e-9)


def test_moment_set_variance_against_oracle():
    p = uni(1.0)
    ms = series.moment_set(p)
    mean = oracle(lambda x: x * core.pdf(p, x), 0.0, 1.0)
    var = oracle(lambda x: (x - mean) ** 2 * core.pdf(p, x), 0.0, 1.0)
    assert ms.variance == pytest.approx(var, abs=1e-6)
    assert ms.to_dict()["method"] == "quadrature"


@pytest.mark.xfail(strict=True, raises=NonConvergenceError, reason=DIVERGENT)
@pytest.mark.parametrize("lam", [0.5, 1.0, 2.0])
def test_moment_set_series_matches_quadrature(lam):
    s = series.moment_set(uni(lam), method="series")
    q = series.moment_set(uni(lam))
    for a, b in zip(s.raw_moments + (s.variance, s.skewness, s.kurtosis),
                    q.raw_moments + (q.variance, q.skewness, q.kurtosis)):
        assert a == pytest.approx(b, abs=1e-5)


def test_mgf():
    p = uni(1.0)
    assert series.mgf(p, 0.0) == 1.0
    h = 1e-5
    fd = (series.mgf(p, h) - series.mgf(p, -h)) / (2 * h)
    assert fd == pytest.approx(series.raw_moment(p, 1), abs=1e-5)
    expected = oracle(lambda x: math.exp(0.1 * x) * core.pdf(p, x), 0.0, 1.0)
    assert series.mgf(p, 0.1) == pytest.approx(expected, abs=1e-6)


def test_incomplete_moment():
    p = uni(1.0)
    assert series.incomplete_moment(p, 1, 0.0) == 0.0
    assert series.incomplete_moment(p, 2, 1.0) == pytest.approx(series.raw_moment(p, 2), rel=1e-12)
    q = series.incomplete_moment(p, 1, 0.5)
    assert q == pytest.approx(oracle(lambda x: x * core.pdf(p, x), 0.0, 0.5), abs=1e-10)
    assert series.incomplete_moment(p, 1, 0.5, method="series") == pytest.approx(q, abs=1e-6)


def test_incomplete_moment_series_other_baseline():
    p = expo(0.5)
    q = series.incomplete_moment(p, 2, 0.6)
    assert series.incomplete_moment(p, 2, 0.6, method="series") == pytest.approx(q, abs=1e-6)


def test_mean_deviations_against_oracle():
    p = uni(1.0)
    d1, d2 = series.mean_deviations(p)
    mu = series.raw_moment(p, 1)
    med = core.quantile(p, 0.5)
    assert d1 >= 0 and d2 >= 0
    assert d1 == pytest.approx(oracle(lambda x: abs(x - mu) * core.pdf(p, x), 0.0, 1.0), abs=1e-6)
    assert d2 == pytest.approx(oracle(lambda x: abs(x - med) * core.pdf(p, x), 0.0, 1.0), abs=1e-6)


def test_lorenz_and_bonferroni():
    p = uni(1.0)
    assert series.lorenz(p, 1 - 1e-12) == pytest.approx(1.0, abs=1e-9)
    med = core.quantile(p, 0.5)
    expected = series.incomplete_moment(p, 1, med) / series.raw_moment(p, 1)
    assert series.lorenz(p, 0.5) == pytest.approx(expected, abs=1e-12)
    assert series.lorenz(p, 0.5) == pytest.approx(
        oracle(lambda x: x * core.pdf(p, x), 0.0, med) / oracle(lambda x: x * core.pdf(p, x), 0.0, 1.0),
        abs=1e-6,
    )
    assert series.bonferroni(p, 0.5) == pytest.approx(series.lorenz(p, 0.5) / 0.5, rel=1e-14)
    with pytest.raises(UnsupportedError):
        series.lorenz(OxgParams(1.0, Baseline("normal", (3.0, 1.0))), 0.5)
    with pytest.raises(DomainError):
        series.lorenz(p, 0.0)


@pytest.mark.parametrize("kind", ["uniform", "exponential", "burr_xii"])
def test_inequalities_random_draws(kind):
    rng = np.random.default_rng(11)
    for _ in range(20):
        lam = float(rng.uniform(0.1, 4.0))
        xi = (float(rng.uniform(0.5, 3.0)),) if kind != "burr_xii" else tuple(rng.uniform(0.8, 3.0, 2))
        p = OxgParams(lam, Baseline(kind, xi))
        d1, d2 = series.mean_deviations(p)
        assert d1 >= 0 and d2 >= 0
        curve = series.lorenz_curve(p, [0.1, 0.3, 0.5, 0.7, 0.9])
        values = [c.value for c in curve]
        assert all(0 <= v <= c.p + 1e-12 for v, c in zip(values, curve))
        assert all(np.diff(values) >= 0)
        assert all(c.value <= 1 + 1e-12 for c in series.bonferroni_curve(p, [0.2, 0.8]))


# -------------------------------------------------------------- entropy
def test_renyi_quadrature_against_oracle_and_scale():
    p = uni(1.0)
    h = series.renyi_entropy(p, 2)
    assert h == pytest.approx(-math.log(oracle(lambda x: core.pdf(p, x) ** 2, 0.0, 1.0)), abs=1e-10)
    assert series.renyi_entropy(uni(1.0, 3.0), 2) == pytest.approx(h + math.log(3.0), abs=1e-10)
    assert series.renyi_entropy(p, 2) == series.renyi_entropy(p, 2)
    assert series.renyi_entropy(p, 0.5) > series.renyi_entropy(p, 2)


def test_renyi_domain():
    with pytest.raises(DomainError):
        series.renyi_entropy(uni(1.0), 1.0)
    with pytest.raises(UnsupportedError):
        series.renyi_entropy(uni(1.0), 2.5, method="series")


@pytest.mark.xfail(strict=True, raises=NonConvergenceError, reason=DIVERGENT)
@pytest.mark.parametrize("beta", [2, 3])
def test_renyi_series_matches_quadrature(beta):
    p = uni(1.0)
    assert series.renyi_entropy(p, beta, method="series") == pytest.approx(
        series.renyi_entropy(p, beta), abs=1e-4
    )


# ----------------------------------------------------- order statistics
def test_order_stat_first_of_one_is_pdf():
    p = expo(1.2, 0.7)
    x = np.linspace(0.01, 4.0, 50)
    assert np.array_equal(series.order_stat_pdf(p, OrderStatSpec(1, 1), x), core.pdf(p, x))


def test_order_stat_minimum_of_three():
    p = uni(0.9)
    x = np.linspace(0.05, 0.95, 7)
    expected = 3 * core.survival(p, x) ** 2 * core.pdf(p, x)
    assert np.allclose(series.order_stat_pdf(p, OrderStatSpec(1, 3), x), expected, rtol=1e-12)


@pytest.mark.parametrize("r", [1, 2, 3])
def test_order_stat_normalised(r):
    p = expo(0.8)
    total = oracle(lambda x: series.order_stat_pdf(p, OrderStatSpec(r, 3), x), 0.0, np.inf)
    assert total == pytest.approx(1.0, abs=1e-7)


def test_order_stat_series_matches_direct():
    p = uni(0.3)
    for spec in (OrderStatSpec(1, 3), OrderStatSpec(2, 4), OrderStatSpec(3, 3)):
        for x in (0.2, 0.5, 0.8):
            assert series.order_stat_pdf_series(p, spec, x) == pytest.approx(
                series.order_stat_pdf(p, spec, x), abs=1e-6
            )


def test_order_stat_spec_validation():
    with pytest.raises(DomainError):
        OrderStatSpec(0, 3)
    with pytest.raises(DomainError):
        OrderStatSpec(4, 3)


# ------------------------------------------------------ stress-strength
def test_stress_strength_symmetry():
    base = Baseline("exponential", (1.0,))
    for lam in (0.3, 1.0, 4.0):
        assert series.stress_strength_R(ReliabilityInputs(lam, lam, base)) == pytest.approx(0.5, abs=1e-10)
    r12 = series.stress_strength_R(ReliabilityInputs(0.5, 1.5, base))
    r21 = series.stress_strength_R(ReliabilityInputs(1.5, 0.5, base))
    assert r12 + r21 == pytest.approx(1.0, abs=1e-8)


def test_stress_strength_against_generator_oracle():
    # R depends only on the generators: P(T2 < T1) for xgamma T1, T2
    l1, l2 = 0.5, 1.5
    g1, g2 = core.XGammaGenerator(l1), core.XGammaGenerator(l2)
    expected = oracle(lambda t: g1.pdf(t) * (1 - g2.sf(t)), 0.0, np.inf)
    for base in (Baseline("exponential", (1.0,)), Baseline("uniform", (2.0,)), Baseline("normal", (0.0, 1.0))):
        assert series.stress_strength_R(ReliabilityInputs(l1, l2, base)) == pytest.approx(expected, abs=1e-9)


@pytest.mark.xfail(strict=True, raises=NonConvergenceError, reason=DIVERGENT)
def test_stress_strength_series_matches_quadrature():
    inputs = ReliabilityInputs(0.5, 1.5, Baseline("exponential", (1.0,)))
    assert series.stress_strength_R(inputs, method="series") == pytest.approx(
        series.stress_strength_R(inputs), abs=1e-4
    )


def test_reliability_inputs_validation():
    with pytest.raises(DomainError):
        ReliabilityInputs(0.0, 1.0, Baseline("exponential", (1.0,)))


# -------------------------------------------------------- residual life
def test_residual_moment_properties():
    p = uni(1.0)
    assert series.residual_moment(p, 1, 0.0) == pytest.approx(series.raw_moment(p, 1), rel=1e-12)
    for t in (0.1, 0.5, 0.9):
        assert series.residual_moment(p, 1, t) <= 1.0 - t
    expected = oracle(lambda x: (x - 0.3) * core.pdf(p, x), 0.3, 1.0) / core.survival(p, 0.3)
    assert series.residual_moment(p, 1, 0.3) == pytest.approx(expected, abs=1e-10)


@pytest.mark.xfail(strict=True, raises=NonConvergenceError, reason=DIVERGENT)
def test_residual_series_matches_quadrature():
    p = uni(1.0)
    assert series.residual_moment(p, 1, 0.3, method="series") == pytest.approx(
        series.residual_moment(p, 1, 0.3), abs=1e-5
    )


def test_reversed_residual_moment():
    p = uni(1.0)
    m1 = series.reversed_residual_moment(p, 1, 0.5)
    m2 = series.reversed_residual_moment(p, 2, 0.5)
    assert m1 <= 0.5
    assert m2 >= m1**2
    expected = oracle(lambda x: (0.5 - x) * core.pdf(p, x), 0.0, 0.5) / core.cdf(p, 0.5)
    assert m1 == pytest.approx(expected, abs=1e-10)
    assert series.reversed_residual_moment(p, 1, 0.5, method="series") == pytest.approx(m1, abs=1e-5)


def test_reversed_residual_series_other_baseline():
    p = expo(0.5)
    q = series.reversed_residual_moment(p, 2, 0.5)
    assert series.reversed_residual_moment(p, 2, 0.5, method="series") == pytest.approx(q, abs=1e-5)


def test_residual_domain():
    with pytest.raises(DomainError):
        series.residual_moment(uni(1.0), 1, 1.0)
    with pytest.raises(DomainError):
        series.reversed_residual_moment(uni(1.0), 1, 0.0)


def test_unknown_method():
    with pytest.raises(UnsupportedError):
        series.raw_moment(uni(1.0), 1, method="magic")
