"""Odds xgamma-G distributions: closed forms, series summaries and fitting."""

from .baselines import (
    BASELINE_KINDS,
    Baseline,
    baseline_cdf,
    baseline_odds,
    baseline_pdf,
    baseline_quantile,
    make_baseline,
)
from .core import (
    OxgParams,
    XGammaGenerator,
    cdf,
    density_critical_points,
    hazard,
    log_pdf,
    log_survival,
    pdf,
    quantile,
    reversed_hazard,
    sample,
    survival,
)
from .datasets import builtin, ingest
from .errors import (
    DataError,
    DegenerateDataError,
    DomainError,
    InfiniteOddsError,
    NonConvergenceError,
    OxgError,
    ParameterError,
    UnsupportedError,
)
from .mle import Dataset, FitOptions, FitResult, aic, fit, log_likelihood, score
from .quadrature import QuadratureResult, integrate
from .series import (
    MomentSet,
    OrderStatSpec,
    ReliabilityInputs,
    TruncationPolicy,
    bonferroni,
    cdf_series,
    incomplete_moment,
    lorenz,
    mean_deviations,
    mgf,
    moment_set,
    order_stat_pdf,
    order_stat_pdf_series,
    pdf_series,
    raw_moment,
    renyi_entropy,
    residual_moment,
    reversed_residual_moment,
    stress_strength_R,
)

__version__ = "0.1.0"
