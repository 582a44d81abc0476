"""Exact Fourier analysis of Boolean functions, specialized to linear
threshold functions, with a validated suite of influence lower bounds
and randomized entropy/influence experiments."""

from .bounds import (
    PER_COORDINATE_CONVENTIONS,
    SHEVTSOVA_CONSTANT,
    BernsteinEvents,
    BoundReport,
    bernstein_event_check,
    chernoff_count_interval,
    entropy_upper_bound,
    exact_interval_half_probability,
    interval_probability_lb,
    khintchine_expectation_check,
    khintchine_lower_bound,
    lb_random_certificate,
    lyapunov_ratio,
    per_coordinate_lb,
    rademacher_cdf_sup_distance,
    shevtsova_error,
    theta,
)
from .distributions import (
    DEFAULT_TRUNCATION_GRID,
    WeightDistribution,
    normal_tail_lower_bound,
    parse_distribution,
    standard_normal,
    truncated_normal,
    uniform_symmetric,
)
from .estimators import (
    BLOCK_SAMPLES,
    Estimate,
    hoeffding_half_width,
    mc_cdf_sup_distance,
    mc_influence_i,
    mc_total_influence,
)
from .harness import (
    ExperimentConfig,
    ExperimentRecord,
    SoundnessError,
    analyze_weights,
    run_experiment,
    summarize,
)
from .ltf import (
    Ltf,
    homogenize,
    influence_i_exact,
    influences_exact,
    is_tau_regular,
    rademacher_sums,
    to_boolean_function,
)
from .serialize import emit_records, format_float, parse_records, records_to_csv, records_to_jsonl
from .spectral import (
    N_MAX,
    PARSEVAL_TOL,
    BooleanFunction,
    FourierSpectrum,
    entropy,
    from_truth_values,
    fwht_inplace,
    influence_combinatorial,
    influence_spectral,
    min_entropy,
    wht,
)
from .streams import Stream
from .verification import CheckResult, VerificationReport, verify_bounds

__all__ = [
    "BLOCK_SAMPLES",
    "BernsteinEvents",
    "BooleanFunction",
    "BoundReport",
    "DEFAULT_TRUNCATION_GRID",
    "CheckResult",
    "Estimate",
    "ExperimentConfig",
    "ExperimentRecord",
    "FourierSpectrum",
    "Ltf",
    "N_MAX",
    "PARSEVAL_TOL",
    "PER_COORDINATE_CONVENTIONS",
    "SHEVTSOVA_CONSTANT",
    "SoundnessError",
    "Stream",
    "VerificationReport",
    "WeightDistribution",
    "analyze_weights",
    "bernstein_event_check",
    "chernoff_count_interval",
    "emit_records",
    "entropy",
    "entropy_upper_bound",
    "exact_interval_half_probability",
    "format_float",
    "from_truth_values",
    "fwht_inplace",
    "hoeffding_half_width",
    "homogenize",
    "influence_combinatorial",
    "influence_i_exact",
    "influence_spectral",
    "influences_exact",
    "interval_probability_lb",
    "is_tau_regular",
    "khintchine_expectation_check",
    "khintchine_lower_bound",
    "lb_random_certificate",
    "lyapunov_ratio",
    "mc_cdf_sup_distance",
    "mc_influence_i",
    "mc_total_influence",
    "min_entropy",
    "normal_tail_lower_bound",
    "parse_distribution",
    "parse_records",
    "per_coordinate_lb",
    "rademacher_cdf_sup_distance",
    "rademacher_sums",
    "records_to_csv",
    "records_to_jsonl",
    "run_experiment",
    "shevtsova_error",
    "standard_normal",
    "summarize",
    "theta",
    "to_boolean_function",
    "truncated_normal",
    "uniform_symmetric",
    "verify_bounds",
    "wht",
]
