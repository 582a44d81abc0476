"""Soundness suite: every bound against exact enumeration, plus identities.

Each check runs a batch of randomized instances (normal, uniform and small
integer weights, the last so that exact zero-margin ties are exercised)
and records counterexamples.  Frozen formula values are re-derived inline
with literal constants as a drift guard: a weakened error constant cannot
be caught by the enumeration checks alone, because for sign sums the
actual CDF deviation sits below the first-order term at every enumerable
size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import bounds as bnd
from .ltf import (
    Ltf,
    homogenize,
    influence_i_exact,
    influences_exact,
    to_boolean_function,
)
from .spectral import N_MAX, influence_combinatorial, influence_spectral, wht
from .streams import Stream

EXACT_TOL = 1e-9
APPENDIX_TOL = 1e-12
MAX_RECORDED = 20


@dataclass
class CheckResult:
    name: str
    trials: int
    violation_count: int = 0
    violations: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.violation_count == 0

    def record(self, **details) -> None:
        self.violation_count += 1
        if len(self.violations) < MAX_RECORDED:
            self.violations.append(details)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "trials": self.trials,
            "passed": self.passed,
            "violation_count": self.violation_count,
            "violations": self.violations,
        }


@dataclass
class VerificationReport:
    n_max_exact: int
    trials: int
    seed: int
    checks: list

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "n_max_exact": self.n_max_exact,
            "trials": self.trials,
            "seed": self.seed,
            "checks": [c.to_dict() for c in self.checks],
        }


def _draw_weights(rng: np.random.Generator, count: int, style: int) -> np.ndarray:
    """Weight vectors cycling through normal, uniform, and small-integer draws."""
    if style == 0:
        return rng.standard_normal(count)
    if style == 1:
        return rng.uniform(-math.sqrt(3.0), math.sqrt(3.0), count)
    while True:
        w = rng.integers(-3, 4, size=count).astype(np.float64)
        if count < 2 or np.any(w[1:] != 0.0):
            return w


def _draw_ltf(rng: np.random.Generator, n: int, style: int, zero_threshold: bool = False) -> Ltf:
    w = _draw_weights(rng, n + 1, style)
    if zero_threshold:
        w[0] = 0.0
    if not np.any(w[1:] != 0.0):
        w[1] = 1.0
    return Ltf(w)


def _sized(trials: int, lo: int, hi: int, t: int) -> int:
    return lo + t % (hi - lo + 1)


def _check_spectral_consistency(result: CheckResult, stream: Stream, trials: int, n_hi: int) -> None:
    for t in range(trials):
        rng = stream.child(t).generator()
        n = _sized(trials, 2, n_hi, t)
        ltf = _draw_ltf(rng, n, t % 3)
        bf = to_boolean_function(ltf)
        spectrum = wht(bf)
        defect = spectrum.parseval_defect()
        total_flip, _ = influence_combinatorial(bf)
        spec_inf = influence_spectral(spectrum)
        if defect > EXACT_TOL or abs(spec_inf - total_flip) > EXACT_TOL:
            result.record(
                weights=ltf.weights.tolist(),
                parseval_defect=defect,
                spectral_influence=spec_inf,
                flip_influence=total_flip,
            )


def _check_interval_identity(result: CheckResult, stream: Stream, trials: int, n_hi: int) -> None:
    for t in range(trials):
        rng = stream.child(t).generator()
        n = _sized(trials, 2, n_hi, t)
        ltf = _draw_ltf(rng, n, t % 3)
        _, per_flip = influence_combinatorial(to_boolean_function(ltf))
        for i in range(1, n + 1):
            exact = influence_i_exact(ltf, i)
            if exact != per_flip[i - 1]:
                result.record(
                    weights=ltf.weights.tolist(),
                    coordinate=i,
                    interval_value=exact,
                    flip_value=float(per_flip[i - 1]),
                )


def _check_khintchine_expectation(result: CheckResult, stream: Stream, trials: int, n_hi: int) -> None:
    for t in range(trials):
        rng = stream.child(t).generator()
        m = _sized(trials, 1, min(16, n_hi), t)
        w = rng.standard_normal(m)
        norm = float(np.linalg.norm(w))
        if norm == 0.0:
            continue
        w = w / norm
        mean_abs = bnd.khintchine_expectation_check(w)
        floor = float(np.linalg.norm(w)) / math.sqrt(2.0) - 1e-12
        if mean_abs < floor:
            result.record(weights=w.tolist(), mean_abs=mean_abs, floor=floor)


def _check_khintchine_bound(result: CheckResult, stream: Stream, trials: int, n_hi: int) -> None:
    for t in range(trials):
        rng = stream.child(t).generator()
        n = _sized(trials, 1, n_hi, t)
        ltf = _draw_ltf(rng, n, t % 3)
        total, _ = influence_combinatorial(to_boolean_function(ltf))
        report = bnd.khintchine_lower_bound(ltf.weights)
        if report.clamped > total + EXACT_TOL:
            result.record(weights=ltf.weights.tolist(), bound=report.clamped, influence=total)


def _check_per_coordinate(
    result: CheckResult, stream: Stream, trials: int, n_hi: int, convention: str
) -> None:
    zero_threshold = convention == "homogeneous"
    for t in range(trials):
        rng = stream.child(t).generator()
        n = _sized(trials, 2, n_hi, t)
        ltf = _draw_ltf(rng, n, t % 3, zero_threshold=zero_threshold)
        per = influences_exact(ltf)
        for i in range(1, n + 1):
            try:
                report = bnd.per_coordinate_lb(ltf.weights, i, convention)
            except ValueError:
                continue  # degenerate moment sums (all-zero remainder)
            if report.clamped > per[i - 1] + EXACT_TOL:
                result.record(
                    weights=ltf.weights.tolist(),
                    coordinate=i,
                    convention=convention,
                    bound=report.clamped,
                    influence=float(per[i - 1]),
                )


# deterministic interval cases; the equal-weight ones sit closest to the
# bound and are the first to fail if an error constant is weakened
_INTERVAL_FIXED = tuple(
    (m, alpha) for m in (8, 12, 15) for alpha in (1.0, 2.0, 4.0)
)


def _check_interval_probability_bound(result: CheckResult, stream: Stream, trials: int, n_hi: int) -> None:
    for m, alpha in _INTERVAL_FIXED:
        w = np.ones(m)
        report = bnd.interval_probability_lb(w, alpha)
        exact = bnd.exact_interval_half_probability(w, alpha)
        if report.value > exact + EXACT_TOL:
            result.record(weights=w.tolist(), alpha=alpha, bound=report.value, exact=exact)
    for t in range(trials):
        rng = stream.child(t).generator()
        m = _sized(trials, 2, n_hi, t)
        w = _draw_weights(rng, m, t % 3)
        if not np.any(w != 0.0):
            continue
        rms = float(np.sqrt(np.mean(w * w)))
        alphas = [abs(float(v)) for v in w[: min(4, m)]] + [0.5 * rms, rms, 2.0 * rms, 4.0 * rms]
        for alpha in alphas:
            report = bnd.interval_probability_lb(w, alpha)
            exact = bnd.exact_interval_half_probability(w, alpha)
            if report.value > exact + EXACT_TOL:
                result.record(weights=w.tolist(), alpha=alpha, bound=report.value, exact=exact)


def _check_sup_distance(result: CheckResult, stream: Stream, trials: int, n_hi: int) -> None:
    cases = [np.ones(m) for m in range(1, min(16, n_hi) + 1)]
    for t in range(trials):
        rng = stream.child(t).generator()
        m = _sized(trials, 1, min(16, n_hi), t)
        w = _draw_weights(rng, m, t % 2)
        if not np.any(w != 0.0):
            continue
        cases.append(w)
        lopsided = w.copy()
        lopsided[0] = 4.0 * max(1.0, float(np.max(np.abs(w))))
        cases.append(lopsided)
    for w in cases:
        bound = bnd.shevtsova_error(w).value
        exact = bnd.rademacher_cdf_sup_distance(w)
        if exact > bound + EXACT_TOL:
            result.record(weights=np.asarray(w).tolist(), bound=bound, exact=exact)


def _check_homogenization(result: CheckResult, stream: Stream, trials: int, n_hi: int) -> None:
    # continuous draws only: the factor-2 comparison can genuinely fail when
    # some sign pattern lands exactly on the decision boundary (an atom at
    # -|w_i| is counted by the folded function but not the original), e.g.
    # weights (-2, -3, 3, 0, -1, 1, 0) at coordinate 4. Ties have probability
    # zero under continuous draws.
    n_cap = min(n_hi, N_MAX - 1)
    for t in range(trials):
        rng = stream.child(t).generator()
        n = _sized(trials, 2, n_cap, t)
        ltf = _draw_ltf(rng, n, t % 2)
        if float(ltf.weights[0]) == 0.0:
            w = ltf.weights.copy()
            w[0] = 1.0
            ltf = Ltf(w)
        g = homogenize(ltf)
        per_f = influences_exact(ltf)
        per_g = influences_exact(g)
        for i in range(1, n + 1):
            if per_g[i] > 2.0 * per_f[i - 1] + APPENDIX_TOL:
                result.record(
                    weights=ltf.weights.tolist(),
                    coordinate=i,
                    lifted=float(per_g[i]),
                    original=float(per_f[i - 1]),
                )
        total_f = float(per_f.sum())
        total_g = float(per_g.sum())
        if total_f < (total_g - 1.0) / 2.0 - APPENDIX_TOL:
            result.record(weights=ltf.weights.tolist(), total=total_f, lifted_total=total_g)


def _check_formula_freeze(result: CheckResult, stream: Stream, trials: int, n_hi: int) -> None:
    # references recomputed with literal constants; catches silent drift of
    # the shared constants inside the bound evaluators
    root_2pi = math.sqrt(2.0 * math.pi)
    cases = []

    val = bnd.shevtsova_error(np.ones(4)).value
    ref = 0.5 / root_2pi + 3.4106 * 0.5 ** (4.0 / 3.0)
    cases.append(("shevtsova_four_ones", val, ref))

    val = bnd.interval_probability_lb(np.ones(99), 2.0).value
    ref = 1.0 / math.sqrt(2.0 * math.pi * 99.0) - 8.0 / (6.0 * root_2pi * 99.0**1.5) - 3.4106 / 99.0 ** (
        2.0 / 3.0
    )
    cases.append(("interval_equal_99", val, ref))

    val = bnd.khintchine_lower_bound(np.ones(16)).value
    cases.append(("khintchine_sixteen_ones", val, math.sqrt(2.0) - 1.0))

    mu3 = 2.0 * math.sqrt(2.0) / math.sqrt(math.pi)
    val = bnd.theta(mu3 * (2.0 + 0.2 / 0.9), 0.1, mu3)
    cases.append(("theta_normal_default", val, mu3 / math.sqrt(2.0 * math.pi * 1.1)))

    for name, got, want in cases:
        if abs(got - want) > EXACT_TOL:
            result.record(case=name, value=got, reference=want)


_CHECKS = (
    ("spectral-consistency", _check_spectral_consistency),
    ("interval-flip-identity", _check_interval_identity),
    ("khintchine-expectation", _check_khintchine_expectation),
    ("khintchine-influence-bound", _check_khintchine_bound),
    ("per-coordinate-all-thresholds", lambda r, s, t, n: _check_per_coordinate(r, s, t, n, "thm3")),
    (
        "per-coordinate-zero-threshold",
        lambda r, s, t, n: _check_per_coordinate(r, s, t, n, "homogeneous"),
    ),
    ("interval-probability", _check_interval_probability_bound),
    ("cdf-sup-distance", _check_sup_distance),
    ("threshold-folding", _check_homogenization),
    ("formula-freeze", _check_formula_freeze),
)


def verify_bounds(n_max_exact: int = 12, trials: int = 200, seed: int = 0) -> VerificationReport:
    """Run every soundness check against exact enumeration.

    ``n_max_exact`` caps the enumeration arity (keep it at 16 or below for
    quick runs), ``trials`` is the per-check instance budget.
    """
    if not 2 <= n_max_exact <= N_MAX:
        raise ValueError(f"n_max_exact must be in [2, {N_MAX}], got {n_max_exact}")
    if not (isinstance(trials, (int, np.integer)) and trials >= 1):
        raise ValueError(f"trials must be a positive integer, got {trials}")
    if not (isinstance(seed, (int, np.integer)) and seed >= 0):
        raise ValueError(f"seed must be a non-negative integer, got {seed}")
    checks = []
    for index, (name, fn) in enumerate(_CHECKS):
        result = CheckResult(name=name, trials=int(trials))
        fn(result, Stream((int(seed), index)), int(trials), int(n_max_exact))
        checks.append(result)
    return VerificationReport(
        n_max_exact=int(n_max_exact), trials=int(trials), seed=int(seed), checks=checks
    )
