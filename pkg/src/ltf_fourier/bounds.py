"""Closed-form influence and deviation bounds for threshold functions.

Every lower bound is reported raw (possibly negative, i.e. vacuous) in a
BoundReport together with its side conditions and intermediate quantities;
``clamped`` floors the value at zero.  Nothing here asserts soundness;
the harness and the verification suite compare these values against exact
enumeration.

Normal CDF evaluations go through a complementary-error-function
implementation, keeping relative accuracy near machine precision far into
the tails.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .distributions import WeightDistribution
from .ltf import rademacher_sums
from .spectral import N_MAX

SHEVTSOVA_CONSTANT = 3.4106

_SQRT_2PI = math.sqrt(2.0 * math.pi)


def normal_cdf(x):
    """Standard normal CDF, scalar or array."""
    return special.ndtr(x)


@dataclass(frozen=True)
class BoundReport:
    """One evaluated bound with its side conditions and inputs."""

    name: str
    value: float
    side_conditions: tuple[tuple[str, bool], ...] = ()
    parameters: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not math.isfinite(self.value):
            raise ValueError(f"bound {self.name!r} evaluated to non-finite value {self.value}")
        object.__setattr__(self, "side_conditions", tuple(self.side_conditions))

    @property
    def clamped(self) -> float:
        return max(self.value, 0.0)

    @property
    def conditions_met(self) -> bool:
        return all(ok for _, ok in self.side_conditions)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "value": self.value,
            "clamped": self.clamped,
            "side_conditions": [
                {"condition": text, "satisfied": bool(ok)} for text, ok in self.side_conditions
            ],
            "parameters": dict(self.parameters),
        }


def _as_weights(weights, minimum: int = 1) -> np.ndarray:
    arr = np.asarray(weights, dtype=np.float64)
    if arr.ndim != 1 or arr.size < minimum:
        raise ValueError(f"expected a 1-d weight vector with at least {minimum} entries")
    if not np.isfinite(arr).all():
        raise ValueError("weights must be finite")
    return arr


def lyapunov_ratio(a) -> float:
    """sum |a|^3 / (sum a^2)^(3/2)."""
    arr = _as_weights(a)
    s2 = float(np.sum(arr * arr))
    if s2 == 0.0:
        raise ValueError("all-zero weight vector")
    return float(np.sum(np.abs(arr) ** 3)) / s2**1.5


def khintchine_lower_bound(weights) -> BoundReport:
    """Total-influence lower bound from the optimal Khintchine constant.

    Takes the full weight vector (w_0, ..., w_n); the value is
    l2norm / (2 sqrt(2) max|w_i|) - 1, which may be negative for nearly
    flat or low-dimensional weights.
    """
    arr = _as_weights(weights, minimum=2)
    mx = float(np.max(np.abs(arr)))
    if mx == 0.0:
        raise ValueError("all-zero weight vector")
    norm = float(np.linalg.norm(arr))
    value = norm / (2.0 * math.sqrt(2.0) * mx) - 1.0
    return BoundReport(
        name="khintchine_influence",
        value=value,
        parameters={"l2_norm": norm, "max_abs_weight": mx},
    )


def khintchine_expectation_check(weights) -> float:
    """Exact E|sum w_i x_i| by enumerating all sign patterns."""
    arr = _as_weights(weights)
    if arr.size > N_MAX:
        raise ValueError(f"enumeration over {arr.size} signs exceeds the 2^{N_MAX} cap")
    sums = rademacher_sums(arr)
    return float(np.mean(np.abs(sums)))


def shevtsova_error(a) -> BoundReport:
    """Normal-approximation error bound for a weighted sign sum.

    For Z = sum a_j x_j / l2norm(a) the sup distance between the CDF of Z
    and the normal CDF is at most l/sqrt(2 pi) + 3.4106 l^(4/3) with l the
    Lyapunov ratio of the weights.
    """
    ell = lyapunov_ratio(a)
    first = ell / _SQRT_2PI
    second = SHEVTSOVA_CONSTANT * ell ** (4.0 / 3.0)
    return BoundReport(
        name="shevtsova_error",
        value=first + second,
        parameters={"lyapunov_ratio": ell, "first_term": first, "second_term": second},
    )


def rademacher_cdf_sup_distance(a) -> float:
    """Exact sup_x |Pr[Z < x] - Phi(x)| for Z = sum a_j x_j / l2norm(a).

    The supremum over each open interval between atoms is attained at an
    endpoint, so checking both one-sided limits at every atom is exact.
    """
    arr = _as_weights(a)
    if arr.size > N_MAX:
        raise ValueError(f"enumeration over {arr.size} signs exceeds the 2^{N_MAX} cap")
    norm = float(np.linalg.norm(arr))
    if norm == 0.0:
        raise ValueError("all-zero weight vector")
    z = rademacher_sums(arr) / norm
    vals, counts = np.unique(z, return_counts=True)
    cum = np.cumsum(counts)
    total = float(z.size)
    upto = cum / total
    below = (cum - counts) / total
    phi = normal_cdf(vals)
    return float(max(np.max(np.abs(below - phi)), np.max(np.abs(upto - phi))))


def interval_probability_lb(weights, alpha: float) -> BoundReport:
    """Three-term lower bound on (1/2) Pr[|sum w_j x_j| <= alpha].

    With m summands, A = mean |w|^3 and B = mean w^2 the bound reads
    (alpha - A/B)/sqrt(2 pi m B) - alpha^3/(6 sqrt(2 pi) (m B)^(3/2))
    - 3.4106 A^(4/3)/(m^(2/3) B^2).
    """
    arr = _as_weights(weights)
    if not (alpha >= 0.0):
        raise ValueError(f"alpha must be non-negative, got {alpha}")
    m = arr.size
    b_mean = float(np.mean(arr * arr))
    if b_mean == 0.0:
        raise ValueError("all-zero weight vector")
    a_mean = float(np.mean(np.abs(arr) ** 3))
    first = (alpha - a_mean / b_mean) / math.sqrt(2.0 * math.pi * m * b_mean)
    maclaurin = alpha**3 / (6.0 * _SQRT_2PI * (m * b_mean) ** 1.5)
    berry_esseen = SHEVTSOVA_CONSTANT * a_mean ** (4.0 / 3.0) / (m ** (2.0 / 3.0) * b_mean**2)
    return BoundReport(
        name="interval_probability",
        value=first - maclaurin - berry_esseen,
        parameters={
            "summands": float(m),
            "alpha": float(alpha),
            "mean_abs_cube": a_mean,
            "mean_square": b_mean,
            "first_term": first,
            "maclaurin_term": maclaurin,
            "berry_esseen_term": berry_esseen,
        },
    )


def exact_interval_half_probability(weights, alpha: float) -> float:
    """Exact (1/2) Pr[|sum w_j x_j| <= alpha] by enumeration."""
    arr = _as_weights(weights)
    if not (alpha >= 0.0):
        raise ValueError(f"alpha must be non-negative, got {alpha}")
    if arr.size > N_MAX:
        raise ValueError(f"enumeration over {arr.size} signs exceeds the 2^{N_MAX} cap")
    sums = rademacher_sums(arr)
    return 0.5 * float(np.mean(np.abs(sums) <= alpha))


PER_COORDINATE_CONVENTIONS = ("thm3", "homogeneous")


def per_coordinate_lb(weights, i: int, convention: str = "thm3") -> BoundReport:
    """Lower bound on the influence of coordinate i of sign(w_0 + sum w_j x_j).

    Two published index conventions are exposed rather than silently
    reconciled:

    * ``"thm3"`` sums |w_j|^3 and w_j^2 over all n remaining entries
      including w_0, divides by n - 1, and halves the leading term.  It is
      valid for every threshold weight w_0.
    * ``"homogeneous"`` drops w_0 from the sums (n - 1 remaining entries)
      and equals ``interval_probability_lb`` at alpha = |w_i| exactly.  Its
      derivation assumes w_0 = 0; for other thresholds the side condition
      is reported unmet and the value is informational only.
    """
    arr = _as_weights(weights, minimum=2)
    n = arr.size - 1
    if not 1 <= i <= n:
        raise ValueError(f"coordinate index must be in [1, {n}], got {i}")
    if convention not in PER_COORDINATE_CONVENTIONS:
        raise ValueError(f"convention must be one of {PER_COORDINATE_CONVENTIONS}, got {convention!r}")
    if n < 2:
        raise ValueError("per-coordinate bounds need n >= 2 (empty moment sums otherwise)")
    ai = abs(float(arr[i]))
    if convention == "homogeneous":
        others = np.concatenate([arr[1:i], arr[i + 1 :]])
        if not np.any(others != 0.0):
            raise ValueError("all remaining coordinate weights are zero")
        inner = interval_probability_lb(others, ai)
        return BoundReport(
            name="per_coordinate_homogeneous",
            value=inner.value,
            side_conditions=(("threshold weight w_0 is zero", float(arr[0]) == 0.0),),
            parameters={"coordinate": float(i), **inner.parameters},
        )
    others = np.concatenate([arr[:i], arr[i + 1 :]])
    denom = n - 1
    b_i = float(np.sum(others * others)) / denom
    if b_i == 0.0:
        raise ValueError("all remaining weights are zero")
    a_i = float(np.sum(np.abs(others) ** 3)) / denom
    first = (ai - a_i / b_i) / (2.0 * math.sqrt(2.0 * math.pi * denom * b_i))
    maclaurin = ai**3 / (6.0 * _SQRT_2PI * (denom * b_i) ** 1.5)
    berry_esseen = SHEVTSOVA_CONSTANT * a_i ** (4.0 / 3.0) / (denom ** (2.0 / 3.0) * b_i**2)
    return BoundReport(
        name="per_coordinate_thm3",
        value=first - maclaurin - berry_esseen,
        parameters={
            "coordinate": float(i),
            "abs_weight": ai,
            "mean_abs_cube": a_i,
            "mean_square": b_i,
            "first_term": first,
            "maclaurin_term": maclaurin,
            "berry_esseen_term": berry_esseen,
        },
    )


def theta(alpha: float, delta: float, mu3: float) -> float:
    """Leading per-coordinate coefficient (alpha - mu3 (1 + 2 delta/(1-delta)))
    / sqrt(2 pi (1 + delta))."""
    if not (alpha > 0.0):
        raise ValueError(f"alpha must be positive, got {alpha}")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must be in (0, 1), got {delta}")
    if not (mu3 > 0.0):
        raise ValueError(f"mu3 must be positive, got {mu3}")
    return (alpha - mu3 * (1.0 + 2.0 * delta / (1.0 - delta))) / math.sqrt(2.0 * math.pi * (1.0 + delta))


def lb_random_certificate(d: WeightDistribution, n: int, alpha: float, delta: float) -> BoundReport:
    """High-probability total-influence certificate for a random LTF.

    For n standardized weights from d, with probability at least
    ``success_probability`` at least n p/2 coordinates have |w_i| >= alpha
    and each such coordinate has influence at least
    theta/sqrt(n) - maclaurin_term - berry_esseen_term; the reported value
    multiplies the two.  Either factor can be negative (vacuous) for small
    n; the raw product is reported and side conditions flag the failure.
    """
    if not (isinstance(n, (int, np.integer)) and n >= 2):
        raise ValueError(f"n must be an integer >= 2, got {n}")
    mom = d.moments()
    p = d.tail_ge(alpha)
    th = theta(alpha, delta, mom.mu3)
    n = int(n)
    maclaurin = alpha**3 / (6.0 * _SQRT_2PI * ((1.0 - delta) * (n - 1)) ** 1.5)
    berry_esseen = (
        SHEVTSOVA_CONSTANT
        * ((1.0 + delta) * mom.mu3) ** (4.0 / 3.0)
        / ((1.0 - delta) ** 2 * (n - 1) ** (2.0 / 3.0))
    )
    per_coordinate = th / math.sqrt(n) - maclaurin - berry_esseen
    n_alpha_lower = 0.5 * n * p
    success = (
        1.0
        - math.exp(-delta * delta * n * mom.mu3**2 / mom.sigma3)
        - 2.0 * math.exp(-delta * delta * n / mom.sigma2)
        - 2.0 * math.exp(-0.25 * n * p * p)
    )
    return BoundReport(
        name="random_ltf_certificate",
        value=n_alpha_lower * per_coordinate,
        side_conditions=(
            ("tail probability positive (alpha inside support)", p > 0.0),
            ("theta positive", th > 0.0),
            ("per-coordinate lower bound positive", per_coordinate > 0.0),
            ("success probability positive", success > 0.0),
        ),
        parameters={
            "n": float(n),
            "alpha": float(alpha),
            "delta": float(delta),
            "mu3": mom.mu3,
            "sigma2": mom.sigma2,
            "sigma3": mom.sigma3,
            "p_alpha": p,
            "theta": th,
            "n_alpha_lower_bound": n_alpha_lower,
            "maclaurin_term": maclaurin,
            "berry_esseen_term": berry_esseen,
            "per_coordinate_lower_bound": per_coordinate,
            "success_probability": success,
        },
    )


def chernoff_count_interval(n: int, p: float) -> tuple[float, float, float]:
    """(lo, hi, prob): Binomial(n, p) lies in [n p/2, 3 n p/2] with
    probability at least 1 - 2 exp(-n p^2 / 4)."""
    if not (isinstance(n, (int, np.integer)) and n >= 1):
        raise ValueError(f"n must be a positive integer, got {n}")
    if not 0.0 < p <= 1.0:
        raise ValueError(f"p must be in (0, 1], got {p}")
    lo = 0.5 * n * p
    hi = 1.5 * n * p
    prob = 1.0 - 2.0 * math.exp(-0.25 * n * p * p)
    return (lo, hi, prob)


class BernsteinEvents(tuple):
    """(squares_ok, cubes_ok, ratio_ok) for one weight realization."""

    __slots__ = ()

    def __new__(cls, squares_ok: bool, cubes_ok: bool, ratio_ok: bool):
        return super().__new__(cls, (bool(squares_ok), bool(cubes_ok), bool(ratio_ok)))

    @property
    def squares_ok(self) -> bool:
        return self[0]

    @property
    def cubes_ok(self) -> bool:
        return self[1]

    @property
    def ratio_ok(self) -> bool:
        return self[2]


def bernstein_event_check(weights, delta: float, mu3: float) -> BernsteinEvents:
    """Concentration events for m standardized weights.

    squares: (1-delta) m <= sum w^2 <= (1+delta) m;
    cubes: sum |w|^3 <= (1+delta) mu3 m;
    ratio: mean |w|^3 / mean w^2 <= (1 + 2 delta/(1-delta)) mu3.
    The first two events imply the third.
    """
    arr = _as_weights(weights)
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must be in (0, 1), got {delta}")
    if not (mu3 > 0.0):
        raise ValueError(f"mu3 must be positive, got {mu3}")
    m = arr.size
    s2 = float(np.sum(arr * arr))
    s3 = float(np.sum(np.abs(arr) ** 3))
    squares_ok = (1.0 - delta) * m <= s2 <= (1.0 + delta) * m
    cubes_ok = s3 <= (1.0 + delta) * mu3 * m
    ratio_ok = s2 > 0.0 and s3 / s2 <= (1.0 + 2.0 * delta / (1.0 - delta)) * mu3
    return BernsteinEvents(squares_ok, cubes_ok, ratio_ok)


def entropy_upper_bound(n: int, c: float) -> float:
    """Conjectured entropy ceiling c * sqrt(n) for threshold functions."""
    if not (isinstance(n, (int, np.integer)) and n >= 1):
        raise ValueError(f"n must be a positive integer, got {n}")
    if not (c > 0.0):
        raise ValueError(f"c must be positive, got {c}")
    return c * math.sqrt(n)
