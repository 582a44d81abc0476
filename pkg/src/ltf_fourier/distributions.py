"""Symmetric weight distributions and the moment data the bounds consume.

Three families are supported: uniform on [-a, a], the standard normal, and
the standard normal truncated to [-b, b].  ``moments()`` reports the raw
variance together with the absolute-moment data of the *standardized*
(unit-variance) distribution, which is what the certificate machinery
needs; experiments draw standardized weights.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import integrate

_SQRT2 = math.sqrt(2.0)
_SQRT3 = math.sqrt(3.0)
_SQRT_2PI = math.sqrt(2.0 * math.pi)

KINDS = ("uniform", "normal", "truncated_normal")


class Moments(NamedTuple):
    variance: float  # raw variance of the distribution
    mu3: float  # E|w|^3 of the standardized distribution
    sigma2: float  # std of w^2 of the standardized distribution
    sigma3: float  # std of |w|^3 of the standardized distribution


@functools.lru_cache(maxsize=None)
def _truncated_raw_moments(b: float) -> tuple[float, float, float, float]:
    """(E x^2, E|x|^3, E x^4, E|x|^6) of the normal truncated to [-b, b]."""
    z = math.erf(b / _SQRT2)
    out = []
    for k in (2, 3, 4, 6):
        val, err = integrate.quad(
            lambda x, k=k: x**k * math.exp(-0.5 * x * x),
            0.0,
            b,
            epsabs=1e-14,
            epsrel=1e-12,
            limit=200,
        )
        moment = 2.0 * val / (_SQRT_2PI * z)
        if err * 2.0 / (_SQRT_2PI * z) > max(1e-8 * moment, 1e-12):
            raise RuntimeError(f"quadrature for moment {k} did not converge (err {err:.2e})")
        out.append(moment)
    return tuple(out)


@dataclass(frozen=True)
class WeightDistribution:
    """One symmetric coordinate-weight distribution."""

    kind: str
    param: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.kind == "normal":
            if self.param is not None:
                raise ValueError("the standard normal takes no parameter")
        else:
            if self.param is None or not math.isfinite(self.param) or self.param <= 0.0:
                raise ValueError(f"{self.kind} requires a positive finite parameter, got {self.param}")

    def variance(self) -> float:
        if self.kind == "uniform":
            return self.param**2 / 3.0
        if self.kind == "normal":
            return 1.0
        return _truncated_raw_moments(self.param)[0]

    def moments(self) -> Moments:
        if self.kind == "uniform":
            # standardized is uniform on [-sqrt(3), sqrt(3)]
            return Moments(
                variance=self.param**2 / 3.0,
                mu3=3.0 * _SQRT3 / 4.0,
                sigma2=math.sqrt(4.0 / 5.0),
                sigma3=math.sqrt(243.0 / 112.0),
            )
        if self.kind == "normal":
            return Moments(
                variance=1.0,
                mu3=2.0 * _SQRT2 / math.sqrt(math.pi),
                sigma2=_SQRT2,
                sigma3=math.sqrt(15.0 - 8.0 / math.pi),
            )
        m2, m3, m4, m6 = _truncated_raw_moments(self.param)
        return Moments(
            variance=m2,
            mu3=m3 / m2**1.5,
            sigma2=math.sqrt(m4 - m2 * m2) / m2,
            sigma3=math.sqrt(m6 - m3 * m3) / m2**1.5,
        )

    def tail_ge(self, alpha: float) -> float:
        """Pr[|w| >= alpha] for the standardized distribution."""
        if not (alpha >= 0.0):
            raise ValueError(f"alpha must be non-negative, got {alpha}")
        if self.kind == "uniform":
            return max(0.0, 1.0 - alpha / _SQRT3)
        if self.kind == "normal":
            return math.erfc(alpha / _SQRT2)
        b = self.param
        t = alpha * math.sqrt(self.variance())
        if t >= b:
            return 0.0
        return 1.0 - math.erf(t / _SQRT2) / math.erf(b / _SQRT2)

    def p_max_ge(self, n: int, alpha: float) -> float:
        """Pr[max over n standardized draws of |w_i| >= alpha]."""
        if not (isinstance(n, (int, np.integer)) and n >= 1):
            raise ValueError(f"n must be a positive integer, got {n}")
        return 1.0 - (1.0 - self.tail_ge(alpha)) ** int(n)

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        """Raw draws (not standardized)."""
        if not (isinstance(count, (int, np.integer)) and count >= 0):
            raise ValueError(f"count must be a non-negative integer, got {count}")
        count = int(count)
        if self.kind == "uniform":
            return rng.uniform(-self.param, self.param, count)
        if self.kind == "normal":
            return rng.standard_normal(count)
        b = self.param
        out = np.empty(count, dtype=np.float64)
        filled = 0
        while filled < count:
            draw = rng.standard_normal(count - filled)
            keep = draw[np.abs(draw) <= b]
            out[filled : filled + keep.size] = keep
            filled += keep.size
        return out

    def sample_standardized(self, rng: np.random.Generator, count: int) -> np.ndarray:
        """Unit-variance draws."""
        return self.sample(rng, count) / math.sqrt(self.variance())

    def to_dict(self) -> dict:
        return {"kind": self.kind, "param": self.param}


def uniform_symmetric(a: float) -> WeightDistribution:
    return WeightDistribution("uniform", float(a))


def standard_normal() -> WeightDistribution:
    return WeightDistribution("normal", None)


def truncated_normal(b: float) -> WeightDistribution:
    return WeightDistribution("truncated_normal", float(b))


# Default truncation levels to sweep when comparing truncated draws against
# the unbounded normal. Any positive bound is accepted by truncated_normal;
# this grid is just a convenient starting point, not a canonical choice.
DEFAULT_TRUNCATION_GRID = (1.0, 2.0, 3.0)


def normal_tail_lower_bound(alpha: float) -> float:
    """Closed-form lower bound 2*phi(alpha)*(1/alpha - 1/alpha^3) on the
    standard-normal two-sided tail; informative only for alpha > 1."""
    if not (alpha > 0.0):
        raise ValueError(f"alpha must be positive, got {alpha}")
    phi = math.exp(-0.5 * alpha * alpha) / _SQRT_2PI
    return 2.0 * phi * (1.0 / alpha - 1.0 / alpha**3)


def parse_distribution(data: dict) -> WeightDistribution:
    """Build a distribution from config JSON/TOML ({"kind": ..., "param": ...})."""
    if not isinstance(data, dict) or "kind" not in data:
        raise ValueError('distribution config must be an object with a "kind" field')
    extra = set(data) - {"kind", "param"}
    if extra:
        raise ValueError(f"unknown distribution config fields: {sorted(extra)}")
    kind = data["kind"]
    param = data.get("param")
    if kind == "uniform" and param is None:
        param = 1.0
    return WeightDistribution(kind, None if param is None else float(param))
