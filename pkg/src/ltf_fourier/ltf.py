"""Linear threshold functions f(x) = sign(w_0 + sum_i w_i x_i), sign(0) = -1.

Sign decisions are exact.  Margins are enumerated with vectorized float
chains; any margin whose distance to a decision boundary falls below a
rigorous rounding bound is re-evaluated with math.fsum, whose correctly
rounded result carries the sign of the exact real sum.  Truth tables,
flip counts and the half-open interval enumeration therefore agree
bit-for-bit, including crafted integer ties.

Scale invariance (multiplying all weights by c > 0) holds exactly for the
real weights; after rounding c * w_i per coordinate it can fail only on
inputs whose exact margin is zero before scaling and nonzero after, which
has measure zero for continuous weights and cannot happen when c is a
power of two.
"""

from __future__ import annotations

import math
from dataclasses import InitVar, dataclass

import numpy as np

from .spectral import N_MAX, BooleanFunction

_EPS = 2.0**-53


def rademacher_sums(coeffs, lead: float = 0.0) -> np.ndarray:
    """All 2^m values of lead + sum_j coeffs[j] * x_j.

    Index bit j set means x_{j+1} = +1, matching the truth-table encoding.
    """
    coeffs = np.asarray(coeffs, dtype=np.float64)
    if coeffs.ndim != 1:
        raise ValueError("coeffs must be one-dimensional")
    if coeffs.size > N_MAX:
        raise ValueError(f"enumeration over {coeffs.size} signs exceeds the 2^{N_MAX} cap")
    out = np.array([lead], dtype=np.float64)
    for w in coeffs:
        out = np.concatenate([out - w, out + w])
    return out


def _chain_slack(weights_abs_sum: float, terms: int) -> float:
    # worst-case rounding of a length-`terms` float chain, inflated 4x
    return 4.0 * (terms + 2) * _EPS * weights_abs_sum


def _exact_sign(terms) -> int:
    s = math.fsum(terms)
    return (s > 0.0) - (s < 0.0)


def _signed_terms(lead: float, coeffs: np.ndarray, k: int) -> list[float]:
    out = [lead]
    for j in range(coeffs.size):
        c = float(coeffs[j])
        out.append(c if (k >> j) & 1 else -c)
    return out


@dataclass(frozen=True, eq=False)
class Ltf:
    """Weight vector (w_0, w_1, ..., w_n); w_0 is the threshold term."""

    weights: np.ndarray
    allow_degenerate: InitVar[bool] = False

    def __post_init__(self, allow_degenerate: bool) -> None:
        w = np.array(self.weights, dtype=np.float64)
        if w.ndim != 1 or w.size < 2:
            raise ValueError("weights must be a 1-d vector (w_0, w_1, ..., w_n) with n >= 1")
        if not np.isfinite(w).all():
            raise ValueError("weights must be finite")
        if not allow_degenerate and not np.any(w[1:] != 0.0):
            raise ValueError(
                "all coordinate weights are zero (constant function); "
                "pass allow_degenerate=True to permit this"
            )
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return self.weights.size - 1

    def eval(self, x) -> int:
        """Evaluate at one point x in {+1,-1}^n; returns +1 or -1."""
        arr = np.asarray(x, dtype=np.float64)
        if arr.shape != (self.n,):
            raise ValueError(f"expected {self.n} coordinates, got shape {arr.shape}")
        if not np.isin(arr, (-1.0, 1.0)).all():
            raise ValueError("coordinates must all be +1 or -1")
        terms = [float(self.weights[0])] + list(self.weights[1:] * arr)
        sign = _exact_sign(terms)
        return 1 if sign > 0 else -1

    def to_dict(self) -> dict:
        return {"n": self.n, "weights": [float(v) for v in self.weights]}

    @classmethod
    def from_dict(cls, data: dict) -> "Ltf":
        if not isinstance(data, dict) or "weights" not in data:
            raise ValueError('expected an object with "weights" (and optionally "n")')
        weights = data["weights"]
        if "n" in data and data["n"] != len(weights) - 1:
            raise ValueError(f'"n" = {data["n"]} does not match {len(weights)} weights')
        return cls(np.asarray(weights, dtype=np.float64))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Ltf):
            return NotImplemented
        return self.weights.tobytes() == other.weights.tobytes()

    def __hash__(self) -> int:
        return hash(self.weights.tobytes())

    def __repr__(self) -> str:
        return f"Ltf(weights={self.weights.tolist()})"


def to_boolean_function(ltf: Ltf) -> BooleanFunction:
    """Exact truth table of the threshold function over all 2^n inputs."""
    n = ltf.n
    if n > N_MAX:
        raise ValueError(f"arity {n} exceeds the exact-enumeration cap {N_MAX}")
    w0 = float(ltf.weights[0])
    rest = ltf.weights[1:]
    margins = rademacher_sums(rest, lead=w0)
    bits = margins > 0.0
    slack = _chain_slack(float(np.sum(np.abs(ltf.weights))), n + 1)
    risky = np.nonzero(np.abs(margins) <= slack)[0]
    for k in risky:
        bits[k] = _exact_sign(_signed_terms(w0, rest, int(k))) > 0
    return BooleanFunction(n, np.packbits(bits, bitorder="little"))


def influence_i_exact(ltf: Ltf, i: int) -> float:
    """Exact influence of x_i via the boundary interval.

    Flipping x_i changes the sign iff the remaining margin
    S = w_0 + sum_{j != i} w_j x_j lands in the half-open interval
    (-|w_i|, |w_i|]; the probability is counted over all 2^(n-1)
    assignments of the other coordinates with exact comparisons.
    """
    n = ltf.n
    if not 1 <= i <= n:
        raise ValueError(f"coordinate index must be in [1, {n}], got {i}")
    if n - 1 > N_MAX:
        raise ValueError(f"enumeration arity {n - 1} exceeds the cap {N_MAX}")
    w0 = float(ltf.weights[0])
    others = np.concatenate([ltf.weights[1:i], ltf.weights[i + 1 :]])
    ai = abs(float(ltf.weights[i]))
    sums = rademacher_sums(others, lead=w0)
    upper = sums <= ai
    lower = sums > -ai
    slack = _chain_slack(float(np.sum(np.abs(ltf.weights))) + ai, n + 1)
    risky = np.nonzero((np.abs(sums - ai) <= slack) | (np.abs(sums + ai) <= slack))[0]
    for k in risky:
        terms = _signed_terms(w0, others, int(k))
        upper[k] = _exact_sign(terms + [-ai]) <= 0
        lower[k] = _exact_sign(terms + [ai]) > 0
    count = int(np.count_nonzero(upper & lower))
    return count / float(sums.size)


def influences_exact(ltf: Ltf) -> np.ndarray:
    """Per-coordinate exact influences (interval enumeration for each i)."""
    return np.array([influence_i_exact(ltf, i) for i in range(1, ltf.n + 1)])


def homogenize(ltf: Ltf) -> Ltf:
    """Fold the threshold into a new first coordinate.

    Returns g on n+1 variables with weights (0, w_0, w_1, ..., w_n), so
    old coordinate i corresponds to new coordinate i+1 and the old
    threshold rides on the new x_1.
    """
    return Ltf(np.concatenate([[0.0], ltf.weights]))


def is_tau_regular(ltf: Ltf, tau: float) -> bool:
    """True iff every weight of the unit-norm rescaling is at most tau.

    The l2 normalization runs over all entries including w_0.
    """
    if not (tau > 0.0):
        raise ValueError(f"tau must be positive, got {tau}")
    norm = float(np.linalg.norm(ltf.weights))
    if norm == 0.0:
        raise ValueError("cannot normalize an all-zero weight vector")
    return bool(np.all(np.abs(ltf.weights) / norm <= tau))
