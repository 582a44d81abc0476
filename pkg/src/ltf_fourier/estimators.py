"""Monte Carlo estimators with distribution-free confidence intervals.

Sampling is organized in fixed-size blocks, each drawing from a stream
derived from the caller's stream by the block index.  Merging block counts
is associative, so results are identical no matter how blocks are
scheduled, and a given (stream, samples) pair always produces the same
Estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .bounds import normal_cdf
from .ltf import Ltf
from .streams import Stream

BLOCK_SAMPLES = 8192


@dataclass(frozen=True)
class Estimate:
    """Point estimate with a two-sided confidence half-width."""

    value: float
    half_width: float
    samples: int
    confidence: float
    method: str
    seed: str | None = None

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "half_width": self.half_width,
            "samples": self.samples,
            "confidence": self.confidence,
            "method": self.method,
            "seed": self.seed,
        }


def hoeffding_half_width(samples: int, confidence: float) -> float:
    """Half-width sqrt(ln(2 / (1 - confidence)) / (2 samples)) for a mean
    of [0, 1]-valued draws."""
    if not (isinstance(samples, (int, np.integer)) and samples >= 1):
        raise ValueError(f"samples must be a positive integer, got {samples}")
    if not 0.0 < confidence < 1.0:
        raise ValueError(f"confidence must be in (0, 1), got {confidence}")
    return math.sqrt(math.log(2.0 / (1.0 - confidence)) / (2.0 * int(samples)))


def _blocks(samples: int):
    start = 0
    index = 0
    while start < samples:
        size = min(BLOCK_SAMPLES, samples - start)
        yield index, size
        index += 1
        start += size


def _sign_matrix(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return 2.0 * rng.integers(0, 2, size=(rows, cols)).astype(np.float64) - 1.0


def mc_influence_i(
    ltf: Ltf, i: int, samples: int, stream: Stream, confidence: float = 0.99
) -> Estimate:
    """Estimate the influence of x_i as the frequency of boundary hits."""
    n = ltf.n
    if not 1 <= i <= n:
        raise ValueError(f"coordinate index must be in [1, {n}], got {i}")
    half_width = hoeffding_half_width(samples, confidence)
    w0 = float(ltf.weights[0])
    w = ltf.weights[1:]
    ai = abs(float(w[i - 1]))
    hits = 0
    for index, size in _blocks(int(samples)):
        rng = stream.child(index).generator()
        x = _sign_matrix(rng, size, n)
        margin = x @ w + w0
        excl = margin - x[:, i - 1] * w[i - 1]
        hits += int(np.count_nonzero((excl > -ai) & (excl <= ai)))
    return Estimate(
        value=hits / float(samples),
        half_width=half_width,
        samples=int(samples),
        confidence=confidence,
        method="mc_boundary_frequency",
        seed=stream.label,
    )


def mc_total_influence(
    ltf: Ltf, samples: int, stream: Stream, confidence: float = 0.99
) -> Estimate:
    """Estimate total influence as mean sensitivity (flips over all i).

    The per-sample sensitivity lies in [0, n], so the Hoeffding half-width
    is scaled by n.
    """
    n = ltf.n
    half_width = n * hoeffding_half_width(samples, confidence)
    w0 = float(ltf.weights[0])
    w = ltf.weights[1:]
    total = 0
    for index, size in _blocks(int(samples)):
        rng = stream.child(index).generator()
        x = _sign_matrix(rng, size, n)
        margin = x @ w + w0
        flipped = margin[:, None] - 2.0 * x * w[None, :]
        total += int(np.count_nonzero((margin > 0.0)[:, None] != (flipped > 0.0)))
    return Estimate(
        value=total / float(samples),
        half_width=half_width,
        samples=int(samples),
        confidence=confidence,
        method="mc_sensitivity",
        seed=stream.label,
    )


def mc_cdf_sup_distance(
    a,
    samples: int,
    stream: Stream,
    grid_points: int = 256,
    confidence: float = 0.99,
) -> Estimate:
    """Estimate sup_x |Pr[Z < x] - Phi(x)| for Z = sum a_j x_j / l2norm(a).

    The empirical CDF is compared with Phi at every sample atom (both
    one-sided limits) and on a Phi-quantile grid; the half-width is the
    two-sided DKW band for the empirical CDF.
    """
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("expected a non-empty 1-d weight vector")
    norm = float(np.linalg.norm(arr))
    if norm == 0.0:
        raise ValueError("all-zero weight vector")
    if grid_points < 0:
        raise ValueError(f"grid_points must be non-negative, got {grid_points}")
    half_width = hoeffding_half_width(samples, confidence)
    chunks = []
    for index, size in _blocks(int(samples)):
        rng = stream.child(index).generator()
        x = _sign_matrix(rng, size, arr.size)
        chunks.append((x @ arr) / norm)
    z = np.sort(np.concatenate(chunks))
    points = z
    if grid_points:
        qs = np.arange(1, grid_points + 1) / (grid_points + 1.0)
        points = np.concatenate([z, special.ndtri(qs)])
    left = np.searchsorted(z, points, side="left") / float(samples)
    right = np.searchsorted(z, points, side="right") / float(samples)
    phi = normal_cdf(points)
    value = float(max(np.max(np.abs(left - phi)), np.max(np.abs(right - phi))))
    return Estimate(
        value=value,
        half_width=half_width,
        samples=int(samples),
        confidence=confidence,
        method="mc_dkw_sup_distance",
        seed=stream.label,
    )
