"""Shared brute-force oracles, kept deliberately independent of the
library's fast paths: spectra via an explicit character matrix, influences
via single-bit flips, sign sums via math.fsum."""

from __future__ import annotations

import itertools
import math

import numpy as np
import pytest

from ltf_fourier.spectral import BooleanFunction


def input_signs(arity: int) -> np.ndarray:
    """Row k = the point with x_i = +1 iff bit i-1 of k is set; shape (2^n, n)."""
    ks = np.arange(1 << arity)[:, None]
    bits = (ks >> np.arange(arity)[None, :]) & 1
    return 2.0 * bits - 1.0


def character_matrix(arity: int) -> np.ndarray:
    """chi[S, k] = product of x_i over i in S at input k."""
    size = 1 << arity
    ks = np.arange(size)
    chi = np.empty((size, size))
    for s in range(size):
        # chi_S(x) = (-1)^{# coordinates of S set to -1}
        neg = s & ~ks & (size - 1)
        counts = np.array([bin(int(v)).count("1") for v in neg])
        chi[s] = np.where(counts % 2 == 1, -1.0, 1.0)
    return chi


def brute_spectrum(f: BooleanFunction) -> np.ndarray:
    chi = character_matrix(f.arity)
    return chi @ f.signs() / (1 << f.arity)


def naive_influences(f: BooleanFunction) -> np.ndarray:
    """Per-coordinate flip probabilities from the raw truth table."""
    signs = f.signs()
    size = 1 << f.arity
    per = np.empty(f.arity)
    for i in range(1, f.arity + 1):
        flipped = np.arange(size) ^ (1 << (i - 1))
        per[i - 1] = np.count_nonzero(signs != signs[flipped]) / size
    return per


def fsum_ltf_truth(weights) -> np.ndarray:
    """Truth table via per-point math.fsum; exact for any float weights."""
    w = list(map(float, weights))
    n = len(w) - 1
    out = np.empty(1 << n)
    for k in range(1 << n):
        terms = [w[0]]
        for i in range(1, n + 1):
            terms.append(w[i] if (k >> (i - 1)) & 1 else -w[i])
        out[k] = 1.0 if math.fsum(terms) > 0.0 else -1.0
    return out


def fsum_interval_count(lead: float, coeffs, bound: float) -> int:
    """# sign patterns with -bound < lead + sum(eps*coeffs) <= bound, exactly."""
    count = 0
    for eps in itertools.product((-1.0, 1.0), repeat=len(coeffs)):
        terms = [lead] + [e * c for e, c in zip(eps, coeffs)]
        above = math.fsum(terms + [bound])       # s + bound > 0  <=>  s > -bound
        below = math.fsum(terms + [-bound])      # s - bound <= 0 <=>  s <= bound
        if above > 0.0 and below <= 0.0:
            count += 1
    return count


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
