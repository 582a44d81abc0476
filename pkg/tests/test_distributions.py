import math

import numpy as np
import pytest
from scipy import integrate, stats

from ltf_fourier.distributions import (
    DEFAULT_TRUNCATION_GRID,
    WeightDistribution,
    normal_tail_lower_bound,
    parse_distribution,
    standard_normal,
    truncated_normal,
    uniform_symmetric,
)
from ltf_fourier.streams import Stream


def quad_standardized_moment(dist: WeightDistribution, k: int) -> float:
    """E|W/sd|^k via quadrature against the raw density; independent oracle."""
    sd = math.sqrt(dist.variance())
    if dist.kind == "uniform":
        a = dist.param
        val, _ = integrate.quad(lambda x: abs(x / sd) ** k / (2 * a), -a, a)
    elif dist.kind == "normal":
        val, _ = integrate.quad(
            lambda x: abs(x / sd) ** k * math.exp(-x * x / 2) / math.sqrt(2 * math.pi),
            -np.inf, np.inf)
    else:
        b = dist.param
        z = math.erf(b / math.sqrt(2))
        val, _ = integrate.quad(
            lambda x: abs(x / sd) ** k * math.exp(-x * x / 2)
            * 2 / (math.sqrt(2 * math.pi) * z), 0, b)
    return val


@pytest.mark.parametrize("dist", [
    uniform_symmetric(1.0),
    uniform_symmetric(2.5),
    standard_normal(),
    truncated_normal(1.0),
    truncated_normal(2.0),
    truncated_normal(3.5),
])
def test_moments_match_quadrature(dist):
    m = dist.moments()
    mu3 = quad_standardized_moment(dist, 3)
    assert abs(m.mu3 - mu3) < 1e-9
    # sigma2 = sd of W^2/var, sigma3 = sd of |W|^3/var^1.5 (standardized)
    var_sq = quad_standardized_moment(dist, 4) - 1.0
    var_cube = quad_standardized_moment(dist, 6) - mu3 * mu3
    assert abs(m.sigma2 - math.sqrt(var_sq)) < 1e-9
    assert abs(m.sigma3 - math.sqrt(var_cube)) < 1e-9


def test_normal_closed_forms():
    m = standard_normal().moments()
    assert abs(m.mu3 - 2.0 * math.sqrt(2.0) / math.sqrt(math.pi)) < 1e-15
    assert abs(m.sigma2 - math.sqrt(2.0)) < 1e-15
    assert abs(m.sigma3 - math.sqrt(15.0 - 8.0 / math.pi)) < 1e-15


def test_uniform_closed_forms():
    m = uniform_symmetric(7.0).moments()     # standardized moments are scale-free
    assert abs(m.mu3 - 3.0 * math.sqrt(3.0) / 4.0) < 1e-15
    assert abs(m.sigma2 - math.sqrt(4.0 / 5.0)) < 1e-15
    assert abs(m.sigma3 - math.sqrt(243.0 / 112.0)) < 1e-15
    assert abs(uniform_symmetric(2.0).variance() - 4.0 / 3.0) < 1e-15


def test_truncated_variance_against_scipy():
    b = 1.7
    ref = stats.truncnorm(-b, b).var()
    assert abs(truncated_normal(b).variance() - ref) < 1e-12


@pytest.mark.parametrize("dist,alpha,expected", [
    (uniform_symmetric(1.0), 0.5, 1.0 - 0.5 / math.sqrt(3.0)),
    (uniform_symmetric(1.0), 5.0, 0.0),
    (standard_normal(), 1.0, math.erfc(1.0 / math.sqrt(2.0))),
    (standard_normal(), 0.0, 1.0),
])
def test_tail_closed_forms(dist, alpha, expected):
    assert abs(dist.tail_ge(alpha) - expected) < 1e-15


def test_tail_matches_sampling():
    stream = Stream((99,))
    for idx, dist in enumerate((uniform_symmetric(1.0), standard_normal(),
                                truncated_normal(2.0))):
        x = dist.sample_standardized(stream.child(idx).generator(), 200_000)
        for alpha in (0.5, 1.0, 1.5):
            emp = np.mean(np.abs(x) >= alpha)
            assert abs(emp - dist.tail_ge(alpha)) < 0.01, (dist.kind, alpha)


def test_p_max_ge():
    d = standard_normal()
    p = d.tail_ge(2.0)
    assert abs(d.p_max_ge(10, 2.0) - (1.0 - (1.0 - p) ** 10)) < 1e-15


def test_standardized_samples_have_unit_variance():
    stream = Stream((7,))
    for idx, dist in enumerate((uniform_symmetric(3.0), standard_normal(),
                                truncated_normal(1.5))):
        x = dist.sample_standardized(stream.child(idx).generator(), 400_000)
        assert abs(x.var() - 1.0) < 0.02, dist.kind


def test_truncated_support_bound():
    d = truncated_normal(2.0)
    x = d.sample(Stream((3,)).generator(), 100_000)
    assert np.abs(x).max() <= 2.0


def test_sampling_deterministic():
    d = standard_normal()
    a = d.sample_standardized(Stream((5, 1)).generator(), 1000)
    b = d.sample_standardized(Stream((5, 1)).generator(), 1000)
    np.testing.assert_array_equal(a, b)


def test_normal_tail_lower_bound_sound():
    for alpha in (1.5, 2.0, 3.0, 4.0):
        actual = math.erfc(alpha / math.sqrt(2.0))
        lb = normal_tail_lower_bound(alpha)
        assert 0.0 < lb <= actual
        # asymptotically tight: within 10% by alpha = 3
        if alpha >= 3.0:
            assert lb > 0.9 * actual


def test_parse_round_trip():
    for d in (uniform_symmetric(2.0), standard_normal(), truncated_normal(1.0)):
        assert parse_distribution(d.to_dict()) == d
    assert parse_distribution({"kind": "uniform"}).param == 1.0


def test_parse_rejects_bad_input():
    with pytest.raises(ValueError):
        parse_distribution({"kind": "cauchy"})
    with pytest.raises(ValueError):
        parse_distribution({"kind": "uniform", "scale": 2.0})
    with pytest.raises(ValueError):
        parse_distribution({})
    with pytest.raises(ValueError):
        WeightDistribution("uniform", -1.0)
    with pytest.raises(ValueError):
        WeightDistribution("normal", 2.0)
    with pytest.raises(ValueError):
        truncated_normal(0.0)


def test_default_truncation_grid_is_usable():
    assert DEFAULT_TRUNCATION_GRID == (1.0, 2.0, 3.0)
    for b in DEFAULT_TRUNCATION_GRID:
        m = truncated_normal(b).moments()
        assert 0.0 < m.variance < 1.0  # truncation shrinks the normal variance


def test_wide_truncation_converges_to_normal():
    # as the cutoff grows the truncated moments approach the unbounded normal;
    # at b = 8 the missing tail mass is ~1e-15 so every field agrees tightly
    wide = truncated_normal(8.0).moments()
    exact = standard_normal().moments()
    for got, want in zip(wide, exact):
        assert got == pytest.approx(want, abs=1e-6)
