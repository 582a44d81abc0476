import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ltf_fourier.spectral import (
    N_MAX,
    BooleanFunction,
    entropy,
    from_truth_values,
    fwht_inplace,
    influence_combinatorial,
    influence_spectral,
    min_entropy,
    popcounts,
    wht,
)

from conftest import brute_spectrum, input_signs, naive_influences


def maj3() -> BooleanFunction:
    signs = np.sign(input_signs(3).sum(axis=1))
    return from_truth_values(3, signs)


def test_maj3_spectrum_frozen():
    spec = wht(maj3())
    expected = np.zeros(8)
    expected[0b001] = expected[0b010] = expected[0b100] = 0.5
    expected[0b111] = -0.5
    np.testing.assert_array_equal(spec.coeffs, expected)


def test_maj3_summary_quantities():
    spec = wht(maj3())
    assert entropy(spec) == 2.0
    assert min_entropy(spec) == 2.0
    assert influence_spectral(spec) == 1.5
    total, per = influence_combinatorial(maj3())
    assert total == 1.5
    np.testing.assert_array_equal(per, [0.5, 0.5, 0.5])


def test_dictator_concentrates_on_singleton():
    # f(x) = x_2 on 3 variables
    f = from_truth_values(3, input_signs(3)[:, 1])
    spec = wht(f)
    assert spec.coeffs[0b010] == 1.0
    assert np.count_nonzero(spec.coeffs) == 1
    assert entropy(spec) == 0.0
    assert min_entropy(spec) == 0.0
    assert influence_spectral(spec) == 1.0
    np.testing.assert_array_equal(influence_combinatorial(f)[1], [0.0, 1.0, 0.0])


def test_parity_concentrates_on_full_set():
    signs = np.prod(input_signs(4), axis=1)
    spec = wht(from_truth_values(4, signs))
    assert spec.coeffs[0b1111] == 1.0
    assert influence_spectral(spec) == 4.0


def test_constant_function_entropy():
    f = from_truth_values(2, [1, 1, 1, 1])
    spec = wht(f)
    assert spec.coeffs[0] == 1.0
    assert entropy(spec) == 0.0
    assert influence_spectral(spec) == 0.0


@pytest.mark.parametrize("arity", [1, 2, 3, 5, 8])
def test_wht_matches_character_sum(arity, rng):
    for _ in range(10):
        signs = rng.choice([-1.0, 1.0], size=1 << arity)
        f = from_truth_values(arity, signs)
        np.testing.assert_allclose(wht(f).coeffs, brute_spectrum(f), atol=1e-12)


@pytest.mark.parametrize("arity", [1, 3, 6])
def test_influences_match_flip_oracle(arity, rng):
    for _ in range(10):
        f = from_truth_values(arity, rng.choice([-1.0, 1.0], size=1 << arity))
        total, per = influence_combinatorial(f)
        np.testing.assert_array_equal(per, naive_influences(f))
        assert total == per.sum()
        assert abs(influence_spectral(wht(f)) - total) < 1e-9


def test_fwht_self_inverse(rng):
    a = rng.standard_normal((1, 64))
    b = a.copy()
    fwht_inplace(b)
    fwht_inplace(b)
    np.testing.assert_allclose(b, a * 64, rtol=1e-12)


@given(st.integers(1, 8), st.integers(0, 2**32 - 1))
@settings(max_examples=60, deadline=None)
def test_parseval_holds_for_any_function(arity, seed):
    gen = np.random.default_rng(seed)
    f = from_truth_values(arity, gen.choice([-1.0, 1.0], size=1 << arity))
    assert wht(f).parseval_defect() < 1e-9


@given(st.integers(1, 8), st.integers(0, 2**32 - 1))
@settings(max_examples=60, deadline=None)
def test_entropy_bounds(arity, seed):
    # 0 <= min-entropy <= entropy <= n
    gen = np.random.default_rng(seed)
    spec = wht(from_truth_values(arity, gen.choice([-1.0, 1.0], size=1 << arity)))
    h = entropy(spec)
    hmin = min_entropy(spec)
    assert -1e-12 <= hmin <= h + 1e-12
    assert h <= arity + 1e-12


def test_packing_round_trip(rng):
    signs = rng.choice([-1.0, 1.0], size=32)
    f = from_truth_values(5, signs)
    np.testing.assert_array_equal(f.signs(), signs)
    assert BooleanFunction.from_hex(5, f.to_hex()) == f


def test_hash_and_equality():
    f = from_truth_values(2, [1, -1, -1, 1])
    g = from_truth_values(2, [1, -1, -1, 1])
    h = from_truth_values(2, [1, -1, -1, -1])
    assert f == g and hash(f) == hash(g)
    assert f != h


def test_popcounts_small():
    np.testing.assert_array_equal(popcounts(3), [0, 1, 1, 2, 1, 2, 2, 3])


def test_truth_values_validated():
    with pytest.raises(ValueError):
        from_truth_values(2, [1, 0, -1, 1])
    with pytest.raises(ValueError):
        from_truth_values(2, [1, 1, 1])
    with pytest.raises(ValueError):
        from_truth_values(N_MAX + 1, np.ones(1 << (N_MAX + 1)))


def test_entropy_rejects_non_parseval():
    from ltf_fourier.spectral import FourierSpectrum

    bad = FourierSpectrum(2, np.array([0.5, 0.5, 0.5, 0.6]))
    with pytest.raises(ValueError, match="Parseval"):
        entropy(bad)
