import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from quasiqec.vbs.decoder import bulk_x_decode, decoder_monte_carlo, majority_failure, syndrome_of


@settings(max_examples=60, deadline=None)
@given(st.integers(3, 21).flatmap(lambda n: st.sets(st.integers(1, n), max_size=(n - 1) // 2).map(lambda s: (n, s))))
def test_minority_errors_are_decoded_exactly(case):
    n, flipped = case
    e = np.zeros(n, dtype=np.int8)
    for k in flipped:
        e[k - 1] = 1
    assert bulk_x_decode(syndrome_of(e), n) == set(flipped)


@settings(max_examples=30, deadline=None)
@given(st.integers(3, 15).flatmap(lambda n: st.lists(st.integers(0, 1), min_size=n, max_size=n)))
def test_correction_clears_syndrome(bits):
    e = np.array(bits, dtype=np.int8)
    n = len(e)
    c = np.zeros(n, dtype=np.int8)
    for k in bulk_x_decode(syndrome_of(e), n):
        c[k - 1] = 1
    assert not syndrome_of(e ^ c).any()
    assert c.sum() <= n / 2


def test_syndrome_flags_boundaries():
    e = np.array([0, 1, 1, 0, 0])
    assert syndrome_of(e).tolist() == [1, 0, 1, 0, 0]


@pytest.mark.parametrize("s", [[1, 0, 0], [1, 2, 1], [1, 1]])
def test_invalid_syndromes_rejected(s):
    with pytest.raises(ValueError):
        bulk_x_decode(s, 3)


def test_majority_failure_small_case():
    # N = 3: failure needs two or three flips
    p = 0.1
    assert np.isclose(majority_failure(3, p), 3 * p**2 * (1 - p) + p**3)


@pytest.mark.parametrize("p", [0.05, 0.3, 0.5])
def test_monte_carlo_agrees_with_binomial(p):
    stats = decoder_monte_carlo(11, p, 40_000, seed=5)
    tol = 4 * np.sqrt(max(stats.analytic * (1 - stats.analytic), 1 / stats.samples) / stats.samples)
    assert abs(stats.rate - stats.analytic) < tol


def test_monte_carlo_is_reproducible():
    a = decoder_monte_carlo(9, 0.2, 5000, seed=1).failures
    b = decoder_monte_carlo(9, 0.2, 5000, seed=1, batch=700).failures
    assert a == b
