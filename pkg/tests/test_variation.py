import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from mfreqlab.errors import ParameterError, SizeError
from mfreqlab.variation import (
    TimeSeries,
    greedy_jump_count,
    max_jump_count,
    max_jump_count_exhaustive,
    splitting_integral_closed_form,
    splitting_integral_quadrature,
    sup_via_first_plus_variation,
    variation_rows,
    variation_seminorm,
    variation_seminorm_exhaustive,
)

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def series(vals):
    return TimeSeries.from_samples(np.asarray(vals, dtype=complex))


@pytest.mark.parametrize("vals,r,expected", [
    ([0, 1, 0], 2, math.sqrt(2)),
    ([0, 1, 3], 2, 3.0),
    ([2, 2, 2, 2], 3, 0.0),
    ([5], 2.5, 0.0),
    ([1, 4], 7, 3.0),
])
def test_examples(vals, r, expected, backend):
    assert variation_seminorm(series(vals), r, backend=backend) == pytest.approx(expected, abs=1e-15)
    assert variation_seminorm_exhaustive(series(vals), r) == pytest.approx(expected, abs=1e-15)


def test_r_must_exceed_one():
    with pytest.raises(ParameterError):
        variation_seminorm(series([0, 1]), 1.0)


def test_exhaustive_size_limit():
    with pytest.raises(SizeError):
        variation_seminorm_exhaustive(series(np.zeros(15)), 2.0)


def test_times_validation():
    with pytest.raises(ParameterError):
        TimeSeries([0, 0], [1, 2])
    with pytest.raises(ParameterError):
        TimeSeries([0, 1, 2], [1, 2])


def test_json_round_trip():
    s = TimeSeries([0.0, 0.5, 2.0], np.array([[1 + 2j, 0], [3, 1j], [0, -1]]))
    back = TimeSeries.from_json(json.loads(json.dumps(s.to_json())))
    assert np.array_equal(back.samples, s.samples) and np.array_equal(back.times, s.times)


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 10), st.integers(1, 4), st.sampled_from([2.2, 2.5, 3.0, 4.0]), st.integers(0, 2**31))
def test_dp_equals_exhaustive(T, dim, r, seed):
    rng = np.random.default_rng(seed)
    s = TimeSeries.from_samples(rng.standard_normal((T, dim)) + 1j * rng.standard_normal((T, dim)))
    ref = variation_seminorm_exhaustive(s, r)
    for b in ("python", None):
        got = variation_seminorm(s, r, backend=b)
        assert abs(got - ref) <= 1e-12 * max(ref, 1.0)


@settings(max_examples=100, deadline=None)
@given(arrays(float, st.integers(2, 12), elements=finite), st.floats(2.0, 6.0))
def test_monotone_in_exponent(vals, r):
    s = series(vals)
    assert variation_seminorm(s, r + 0.5) <= variation_seminorm(s, r) * (1 + 1e-12) + 1e-12


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**31), st.integers(2, 12), st.floats(1.5, 4.0))
def test_triangle_inequality(seed, T, r):
    rng = np.random.default_rng(seed)
    F = series(rng.standard_normal(T))
    G = series(rng.standard_normal(T))
    assert variation_seminorm(F + G, r) <= variation_seminorm(F, r) + variation_seminorm(G, r) + 1e-12


@pytest.mark.parametrize("vals,lam,expected", [
    ([0, 1, 0, 1], 1.0, 3),
    ([0, 1, 0, 1], 1.5, 0),
    ([3, 3, 3], 0.1, 0),
])
def test_jump_examples(vals, lam, expected, backend):
    s = series(vals)
    assert greedy_jump_count(s, lam, backend=backend) == expected
    assert max_jump_count(s, lam, backend=backend) == expected
    assert max_jump_count_exhaustive(s, lam) == expected


def test_jump_lambda_positive():
    with pytest.raises(ParameterError):
        greedy_jump_count(series([0, 1]), 0.0)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**31), st.integers(1, 10), st.integers(1, 3), st.floats(0.05, 3.0),
       st.sampled_from([2.2, 2.5, 3.0, 4.0]))
def test_jump_counting_fact(seed, T, dim, lam, r):
    rng = np.random.default_rng(seed)
    s = TimeSeries.from_samples(rng.standard_normal((T, dim)))
    J_max = max_jump_count(s, lam)
    assert J_max == max_jump_count_exhaustive(s, lam)
    assert greedy_jump_count(s, lam) <= J_max
    assert J_max <= (variation_seminorm(s, r) / lam) ** r * (1 + 1e-12)


def test_sup_bound(rng):
    assert sup_via_first_plus_variation(series([4 + 3j] * 3), 3) == pytest.approx(5.0)
    assert sup_via_first_plus_variation(series([0, 5]), 3) == pytest.approx(5.0)
    for _ in range(200):
        s = series(rng.standard_normal(20) + 1j * rng.standard_normal(20))
        assert sup_via_first_plus_variation(s, 3.0) >= np.abs(s.samples).max() - 1e-12


def test_variation_rows_match_single(backend, rng):
    vals = rng.standard_normal((6, 9, 2)) + 1j * rng.standard_normal((6, 9, 2))
    rows = variation_rows(vals, 2.7, backend=backend)
    for i in range(6):
        assert rows[i] == pytest.approx(variation_seminorm(TimeSeries.from_samples(vals[i]), 2.7), rel=1e-12)


@pytest.mark.parametrize("a,size,r,q", [(1.0, 1, 2.5, 3.0), (0.3, 8, 2.2, 3.0), (5.0, 16, 2.5, 4.0),
                                        (2.0, 1000, 2.05, 10.0)])
def test_splitting_integral(a, size, r, q):
    closed = splitting_integral_closed_form(a, size, r, q)
    quad = splitting_integral_quadrature(a, size, r, q)
    assert abs(closed - quad) <= 1e-6 * closed


def test_greedy_can_undercount_the_maximal_chain(backend):
    # greedy is anchored at the first time; the best chain starts later
    s = series([1.25, 0.75, 1.75])
    assert greedy_jump_count(s, 1.0, backend=backend) == 0
    assert max_jump_count(s, 1.0, backend=backend) == 1 == max_jump_count_exhaustive(s, 1.0)
