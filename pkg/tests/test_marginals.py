import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose, assert_array_equal

from npgraph.dataset import Dataset
from npgraph.errors import ConstantColumn, DomainError, TooFewRows
from npgraph.marginals import (IdentificationMode, default_delta, empirical_cdf, fit_transform,
                               transformed_covariance, winsorized_cdf)
from npgraph.numerics import make_rng, std_normal_quantile

# 1 / (4 n^(1/4) sqrt(pi log n)) at 30 digits (mpmath)
DELTA_118 = 0.019593147895596598
DELTA_100 = 0.020784626763613686


def test_default_delta_values():
    assert abs(default_delta(118) - 0.019592) <= 1e-5
    assert abs(default_delta(100) - 0.020785) <= 1e-5
    assert_allclose(default_delta(118), DELTA_118, rtol=1e-13)
    assert_allclose(default_delta(100), DELTA_100, rtol=1e-13)


def test_default_delta_monotone_and_bounded():
    n = np.arange(2, 5000)
    d = np.array([default_delta(k) for k in n])
    assert np.all(np.diff(d) < 0)
    assert np.all((d > 0) & (d < 0.5))
    assert default_delta(1000) < default_delta(100)


@pytest.mark.parametrize("n", [1, 0, -3])
def test_default_delta_domain(n):
    with pytest.raises(DomainError):
        default_delta(n)


def test_empirical_cdf_examples():
    col = np.array([1.0, 2.0, 3.0])
    assert empirical_cdf(col, 0.5) == 0.0
    assert empirical_cdf(col, 3.0) == 1.0
    assert_allclose(empirical_cdf(col, 2.0), 2 / 3)


def test_empirical_cdf_counts_ties_with_le():
    col = np.array([1.0, 2.0, 2.0, 5.0])
    assert empirical_cdf(col, 2.0) == 0.75
    assert empirical_cdf(col, 1.9999) == 0.25


def test_winsorized_cdf_clamps():
    col = np.arange(1.0, 101.0)
    delta = 0.0208
    assert winsorized_cdf(col, -1.0, delta) == delta
    assert winsorized_cdf(col, 100.0, delta) == 1 - delta
    assert winsorized_cdf(col, 50.0, delta) == 0.5


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-100, 100), min_size=2, max_size=40),
       st.floats(-150, 150), st.floats(0.001, 0.49))
def test_clamp_consistency(values, t, delta):
    col = np.sort(values)
    f = empirical_cdf(col, t)
    w = winsorized_cdf(col, t, delta)
    if delta <= f <= 1 - delta:
        assert w == f
    else:
        assert w == (delta if f < delta else 1 - delta)


def test_median_scores_zero():
    col = np.arange(1.0, 101.0)[:, None]
    t = fit_transform(col)
    assert abs(t.transform(np.array([[50.0]]))[0, 0]) <= 0.02
    assert abs(t.transform(np.array([[50.5]]))[0, 0]) <= 0.02


def test_scores_bounded_and_monotone():
    x = make_rng(3).standard_normal((300, 3))
    t = fit_transform(x)
    z = t.transform(x)
    lo, hi = t.score_bounds()
    assert_allclose(lo, std_normal_quantile(default_delta(300)))
    assert np.all(np.isfinite(z))
    assert np.all((z >= lo) & (z <= hi))
    for j in range(3):
        order = np.argsort(x[:, j])
        assert np.all(np.diff(z[order, j]) >= 0)


def test_match_moments_recovers_mean_and_sd():
    x = 3.0 + 2.0 * make_rng(11).standard_normal((5000, 1))
    t = fit_transform(x, mode=IdentificationMode.MATCH_MOMENTS)
    z = t.transform(x)[:, 0]
    assert abs(z.mean() - 3.0) <= 0.1
    assert abs(z.std() - 2.0) <= 0.1


def test_sigma_hat_divisor_n():
    x = np.array([[0.0], [2.0], [4.0], [6.0]])
    t = fit_transform(x, mode="moments")
    assert_allclose(t.sample_std, [np.sqrt(5.0)])
    assert_allclose(t.sample_mean, [3.0])


def test_errors():
    with pytest.raises(TooFewRows):
        fit_transform(np.ones((1, 2)))
    with pytest.raises(ConstantColumn) as exc:
        fit_transform(np.column_stack([np.arange(5.0), np.ones(5)]))
    assert exc.value.column == 1


def test_covariance_d1_and_identical_columns():
    col = make_rng(0).standard_normal(50)
    t = fit_transform(col[:, None])
    s = transformed_covariance(t, col[:, None])
    assert s.shape == (1, 1) and s[0, 0] > 0
    x = np.column_stack([col, col])
    s = transformed_covariance(fit_transform(x), x)
    assert s[0, 1] == s[0, 0] == s[1, 1]


def test_covariance_recovers_correlation():
    rng = make_rng(1)
    z = rng.standard_normal((5000, 2))
    x = np.column_stack([z[:, 0], 0.5 * z[:, 0] + np.sqrt(0.75) * z[:, 1]])
    s = transformed_covariance(fit_transform(x), x)
    assert abs(s[0, 1] / np.sqrt(s[0, 0] * s[1, 1]) - 0.5) <= 0.05
    assert_array_equal(s, s.T)


@pytest.mark.parametrize("f", [lambda v: v ** 3, np.exp, lambda v: np.arctan(v) * 7 - 2])
def test_rank_invariance_bit_exact(f):
    x = make_rng(8).standard_normal((200, 4))
    y = f(x)
    a = transformed_covariance(fit_transform(x), x)
    b = transformed_covariance(fit_transform(y), y)
    assert_array_equal(a, b)


def test_accepts_dataset_and_out_of_sample():
    x = make_rng(2).standard_normal((40, 2))
    data = Dataset.from_array(x)
    t = fit_transform(data)
    z = t.transform(np.array([[-100.0, 100.0]]))
    lo, hi = t.score_bounds()
    assert_allclose(z, [[lo, hi]])
