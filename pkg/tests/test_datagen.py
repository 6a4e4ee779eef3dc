import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose, assert_array_equal
from scipy import stats

from npgraph.datagen import (Family, NpnSpec, Transform, npn_log_density, random_spanning_tree,
                             random_sparse_precision, sample_gaussian, sample_npn,
                             sample_tree_gaussian, tree_covariance)
from npgraph.errors import DomainError, SingularJacobian, TooManyEdges
from npgraph.graphs import Graph, is_acyclic
from npgraph.marginals import fit_transform, transformed_covariance
from npgraph.numerics import is_positive_definite
from oracles import quad_total_mass

FAMILIES = [("power", 0.8), ("power", 0.9), ("logistic", 5), ("logistic", 10),
        ("sinusoid", 5), ("sinusoid", 10)]
S2 = np.array([[1.0, 0.5], [0.5, 1.0]])


def kinks(t):
    """Points where f' is not smooth, for splitting the quadrature."""
    if t.family is Family.POWER:
        return [0.0]
    if t.family is Family.LOGISTIC:
        return list(range(-60, 61))
    period = 2 * np.pi / t.alpha
    return list(np.arange(-60, 61, period / 2) + np.pi / t.alpha)


@pytest.mark.parametrize("family,alpha", FAMILIES)
def test_roundtrip(family, alpha):
    t = Transform(family, alpha)
    z = np.linspace(-6, 6, 2001)
    assert np.max(np.abs(t(t.inverse(z)) - z)) <= 1e-8


@pytest.mark.parametrize("family,alpha", FAMILIES)
def test_monotone(family, alpha):
    t = Transform(family, alpha)
    x = np.linspace(-5, 5, 10_001)
    assert np.all(np.diff(t(x)) >= 0)


@pytest.mark.parametrize("family,alpha", FAMILIES)
def test_density_integrates_to_one(family, alpha):
    t = Transform(family, alpha)
    spec = NpnSpec([0.0], [[1.0]], t)

    def logpdf(x):
        try:
            return npn_log_density(spec, np.array([x]))
        except SingularJacobian:
            return -np.inf

    assert abs(quad_total_mass(logpdf, kinks(t), -12, 12) - 1) <= 1e-3


def test_discontinuous_logistic_has_gaps():
    t = Transform("logistic", 5, discontinuous=True)
    below, above = t(np.array([1 - 1e-12, 1.0]))
    assert above - below == pytest.approx(2 / (1 + np.exp(2.5)), abs=1e-9)
    spec = NpnSpec([0.0], [[1.0]], t)
    mass = quad_total_mass(lambda x: npn_log_density(spec, np.array([x])), kinks(t), -12, 12)
    assert mass < 0.9


def test_continuous_logistic_endpoints():
    t = Transform("logistic", 7)
    assert_allclose(t(np.array([0.0, 1.0, 2.5])), [0.0, 1.0, 2.5], atol=1e-15)


def test_power_one_is_identity():
    z = np.linspace(-3, 3, 7)
    assert_array_equal(Transform("power", 1.0).inverse(z), z)
    spec_i = NpnSpec([0, 0], S2, Transform())
    spec_p = NpnSpec([0, 0], S2, Transform("power", 1.0))
    assert_allclose(sample_npn(spec_p, 20, 3).values, sample_npn(spec_i, 20, 3).values,
                    rtol=1e-15)


def test_identity_is_raw_gaussian_bit_for_bit():
    spec = NpnSpec([1.0, -2.0], S2, Transform())
    assert_array_equal(sample_npn(spec, 50, 11).values, sample_gaussian([1.0, -2.0], S2, 50, 11))


def test_identity_density_is_gaussian():
    spec = NpnSpec([0.3, -0.2], S2, Transform())
    x = np.array([[0.1, 0.7], [-1.0, 2.0]])
    ref = stats.multivariate_normal([0.3, -0.2], S2).logpdf(x)
    assert_allclose(npn_log_density(spec, x), ref, rtol=1e-13)


def test_singular_jacobian():
    spec = NpnSpec([0.0], [[1.0]], Transform("power", 0.8))
    with pytest.raises(SingularJacobian):
        npn_log_density(spec, np.array([0.0]))
    spec = NpnSpec([0.0], [[1.0]], Transform("sinusoid", 2.0))
    with pytest.raises(SingularJacobian):
        npn_log_density(spec, np.array([np.pi / 2]))


def test_spec_validation():
    with pytest.raises(DomainError):
        Transform("power", 0.0)
    with pytest.raises(DomainError):
        Transform("sinusoid", 0.5)
    with pytest.raises(DomainError):
        NpnSpec([0, 0], np.eye(3), Transform())
    with pytest.raises(DomainError):
        NpnSpec([0, 0], S2, (Transform(),))


def test_power_margins_scores_correlation():
    spec = NpnSpec([0, 0], S2, (Transform("power", 0.9), Transform("power", 0.8)))
    x = sample_npn(spec, 5000, 1).values
    s = transformed_covariance(fit_transform(x), x)
    assert abs(s[0, 1] / np.sqrt(s[0, 0] * s[1, 1]) - 0.5) <= 0.05


def test_random_sparse_precision():
    omega, g = random_sparse_precision(10, 10, seed=3)
    off = np.abs(np.triu(omega, 1)) > 1e-12
    assert off.sum() == 10 == g.n_edges
    assert set(zip(*np.nonzero(off))) == g.edge_set()
    mags = np.abs(omega[off])
    assert np.all((mags >= 0.2) & (mags <= 0.5))
    assert is_positive_definite(omega)
    assert_array_equal(omega, omega.T)
    omega0, g0 = random_sparse_precision(4, 0, seed=1)
    assert_array_equal(omega0, np.eye(4))
    with pytest.raises(TooManyEdges):
        random_sparse_precision(4, 7, seed=0)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 12), st.integers(0, 10_000))
def test_random_tree_is_spanning_tree(d, seed):
    t = random_spanning_tree(d, seed)
    assert t.n_edges == d - 1 and is_acyclic(d, t.edges)


def test_tree_gaussian_pair():
    data, tree = sample_tree_gaussian(2, 0.6, seed=0, n=5000)
    assert tree.edges == ((0, 1),)
    assert abs(np.corrcoef(data.values.T)[0, 1] - 0.6) <= 0.05


def test_tree_gaussian_independent_when_rho_zero():
    data, _ = sample_tree_gaussian(4, 0.0, seed=1, n=5000)
    c = np.corrcoef(data.values.T)
    assert np.max(np.abs(c - np.eye(4))) <= 0.05
    assert_allclose(data.values.std(axis=0), 1, atol=0.05)


def test_path_correlation_product():
    path = Graph(("a", "b", "c"), ((0, 1), (1, 2)))
    sigma = tree_covariance(path, 0.6)
    assert sigma[0, 2] == pytest.approx(0.36)
    x = sample_gaussian(np.zeros(3), sigma, 5000, seed=2)
    assert abs(np.corrcoef(x.T)[0, 2] - 0.36) <= 0.05


def test_tree_gaussian_matches_tree_covariance():
    data, tree = sample_tree_gaussian(6, 0.5, seed=4, n=20000)
    assert_allclose(np.cov(data.values.T), tree_covariance(tree, 0.5), atol=0.04)


def test_sampling_seeded():
    spec = NpnSpec([0, 0], S2, Transform("sinusoid", 5))
    assert_array_equal(sample_npn(spec, 30, 8).values, sample_npn(spec, 30, 8).values)
