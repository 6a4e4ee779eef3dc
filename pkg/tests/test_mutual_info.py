import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from npgraph.errors import EmptyStageList, GridMismatch
from npgraph.forest import fit_forest, kruskal_stages
from npgraph.graphs import Graph
from npgraph.kde import GridSpec, KdeTable, kde_bivariate, kde_univariate, rescale_to_unit_cube
from npgraph.mutual_info import (build_tables, entropy_grid, heldout_edge_weights,
                                 heldout_loglik_curve, heldout_loglik_select, heldout_risk,
                                 heldout_risk_curve, heldout_risk_of_edges, mi_grid, mi_matrix)
from npgraph.numerics import make_rng
from oracles import gaussian_mi, normal_entropy


def gaussian_pair(rho, n, seed):
    z = make_rng(seed).standard_normal((n, 2))
    return np.column_stack([z[:, 0], rho * z[:, 0] + np.sqrt(1 - rho**2) * z[:, 1]])


def unit(x):
    return rescale_to_unit_cube(x)[0]


def const_table(c, dims, m=50):
    g = GridSpec.midpoints(m)
    return KdeTable(np.full((m,) * dims, float(c)), g, (0.1,) * dims, 1e-8)


def test_factorizing_joint_gives_zero():
    rng = make_rng(0)
    g = GridSpec.midpoints(40)
    a = kde_univariate(rng.uniform(size=30), 0.1, g)
    b = kde_univariate(rng.uniform(size=30), 0.2, g)
    joint = KdeTable(np.outer(a.values, b.values), g, (0.1, 0.2), 1e-8)
    assert mi_grid(joint, a, b) == 0.0


def test_mi_swap_symmetry_exact():
    u = unit(gaussian_pair(0.6, 500, 1))
    t = build_tables(u)
    a = mi_grid(t.pair(0, 1), t.univariate[0], t.univariate[1])
    b = mi_grid(t.pair(1, 0), t.univariate[1], t.univariate[0])
    assert a == b


def test_mi_independent_near_zero():
    u = unit(gaussian_pair(0.0, 5000, 2))
    assert abs(mi_matrix(u).entries[0, 1]) <= 0.01


def test_mi_attenuated_by_smoothing():
    # Gaussian smoothing shrinks rho to about rho / (1 + c^2), c = 1.06 n^(-1/6)
    n = 5000
    u = unit(gaussian_pair(0.5, n, 3))
    est = mi_matrix(u).entries[0, 1]
    shrunk = 0.5 / (1 + (1.06 * n ** (-1 / 6)) ** 2)
    assert est < gaussian_mi(0.5)
    assert abs(est - gaussian_mi(shrunk)) <= 0.02


def test_grid_mismatch():
    a = const_table(1, 1, 50)
    with pytest.raises(GridMismatch):
        mi_grid(const_table(1, 2, 40), a, a)


def test_entropy_examples():
    assert entropy_grid(const_table(1, 1)) == 0.0
    assert entropy_grid(const_table(2, 1)) < 0
    x = 0.5 + 0.1 * make_rng(4).standard_normal(5000)
    t = build_tables(x[:, None])
    assert abs(entropy_grid(t.univariate[0]) - normal_entropy(0.1)) <= 0.05


def test_mi_matrix_shape_and_equivariance():
    rng = make_rng(5)
    z = rng.standard_normal((600, 3))
    x = np.column_stack([z[:, 0], z[:, 0] + z[:, 1], z[:, 2]])
    u = unit(x)
    m = mi_matrix(u).entries
    assert_array_equal(m, m.T)
    assert_array_equal(np.diag(m), 0)
    p = [2, 0, 1]
    assert_allclose(mi_matrix(u[:, p]).entries, m[np.ix_(p, p)], rtol=1e-12, atol=1e-15)
    two = mi_matrix(u[:, :2]).entries
    assert two[0, 1] == two[1, 0] != 0


def test_chain_mi_ordering():
    rng = make_rng(6)
    n, r = 5000, 0.6
    x1 = rng.standard_normal(n)
    x2 = r * x1 + np.sqrt(1 - r * r) * rng.standard_normal(n)
    x3 = r * x2 + np.sqrt(1 - r * r) * rng.standard_normal(n)
    m = mi_matrix(unit(np.column_stack([x1, x2, x3]))).entries
    assert m[0, 1] - m[0, 2] >= 0.02
    assert m[1, 2] - m[0, 2] >= 0.02


@pytest.fixture(scope="module")
def strong_pair():
    u = unit(gaussian_pair(0.8, 4000, 7))
    return build_tables(u[:2000]), build_tables(u[2000:]), u


def test_risk_empty_forest_is_vertex_terms(strong_pair):
    t1, t2, _ = strong_pair
    m = t1.grid.m
    expect = -sum(np.sum(t2.univariate[k].values * np.log(t1.univariate[k].values)) / m
                  for k in range(2))
    assert heldout_risk_of_edges((), t1, t2) == pytest.approx(expect, rel=1e-14)


def test_risk_tree_beats_empty(strong_pair):
    t1, t2, _ = strong_pair
    assert heldout_risk_of_edges(((0, 1),), t1, t2) < heldout_risk_of_edges((), t1, t2)


def test_heldout_weights(strong_pair):
    t1, _, u = strong_pair
    w = heldout_edge_weights(t1, u[2000:])
    assert_array_equal(w, w.T)
    assert abs(w[0, 1] - gaussian_mi(0.8)) <= 0.05


def test_heldout_weights_product_density_near_zero():
    rng = make_rng(8)
    u = unit(rng.standard_normal((3000, 2)))
    t = build_tables(u)
    # in-sample evaluation carries a small positive bias
    assert abs(heldout_edge_weights(t, u)[0, 1]) <= 0.02


def test_curve_is_cumulative_sum():
    rng = make_rng(9)
    u = unit(rng.standard_normal((800, 4)) @ np.triu(np.ones((4, 4))))
    t1 = build_tables(u[:400])
    stages = kruskal_stages(mi_matrix(None, tables=t1).entries)
    curve = heldout_loglik_curve(stages, t1, u[400:])
    assert len(curve.loglik) == 4
    assert_allclose(np.diff(curve.loglik), curve.edge_terms, rtol=1e-12, atol=1e-14)
    assert curve.k_hat == heldout_loglik_select(stages, t1, u[400:])
    assert curve.loglik[curve.k_hat] == max(curve.loglik)
    with pytest.raises(EmptyStageList):
        heldout_loglik_curve([], t1, u[400:])


def test_select_independent_pair_rarely_adds_edge():
    hits = 0
    for seed in range(20):
        x = make_rng(100 + seed).standard_normal((4000, 2))
        hits += fit_forest(x, seed=seed).selection.k_hat == 0
    assert hits >= 18


def test_select_strong_chain():
    hits = 0
    for seed in range(20):
        rng = make_rng(200 + seed)
        x1 = rng.standard_normal(4000)
        x2 = 0.8 * x1 + 0.6 * rng.standard_normal(4000)
        x3 = 0.8 * x2 + 0.6 * rng.standard_normal(4000)
        hits += fit_forest(np.column_stack([x1, x2, x3]), seed=seed).selection.k_hat == 2
    assert hits >= 18


def test_risk_of_model(strong_pair):
    _, _, u = strong_pair
    model = fit_forest(u, seed=0)
    r = heldout_risk(model, u, rescaled=True)
    assert np.isfinite(r)
    empty = type(model)(Graph(model.labels), model.tables, model.maps)
    assert r < heldout_risk(empty, u, rescaled=True)


def test_risk_curve_length(strong_pair):
    t1, t2, _ = strong_pair
    stages = kruskal_stages(mi_matrix(None, tables=t1).entries)
    assert len(heldout_risk_curve(stages, t1, t2)) == 2


def test_tables_pair_transposes():
    u = unit(gaussian_pair(0.3, 200, 10))
    t = build_tables(u, bandwidths=[0.05, 0.09])
    assert_array_equal(t.pair(1, 0).values, t.pair(0, 1).values.T)
    assert t.pair(1, 0).bandwidth == (0.09, 0.05)
    ref = kde_bivariate((u[:, 0], u[:, 1]), (0.05, 0.09), t.grid)
    assert_array_equal(t.pair(0, 1).values, ref.values)
