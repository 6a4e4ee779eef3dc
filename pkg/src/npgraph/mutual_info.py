"""Plug-in mutual information on the grid and held-out forest scoring.

All integrals are midpoint Riemann sums over the shared grid: a table mean
stands in for the integral over the unit square (or interval).
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, EmptyStageList, GridMismatch
from .kde import (DEFAULT_FLOOR, GridSpec, kde_bivariate, kde_univariate, kernel_matrix,
                  normal_reference_bandwidths)

_POINT_CHUNK = 512


@dataclass(frozen=True, eq=False)
class MiMatrix:
    entries: np.ndarray
    grid: GridSpec
    bandwidths: np.ndarray

    @property
    def d(self):
        return self.entries.shape[0]


def _same_grid(*tables):
    grid = tables[0].grid
    for t in tables[1:]:
        if t.grid != grid:
            raise GridMismatch("tables are tabulated on different grids")
    return grid


def mi_grid(joint, marg_i, marg_j):
    """``(1/m^2) sum_kl p(k,l) log(p(k,l) / (p_i(k) p_j(l)))``."""
    grid = _same_grid(joint, marg_i, marg_j)
    if joint.dims != 2 or marg_i.dims != 1 or marg_j.dims != 1:
        raise DomainError("mi_grid needs one bivariate and two univariate tables")
    p = joint.values
    ratio = p / np.outer(marg_i.values, marg_j.values)
    return float(np.sum(p * np.log(ratio)) / grid.m ** 2)


def entropy_grid(marg):
    """Differential entropy ``-(1/m) sum_k p(k) log p(k)`` on the unit interval."""
    p = marg.values
    return float(-np.sum(p * np.log(p)) / marg.grid.m)


@dataclass(frozen=True, eq=False)
class KdeTables:
    """Grid tables estimated from one data split, plus what produced them.

    ``samples`` are on the unit scale; keeping them lets the same estimate
    be evaluated at arbitrary points (for held-out scoring).
    """

    samples: np.ndarray
    bandwidths: np.ndarray
    grid: GridSpec
    floor: float
    univariate: tuple
    bivariate: dict
    pair_bandwidths: np.ndarray = None

    def __post_init__(self):
        if self.pair_bandwidths is None:
            object.__setattr__(self, "pair_bandwidths", self.bandwidths)

    @property
    def d(self):
        return len(self.univariate)

    def pair(self, i, j):
        """Bivariate table for ``(i, j)``; axis 0 follows variable ``i``."""
        if i < j:
            return self.bivariate[(i, j)]
        t = self.bivariate[(j, i)]
        return type(t)(t.values.T, t.grid, t.bandwidth[::-1], t.floor)


def build_tables(samples, bandwidths=None, grid=None, floor=DEFAULT_FLOOR, pairs=None,
                 pair_bandwidths=None):
    """Univariate tables for every column and bivariate tables for ``pairs``.

    ``pairs`` defaults to every unordered pair.  Bandwidths default to the
    normal reference rule per column.  The bivariate table of ``(i, j)`` uses
    ``(g_i, g_j)`` from ``pair_bandwidths``, which defaults to the univariate
    bandwidths so that bivariate marginals match the univariate tables.
    """
    x = np.asarray(samples, dtype=float)
    d = x.shape[1]
    grid = grid or GridSpec.midpoints()
    if bandwidths is None:
        bandwidths = normal_reference_bandwidths(x)
    h = np.broadcast_to(np.asarray(bandwidths, dtype=float), (d,)).copy()
    g = h if pair_bandwidths is None else \
        np.broadcast_to(np.asarray(pair_bandwidths, dtype=float), (d,)).copy()
    uni = tuple(kde_univariate(x[:, k], h[k], grid, floor) for k in range(d))
    if pairs is None:
        pairs = [(i, j) for i in range(d) for j in range(i + 1, d)]
    bi = {}
    for i, j in pairs:
        i, j = min(i, j), max(i, j)
        if (i, j) not in bi:
            bi[(i, j)] = kde_bivariate((x[:, i], x[:, j]), (g[i], g[j]), grid, floor)
    return KdeTables(x, h, grid, float(floor), uni, bi, g)


def mi_matrix(samples, bandwidths=None, grid=None, floor=DEFAULT_FLOOR, tables=None):
    """Estimated mutual information for every pair of columns.

    ``samples`` must already lie in the unit cube.  Negative estimates are
    kept as they are.
    """
    if tables is None:
        x = np.asarray(samples, dtype=float)
        if x.ndim != 2 or x.shape[1] < 2:
            raise DomainError("mutual information matrix needs at least 2 columns")
        tables = build_tables(x, bandwidths, grid, floor)
    d = tables.d
    out = np.zeros((d, d))
    for i in range(d):
        for j in range(i + 1, d):
            if (i, j) not in tables.bivariate:
                continue
            try:
                v = mi_grid(tables.bivariate[(i, j)], tables.univariate[i], tables.univariate[j])
            except DomainError as exc:
                raise type(exc)(f"pair ({i}, {j}): {exc}") from None
            out[i, j] = out[j, i] = v
    return MiMatrix(out, tables.grid, tables.bandwidths)


def _edge_order(stages):
    """Edges in the order the nested stages add them (``None`` for padding)."""
    if len(stages) == 0:
        raise EmptyStageList("no forest stages given")
    order = []
    prev = stages[0].edge_set()
    if prev:
        raise DomainError("stage 0 must be the empty forest")
    for g in stages[1:]:
        cur = g.edge_set()
        if not prev <= cur or len(cur - prev) > 1:
            raise DomainError("stages are not nested one edge at a time")
        new = cur - prev
        order.append(next(iter(new)) if new else None)
        prev = cur
    return order


def pointwise_terms(tables, points, pairs):
    """Average held-out log densities at ``points`` under ``tables``' estimate.

    Returns
    -------
    vertex : ndarray, shape (d,)
        ``mean_s log p(x_k^s)`` per variable.
    edge : dict
        ``mean_s log(p(x_i, x_j) / (p(x_i) p(x_j)))`` per pair ``(i, j)``.
    """
    pts = np.asarray(points, dtype=float)
    n2, d = pts.shape
    if d != tables.d:
        raise DomainError(f"points have {d} columns, tables {tables.d}")
    pairs = [(min(i, j), max(i, j)) for i, j in pairs]
    vsum = np.zeros(d)
    esum = {p: 0.0 for p in pairs}
    x1, h, g, floor = tables.samples, tables.bandwidths, tables.pair_bandwidths, tables.floor
    n1 = x1.shape[0]
    if n1 == 0:
        raise DomainError("tables carry no samples for pointwise evaluation")
    same = np.array_equal(h, g)
    for start in range(0, n2, _POINT_CHUNK):
        chunk = pts[start:start + _POINT_CHUNK]
        kern = [kernel_matrix(chunk[:, k], x1[:, k], h[k]) for k in range(d)]
        kpair = kern if same else [kernel_matrix(chunk[:, k], x1[:, k], g[k]) for k in range(d)]
        logp = [np.log(np.maximum(kk.sum(axis=1) / n1, floor)) for kk in kern]
        for k in range(d):
            vsum[k] += logp[k].sum()
        for i, j in esum:
            joint = np.maximum(np.einsum("ts,ts->t", kpair[i], kpair[j]) / n1, floor)
            esum[(i, j)] += float(np.sum(np.log(joint) - logp[i] - logp[j]))
    return vsum / n2, {p: v / n2 for p, v in esum.items()}


def heldout_edge_weights(tables, points):
    """Symmetric matrix of held-out average log density ratios for all pairs."""
    d = tables.d
    pairs = [(i, j) for i in range(d) for j in range(i + 1, d)]
    _, edge = pointwise_terms(tables, points, pairs)
    w = np.zeros((d, d))
    for (i, j), v in edge.items():
        w[i, j] = w[j, i] = v
    return w


@dataclass(frozen=True)
class HeldoutCurve:
    """Held-out log-likelihood for every nested forest ``k = 0 .. d-1``."""

    loglik: tuple
    edge_terms: tuple
    k_hat: int


def heldout_loglik_curve(stages, tables, points):
    """Score the nested forests on held-out points in a single pass.

    Per-edge terms are accumulated along the Kruskal order; ties in the
    curve resolve to the smallest ``k``.
    """
    order = _edge_order(stages)
    edges = [e for e in order if e is not None]
    vertex, edge = pointwise_terms(tables, points, edges)
    base = float(vertex.sum())
    curve = [base]
    terms = []
    total = base
    for e in order:
        t = edge[e] if e is not None else 0.0
        terms.append(t)
        total += t
        curve.append(total)
    k_hat = int(np.argmax(curve))
    return HeldoutCurve(tuple(curve), tuple(terms), k_hat)


def heldout_loglik_select(stages, tables, points):
    return heldout_loglik_curve(stages, tables, points).k_hat


def _check_compatible(tables1, tables2):
    if tables1.grid != tables2.grid:
        raise GridMismatch("split tables use different grids")
    if tables1.d != tables2.d:
        raise DomainError("split tables have different dimensions")


def heldout_risk_of_edges(edges, tables1, tables2):
    """Held-out negative log-likelihood risk of the forest with ``edges``.

    ``tables1`` define the model, ``tables2`` (from the other split) supply
    the integrating densities.
    """
    _check_compatible(tables1, tables2)
    m = tables1.grid.m
    risk = 0.0
    for i, j in edges:
        q = tables2.pair(i, j).values
        p = tables1.pair(i, j).values
        ratio = p / np.outer(tables1.univariate[i].values, tables1.univariate[j].values)
        risk -= float(np.sum(q * np.log(ratio)) / m ** 2)
    for k in range(tables1.d):
        q = tables2.univariate[k].values
        risk -= float(np.sum(q * np.log(tables1.univariate[k].values)) / m)
    return risk


def heldout_risk_curve(stages, tables1, tables2):
    """Risk of each nested forest; the minimizer is the selected size."""
    _edge_order(stages)
    return [heldout_risk_of_edges(g.edges, tables1, tables2) for g in stages]


def heldout_risk(model, data_split_2, bandwidths=None, rescaled=False):
    """Held-out risk of a fitted forest model against a second data split.

    Parameters
    ----------
    model : ForestDensityModel
    data_split_2 : array_like
        Held-out rows, in original coordinates unless ``rescaled``.
    bandwidths : array_like, optional
        Bandwidths for the split-2 estimates; the model's by default.
    """
    x2 = np.asarray(data_split_2, dtype=float)
    if not rescaled:
        x2 = model.maps.forward(x2)
    t1 = model.tables
    if bandwidths is None:
        bandwidths = t1.bandwidths
    t2 = build_tables(x2, bandwidths, t1.grid, t1.floor, pairs=model.forest.edges,
                      pair_bandwidths=t1.pair_bandwidths if bandwidths is t1.bandwidths else None)
    return heldout_risk_of_edges(model.forest.edges, t1, t2)
