"""Forest density estimation.

Chow-Liu trees are grown by Kruskal's algorithm on an estimated mutual
information matrix; the nested forests along the way are scored on a held-out
split and the best one is kept together with its kernel density tables.
"""

import math
from dataclasses import dataclass

import numpy as np

from .dataset import as_matrix, names_of
from .errors import DimensionMismatch, DomainError, NonSymmetricWeights, TooFewRows
from .graphs import Graph, UnionFind
from .kde import DEFAULT_FLOOR, DEFAULT_GRID_SIZE, AffineMaps, GridSpec, rescale_to_unit_cube
from .mutual_info import (HeldoutCurve, KdeTables, MiMatrix, build_tables, heldout_loglik_curve,
                          mi_matrix)
from .numerics import make_rng


def kruskal_stages(weights, labels=None):
    """Nested maximum-weight forests ``E(0) ⊂ E(1) ⊂ ... ⊂ E(d-1)``.

    Edges are taken greedily by decreasing weight, ties broken by ``(i, j)``,
    skipping any edge that would close a cycle.  Negative weights are
    accepted like any other.  A weight of ``-inf`` marks an absent edge; if
    the graph then disconnects, the last forest is repeated so the list
    always has ``d`` entries.

    Returns
    -------
    list of Graph
        Stage ``k`` holds the first ``k`` accepted edges with their weights.
    """
    w = np.asarray(weights, dtype=float)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise DimensionMismatch(f"weights must be square, got shape {w.shape}")
    d = w.shape[0]
    if np.any(np.isnan(w)) or np.any(w == np.inf):
        raise DomainError("weights must be finite (or -inf for absent edges)")
    finite = np.isfinite(w)
    if not (np.array_equal(finite, finite.T)
            and np.allclose(w[finite], w.T[finite], rtol=1e-12, atol=0)):
        raise NonSymmetricWeights("weight matrix is not symmetric")
    if labels is None:
        labels = tuple(f"X{j + 1}" for j in range(d))
    iu, ju = np.triu_indices(d, 1)
    cand = [(-w[i, j], i, j) for i, j in zip(iu.tolist(), ju.tolist()) if np.isfinite(w[i, j])]
    cand.sort()
    uf = UnionFind(d)
    edges, ws = [], []
    stages = [Graph(tuple(labels))]
    for negw, i, j in cand:
        if len(edges) == d - 1:
            break
        if uf.union(i, j):
            edges.append((i, j))
            ws.append(-negw)
            stages.append(Graph(tuple(labels), tuple(edges), tuple(ws)))
    while len(stages) < d:
        stages.append(stages[-1])
    return stages


@dataclass(frozen=True, eq=False)
class ForestSelection:
    """What the held-out stage produced, kept for reporting."""

    mi: MiMatrix
    stages: tuple
    curve: HeldoutCurve
    n1: int
    n2: int
    seed: object

    @property
    def k_hat(self):
        return self.curve.k_hat


@dataclass(frozen=True, eq=False)
class ForestDensityModel:
    """Forest-structured kernel density estimate.

    Attributes
    ----------
    forest : Graph
        Selected edges, weighted by their split-1 mutual information.
    tables : KdeTables
        Split-1 tables on the unit scale; bivariate tables exist for every
        forest edge.
    maps : AffineMaps
        Original coordinates to the unit cube.
    selection : ForestSelection or None
    """

    forest: Graph
    tables: KdeTables
    maps: AffineMaps
    selection: ForestSelection = None

    @property
    def d(self):
        return self.forest.d

    @property
    def grid(self):
        return self.tables.grid

    @property
    def labels(self):
        return self.forest.labels


def _split_sizes(n, split_fraction):
    n1 = math.ceil(split_fraction * n)
    return n1, n - n1


def fit_forest(data, split_fraction=0.5, seed=0, grid_size=DEFAULT_GRID_SIZE, bandwidth=None,
               floor=DEFAULT_FLOOR, beta=2.0, labels=None):
    """Fit a forest density by Chow-Liu on one split and pruning on the other.

    Parameters
    ----------
    data : Dataset or array_like, shape (n, d)
    split_fraction : float
        Share of rows (rounded up) used to build the density estimates.
    seed : int
        Seed for the row shuffle that defines the two splits.
    grid_size : int
        Nodes per dimension of the evaluation grid.
    bandwidth : None, "auto", or (h1, h2)
        ``None``/``"auto"`` picks per-column normal-reference bandwidths on
        split 1; a pair fixes the univariate and bivariate bandwidths.
    floor : float
        Lower bound applied to every density value.
    beta : float
        Smoothness exponent of the normal reference rule.

    Returns
    -------
    ForestDensityModel
    """
    x = as_matrix(data)
    n, d = x.shape
    if n < 4:
        raise TooFewRows(f"forest fitting needs at least 4 rows, got {n}")
    if d < 2:
        raise DomainError("forest fitting needs at least 2 columns")
    if not 0.0 < split_fraction < 1.0:
        raise DomainError("split_fraction must lie strictly between 0 and 1")
    if labels is None:
        labels = names_of(data, d)
    u, maps = rescale_to_unit_cube(x)
    n1, n2 = _split_sizes(n, split_fraction)
    if n1 < 2 or n2 < 1:
        raise TooFewRows(f"split of {n} rows leaves {n1} / {n2} rows")
    perm = make_rng(seed).permutation(n)
    d1, d2 = u[perm[:n1]], u[perm[n1:]]

    grid = GridSpec.midpoints(grid_size)
    uni_h, pair_h = _resolve_bandwidths(bandwidth, d1, beta)
    tables = build_tables(d1, uni_h, grid, floor, pair_bandwidths=pair_h)
    mi = mi_matrix(None, tables=tables)
    stages = tuple(kruskal_stages(mi.entries, labels))
    curve = heldout_loglik_curve(stages, tables, d2)
    forest = stages[curve.k_hat]
    kept = {e: tables.bivariate[e] for e in forest.edges}
    model_tables = KdeTables(tables.samples, tables.bandwidths, tables.grid, tables.floor,
                             tables.univariate, kept, tables.pair_bandwidths)
    selection = ForestSelection(mi, stages, curve, n1, n2, seed)
    return ForestDensityModel(forest, model_tables, maps, selection)


def _resolve_bandwidths(bandwidth, samples, beta):
    from .kde import normal_reference_bandwidths

    d = samples.shape[1]
    if bandwidth is None or (isinstance(bandwidth, str) and bandwidth == "auto"):
        h = normal_reference_bandwidths(samples, beta)
        return h, h
    h1, h2 = bandwidth
    return np.full(d, float(h1)), np.full(d, float(h2))


def _interp1(points, table, t):
    return np.interp(t, points, table)


def _interp2(points, table, s, t):
    """Bilinear interpolation, clamped to the outermost grid nodes."""
    m = points.size
    if m == 1:
        return np.full(np.shape(s), table[0, 0])

    def locate(v):
        v = np.clip(v, points[0], points[-1])
        k = np.clip(np.searchsorted(points, v, side="right") - 1, 0, m - 2)
        frac = (v - points[k]) / (points[k + 1] - points[k])
        return k, frac

    a, fa = locate(np.asarray(s, dtype=float))
    b, fb = locate(np.asarray(t, dtype=float))
    v00 = table[a, b]
    v10 = table[a + 1, b]
    v01 = table[a, b + 1]
    v11 = table[a + 1, b + 1]
    return (1 - fa) * ((1 - fb) * v00 + fb * v01) + fa * ((1 - fb) * v10 + fb * v11)


def evaluate_log_density(model, x, rescaled=False):
    """Log density of the forest estimate at one point or a batch of points.

    The density is the product of bivariate-over-marginals ratios for forest
    edges times all univariate marginals, read off the grid tables by
    (bi)linear interpolation.  Each vertex's marginal appears with exponent
    ``1 - degree``, so a single edge contributes exactly its joint table.
    Unless ``rescaled``, ``x`` is in original coordinates and the log
    Jacobian of the unit-cube map is added.
    """
    pts = np.asarray(x, dtype=float)
    single = pts.ndim == 1
    pts = np.atleast_2d(pts)
    if pts.shape[1] != model.d:
        raise DimensionMismatch(f"model has {model.d} variables, point has {pts.shape[1]}")
    u = pts if rescaled else model.maps.forward(pts)
    grid = model.tables.grid.points
    degree = np.zeros(model.d, dtype=int)
    out = np.zeros(pts.shape[0])
    for i, j in model.forest.edges:
        degree[i] += 1
        degree[j] += 1
        joint = _interp2(grid, model.tables.bivariate[(i, j)].values, u[:, i], u[:, j])
        out += np.log(joint)
    for k in range(model.d):
        coef = 1 - degree[k]
        if coef:
            out += coef * np.log(_interp1(grid, model.tables.univariate[k].values, u[:, k]))
    if not rescaled:
        out += model.maps.log_jacobian()
    return float(out[0]) if single else out
