"""Gaussian-kernel density estimates tabulated on a regular grid in [0, 1].

Tables are evaluated exactly from the kernel sums (no binning) and floored at
a small positive value so that logs of tables and ratios are always finite.
"""

from dataclasses import dataclass

import numpy as np

from .dataset import as_matrix
from .errors import BadBandwidth, ConstantColumn, DomainError, LengthMismatch

DEFAULT_GRID_SIZE = 100
DEFAULT_FLOOR = 1e-8
UNIT_MARGIN = 0.025

_INV_SQRT_2PI = 1.0 / np.sqrt(2.0 * np.pi)


@dataclass(frozen=True, eq=False)
class GridSpec:
    """Evaluation nodes shared by every dimension.

    The default nodes are the midpoints of ``m`` equal cells of [0, 1], so a
    plain mean over the nodes is a midpoint Riemann sum on the unit interval.
    """

    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 1 or pts.size == 0:
            raise DomainError("grid needs a nonempty 1-d array of points")
        if np.any(np.diff(pts) <= 0):
            raise DomainError("grid points must be strictly increasing")
        if pts[0] < 0 or pts[-1] > 1:
            raise DomainError("grid points must lie in [0, 1]")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @classmethod
    def midpoints(cls, m=DEFAULT_GRID_SIZE):
        if m < 1:
            raise DomainError("grid size must be positive")
        return cls((np.arange(m) + 0.5) / m)

    @property
    def m(self):
        return self.points.size

    def __eq__(self, other):
        return isinstance(other, GridSpec) and np.array_equal(self.points, other.points)

    def __hash__(self):
        return hash(self.points.tobytes())


@dataclass(frozen=True, eq=False)
class KdeTable:
    """Density values on the grid (shape ``(m,)`` or ``(m, m)``).

    For a bivariate table, axis 0 runs over the first variable's nodes.
    """

    values: np.ndarray
    grid: GridSpec
    bandwidth: tuple
    floor: float

    @property
    def dims(self):
        return self.values.ndim

    def riemann_mass(self):
        return float(self.values.sum() / self.grid.m ** self.dims)


def bandwidth_theoretical(n, beta, dims):
    """Rate-optimal bandwidth ``(log n / n)^(1/(dims + 2 beta))``, constant 1."""
    if n < 2:
        raise DomainError(f"bandwidth needs n >= 2, got {n}")
    if not beta > 0:
        raise DomainError("beta must be positive")
    if dims not in (1, 2):
        raise DomainError("dims must be 1 or 2")
    return (np.log(n) / n) ** (1.0 / (dims + 2.0 * beta))


def _type7_iqr(x):
    q75, q25 = np.quantile(x, [0.75, 0.25])
    return q75 - q25


def bandwidth_normal_reference(column, beta=2.0, n=None):
    """Normal reference rule ``1.06 min(sd, IQR / 1.34) n^(-1/(2 beta + 2))``.

    ``sd`` is the sample standard deviation (divisor ``n - 1``) and the
    quartiles interpolate order statistics linearly.  When the IQR is zero
    (heavy ties) the rule falls back to ``sd`` alone.

    Parameters
    ----------
    column : array_like
        One variable's sample.
    beta : float
        Smoothness exponent; 2 gives ``n^(-1/6)``.
    n : int, optional
        Sample size entering the rate; defaults to ``len(column)``.
    """
    x = np.asarray(column, dtype=float).ravel()
    if x.size < 2:
        raise DomainError("normal reference bandwidth needs at least 2 observations")
    if n is None:
        n = x.size
    sd = float(np.std(x, ddof=1))
    if not sd > 0:
        raise ConstantColumn(None, "normal reference bandwidth of a constant column")
    spread = sd
    iqr = _type7_iqr(x) / 1.34
    if iqr > 0:
        spread = min(sd, iqr)
    return 1.06 * spread * float(n) ** (-1.0 / (2.0 * beta + 2.0))


def normal_reference_bandwidths(x, beta=2.0):
    x = as_matrix(x)
    return np.array([bandwidth_normal_reference(x[:, j], beta) for j in range(x.shape[1])])


def _check_bandwidth(h):
    if not (np.isfinite(h) and h > 0):
        raise BadBandwidth(f"bandwidth must be positive and finite, got {h}")
    return float(h)


def kernel_matrix(samples, points, h):
    """``K((X_s - x) / h) / h`` for every sample ``s`` and point ``x``."""
    z = (np.asarray(samples, dtype=float)[:, None] - np.asarray(points, dtype=float)[None, :]) / h
    return np.exp(-0.5 * z * z) * (_INV_SQRT_2PI / h)


def kde_univariate(column, h1, grid=None, floor=DEFAULT_FLOOR):
    """Univariate table ``(1/n) sum_s K((X_s - x) / h) / h`` on the grid."""
    h1 = _check_bandwidth(h1)
    grid = grid or GridSpec.midpoints()
    x = np.asarray(column, dtype=float).ravel()
    if x.size == 0:
        raise DomainError("kde of an empty sample")
    vals = kernel_matrix(x, grid.points, h1).mean(axis=0)
    return KdeTable(np.maximum(vals, floor), grid, (h1,), float(floor))


def _pair_bandwidths(h2):
    if np.ndim(h2) == 0:
        h = _check_bandwidth(h2)
        return h, h
    hi, hj = h2
    return _check_bandwidth(hi), _check_bandwidth(hj)


def kde_bivariate(cols, h2, grid=None, floor=DEFAULT_FLOOR):
    """Product-kernel table on the ``m x m`` grid.

    ``h2`` is a single bandwidth for both coordinates or a pair ``(h_i, h_j)``.
    Samples are accumulated in a fixed order, so swapping the two columns
    yields exactly the transposed table.
    """
    xi, xj = (np.asarray(c, dtype=float).ravel() for c in cols)
    if xi.size != xj.size:
        raise LengthMismatch(f"paired samples differ in length: {xi.size} vs {xj.size}")
    if xi.size == 0:
        raise DomainError("kde of an empty sample")
    hi, hj = _pair_bandwidths(h2)
    grid = grid or GridSpec.midpoints()
    ki = kernel_matrix(xi, grid.points, hi)
    kj = kernel_matrix(xj, grid.points, hj)
    # plain einsum (no BLAS): the reduction order does not depend on threading
    vals = np.einsum("sa,sb->ab", ki, kj, optimize=False) / xi.size
    return KdeTable(np.maximum(vals, floor), grid, (hi, hj), float(floor))


def kde_at_points(samples, h, points, floor=DEFAULT_FLOOR):
    """Univariate estimate evaluated directly at arbitrary points."""
    h = _check_bandwidth(h)
    vals = kernel_matrix(points, samples, h).mean(axis=1)
    return np.maximum(vals, floor)


def kde2_at_points(samples_i, samples_j, h2, points_i, points_j, floor=DEFAULT_FLOOR):
    """Bivariate product-kernel estimate evaluated at paired points."""
    hi, hj = _pair_bandwidths(h2)
    ki = kernel_matrix(points_i, samples_i, hi)
    kj = kernel_matrix(points_j, samples_j, hj)
    return np.maximum((ki * kj).mean(axis=1), floor)


@dataclass(frozen=True, eq=False)
class AffineMaps:
    """Per-column maps ``y = scale * x + offset`` into the unit cube."""

    scale: np.ndarray
    offset: np.ndarray

    def forward(self, x):
        return as_matrix(x) * self.scale + self.offset

    def inverse(self, y):
        return (as_matrix(y) - self.offset) / self.scale

    def log_jacobian(self):
        return float(np.sum(np.log(self.scale)))


def rescale_to_unit_cube(data, margin=UNIT_MARGIN):
    """Affinely map every column so its minimum goes to ``margin`` and its
    maximum to ``1 - margin``.

    Returns
    -------
    scaled : ndarray
    maps : AffineMaps
    """
    x = as_matrix(data)
    lo, hi = x.min(axis=0), x.max(axis=0)
    for j in np.flatnonzero(~(hi > lo)):
        raise ConstantColumn(int(j))
    scale = (1.0 - 2.0 * margin) / (hi - lo)
    offset = margin - scale * lo
    maps = AffineMaps(scale, offset)
    return maps.forward(x), maps
