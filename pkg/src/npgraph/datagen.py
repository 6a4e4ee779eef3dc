"""Seeded synthetic data with known structure.

Nonparanormal samples are drawn as ``X_j = f_j^{-1}(Z_j)`` with
``Z ~ N(mu, Sigma)`` for monotone transforms ``f_j`` from three families:

* power:     ``sign(x) |x|^alpha``
* logistic:  ``floor(x) + s_alpha(x - floor(x))`` with a logistic step ``s_alpha``
* sinusoid:  ``x + sin(alpha x) / alpha``
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import special

from .dataset import Dataset
from .errors import DomainError, SingularJacobian, TooManyEdges
from .graphs import Graph
from .numerics import chol_logdet_inverse, cholesky, make_rng

_BISECT_TOL = 1e-12


class Family(str, Enum):
    IDENTITY = "identity"
    POWER = "power"
    LOGISTIC = "logistic"
    SINUSOID = "sinusoid"


@dataclass(frozen=True)
class Transform:
    """A monotone map ``f`` with its derivative and inverse.

    For the logistic family, ``discontinuous=True`` uses
    ``floor(x) + 1 / (1 + exp(-alpha (frac(x) - 1/2)))`` unrescaled.  That map
    jumps by ``2 / (1 + exp(alpha / 2))`` at every integer, so the image
    misses small intervals and the induced law has atoms.  The default
    rescales the logistic step to run from 0 to 1 over each unit interval,
    which makes ``f`` continuous and onto.
    """

    family: Family = Family.IDENTITY
    alpha: float = 1.0
    discontinuous: bool = False

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if not self.alpha > 0:
            raise DomainError(f"alpha must be positive, got {self.alpha}")
        if self.family is Family.SINUSOID and self.alpha < 1:
            raise DomainError("the sinusoid family needs alpha >= 1 to be monotone")

    def _step(self, frac):
        a = self.alpha
        raw = special.expit(a * (frac - 0.5))
        if self.discontinuous:
            return raw
        lo = special.expit(-0.5 * a)
        return (raw - lo) / (1.0 - 2.0 * lo)

    def _step_slope(self, frac):
        a = self.alpha
        e = special.expit(a * (frac - 0.5))
        slope = a * e * (1.0 - e)
        if self.discontinuous:
            return slope
        return slope / (1.0 - 2.0 * special.expit(-0.5 * a))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        fam = self.family
        if fam is Family.IDENTITY:
            return x.copy()
        if fam is Family.POWER:
            return np.sign(x) * np.abs(x) ** self.alpha
        if fam is Family.LOGISTIC:
            fl = np.floor(x)
            return fl + self._step(x - fl)
        return x + np.sin(self.alpha * x) / self.alpha

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        fam = self.family
        if fam is Family.IDENTITY:
            return np.ones_like(x)
        if fam is Family.POWER:
            with np.errstate(divide="ignore"):
                return self.alpha * np.abs(x) ** (self.alpha - 1.0)
        if fam is Family.LOGISTIC:
            return self._step_slope(x - np.floor(x))
        return 1.0 + np.cos(self.alpha * x)

    def inverse(self, z):
        z = np.asarray(z, dtype=float)
        fam = self.family
        if fam is Family.IDENTITY:
            return z.copy()
        if fam is Family.POWER:
            return np.sign(z) * np.abs(z) ** (1.0 / self.alpha)
        if fam is Family.LOGISTIC:
            # f(x) stays within [floor(x), floor(x) + 1]
            return _bisect(self, z, z - 1.0, z + 1.0)
        # |f(x) - x| <= 1 / alpha
        return _bisect(self, z, z - 1.0 / self.alpha, z + 1.0 / self.alpha)


def _bisect(f, z, lo, hi):
    """Vectorized bisection for ``f(x) = z`` on brackets ``[lo, hi]``."""
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        below = f(mid) < z
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
        if np.all(hi - lo <= _BISECT_TOL * np.maximum(1.0, np.abs(mid))):
            break
    return 0.5 * (lo + hi)


@dataclass(frozen=True, eq=False)
class NpnSpec:
    """Parameters of a nonparanormal law: ``f(X) ~ N(mu, sigma)``."""

    mu: np.ndarray
    sigma: np.ndarray
    transforms: tuple

    def __post_init__(self):
        mu = np.atleast_1d(np.asarray(self.mu, dtype=float))
        sigma = np.atleast_2d(np.asarray(self.sigma, dtype=float))
        d = mu.size
        if sigma.shape != (d, d):
            raise DomainError(f"sigma must be {d} x {d}, got {sigma.shape}")
        if not np.array_equal(sigma, sigma.T):
            raise DomainError("sigma must be symmetric")
        cholesky(sigma)
        transforms = self.transforms
        if isinstance(transforms, Transform):
            transforms = (transforms,) * d
        transforms = tuple(transforms)
        if len(transforms) != d:
            raise DomainError(f"need {d} transforms, got {len(transforms)}")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "transforms", transforms)

    @property
    def d(self):
        return self.mu.size

    def forward(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        return np.column_stack([t(x[:, j]) for j, t in enumerate(self.transforms)])

    def inverse(self, z):
        z = np.atleast_2d(np.asarray(z, dtype=float))
        return np.column_stack([t.inverse(z[:, j]) for j, t in enumerate(self.transforms)])


def sample_gaussian(mu, sigma, n, seed):
    """``n`` draws of ``N(mu, sigma)`` via the Cholesky factor."""
    rng = make_rng(seed)
    mu = np.atleast_1d(np.asarray(mu, dtype=float))
    low = cholesky(np.atleast_2d(sigma))
    z = rng.standard_normal((n, mu.size))
    return mu + z @ low.T


def sample_npn(spec, n, seed, names=None):
    """Draw ``n`` rows from the nonparanormal law ``spec``."""
    z = sample_gaussian(spec.mu, spec.sigma, n, seed)
    return Dataset.from_array(spec.inverse(z), names)


def npn_log_density(spec, x):
    """Log density of ``spec`` at ``x``: Gaussian log density of ``f(x)``
    plus ``sum_j log |f_j'(x_j)|``.

    Raises
    ------
    SingularJacobian
        Where some ``|f_j'(x_j)|`` is zero (below 1e-300) or infinite.
    """
    pts = np.asarray(x, dtype=float)
    single = pts.ndim <= 1
    pts = np.atleast_2d(pts) if pts.ndim == 1 else pts.reshape(-1, spec.d)
    if pts.shape[1] != spec.d:
        raise DomainError(f"point dimension {pts.shape[1]} != {spec.d}")
    jac = np.column_stack([t.derivative(pts[:, j]) for j, t in enumerate(spec.transforms)])
    jac = np.abs(jac)
    if np.any(jac < 1e-300) or np.any(~np.isfinite(jac)):
        raise SingularJacobian("transform derivative vanishes or diverges at the point")
    ld, prec = chol_logdet_inverse(spec.sigma)
    r = spec.forward(pts) - spec.mu
    quad = np.einsum("ni,ij,nj->n", r, prec, r)
    out = -0.5 * (spec.d * np.log(2 * np.pi) + ld + quad) + np.log(jac).sum(axis=1)
    return float(out[0]) if single else out


def random_sparse_precision(d, n_edges, seed, low=0.2, high=0.5):
    """Symmetric diagonally dominant precision with ``n_edges`` random edges.

    Off-diagonal magnitudes are uniform on ``[low, high]`` with random signs;
    each diagonal entry is one plus its row's absolute off-diagonal sum.

    Returns
    -------
    omega : ndarray, shape (d, d)
    graph : Graph
        The true edge set.
    """
    max_edges = d * (d - 1) // 2
    if not 0 <= n_edges <= max_edges:
        raise TooManyEdges(f"{n_edges} edges requested, at most {max_edges} possible")
    rng = make_rng(seed)
    iu, ju = np.triu_indices(d, 1)
    chosen = np.sort(rng.choice(max_edges, size=n_edges, replace=False))
    omega = np.zeros((d, d))
    vals = rng.uniform(low, high, size=n_edges) * rng.choice([-1.0, 1.0], size=n_edges)
    omega[iu[chosen], ju[chosen]] = vals
    omega = omega + omega.T
    np.fill_diagonal(omega, np.abs(omega).sum(axis=1) + 1.0)
    edges = tuple(zip(iu[chosen].tolist(), ju[chosen].tolist()))
    return omega, Graph(tuple(f"X{j + 1}" for j in range(d)), edges)


def random_spanning_tree(d, seed):
    """Uniform random labelled tree on ``d`` vertices (Prüfer decoding)."""
    labels = tuple(f"X{j + 1}" for j in range(d))
    if d < 2:
        return Graph(labels)
    if d == 2:
        return Graph(labels, ((0, 1),))
    rng = make_rng(seed)
    seq = rng.integers(0, d, size=d - 2).tolist()
    degree = [1] * d
    for v in seq:
        degree[v] += 1
    edges = []
    for v in seq:
        leaf = min(u for u in range(d) if degree[u] == 1)
        edges.append((leaf, v))
        degree[leaf] -= 1
        degree[v] -= 1
    u, w = [k for k in range(d) if degree[k] == 1]
    edges.append((u, w))
    return Graph(labels, tuple(edges))


def tree_covariance(tree, rho):
    """Correlation matrix of a Gaussian tree with edge correlation ``rho``:
    ``rho ** (path length)`` between every pair."""
    d = tree.d
    adj = [[] for _ in range(d)]
    for i, j in tree.edges:
        adj[i].append(j)
        adj[j].append(i)
    sigma = np.zeros((d, d))
    for src in range(d):
        dist = [-1] * d
        dist[src] = 0
        queue = [src]
        for v in queue:
            for w in adj[v]:
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue.append(w)
        sigma[src] = [rho ** dist[k] if dist[k] >= 0 else 0.0 for k in range(d)]
    return sigma


def sample_tree_gaussian(d, link_rho, seed, n):
    """Standard Normal variables Markov to a random spanning tree.

    Every tree edge has correlation ``link_rho``; variables are generated
    root-first as ``X_child = rho X_parent + sqrt(1 - rho^2) eps``.

    Returns
    -------
    data : Dataset
    tree : Graph
    """
    if d < 2:
        raise DomainError("tree sampling needs d >= 2")
    if not abs(link_rho) < 1:
        raise DomainError("link correlation must lie in (-1, 1)")
    rng = make_rng(seed)
    tree = random_spanning_tree(d, rng)
    adj = [[] for _ in range(d)]
    for i, j in tree.edges:
        adj[i].append(j)
        adj[j].append(i)
    eps = rng.standard_normal((n, d))
    x = np.zeros((n, d))
    x[:, 0] = eps[:, 0]
    seen = [False] * d
    seen[0] = True
    queue = [0]
    noise = np.sqrt(1.0 - link_rho ** 2)
    for v in queue:
        for w in adj[v]:
            if not seen[w]:
                seen[w] = True
                x[:, w] = link_rho * x[:, v] + noise * eps[:, w]
                queue.append(w)
    return Dataset.from_array(x), tree
