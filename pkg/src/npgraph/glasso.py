"""l1-penalized Gaussian precision estimation.

Solves ``argmin tr(Omega S) - log|Omega| + sum_jk P_jk |Omega_jk|`` by block
coordinate descent over columns of ``Omega``.  Each column update minimizes the
objective exactly in that column: the column's lasso problem is solved through
its box-constrained dual by cyclic coordinate descent, which keeps every
iterate positive definite and makes the objective nonincreasing.

The usual graphical lasso is ``P = lam`` everywhere (diagonal optional); the
refit step uses ``P = 0`` on allowed entries and ``P = inf`` elsewhere.
"""

from dataclasses import dataclass, field

import numba
import numpy as np

from .errors import (DimensionMismatch, DomainError, InvariantViolation, NotConverged,
                     NotPositiveDefinite)
from .graphs import Graph
from .numerics import chol_logdet_inverse, is_positive_definite, logdet


@dataclass(frozen=True)
class GlassoConfig:
    lam: float
    max_outer_iters: int = 200
    tol: float = 1e-6
    penalize_diagonal: bool = True

    def __post_init__(self):
        if not self.lam >= 0:
            raise DomainError(f"lambda must be >= 0, got {self.lam}")
        if not self.tol > 0:
            raise DomainError(f"tol must be > 0, got {self.tol}")
        if self.max_outer_iters < 1:
            raise DomainError("max_outer_iters must be positive")


@dataclass(frozen=True, eq=False)
class PrecisionEstimate:
    """A fitted precision matrix and its inverse.

    ``objective_trace`` is filled only when the solver runs in debug mode.
    """

    omega: np.ndarray
    sigma: np.ndarray
    lam: float
    iterations: int
    kkt_residual: float
    objective_trace: tuple = field(default=())

    @property
    def d(self):
        return self.omega.shape[0]


def _as_covariance(s):
    s = np.asarray(s, dtype=float)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {s.shape}")
    if not np.all(np.isfinite(s)):
        raise DomainError("covariance has non-finite entries")
    if not np.allclose(s, s.T, rtol=0, atol=1e-12 * max(1.0, np.abs(s).max(initial=0))):
        raise DomainError("covariance is not symmetric")
    return 0.5 * (s + s.T)


def penalty_matrix(d, lam, penalize_diagonal=True):
    p = np.full((d, d), float(lam))
    if not penalize_diagonal:
        np.fill_diagonal(p, 0.0)
    return p


def objective(omega, s, penalty):
    """Penalized negative log-likelihood; ``inf * 0`` counts as 0."""
    ld = logdet(omega)
    absw = np.abs(omega)
    pen = np.where(absw > 0, penalty * absw, 0.0).sum()
    return float(np.sum(omega * s) - ld + pen)


def kkt_residual(omega, s, penalty, sigma=None):
    """Largest violation of the optimality conditions.

    With ``W = inv(omega)``: ``W_jk = S_jk + P_jk sign(Omega_jk)`` where
    ``Omega_jk != 0`` and ``|W_jk - S_jk| <= P_jk`` where ``Omega_jk == 0``.
    The inverse is recomputed from ``omega`` unless ``sigma`` is given.
    """
    omega = np.asarray(omega, dtype=float)
    if sigma is None:
        _, sigma = chol_logdet_inverse(omega)
    gap = sigma - s
    nz = omega != 0
    with np.errstate(invalid="ignore"):
        active = np.abs(gap - penalty * np.sign(omega))
    active = np.where(nz & np.isinf(penalty), np.inf, active)
    inactive = np.maximum(np.abs(gap) - penalty, 0.0)
    viol = np.where(nz, active, inactive)
    return float(viol.max()) if viol.size else 0.0


@numba.njit(cache=True)
def _box_qp(a, s, bound, gamma, tol, max_sweeps):
    """Minimize ``(s + g)' a (s + g)`` over ``|g_k| <= bound_k``, in place."""
    p = s.shape[0]
    u = a @ (s + gamma)
    for _ in range(max_sweeps):
        biggest = 0.0
        for k in range(p):
            g = gamma[k] - u[k] / a[k, k]
            if g > bound[k]:
                g = bound[k]
            elif g < -bound[k]:
                g = -bound[k]
            delta = g - gamma[k]
            if delta != 0.0:
                gamma[k] = g
                for r in range(p):
                    u[r] += delta * a[r, k]
                if abs(delta) > biggest:
                    biggest = abs(delta)
        if biggest <= tol:
            return u
    return u


def _column_update(theta, s, penalty, w_diag, j, w_guess, inner_tol):
    d = theta.shape[0]
    idx = np.concatenate((np.arange(j), np.arange(j + 1, d)))
    a = np.ascontiguousarray(theta[np.ix_(idx, idx)])
    s12 = np.ascontiguousarray(s[idx, j])
    bound = np.ascontiguousarray(penalty[idx, j])
    gamma = np.clip(w_guess[idx, j] - s12, -bound, bound)
    gamma[~np.isfinite(gamma)] = 0.0
    u = _box_qp(a, s12, bound, gamma, inner_tol, 100000)
    w22 = w_diag[j]
    theta12 = -u / w22
    # interior dual coordinates certify exact zeros in the primal
    theta12[np.abs(gamma) < bound] = 0.0
    theta22 = (1.0 - theta12 @ (s12 + gamma)) / w22
    theta[idx, j] = theta12
    theta[j, idx] = theta12
    theta[j, j] = theta22


def _solve(s, penalty, theta0, max_outer_iters, tol, debug, lam):
    d = s.shape[0]
    w_diag = np.diag(s) + np.diag(penalty)
    if np.any(~(w_diag > 0)):
        raise DomainError("diagonal of S (plus its penalty) must be strictly positive")
    if theta0 is None:
        theta = np.diag(1.0 / w_diag)
    else:
        theta = np.array(theta0, dtype=float)
    inner_tol = 1e-13 * max(1.0, float(np.abs(s).max()))
    trace = []
    residual = np.inf
    for it in range(max_outer_iters + 1):
        try:
            _, w = chol_logdet_inverse(theta)
        except NotPositiveDefinite:
            raise InvariantViolation("iterate lost positive definiteness") from None
        if debug:
            trace.append(objective(theta, s, penalty))
            if len(trace) > 1 and trace[-1] > trace[-2] + 1e-10 * max(1.0, abs(trace[-2])):
                raise InvariantViolation(
                    f"objective increased from {trace[-2]!r} to {trace[-1]!r}")
        residual = kkt_residual(theta, s, penalty, sigma=w)
        if residual <= tol:
            return PrecisionEstimate(theta, w, lam, it, residual, tuple(trace))
        if it == max_outer_iters:
            break
        for j in range(d):
            _column_update(theta, s, penalty, w_diag, j, w, inner_tol)
    est = PrecisionEstimate(theta, w, lam, max_outer_iters, residual, tuple(trace))
    raise NotConverged(max_outer_iters, residual, estimate=est, lam=lam)


def mle_precision(s):
    """Unpenalized maximum-likelihood precision, ``inv(S)``.

    Raises NotPositiveDefinite when ``S`` is singular (e.g. ``n <= d``).
    """
    s = _as_covariance(s)
    _, inv = chol_logdet_inverse(s)
    return PrecisionEstimate(inv, s.copy(), 0.0, 0, 0.0)


def glasso_fit(s, cfg, omega0=None, debug=False):
    """Graphical lasso estimate for covariance ``s``.

    Parameters
    ----------
    s : array_like, shape (d, d)
        Symmetric matrix with positive diagonal.
    cfg : GlassoConfig or float
        Solver settings; a bare number is taken as ``lam``.
    omega0 : array_like, optional
        Positive-definite warm start.
    debug : bool
        Record the objective after every sweep and fail if it ever rises.

    Returns
    -------
    PrecisionEstimate
        Certified to satisfy the optimality conditions within ``cfg.tol``.

    Raises
    ------
    NotConverged
        The iteration budget ran out; the last iterate is attached.
    NotPositiveDefinite
        ``lam == 0`` and ``s`` is singular.
    """
    if not isinstance(cfg, GlassoConfig):
        cfg = GlassoConfig(float(cfg))
    s = _as_covariance(s)
    d = s.shape[0]
    penalty = penalty_matrix(d, cfg.lam, cfg.penalize_diagonal)
    if cfg.lam == 0 and not is_positive_definite(s):
        raise NotPositiveDefinite("lambda = 0 requires a positive-definite covariance")
    if omega0 is not None:
        omega0 = np.asarray(omega0, dtype=float)
        if omega0.shape != s.shape or not is_positive_definite(omega0):
            omega0 = None
    return _solve(s, penalty, omega0, cfg.max_outer_iters, cfg.tol, debug, cfg.lam)


def glasso_path(s, lambdas, cfg=None):
    """Fit a decreasing sequence of penalties with warm starts.

    ``cfg.lam`` is ignored; the other settings apply to every point.
    """
    lambdas = [float(v) for v in lambdas]
    if not lambdas:
        return []
    if any(not v > 0 for v in lambdas):
        raise DomainError("path penalties must be strictly positive")
    if any(b > a for a, b in zip(lambdas, lambdas[1:])):
        raise DomainError("path penalties must be sorted in descending order")
    base = cfg if cfg is not None else GlassoConfig(lambdas[0])
    out = []
    warm = None
    for lam in lambdas:
        point = GlassoConfig(lam, base.max_outer_iters, base.tol, base.penalize_diagonal)
        try:
            est = glasso_fit(s, point, omega0=warm)
        except NotConverged as exc:
            exc.lam = lam
            raise
        except NotPositiveDefinite as exc:
            raise NotPositiveDefinite(f"{exc} (lambda={lam!r})") from None
        out.append(est)
        warm = est.omega
    return out


def lambda_grid(lo, hi, count):
    """``count`` evenly spaced penalties on ``[lo, hi]``, ascending."""
    if count < 1:
        raise DomainError("grid needs at least one point")
    return np.linspace(lo, hi, count)


def refit_mle(s, pattern, tol=1e-6, max_outer_iters=500):
    """Gaussian MLE restricted to the sparsity pattern of ``pattern``.

    Entries outside the edge set (and off the diagonal) are held at zero;
    all others are unpenalized.
    """
    s = _as_covariance(s)
    d = s.shape[0]
    if pattern.d != d:
        raise DimensionMismatch(f"pattern has {pattern.d} vertices, covariance {d}")
    penalty = np.full((d, d), np.inf)
    np.fill_diagonal(penalty, 0.0)
    for i, j in pattern.edges:
        penalty[i, j] = penalty[j, i] = 0.0
    return _solve(s, penalty, None, max_outer_iters, tol, False, 0.0)


def graph_from_precision(est, zero_tol=None, labels=None):
    """Edges ``(j, k)`` with ``|Omega_jk| > zero_tol``.

    The default threshold is ``1e-8`` times the largest diagonal entry.
    """
    omega = est.omega if isinstance(est, PrecisionEstimate) else np.asarray(est, dtype=float)
    d = omega.shape[0]
    if zero_tol is None:
        zero_tol = 1e-8 * float(np.max(np.diag(omega)))
    if zero_tol < 0:
        raise DomainError("zero_tol must be nonnegative")
    if labels is None:
        labels = tuple(f"X{j + 1}" for j in range(d))
    iu, ju = np.triu_indices(d, 1)
    keep = np.abs(omega[iu, ju]) > zero_tol
    edges = tuple(zip(iu[keep].tolist(), ju[keep].tolist()))
    weights = tuple(float(w) for w in omega[iu[keep], ju[keep]])
    return Graph(tuple(labels), edges, weights)
