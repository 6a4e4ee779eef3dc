"""Scalar and matrix primitives shared by the estimators."""

import numpy as np
from scipy import linalg, special

from .errors import DomainError, NotPositiveDefinite

# pivots at or below this fraction of the largest diagonal entry count as zero
PD_RELATIVE_TOL = 1e-12


def std_normal_cdf(x):
    """Standard Normal distribution function (erfc based, elementwise)."""
    return special.ndtr(x)


def std_normal_pdf(x):
    x = np.asarray(x, dtype=float)
    return np.exp(-0.5 * x * x) / np.sqrt(2.0 * np.pi)


def std_normal_quantile(p):
    """Inverse of :func:`std_normal_cdf`.

    Raises
    ------
    DomainError
        If any ``p`` lies outside the open interval (0, 1).
    """
    p_arr = np.asarray(p, dtype=float)
    if np.any(~(p_arr > 0.0)) or np.any(~(p_arr < 1.0)):
        raise DomainError("normal quantile requires 0 < p < 1")
    return special.ndtri(p_arr) if p_arr.ndim else float(special.ndtri(p_arr))


def make_rng(seed):
    """Seeded PCG64 generator; the only source of randomness in the package."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(seed))


def cholesky(m):
    """Lower Cholesky factor with the package's positive-definiteness rule.

    A pivot (squared diagonal of the factor) at or below
    ``1e-12 * max(diag(m))`` is treated as a failure.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NotPositiveDefinite("matrix has non-finite entries")
    if m.shape[0] == 0:
        return m.copy()
    scale = np.max(np.diag(m))
    if not scale > 0:
        raise NotPositiveDefinite("matrix has no positive diagonal entry")
    try:
        low = linalg.cholesky(m, lower=True, check_finite=False)
    except linalg.LinAlgError as exc:
        raise NotPositiveDefinite(str(exc)) from None
    pivots = np.diag(low) ** 2
    if np.any(~(pivots > PD_RELATIVE_TOL * scale)):
        raise NotPositiveDefinite(
            f"smallest pivot {pivots.min():.3e} below tolerance {PD_RELATIVE_TOL * scale:.3e}")
    return low


def is_positive_definite(m):
    try:
        cholesky(m)
    except NotPositiveDefinite:
        return False
    return True


def chol_logdet_inverse(m):
    """Log-determinant and inverse of a symmetric positive-definite matrix.

    Parameters
    ----------
    m : array_like, shape (d, d)
        Symmetric matrix; only positive-definite input is accepted.

    Returns
    -------
    logdet : float
        ``2 * sum(log(diag(L)))`` for the Cholesky factor ``L``.
    inverse : ndarray, shape (d, d)
        Exactly symmetric inverse.

    Raises
    ------
    NotPositiveDefinite
    """
    m = np.asarray(m, dtype=float)
    if not np.array_equal(m, m.T):
        raise DomainError("matrix is not symmetric")
    low = cholesky(m)
    logdet = 2.0 * float(np.sum(np.log(np.diag(low))))
    inv = linalg.cho_solve((low, True), np.eye(m.shape[0]), check_finite=False)
    inv = 0.5 * (inv + inv.T)
    return logdet, inv


def logdet(m):
    low = cholesky(m)
    return 2.0 * float(np.sum(np.log(np.diag(low))))


def symmetrize(m):
    m = np.asarray(m, dtype=float)
    return 0.5 * (m + m.T)
