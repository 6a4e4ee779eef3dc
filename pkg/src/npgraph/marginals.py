"""Winsorized empirical CDFs and Normal-score marginal transforms.

This is the first step of the nonparanormal estimator: every variable is
replaced by ``mu + sigma * Phi^{-1}(F~(x))`` where ``F~`` is the empirical
distribution function clamped to ``[delta, 1 - delta]``.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .dataset import as_matrix
from .errors import ConstantColumn, DimensionMismatch, DomainError, TooFewRows
from .numerics import std_normal_quantile


class IdentificationMode(str, Enum):
    NORMAL_SCORES = "scores"
    MATCH_MOMENTS = "moments"


def default_delta(n):
    """Truncation level ``1 / (4 n^{1/4} sqrt(pi log n))``.

    >>> round(default_delta(100), 6)
    0.020785
    """
    if n < 2:
        raise DomainError(f"default_delta needs n >= 2, got {n}")
    n = float(n)
    return 1.0 / (4.0 * n ** 0.25 * np.sqrt(np.pi * np.log(n)))


def empirical_cdf(column, t):
    """Right-continuous empirical CDF of a sorted sample, evaluated at ``t``.

    ``column`` must be sorted in nondecreasing order; the result is the
    fraction of sample values ``<= t``.
    """
    column = np.asarray(column, dtype=float)
    if column.size == 0:
        raise DomainError("empirical_cdf of an empty sample")
    counts = np.searchsorted(column, t, side="right")
    return counts / column.size


def winsorized_cdf(column, t, delta):
    if not 0.0 < delta < 0.5:
        raise DomainError(f"delta must lie in (0, 0.5), got {delta}")
    return np.clip(empirical_cdf(column, t), delta, 1.0 - delta)


@dataclass(frozen=True, eq=False)
class MarginalTransform:
    """Fitted per-column marginal transform.

    Attributes
    ----------
    sorted_columns : ndarray, shape (n, d)
        Each column of the training data sorted ascending.
    delta : float
        Truncation level in (0, 0.5).
    sample_mean, sample_std : ndarray, shape (d,)
        Column moments of the training data (divisor ``n``).
    mode : IdentificationMode
        ``NORMAL_SCORES`` outputs ``Phi^{-1}(F~)`` directly; ``MATCH_MOMENTS``
        rescales it to the sample mean and standard deviation.
    """

    sorted_columns: np.ndarray
    delta: float
    sample_mean: np.ndarray
    sample_std: np.ndarray
    mode: IdentificationMode = IdentificationMode.NORMAL_SCORES

    @property
    def n(self):
        return self.sorted_columns.shape[0]

    @property
    def d(self):
        return self.sorted_columns.shape[1]

    @property
    def location(self):
        if self.mode is IdentificationMode.NORMAL_SCORES:
            return np.zeros(self.d)
        return self.sample_mean

    @property
    def scale(self):
        if self.mode is IdentificationMode.NORMAL_SCORES:
            return np.ones(self.d)
        return self.sample_std

    def _check(self, x):
        x = as_matrix(x)
        if x.shape[1] != self.d:
            raise DimensionMismatch(f"transform fit on {self.d} columns, got {x.shape[1]}")
        return x

    def cdf(self, x):
        """Winsorized CDF of every entry of ``x`` (shape ``(m, d)``)."""
        x = self._check(x)
        out = np.empty_like(x)
        for j in range(self.d):
            out[:, j] = winsorized_cdf(self.sorted_columns[:, j], x[:, j], self.delta)
        return out

    def scores(self, x):
        """Truncated Normal scores ``Phi^{-1}(F~_j(x_j))``."""
        return std_normal_quantile(self.cdf(x))

    def transform(self, x):
        return self.location + self.scale * self.scores(x)

    def score_bounds(self):
        return (float(std_normal_quantile(self.delta)),
                float(std_normal_quantile(1.0 - self.delta)))


def fit_transform(data, delta=None, mode=IdentificationMode.NORMAL_SCORES):
    """Fit the Winsorized marginal transform to ``data``.

    Parameters
    ----------
    data : Dataset or array_like, shape (n, d)
    delta : float, optional
        Overrides :func:`default_delta`.
    mode : IdentificationMode or {"scores", "moments"}

    Raises
    ------
    TooFewRows
        If ``n < 2``.
    ConstantColumn
        If a column has zero variance.
    """
    x = as_matrix(data)
    mode = IdentificationMode(mode)
    n, d = x.shape
    if n < 2:
        raise TooFewRows(f"need at least 2 rows, got {n}")
    if delta is None:
        delta = default_delta(n)
    if not 0.0 < delta < 0.5:
        raise DomainError(f"delta must lie in (0, 0.5), got {delta}")
    mean = x.mean(axis=0)
    std = np.sqrt(((x - mean) ** 2).mean(axis=0))
    for j in range(d):
        if np.all(x[:, j] == x[0, j]) or not std[j] > 0:
            raise ConstantColumn(j)
    sorted_columns = np.sort(x, axis=0)
    sorted_columns.setflags(write=False)
    return MarginalTransform(sorted_columns, float(delta), mean, std, mode)


def transformed_covariance(transform, data):
    """Covariance (divisor ``n``) of the transformed observations.

    In Normal-score mode this is the covariance of the truncated scores.
    """
    z = transform.transform(data)
    z = z - z.mean(axis=0)
    cov = (z.T @ z) / z.shape[0]
    # exact symmetry
    return np.triu(cov) + np.triu(cov, 1).T
