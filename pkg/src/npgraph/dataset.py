from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, InputError


@dataclass(frozen=True)
class Dataset:
    """An ``n x d`` matrix of observations with one name per column.

    ``meta`` holds free-form annotations added by preprocessing steps
    (for instance, columns left untouched by Winsorization).
    """

    values: np.ndarray
    names: tuple
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 2:
            raise InputError(f"dataset must be two-dimensional, got shape {values.shape}")
        names = tuple(str(s) for s in self.names)
        if len(names) != values.shape[1]:
            raise DimensionMismatch(
                f"{len(names)} column names for {values.shape[1]} columns")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "names", names)

    @classmethod
    def from_array(cls, values, names=None, prefix="X"):
        values = np.asarray(values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        if names is None:
            names = default_names(values.shape[1], prefix)
        return cls(values, tuple(names))

    @property
    def n(self):
        return self.values.shape[0]

    @property
    def d(self):
        return self.values.shape[1]

    @property
    def shape(self):
        return self.values.shape

    def with_values(self, values, **meta):
        merged = dict(self.meta)
        merged.update(meta)
        return Dataset(values, self.names, merged)


def default_names(d, prefix="X"):
    return tuple(f"{prefix}{j + 1}" for j in range(d))


def as_matrix(data):
    """Return the observation matrix of a :class:`Dataset` or array-like."""
    if isinstance(data, Dataset):
        return data.values
    arr = np.asarray(data, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise InputError(f"expected an n x d matrix, got shape {arr.shape}")
    return arr


def names_of(data, d=None):
    if isinstance(data, Dataset):
        return data.names
    return default_names(d if d is not None else as_matrix(data).shape[1])
