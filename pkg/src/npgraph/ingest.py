"""Tabular input and the stock-return preprocessing steps."""

import csv
import math

import numpy as np

from .dataset import Dataset, as_matrix
from .errors import (ConstantColumn, DomainError, DuplicateColumn, NonNumericCell,
                     NonPositivePrice, ParseError, TooFewRows)


def read_csv(path):
    """Read a header-plus-numbers CSV file into a :class:`Dataset`.

    Row numbers in errors are 1-based file lines (the header is line 1);
    column numbers are 1-based too.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("file is empty", row=1) from None
        header = [h.strip() for h in header]
        if not header or any(h == "" for h in header):
            raise ParseError("empty column name in header", row=1)
        seen = set()
        for c, name in enumerate(header, start=1):
            if name in seen:
                raise DuplicateColumn(f"duplicate column name {name!r}", row=1, col=c)
            seen.add(name)
        rows = []
        for line, record in enumerate(reader, start=2):
            if not record or all(cell.strip() == "" for cell in record):
                continue
            if len(record) != len(header):
                raise ParseError(f"expected {len(header)} cells, got {len(record)}", row=line)
            vals = []
            for c, cell in enumerate(record, start=1):
                try:
                    v = float(cell)
                except ValueError:
                    raise NonNumericCell(f"non-numeric cell {cell!r}", row=line, col=c) from None
                if not math.isfinite(v):
                    raise NonNumericCell(f"non-finite cell {cell!r}", row=line, col=c)
                vals.append(v)
            rows.append(vals)
    if not rows:
        raise TooFewRows(f"{path}: no data rows")
    return Dataset(np.array(rows, dtype=float), tuple(header))


def write_csv(path, data, float_format=repr):
    """Write a dataset with full float precision (round-trips exactly)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(data.names)
        for row in data.values:
            writer.writerow([float_format(float(v)) for v in row])


def log_returns(prices):
    """Row-wise log price ratios ``log(S_t / S_{t-1})``; ``n - 1`` rows."""
    p = as_matrix(prices)
    if p.shape[0] < 2:
        raise TooFewRows("log returns need at least 2 rows")
    bad = np.argwhere(~(p > 0))
    if bad.size:
        r, c = bad[0]
        raise NonPositivePrice(int(r) + 1, int(c) + 1)
    out = np.log(p[1:] / p[:-1])
    return _rewrap(prices, out)


def winsorize_mad(data, c=3.0):
    """Clip each column to ``mean +/- c * mean(|x - mean|)``.

    One pass; constant columns (zero deviation) come back unchanged and are
    listed under ``meta["winsorize_constant_columns"]``.
    """
    if not c > 0:
        raise DomainError("c must be positive")
    x = as_matrix(data)
    mu = x.mean(axis=0)
    mad = np.abs(x - mu).mean(axis=0)
    out = np.clip(x, mu - c * mad, mu + c * mad)
    constant = [int(j) for j in np.flatnonzero(mad == 0)]
    out[:, constant] = x[:, constant]
    return _rewrap(data, out, winsorize_constant_columns=constant)


def standardize(data):
    """Center each column and scale it to unit standard deviation (divisor n)."""
    x = as_matrix(data)
    mu = x.mean(axis=0)
    sd = np.sqrt(((x - mu) ** 2).mean(axis=0))
    for j in np.flatnonzero(~(sd > 0)):
        raise ConstantColumn(int(j))
    return _rewrap(data, (x - mu) / sd)


def _rewrap(original, values, **meta):
    if isinstance(original, Dataset):
        return original.with_values(values, **meta)
    return Dataset.from_array(values)
