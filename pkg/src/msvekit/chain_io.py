"""
Loading, saving and summarizing Monte Carlo output.

A chain is an (n, p) float64 matrix whose row t is g(X_t) in temporal order.
Two on-disk formats are supported:

csv
    Comma-separated, '.' decimal, LF or CRLF line endings, optional single
    header line (detected by a non-numeric first row).
raw-f64
    16-byte header ``b"MCOV"`` + u32 n + u32 p + 4 zero bytes, followed by
    n * p little-endian float64 values in row-major order.
"""

import math
import os
import struct
from dataclasses import dataclass

import numpy as np

from .errors import (
    ChainFormatError,
    DimensionError,
    InsufficientDataError,
    PreconditionError,
)

__all__ = [
    "ChainMatrix",
    "MeanAndScatter",
    "as_chain_array",
    "load_chain",
    "save_chain",
    "summarize",
    "acf_ccf",
]

RAW_MAGIC = b"MCOV"
_RAW_HEADER = struct.Struct("<4sII4x")


@dataclass(frozen=True)
class ChainMatrix:
    """Validated, read-only (n, p) matrix of Monte Carlo output."""

    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=np.float64, copy=True)
        if vals.ndim == 1:
            vals = vals[:, None]
        if vals.ndim != 2:
            raise DimensionError(f"chain must be 2-dimensional, got ndim={vals.ndim}")
        if vals.shape[0] < 1 or vals.shape[1] < 1:
            raise InsufficientDataError("no rows" if vals.shape[0] < 1 else "no columns")
        if not np.all(np.isfinite(vals)):
            bad = np.argwhere(~np.isfinite(vals))[0]
            raise ChainFormatError(
                f"non-finite value at row {bad[0] + 1}, column {bad[1] + 1}"
            )
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def n(self):
        return self.values.shape[0]

    @property
    def p(self):
        return self.values.shape[1]

    def head(self, n):
        """The first ``n`` rows as a new chain."""
        return ChainMatrix(self.values[:n])

    def skip(self, k):
        """Drop the first ``k`` rows."""
        if k < 0 or k >= self.n:
            raise PreconditionError(f"cannot skip {k} of {self.n} rows")
        return ChainMatrix(self.values[k:])


def as_chain_array(chain):
    """Return the underlying (n, p) float array of a chain or array-like."""
    if isinstance(chain, ChainMatrix):
        return chain.values
    return ChainMatrix(chain).values


@dataclass(frozen=True)
class MeanAndScatter:
    mean: np.ndarray
    sample_cov: np.ndarray
    n: int


def _parse_csv(text):
    rows = []
    width = None
    first_data_line = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        fields = [f.strip() for f in line.split(",")]
        try:
            row = [float(f) for f in fields]
        except ValueError:
            if not rows and first_data_line is None:
                # single optional header line
                first_data_line = lineno + 1
                continue
            bad = next(f for f in fields if not _is_float(f))
            raise ChainFormatError(f"cannot parse {bad!r} as a number", line=lineno) from None
        if first_data_line is None:
            first_data_line = lineno
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise DimensionError(
                f"line {lineno}: expected {width} columns, found {len(row)}"
            )
        for col, v in enumerate(row):
            if not math.isfinite(v):
                raise ChainFormatError(f"non-finite value in column {col + 1}", line=lineno)
        rows.append(row)
    if not rows:
        raise ChainFormatError("no rows")
    return np.array(rows, dtype=np.float64)


def _is_float(s):
    try:
        float(s)
    except ValueError:
        return False
    return True


def _parse_raw(blob):
    if len(blob) < _RAW_HEADER.size:
        raise ChainFormatError("raw-f64 file shorter than its 16-byte header")
    magic, n, p = _RAW_HEADER.unpack_from(blob)
    if magic != RAW_MAGIC:
        raise ChainFormatError(f"bad magic {magic!r}, expected {RAW_MAGIC!r}")
    if n == 0:
        raise ChainFormatError("no rows")
    expected = _RAW_HEADER.size + 8 * n * p
    if len(blob) != expected:
        raise DimensionError(f"raw-f64 payload has {len(blob)} bytes, header implies {expected}")
    vals = np.frombuffer(blob, dtype="<f8", offset=_RAW_HEADER.size).reshape(n, p)
    return vals.astype(np.float64)


def load_chain(path, format=None, skip=0):
    """Read a chain file.

    Parameters
    ----------
    path : str or path-like
    format : {"csv", "raw-f64"}, optional
        Inferred from the extension when omitted (``.bin``/``.f64`` mean raw).
    skip : int
        Number of leading rows to discard (burn-in). Default 0.
    """
    if format is None:
        ext = os.path.splitext(str(path))[1].lower()
        format = "raw-f64" if ext in (".bin", ".f64", ".raw") else "csv"
    if format == "csv":
        with open(path, "r", encoding="utf-8", newline="") as fh:
            vals = _parse_csv(fh.read())
    elif format == "raw-f64":
        with open(path, "rb") as fh:
            vals = _parse_raw(fh.read())
    else:
        raise PreconditionError(f"unknown chain format {format!r}")
    chain = ChainMatrix(vals)
    return chain.skip(skip) if skip else chain


def save_chain(chain, path, format="csv", header=None):
    """Write a chain in one of the supported formats.

    CSV values use ``repr`` formatting so a round trip is exact.
    """
    vals = as_chain_array(chain)
    if format == "csv":
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            if header is not None:
                fh.write(",".join(header) + "\n")
            for row in vals:
                fh.write(",".join(repr(float(v)) for v in row) + "\n")
    elif format == "raw-f64":
        n, p = vals.shape
        with open(path, "wb") as fh:
            fh.write(_RAW_HEADER.pack(RAW_MAGIC, n, p))
            fh.write(np.ascontiguousarray(vals, dtype="<f8").tobytes())
    else:
        raise PreconditionError(f"unknown chain format {format!r}")


def summarize(chain):
    """Sample mean and sample covariance (1/(n-1) normalization)."""
    vals = as_chain_array(chain)
    n = vals.shape[0]
    if n < 2:
        raise InsufficientDataError("sample covariance needs at least 2 rows")
    mean = vals.mean(axis=0)
    z = vals - mean
    cov = z.T @ z / (n - 1)
    cov = 0.5 * (cov + cov.T)
    return MeanAndScatter(mean=mean, sample_cov=cov, n=n)


def acf_ccf(chain, i, j, max_lag):
    """Auto/cross-correlation of coordinate ``i`` at t with ``j`` at t + s.

    Returns an array of length ``max_lag + 1`` for lags 0..max_lag. Each lag
    uses the 1/n autocovariance normalized by the two lag-0 standard
    deviations.
    """
    vals = as_chain_array(chain)
    n, p = vals.shape
    if not (0 <= i < p and 0 <= j < p):
        raise PreconditionError(f"coordinates ({i}, {j}) out of range for p={p}")
    if not 0 <= max_lag < n:
        raise PreconditionError(f"max_lag must satisfy 0 <= max_lag < n={n}")
    x = vals[:, i] - vals[:, i].mean()
    y = vals[:, j] - vals[:, j].mean()
    sx = math.sqrt(x @ x / n)
    sy = math.sqrt(y @ y / n)
    if sx == 0.0 or sy == 0.0:
        raise PreconditionError("zero-variance coordinate")
    out = np.empty(max_lag + 1)
    for s in range(max_lag + 1):
        out[s] = (x[: n - s] @ y[s:]) / n
    return out / (sx * sy)
