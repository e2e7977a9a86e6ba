"""
Lag-s sample autocovariance matrices.

    gamma_n(s) = 1/n * sum_{t in I_s} (Y_t - Ybar)(Y_{t+s} - Ybar)^T

with the full-sample mean and divisor n for every lag. Negative lags are
transposes of positive ones.
"""

from dataclasses import dataclass

import numpy as np

from .chain_io import as_chain_array
from .errors import PreconditionError

__all__ = ["AutocovarianceSequence", "sample_autocov", "autocov_range", "lagged_cross_products"]

# rows per accumulation block
BLOCK_ROWS = 1 << 16


def lagged_cross_products(z, s):
    """``sum_{t=0}^{n-s-1} z[t] z[t+s]^T`` for s >= 0, accumulated in row blocks.

    Each block's product is added with Kahan compensation so that long
    chains keep full precision in the running sum. The block layout depends
    only on (n, s), so the result is deterministic.
    """
    n, p = z.shape
    m = n - s
    total = np.zeros((p, p))
    comp = np.zeros((p, p))
    for start in range(0, m, BLOCK_ROWS):
        stop = min(start + BLOCK_ROWS, m)
        part = z[start:stop].T @ z[start + s:stop + s]
        y = part - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return total


def _centered(chain):
    vals = as_chain_array(chain)
    return vals - vals.mean(axis=0)


def sample_autocov(chain, s):
    """Lag-``s`` sample autocovariance (p x p), valid for |s| < n."""
    z = _centered(chain)
    n = z.shape[0]
    s = int(s)
    if abs(s) >= n:
        raise PreconditionError(f"|s|={abs(s)} must be < n={n}")
    g = lagged_cross_products(z, abs(s)) / n
    return g if s >= 0 else g.T


@dataclass(frozen=True)
class AutocovarianceSequence:
    """gamma_n(s) for s = 0..b_n-1; negative lags served by transpose."""

    matrices: np.ndarray  # shape (b_n, p, p), index s >= 0
    n: int

    @property
    def b_n(self):
        return self.matrices.shape[0]

    @property
    def p(self):
        return self.matrices.shape[1]

    @property
    def lags(self):
        return range(-(self.b_n - 1), self.b_n)

    def __getitem__(self, s):
        if abs(s) >= self.b_n:
            raise KeyError(s)
        g = self.matrices[abs(s)]
        return g if s >= 0 else g.T

    def to_rows(self):
        """(lag, i, j, value) tuples over the full symmetric lag range."""
        out = []
        for s in self.lags:
            g = self[s]
            for i in range(self.p):
                for j in range(self.p):
                    out.append((s, i, j, float(g[i, j])))
        return out


def autocov_range(chain, b_n, strict=True):
    """Autocovariances for lags 0..b_n-1.

    ``strict`` enforces n > 2 b_n; with ``strict=False`` only b_n <= n is
    required (the estimator is still defined, the consistency theory is not).
    """
    z = _centered(chain)
    n = z.shape[0]
    b_n = int(b_n)
    if b_n < 1:
        raise PreconditionError(f"b_n must be >= 1, got {b_n}")
    if strict and not n > 2 * b_n:
        raise PreconditionError(f"need n > 2*b_n, got n={n}, b_n={b_n}")
    if b_n > n:
        raise PreconditionError(f"b_n={b_n} exceeds n={n}")
    mats = np.empty((b_n, z.shape[1], z.shape[1]))
    for s in range(b_n):
        mats[s] = lagged_cross_products(z, s) / n
    return AutocovarianceSequence(matrices=mats, n=n)
