"""
Multivariate spectral variance estimation.

Three quantities are computed here:

``msve``
    sum_{|s| < b_n} w(s) gamma_n(s), the lag-window estimate of the
    asymptotic covariance matrix Sigma of the Monte Carlo mean.
``msve_overlap_form``
    1/n sum_{l=0}^{n-b_n} sum_{k=1}^{b_n} k^2 delta2(k)
    (Ybar_l(k) - Ybar)(Ybar_l(k) - Ybar)^T, where Ybar_l(k) is the mean of
    rows l+1..l+k (1-based).
``end_correction``
    The boundary term d_n built from centered rows Z_t = Y_t - Ybar.

For every lag window these satisfy ``msve == msve_overlap_form + end_correction``
exactly in exact arithmetic; the three are computed independently so that
identity can be checked.
"""

from dataclasses import dataclass, field

import numpy as np

from .autocov import AutocovarianceSequence, autocov_range
from .chain_io import as_chain_array
from .errors import NumericError, PreconditionError
from .numerics import sym_eigen
from .windows import check_condition1

__all__ = [
    "SigmaEstimate",
    "msve",
    "msve_from_autocov",
    "msve_overlap_form",
    "end_correction",
    "PD_RTOL",
]

# smallest eigenvalue must exceed PD_RTOL * trace / p
PD_RTOL = 1e-10


@dataclass(frozen=True)
class SigmaEstimate:
    """Symmetric estimate of Sigma plus the settings that produced it."""

    matrix: np.ndarray
    window: str
    window_params: dict
    b_n: int
    n: int
    eigenvalues: np.ndarray = field(repr=False)
    is_positive_definite: bool = False
    min_eigenvalue: float = float("nan")

    @property
    def p(self):
        return self.matrix.shape[0]

    def to_dict(self):
        return {
            "matrix": self.matrix.tolist(),
            "p": self.p,
            "n": self.n,
            "b_n": self.b_n,
            "window": self.window,
            "window_params": dict(self.window_params),
            "eigenvalues": self.eigenvalues.tolist(),
            "is_positive_definite": self.is_positive_definite,
            "min_eigenvalue": self.min_eigenvalue,
        }


def _finish(mat, w, b_n, n):
    if not np.all(np.isfinite(mat)):
        raise NumericError("non-finite entries in the covariance estimate")
    scale = max(np.abs(mat).max(initial=0.0), np.finfo(float).tiny)
    asym = np.abs(mat - mat.T).max(initial=0.0)
    if asym > 1e-12 * scale:
        raise NumericError(f"estimate is not symmetric (max asymmetry {asym:.3e})")
    mat = 0.5 * (mat + mat.T)
    eig = sym_eigen(mat).eigenvalues
    p = mat.shape[0]
    min_eig = float(eig[-1])
    trace = float(np.trace(mat))
    is_pd = bool(trace > 0.0 and min_eig > PD_RTOL * trace / p)
    return SigmaEstimate(
        matrix=mat,
        window=w.label,
        window_params=dict(w.params),
        b_n=int(b_n),
        n=int(n),
        eigenvalues=eig,
        is_positive_definite=is_pd,
        min_eigenvalue=min_eig,
    )


def msve_from_autocov(seq: AutocovarianceSequence, w, b_n=None):
    """MSVE from precomputed autocovariances (lets several windows share one pass).

    ``b_n`` defaults to the length of ``seq``; a smaller value uses a prefix.
    """
    b_n = seq.b_n if b_n is None else int(b_n)
    if b_n > seq.b_n:
        raise PreconditionError(f"b_n={b_n} exceeds the {seq.b_n} available lags")
    check_condition1(w, b_n)
    weights = w.weights(np.arange(b_n), b_n)
    mat = seq.matrices[0].copy()
    for s in range(1, b_n):
        if weights[s] != 0.0:
            g = seq.matrices[s]
            mat += weights[s] * (g + g.T)
    return _finish(mat, w, b_n, seq.n)


def msve(chain, w, b_n, strict=True):
    """Multivariate spectral variance estimate of Sigma.

    Parameters
    ----------
    chain : ChainMatrix or array_like, shape (n, p)
    w : LagWindow
    b_n : int
        Truncation point; lags -(b_n-1)..(b_n-1) enter the sum.
    strict : bool
        Require n > 2 b_n (default). Disable only for toy inputs.

    Returns
    -------
    SigmaEstimate
        Symmetrized estimate with its eigenvalues and positive-definiteness
        flag. Indefinite estimates are returned as-is; inference routines
        refuse them.
    """
    seq = autocov_range(chain, b_n, strict=strict)
    return msve_from_autocov(seq, w, b_n)


def _prep(chain, w, b_n, strict):
    vals = as_chain_array(chain)
    n = vals.shape[0]
    b_n = int(b_n)
    if b_n < 1 or b_n > n:
        raise PreconditionError(f"b_n={b_n} outside 1..n={n}")
    if strict and not n > 2 * b_n:
        raise PreconditionError(f"need n > 2*b_n, got n={n}, b_n={b_n}")
    check_condition1(w, b_n)
    return vals - vals.mean(axis=0), n, b_n


def msve_overlap_form(chain, w, b_n, strict=True):
    """Overlapping-block form of the estimator, via prefix sums of centered rows."""
    z, n, b_n = _prep(chain, w, b_n, strict)
    p = z.shape[1]
    csum = np.vstack([np.zeros((1, p)), np.cumsum(z, axis=0)])
    n_blocks = n - b_n + 1  # l = 0..n-b_n
    d2 = w.delta2(np.arange(1, b_n + 1), b_n)
    out = np.zeros((p, p))
    for k in range(1, b_n + 1):
        c = d2[k - 1]
        if c == 0.0:
            continue
        # k * (Ybar_l(k) - Ybar) = sum of Z over rows l+1..l+k
        d = csum[k:k + n_blocks] - csum[:n_blocks]
        out += c * (d.T @ d)
    return out / n


def _pair_sum(z, lo, hi, s):
    """sum_{l=lo}^{hi} (Z_l Z_{l+s}^T + Z_{l+s} Z_l^T), 1-based l; 0 when empty."""
    if hi < lo:
        return 0.0
    a = z[lo - 1:hi]
    b = z[lo - 1 + s:hi + s]
    m = a.T @ b
    return m + m.T


def _diag_sum(z, lo, hi):
    """sum_{l=lo}^{hi} Z_l Z_l^T, 1-based l; 0 when empty."""
    if hi < lo:
        return 0.0
    a = z[lo - 1:hi]
    return a.T @ a


def end_correction(chain, w, b_n, strict=True):
    """Boundary term d_n, evaluated term by term with empty sums as zero."""
    z, n, b_n = _prep(chain, w, b_n, strict)
    p = z.shape[1]
    d1 = {t: w.delta1(np.array([t]), b_n)[0] for t in range(1, b_n + 1)}
    out = np.zeros((p, p))
    for t in range(1, b_n + 1):
        inner = _diag_sum(z, 1, t - 1) + _diag_sum(z, n - b_n + t + 1, n)
        out = out + d1[t] * inner
    for s in range(1, b_n):
        for t in range(1, b_n - s + 1):
            inner = _pair_sum(z, 1, t - 1, s) + _pair_sum(z, n - b_n + t + 1, n - s, s)
            out = out + d1[s + t] * inner
    return out / n
