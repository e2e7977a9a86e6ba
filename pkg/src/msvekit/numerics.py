"""
Small dense linear algebra and distribution helpers.

Everything here works on p x p matrices with p in the tens, which is the
regime of MCMC output analysis. The eigensolver is a parallel-ordered cyclic
Jacobi method: it always converges for symmetric input, and its result does
not depend on BLAS threading.
"""

from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import ConvergenceError, NotPositiveDefiniteError, PreconditionError

__all__ = [
    "EigenDecomposition",
    "RngStream",
    "sym_eigen",
    "cholesky",
    "logdet_pd",
    "chi2_quantile",
    "chi2_cdf",
    "z_quantile",
    "mvn_sample",
    "mvn_samples",
]

JACOBI_MAX_SWEEPS = 30
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues in descending order and matching orthonormal eigenvectors (columns)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    sweeps: int = 0

    def reconstruct(self):
        q = self.eigenvectors
        return (q * self.eigenvalues) @ q.T


def _symmetrize(a, rtol=1e-8):
    a = np.array(a, dtype=float, copy=True)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise PreconditionError(f"expected a square matrix, got shape {a.shape}")
    scale = max(np.abs(a).max(initial=0.0), np.finfo(float).tiny)
    if np.abs(a - a.T).max(initial=0.0) > rtol * scale:
        raise PreconditionError("matrix is not symmetric")
    return 0.5 * (a + a.T)


def _round_robin(m):
    """Pairings for a round-robin tournament on ``m`` (even) players."""
    idx = list(range(m))
    rounds = []
    for _ in range(m - 1):
        rounds.append([(idx[i], idx[m - 1 - i]) for i in range(m // 2)])
        idx = [idx[0], idx[-1]] + idx[1:-1]
    return rounds


def _off_norm(a):
    off = a - np.diag(np.diag(a))
    return np.sqrt(np.sum(off * off))


def sym_eigen(a, max_sweeps=JACOBI_MAX_SWEEPS):
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Rotations are grouped into rounds of disjoint index pairs (round-robin
    ordering) and each round is applied as vectorized row/column updates.

    Parameters
    ----------
    a : array_like, shape (p, p)
        Symmetric to 1e-8 relative; it is symmetrized before iterating.
    max_sweeps : int
        Iteration cap. A sweep visits every off-diagonal pair once.

    Returns
    -------
    EigenDecomposition
        Eigenvalues sorted descending (stable for ties), eigenvectors with the
        largest-magnitude component of each column made positive.

    Raises
    ------
    ConvergenceError
        If the off-diagonal mass has not collapsed after ``max_sweeps``.
    """
    a = _symmetrize(a)
    p = a.shape[0]
    v = np.eye(p)
    if p == 1:
        return EigenDecomposition(a.diagonal().copy(), v, 0)

    m = p + (p % 2)
    rounds = []
    for pairs in _round_robin(m):
        pairs = [(i, j) if i < j else (j, i) for i, j in pairs if i < p and j < p]
        rounds.append((np.array([i for i, _ in pairs]), np.array([j for _, j in pairs])))

    norm = np.sqrt(np.sum(a * a))
    if norm == 0.0:
        return EigenDecomposition(np.zeros(p), v, 0)

    off = _off_norm(a)
    sweeps = 0
    while off > _EPS * norm:
        if sweeps >= max_sweeps:
            raise ConvergenceError(
                f"Jacobi did not converge in {max_sweeps} sweeps (off-norm {off:.3e})",
                residual=off,
            )
        sweeps += 1
        for ip, iq in rounds:
            apq = a[ip, iq]
            live = np.abs(apq) > np.finfo(float).tiny
            if not np.any(live):
                continue
            ip, iq, apq = ip[live], iq[live], apq[live]
            theta = (a[iq, iq] - a[ip, ip]) / (2.0 * apq)
            t = np.where(theta >= 0, 1.0, -1.0) / (np.abs(theta) + np.hypot(theta, 1.0))
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c

            rp, rq = a[ip, :].copy(), a[iq, :].copy()
            a[ip, :] = c[:, None] * rp - s[:, None] * rq
            a[iq, :] = s[:, None] * rp + c[:, None] * rq
            cp, cq = a[:, ip].copy(), a[:, iq].copy()
            a[:, ip] = cp * c - cq * s
            a[:, iq] = cp * s + cq * c
            a[ip, iq] = 0.0
            a[iq, ip] = 0.0

            vp, vq = v[:, ip].copy(), v[:, iq].copy()
            v[:, ip] = vp * c - vq * s
            v[:, iq] = vp * s + vq * c
        new_off = _off_norm(a)
        # roundoff floor: no further progress possible
        if new_off >= off and new_off <= 1e-12 * norm:
            off = new_off
            break
        off = new_off

    vals = a.diagonal().copy()
    order = np.argsort(-vals, kind="stable")
    vals, v = vals[order], v[:, order]
    lead = np.abs(v).argmax(axis=0)
    signs = np.where(v[lead, np.arange(p)] < 0, -1.0, 1.0)
    return EigenDecomposition(vals, v * signs, sweeps)


def cholesky(a):
    """Lower-triangular ``L`` with ``L @ L.T == a``.

    Raises
    ------
    NotPositiveDefiniteError
        At the first non-positive pivot; ``err.pivot`` is 1-based.
    """
    a = _symmetrize(a)
    p = a.shape[0]
    low = np.zeros_like(a)
    for j in range(p):
        row = low[j, :j]
        d = a[j, j] - row @ row
        if not d > 0.0:
            raise NotPositiveDefiniteError(
                f"matrix is not positive definite (pivot {j + 1} = {d:.6g})", pivot=j + 1
            )
        low[j, j] = np.sqrt(d)
        if j + 1 < p:
            low[j + 1:, j] = (a[j + 1:, j] - low[j + 1:, :j] @ row) / low[j, j]
    return low


def logdet_pd(a):
    """log-determinant of a positive definite matrix via its Cholesky factor."""
    return 2.0 * float(np.sum(np.log(np.diag(cholesky(a)))))


def chi2_cdf(x, df):
    return special.gammainc(df / 2.0, np.asarray(x, dtype=float) / 2.0)


def chi2_quantile(prob, df):
    """Quantile of the chi-square distribution with ``df`` degrees of freedom."""
    if not 0.0 < prob < 1.0:
        raise PreconditionError(f"prob must lie in (0, 1), got {prob}")
    if int(df) != df or df < 1:
        raise PreconditionError(f"df must be a positive integer, got {df}")
    return 2.0 * float(special.gammaincinv(df / 2.0, prob))


def z_quantile(q):
    """Standard normal quantile for q in (1/2, 1), via the chi-square(1) quantile."""
    if not 0.5 < q < 1.0:
        raise PreconditionError(f"q must lie in (0.5, 1), got {q}")
    return float(np.sqrt(chi2_quantile(2.0 * q - 1.0, 1)))


class RngStream:
    """Counter-based random stream keyed by ``(seed, stream)``.

    Backed by Philox-4x64 with the 128-bit key ``seed | stream << 64`` and a
    zero counter, so equal keys give equal sequences regardless of what other
    streams exist or which thread consumes them. Normals come from numpy's
    ``Generator.standard_normal`` (ziggurat). A stream must not be shared
    between threads.
    """

    _MASK = (1 << 64) - 1

    def __init__(self, seed, stream=0):
        self.seed = int(seed) & self._MASK
        self.stream = int(stream) & self._MASK
        key = self.seed | (self.stream << 64)
        self._gen = np.random.Generator(np.random.Philox(key=key))

    def standard_normal(self, size=None):
        return self._gen.standard_normal(size)

    def child(self, stream):
        """A fresh stream with the same seed and a different stream index."""
        return RngStream(self.seed, stream)

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream={self.stream})"


def mvn_sample(rng, mean, cov_chol):
    """One draw ``mean + L z`` with z iid standard normal."""
    mean = np.asarray(mean, dtype=float)
    low = np.asarray(cov_chol, dtype=float)
    z = rng.standard_normal(mean.shape[0])
    return mean + low @ z


def mvn_samples(rng, n, mean, cov_chol):
    """``n`` draws as rows of an (n, p) array.

    The product with ``L`` is accumulated column by column with elementwise
    operations, so row t depends only on the first ``(t + 1) * p`` normals and
    never on ``n`` (a shorter draw is a bit-identical prefix of a longer one).
    """
    mean = np.asarray(mean, dtype=float)
    low = np.asarray(cov_chol, dtype=float)
    p = mean.shape[0]
    z = rng.standard_normal((n, p))
    out = np.zeros((n, p))
    for k in range(p):
        col = low[:, k]
        if np.any(col != 0.0):
            out += z[:, k:k + 1] * col
    return out + mean
