"""
VAR(1) reference process with known long-run covariance.

    y_t = Phi y_{t-1} + eps_t,    eps_t ~ N_p(0, W),    y_0 = 0

When the spectral radius of Phi is below one the stationary covariance V
solves V = Phi V Phi^T + W, the lag-s autocovariance is Phi^s V, and the
asymptotic covariance of the sample mean is

    Sigma = (I - Phi)^{-1} V + V (I - Phi^T)^{-1} - V.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import signal

from .chain_io import ChainMatrix
from .errors import NotPositiveDefiniteError, NumericError, PreconditionError
from .numerics import cholesky, mvn_samples, sym_eigen

__all__ = [
    "Var1Spec",
    "Var1Truth",
    "ar1_cov",
    "stationary_cov",
    "true_sigma",
    "truth",
    "simulate",
    "setting",
    "SETTINGS",
    "spec_from_dict",
    "table2_eigenvalues",
]


def ar1_cov(p, rho):
    """Covariance with entries rho ** |i - j|."""
    if not abs(rho) < 1.0:
        raise PreconditionError(f"|rho| must be < 1, got {rho}")
    idx = np.arange(p)
    lag = np.abs(idx[:, None] - idx[None, :])
    return np.where(lag == 0, 1.0, float(rho) ** lag)


def _is_diagonal(m):
    return not np.any(m - np.diag(np.diag(m)))


@dataclass(frozen=True)
class Var1Spec:
    phi: np.ndarray
    w: np.ndarray
    name: str = ""
    w_chol: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        phi = np.array(self.phi, dtype=float)
        w = np.array(self.w, dtype=float)
        if phi.ndim != 2 or phi.shape[0] != phi.shape[1]:
            raise PreconditionError(f"phi must be square, got shape {phi.shape}")
        if w.shape != phi.shape:
            raise PreconditionError(f"W shape {w.shape} does not match phi {phi.shape}")
        rho = _spectral_radius(phi)
        if not rho < 1.0:
            raise PreconditionError(f"spectral radius of phi is {rho:.6g}; must be < 1")
        try:
            chol = cholesky(w)
        except NotPositiveDefiniteError as err:
            raise PreconditionError(f"W is not positive definite: {err}") from err
        for arr in (phi, w, chol):
            arr.setflags(write=False)
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "w_chol", chol)

    @property
    def p(self):
        return self.phi.shape[0]

    @property
    def phi_max(self):
        return _spectral_radius(self.phi)

    @property
    def is_diagonal(self):
        return _is_diagonal(self.phi)


def _spectral_radius(phi):
    if _is_diagonal(phi):
        return float(np.abs(np.diag(phi)).max(initial=0.0))
    if np.array_equal(phi, phi.T):
        return float(np.abs(sym_eigen(phi).eigenvalues).max())
    return float(np.abs(np.linalg.eigvals(phi)).max())


def stationary_cov(spec, method="auto"):
    """Stationary covariance V of the process.

    ``method="kron"`` solves the p^2 x p^2 system
    (I - Phi kron Phi) vec(V) = vec(W) densely; ``"diagonal"`` uses
    V_ij = W_ij / (1 - l_i l_j) and needs a diagonal Phi. ``"auto"`` picks
    the closed form whenever it applies.
    """
    phi, w = spec.phi, spec.w
    if method not in ("auto", "kron", "diagonal"):
        raise PreconditionError(f"unknown method {method!r}")
    if method == "diagonal" and not spec.is_diagonal:
        raise PreconditionError("closed form needs a diagonal phi")
    if method != "kron" and spec.is_diagonal:
        lam = np.diag(phi)
        v = w / (1.0 - np.outer(lam, lam))
    else:
        p = spec.p
        lhs = np.eye(p * p) - np.kron(phi, phi)
        v = np.linalg.solve(lhs, w.reshape(-1, order="F")).reshape(p, p, order="F")
    return 0.5 * (v + v.T)


def true_sigma(spec, v=None):
    """Asymptotic covariance of the sample mean; verified positive definite."""
    if v is None:
        v = stationary_cov(spec)
    eye = np.eye(spec.p)
    a = eye - spec.phi
    try:
        left = np.linalg.solve(a, v)
        right = np.linalg.solve(a, v.T).T  # V (I - Phi^T)^{-1}
    except np.linalg.LinAlgError as err:
        raise NumericError("I - Phi is singular") from err
    sigma = left + right - v
    sigma = 0.5 * (sigma + sigma.T)
    cholesky(sigma)
    return sigma


@dataclass(frozen=True)
class Var1Truth:
    spec: Var1Spec
    V: np.ndarray
    Sigma: np.ndarray

    def lag_autocov(self, s):
        """gamma(s) = Phi^s V for s >= 0 and V (Phi^T)^|s| for s < 0."""
        g = np.linalg.matrix_power(self.spec.phi, abs(int(s))) @ self.V
        return g if s >= 0 else g.T

    @property
    def sigma_eigenvalues(self):
        return sym_eigen(self.Sigma).eigenvalues


def truth(spec):
    v = stationary_cov(spec)
    return Var1Truth(spec=spec, V=v, Sigma=true_sigma(spec, v))


def simulate(spec, n, rng):
    """Rows y_1..y_n of the process started at y_0 = 0.

    Innovations are drawn as one (n, p) block, so a run of length n is an
    exact prefix of any longer run on an identical stream.
    """
    n = int(n)
    if n < 1:
        raise PreconditionError(f"n must be >= 1, got {n}")
    p = spec.p
    eps = mvn_samples(rng, n, np.zeros(p), spec.w_chol)
    if spec.is_diagonal:
        lam = np.diag(spec.phi)
        y = np.empty_like(eps)
        for i in range(p):
            y[:, i] = signal.lfilter([1.0], [1.0, -lam[i]], eps[:, i])
    else:
        phi = spec.phi
        y = np.empty_like(eps)
        prev = np.zeros(p)
        for t in range(n):
            prev = phi @ prev + eps[t]
            y[t] = prev
    return ChainMatrix(y)


_TABLE2 = {
    1: (10, 0.01, 0.20),
    2: (10, 0.40, 0.60),
    3: (10, 0.70, 0.90),
    4: (50, 0.01, 0.20),
    5: (50, 0.40, 0.60),
    6: (50, 0.70, 0.90),
}
SETTINGS = tuple(sorted(_TABLE2))


def table2_eigenvalues(p, lo, hi):
    """Linear grid lo + i (hi - lo) / (p - 1), i = 0..p-1."""
    i = np.arange(p)
    return lo + i * (hi - lo) / (p - 1)


def setting(setting_id, rho=0.5):
    """Simulation settings 1..6: diagonal Phi on a linear eigenvalue grid, AR(1) W."""
    try:
        p, lo, hi = _TABLE2[int(setting_id)]
    except (KeyError, ValueError):
        raise PreconditionError(f"setting must be one of {SETTINGS}, got {setting_id}") from None
    return Var1Spec(
        phi=np.diag(table2_eigenvalues(p, lo, hi)),
        w=ar1_cov(p, rho),
        name=f"setting-{int(setting_id)}",
    )


def spec_from_dict(d):
    """Build a spec from ``{"phi": matrix | diag-list, "w": matrix | {"ar1": {"rho": r}}}``.

    ``{"setting": k}`` is also accepted.
    """
    if "setting" in d and d["setting"] is not None:
        return setting(d["setting"])
    if "phi" not in d:
        raise PreconditionError("spec needs 'phi' (matrix or diagonal list) or 'setting'")
    phi = np.asarray(d["phi"], dtype=float)
    if phi.ndim == 1:
        phi = np.diag(phi)
    p = phi.shape[0]
    w = d.get("w", {"ar1": {"rho": 0.0}})
    if isinstance(w, dict):
        if "ar1" not in w:
            raise PreconditionError(f"unknown W description {w!r}")
        w = ar1_cov(p, float(w["ar1"].get("rho", 0.0)))
    else:
        w = np.asarray(w, dtype=float)
    return Var1Spec(phi=phi, w=w, name=str(d.get("name", "custom")))
