"""
Confidence regions and effective sample size from an estimate of Sigma.

The ellipsoid at level 1 - alpha is

    { theta : n (theta_n - theta)^T Sigma^{-1} (theta_n - theta) <= chi2_{1-alpha, p} }

and the coordinate boxes use theta_n,i +/- z_q sqrt(Sigma_ii / n) with
q = (1 + level) / 2 (uncorrected) or q = 1 - (1 - level) / (2p)
(Bonferroni). Membership is closed: points on the boundary are inside.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg, special

from .chain_io import MeanAndScatter, summarize
from .errors import NotPositiveDefiniteError, PreconditionError
from .numerics import chi2_quantile, cholesky, logdet_pd, z_quantile

__all__ = [
    "Ellipsoid",
    "Box",
    "ConfidenceReport",
    "ellipsoid",
    "ellipsoid_volume_pth_root",
    "univariate_boxes",
    "multivariate_ess",
    "confidence_report",
]


def _matrix(estimate):
    return np.asarray(getattr(estimate, "matrix", estimate), dtype=float)


def _require_pd(estimate):
    if getattr(estimate, "is_positive_definite", True) is False:
        raise NotPositiveDefiniteError(
            "covariance estimate is not positive definite; refusing to build inference on it"
        )
    return cholesky(_matrix(estimate))


def _check_level(level):
    if not 0.0 < level < 1.0:
        raise PreconditionError(f"level must lie in (0, 1), got {level}")


@dataclass(frozen=True)
class Ellipsoid:
    center: np.ndarray
    sigma_chol: np.ndarray
    n: int
    level: float
    chi2_radius: float

    @property
    def shape(self):
        """Sigma / n."""
        return self.sigma_chol @ self.sigma_chol.T / self.n

    def statistic(self, theta):
        """n (center - theta)^T Sigma^{-1} (center - theta)."""
        d = self.center - np.asarray(theta, dtype=float)
        u = linalg.solve_triangular(self.sigma_chol, d, lower=True)
        return float(self.n * (u @ u))

    def contains(self, theta):
        return self.statistic(theta) <= self.chi2_radius


@dataclass(frozen=True)
class Box:
    center: np.ndarray
    half_widths: np.ndarray
    level: float
    corrected: bool

    def contains(self, theta):
        d = np.abs(np.asarray(theta, dtype=float) - self.center)
        return bool(np.all(d <= self.half_widths))

    def volume_pth_root(self):
        """Geometric mean of the side lengths."""
        return float(np.exp(np.mean(np.log(2.0 * self.half_widths))))


def ellipsoid(estimate, summary, n, level=0.9):
    """Confidence ellipsoid centred at the sample mean."""
    _check_level(level)
    chol = _require_pd(estimate)
    center = np.asarray(getattr(summary, "mean", summary), dtype=float)
    p = chol.shape[0]
    return Ellipsoid(
        center=center,
        sigma_chol=chol,
        n=int(n),
        level=float(level),
        chi2_radius=chi2_quantile(level, p),
    )


def ellipsoid_volume_pth_root(estimate, n, level=0.9, p=None):
    """Volume of the confidence ellipsoid raised to 1/p, evaluated in log space."""
    _check_level(level)
    mat = _matrix(estimate)
    if p is None:
        p = mat.shape[0]
    if getattr(estimate, "is_positive_definite", True) is False:
        raise NotPositiveDefiniteError("covariance estimate is not positive definite")
    logdet = logdet_pd(mat)
    log_unit_ball = 0.5 * p * math.log(math.pi) - special.gammaln(0.5 * p + 1.0)
    log_vol = log_unit_ball + 0.5 * p * math.log(chi2_quantile(level, p) / n) + 0.5 * logdet
    return float(math.exp(log_vol / p))


def univariate_boxes(estimate, summary, n, level=0.9, corrected=False):
    """Coordinatewise intervals, optionally Bonferroni corrected over p tests."""
    _check_level(level)
    mat = _matrix(estimate)
    p = mat.shape[0]
    diag = np.diag(mat)
    if np.any(diag <= 0.0):
        raise PreconditionError("diagonal of the estimate must be positive")
    q = 1.0 - (1.0 - level) / (2.0 * p) if corrected else 0.5 * (1.0 + level)
    half = z_quantile(q) * np.sqrt(diag / n)
    center = np.asarray(getattr(summary, "mean", summary), dtype=float)
    return Box(center=center, half_widths=half, level=float(level), corrected=bool(corrected))


def multivariate_ess(summary, estimate, n=None):
    """n (|Lambda| / |Sigma|)^(1/p), computed with log-determinants."""
    lam = summary.sample_cov if isinstance(summary, MeanAndScatter) else np.asarray(summary)
    if n is None:
        n = summary.n
    mat = _matrix(estimate)
    if getattr(estimate, "is_positive_definite", True) is False:
        raise NotPositiveDefiniteError("covariance estimate is not positive definite")
    p = mat.shape[0]
    return float(n * math.exp((logdet_pd(lam) - logdet_pd(mat)) / p))


@dataclass(frozen=True)
class ConfidenceReport:
    center: np.ndarray
    shape: np.ndarray
    level: float
    chi2_radius: float
    box_half_widths: np.ndarray
    bonferroni_half_widths: np.ndarray
    volume_pth_root: dict
    ess: float
    n: int

    def to_dict(self):
        return {
            "center": self.center.tolist(),
            "shape": self.shape.tolist(),
            "level": self.level,
            "chi2_radius": self.chi2_radius,
            "box_half_widths": {
                "uncorrected": self.box_half_widths.tolist(),
                "bonferroni": self.bonferroni_half_widths.tolist(),
            },
            "volume_pth_root": dict(self.volume_pth_root),
            "ess": self.ess,
            "ess_over_n": self.ess / self.n,
            "n": self.n,
        }


def confidence_report(chain, estimate, level=0.9, summary=None):
    """Ellipsoid, both boxes, their volumes and the multivariate ESS."""
    if summary is None:
        summary = summarize(chain)
    n = summary.n
    ell = ellipsoid(estimate, summary, n, level)
    plain = univariate_boxes(estimate, summary, n, level, corrected=False)
    bonf = univariate_boxes(estimate, summary, n, level, corrected=True)
    return ConfidenceReport(
        center=summary.mean,
        shape=_matrix(estimate) / n,
        level=float(level),
        chi2_radius=ell.chi2_radius,
        box_half_widths=plain.half_widths,
        bonferroni_half_widths=bonf.half_widths,
        volume_pth_root={
            "ellipsoid": ellipsoid_volume_pth_root(estimate, n, level),
            "bonferroni": bonf.volume_pth_root(),
            "uncorrected": plain.volume_pth_root(),
        },
        ess=multivariate_ess(summary, estimate, n),
        n=n,
    )
