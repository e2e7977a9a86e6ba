"""msvekit: multivariate spectral variance estimation for Monte Carlo output."""

__version__ = "0.1.0"

from .chain_io import ChainMatrix, MeanAndScatter, acf_ccf, load_chain, save_chain, summarize
from .windows import (
    LagWindow,
    TruncationRule,
    condition_diagnostics,
    delta1,
    delta2,
    make_window,
    parse_window,
    window_identity_check,
)
from .autocov import AutocovarianceSequence, autocov_range, sample_autocov
from .msve import SigmaEstimate, end_correction, msve, msve_from_autocov, msve_overlap_form
from .numerics import (
    EigenDecomposition,
    RngStream,
    chi2_quantile,
    cholesky,
    mvn_sample,
    sym_eigen,
)
from .inference import (
    ConfidenceReport,
    confidence_report,
    ellipsoid,
    ellipsoid_volume_pth_root,
    multivariate_ess,
    univariate_boxes,
)
from .var1 import Var1Spec, Var1Truth, ar1_cov, setting, simulate, stationary_cov, true_sigma, truth

__all__ = [
    "ChainMatrix", "MeanAndScatter", "acf_ccf", "load_chain", "save_chain", "summarize",
    "LagWindow", "TruncationRule", "condition_diagnostics", "delta1", "delta2",
    "make_window", "parse_window", "window_identity_check",
    "AutocovarianceSequence", "autocov_range", "sample_autocov",
    "SigmaEstimate", "end_correction", "msve", "msve_from_autocov", "msve_overlap_form",
    "EigenDecomposition", "RngStream", "chi2_quantile", "cholesky", "mvn_sample", "sym_eigen",
    "ConfidenceReport", "confidence_report", "ellipsoid", "ellipsoid_volume_pth_root",
    "multivariate_ess", "univariate_boxes",
    "Var1Spec", "Var1Truth", "ar1_cov", "setting", "simulate", "stationary_cov",
    "true_sigma", "truth",
]
