import math

import numpy as np
import pytest
from scipy import integrate

# (criterion, passed, detail) lines collected by test_acceptance
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for crit, ok, detail in sorted(ACCEPTANCE_LINES, key=lambda x: x[0]):
        terminalreporter.write_line(f"criterion {crit}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def naive_autocov(y, s):
    """Double-loop lag-s autocovariance with full-sample mean and divisor n."""
    y = np.asarray(y, dtype=float)
    n, p = y.shape
    mean = [sum(y[t, i] for t in range(n)) / n for i in range(p)]
    g = np.zeros((p, p))
    ts = range(n - s) if s >= 0 else range(-s, n)
    for t in ts:
        for i in range(p):
            for j in range(p):
                g[i, j] += (y[t, i] - mean[i]) * (y[t + s, j] - mean[j])
    return g / n


def scalar_sve(x, weight, b_n):
    """Univariate spectral variance estimate written with plain Python loops."""
    x = [float(v) for v in x]
    n = len(x)
    m = sum(x) / n
    total = 0.0
    for s in range(-(b_n - 1), b_n):
        k = abs(s)
        acc = 0.0
        for t in range(n - k):
            acc += (x[t] - m) * (x[t + k] - m)
        total += weight(s) * acc / n
    return total


def _oracle_cdf(x, k):
    """Chi-square CDF by quadrature of the density (independent of the gamma routines)."""
    # substitute t = u^2 so the df=1 singularity at 0 disappears
    logc = -(k / 2) * math.log(2) - math.lgamma(k / 2)

    def f(u):
        return 2 * u * math.exp(logc + (k / 2 - 1) * math.log(u * u) - u * u / 2) if u > 0 else (
            2 * math.exp(logc) if k == 1 else 0.0)

    val, _ = integrate.quad(f, 0.0, math.sqrt(x), epsabs=1e-14, epsrel=1e-13, limit=200)
    return val


def chi2_oracle_quantile(prob, k):
    """Bisection on the quadrature CDF."""
    lo, hi = 0.0, 1.0
    while _oracle_cdf(hi, k) < prob:
        hi *= 2
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if _oracle_cdf(mid, k) < prob:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
