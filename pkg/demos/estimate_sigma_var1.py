"""
Estimating Sigma for a simulated VAR(1) chain
==============================================

A ten-dimensional VAR(1) process has a closed-form asymptotic covariance,
so we can see how close the lag-window estimates get.
"""

import numpy as np

import msvekit as mk

spec = mk.setting(1)
true = mk.truth(spec)
print("largest true eigenvalue:", true.sigma_eigenvalues[0])

# one trajectory, observed at increasing lengths
chain = mk.simulate(spec, 50_000, mk.RngStream(seed=2024))
rule = mk.TruncationRule()  # b_n = floor(n^(1/3))

for n in (1000, 10_000, 50_000):
    head = chain.head(n)
    b = rule(n)
    lags = mk.autocov_range(head, b)
    for name in ("bartlett", "tukey-hanning", "scaled-bartlett,eta=2"):
        est = mk.msve_from_autocov(lags, mk.parse_window(name))
        err = np.linalg.norm(est.matrix - true.Sigma) / np.linalg.norm(true.Sigma)
        print(f"n={n:6d} b_n={b:2d} {name:22s} rel. Frobenius error {err:.3f}")
