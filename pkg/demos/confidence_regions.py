"""
Joint confidence regions and effective sample size
===================================================

The mean of a correlated chain can be summarised by a chi-square ellipsoid
or by coordinate intervals. The ellipsoid is usually the smaller of the two.
"""

import numpy as np

import msvekit as mk

spec = mk.Var1Spec(phi=np.diag([0.05, 0.1, 0.15, 0.2, 0.6]), w=mk.ar1_cov(5, 0.5))
chain = mk.simulate(spec, 20_000, mk.RngStream(7))

est = mk.msve(chain, mk.make_window("bartlett"), mk.TruncationRule()(chain.n))
report = mk.confidence_report(chain, est, level=0.9)

print("center:", np.round(report.center, 4))
print("volume^(1/p):")
for key, val in report.volume_pth_root.items():
    print(f"  {key:12s} {val:.5f}")

# effective sample size: how many iid draws the chain is worth
print(f"ESS = {report.ess:.0f} out of n = {chain.n}")

# the true mean is zero; is it inside the ellipsoid?
ell = mk.ellipsoid(est, mk.summarize(chain), chain.n, 0.9)
print("statistic at the truth:", round(ell.statistic(np.zeros(5)), 3), "radius:", round(ell.chi2_radius, 3))
