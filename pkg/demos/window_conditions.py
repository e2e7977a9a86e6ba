"""
Which lag windows give consistent estimates?
=============================================

The sum of |second differences| of the window must vanish as b_n grows.
Bartlett and the smooth windows pass. Simple truncation and the scaled
Bartlett window do not.
"""

import msvekit as mk

rule = mk.TruncationRule(1 / 3)
grid = [1000, 10_000, 100_000]

for name in ("bartlett", "parzen,q=2", "tukey-hanning", "truncated", "scaled-bartlett,eta=2"):
    w = mk.parse_window(name)
    rep = mk.condition_diagnostics(w, rule, grid)
    sums = [round(r["delta2_abs_sum"], 4) for r in rep["rows"]]
    print(f"{w.label:22s} sum|D2 w| = {sums}  verdict: {'pass' if rep['pass'] else 'fail'}")

# difference identities of the window, checked numerically
print(mk.window_identity_check(mk.make_window("tukey-hanning"), 7))
