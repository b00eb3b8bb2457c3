"""Point estimation end to end, with the bias oracle as a cross-check.

We draw Y = X * eta with X ~ Exp(1) and uniform eta, estimate f_X(1),
and compare against (a) the true value e^(-1) and (b) the exact expected
value of the estimator, computed by quadrature.  Bandwidth comes either
from a hand-picked h or from the plug-in tuning rules.
"""

import math

import numpy as np

import melldec as md
import melldec.lkernel as lk

rng = np.random.default_rng(42)
n = 20000
x = rng.exponential(1.0, n)
y = x * rng.random(n)  # uniform multiplicative noise

x0 = 1.0
truth = math.exp(-1.0)

print(f"n = {n}, estimating f_X({x0}) = {truth:.6f}\n")
print("  h      estimate   exact mean   bias       stochastic part")
for h in (0.6, 0.4, 0.25, 0.15):
    L = lk.lkernel_closed_beta(1.0, 1, h)
    cfg = md.EstimatorConfig(md.AtPoint(x0), 0.0, h, L)
    est = md.estimate_at_point(y, cfg)
    mean = md.expected_estimate(cfg, lambda t: math.exp(-t))
    print(f"  {h:4.2f}   {est:.6f}   {mean:.6f}   {mean - truth:+.6f}  "
          f"{est - mean:+.6f}")
print("\nonce h is small the bias column shrinks like h^2 (order-1 kernel);")
print("the stochastic column is mean-zero noise of order 1/sqrt(n h).")

# plug-in bandwidths from the three tuning regimes
print("\nplug-in bandwidth rules at n = 20000:")
h1 = md.bandwidth_smooth(1.0, 1.0, x0, n)
print(f"  smooth class (A=1, beta=1, gamma=1):        h = {h1:.4f}")
h2 = md.bandwidth_moment(1.0, 1.0, 1.0, 1.0, 1.0, math.inf, x0, n)
s2 = md.s_star_moment(1.0, math.inf)
print(f"  moment-only class (alpha=1):                h = {h2:.4f}, "
      f"s* = {s2:+.2f}")
h3 = md.bandwidth_supersmooth(1.0, 1.0, math.pi / 2, 2, x0, n)
print(f"  supersmooth errors (lambda=2, gamma=pi/2):  h = {h3:.4f}")

L = lk.lkernel_closed_beta(1.0, 1, h1)
cfg = md.EstimatorConfig(md.AtPoint(x0), 0.0, h1, L)
print(f"\nestimate at the smooth-rule bandwidth: "
      f"{md.estimate_at_point(y, cfg):.6f}")
