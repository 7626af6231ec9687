"""
Exact-recovery thresholds
=========================

The separation level at which the SDP pipeline starts recovering the true
partition exactly has a closed form.  This script evaluates it for a few
designs and shows how subsampling shifts it.
"""

import numpy as np

from sketchlift import (
    ThresholdInputs,
    separation_from_lambda,
    threshold_bcsl,
    threshold_full,
    threshold_sl,
)

# A balanced mixture: four clusters of 500 points in 1000 dimensions.
inputs = ThresholdInputs(sizes=(500,) * 4, p=1000, sigma=1.0)
print(f"full-data threshold (n=2000, p=1000, K=4): "
      f"{threshold_full(inputs):.4f}")

# Dimension matters: the threshold grows roughly like sqrt(p) once p
# dominates n * log n.
for p in (10, 100, 1000, 10000):
    t = threshold_full(ThresholdInputs((500,) * 4, p, 1.0))
    print(f"  p={p:>6d}  threshold={t:.3f}")

# Sketching trades data for speed.  Keeping a gamma fraction of the points
# shrinks the effective per-cluster sample size to gamma * n / K, so the
# required separation rises as gamma falls.
print("\nsketched threshold at n=10000, K=4, p=1000:")
for gamma in (1.0, 0.5, 0.2, 0.1, 0.05):
    t = threshold_sl(10000, 4, 1000, 1.0, gamma)
    print(f"  gamma={gamma:<5}  threshold={t:.3f}")

# gamma = 1 keeps every point, so the sketched formula collapses to the
# full-data one exactly (same floating-point value, not just close).
full = threshold_full(ThresholdInputs((2500,) * 4, 1000, 1.0))
assert threshold_sl(10000, 4, 1000, 1.0, 1.0) == full
print(f"\ngamma=1 collapse: threshold_sl == threshold_full == {full:.4f}")

# With unbalanced clusters the bias-corrected variant is governed by the
# smallest cluster rather than the average one.
n, n_min = 2000, 100
print(f"\nunbalanced design, smallest cluster {n_min} of {n}:")
print(f"  BCSL threshold: {threshold_bcsl(n, n_min, 200, 1.0, 0.3):.3f}")
print(f"  SL threshold:   {threshold_sl(n, 4, 200, 1.0, 0.3):.3f}")

# Benchmarks are usually parameterized by lambda_star, the squared
# separation as a multiple of the full-data threshold.
inputs = ThresholdInputs((100,) * 4, 100, 1.0)
for lam in (0.8, 1.0, 1.2, 2.0):
    d2 = separation_from_lambda(lam, inputs)
    print(f"lambda*={lam:<4}  delta^2={d2:8.3f}  delta={np.sqrt(d2):.3f}")
