"""
Sketch-and-lift
===============

The solver's cost grows fast with n, so past a few thousand points the
full relaxation stops being practical.  Sketch-and-lift solves the SDP on
a random subsample and labels the rest by nearest centroid.  With the
sketch size held fixed the whole thing scales linearly in n.
"""

import time

import numpy as np

from sketchlift import (
    GmmSpec,
    SketchConfig,
    generate_gmm,
    misclassification_error,
    sdp_cluster,
    sl_cluster,
    threshold_sl,
)

k, p, m = 4, 50, 100  # target sketch of about 100 points

for n in (2000, 4000, 8000):
    gamma = m / n
    # Keep the problem honestly solvable at this gamma: twice the
    # sketched threshold.
    delta2 = 2.0 * threshold_sl(n, k, p, 1.0, gamma)
    spec = GmmSpec((n // k,) * k, p, 1.0, float(np.sqrt(delta2)), seed=0)
    data, truth = generate_gmm(spec)

    started = time.perf_counter()
    result = sl_cluster(data, k, SketchConfig(gamma=gamma, seed=0))
    elapsed = time.perf_counter() - started
    err = misclassification_error(result.labeling, truth)
    print(f"n={n:>5d}  gamma={gamma:.4f}  sketch={result.info['sketch_size']}"
          f"  error={err:.4f}  time={elapsed:.2f}s")

# Doubling n roughly doubles the work (data generation and the lift);
# the SDP solve itself always sees about m points.

# Sanity anchor: at gamma = 1 the sketch is everything and the result is
# bit-for-bit the full pipeline.
data, truth = generate_gmm(GmmSpec((60, 60), 8, 1.0, 10.0, seed=1))
config = SketchConfig(gamma=1.0, seed=1)
via_sketch = sl_cluster(data, 2, config)
direct = sdp_cluster(data, 2, rounding_seed=config.resolved_rounding_seed)
assert np.array_equal(via_sketch.labeling.labels, direct.labeling.labels)
print("\ngamma=1 sketch reproduces the full pipeline exactly")
