"""Closed-form separation thresholds and sampling-weight diagnostics.

The threshold functions return the squared center separation above which
the corresponding procedure recovers the true partition exactly with high
probability.  All logarithms are natural.  Every formula reduces to a
shared core

    4 sigma^2 (1 + sqrt(1 + p / (n_eff log n))) log n

differing only in the effective per-cluster sample size ``n_eff``: the
minimum pairwise harmonic mean for the full-data program, gamma*n/K for
uniform sketching, gamma*min_k(n_k) for the bias-corrected variant.
Routing all three through one code path makes the gamma=1 coincidences
exact rather than approximate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .datasets import Labeling

__all__ = [
    "ThresholdInputs",
    "WeightVector",
    "threshold_full",
    "threshold_sl",
    "threshold_bcsl",
    "separation_from_lambda",
    "ideal_weights",
    "epsilon_delta_fraction",
]


@dataclass(frozen=True)
class ThresholdInputs:
    """Cluster sizes and noise scale entering the threshold formulas."""

    sizes: tuple
    p: int
    sigma: float = 1.0
    gamma: float | None = None

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.sizes)
        object.__setattr__(self, "sizes", sizes)
        if len(sizes) < 1 or any(s < 1 for s in sizes):
            raise ValueError("sizes must be >= 1")
        if self.p < 0:
            raise ValueError("p must be >= 0")
        if self.sigma < 0:
            raise ValueError("sigma must be >= 0")
        if self.gamma is not None and not 0.0 < self.gamma <= 1.0:
            raise ValueError("gamma must lie in (0, 1]")

    @property
    def n(self) -> int:
        return sum(self.sizes)

    @property
    def k(self) -> int:
        return len(self.sizes)

    @property
    def n_star(self) -> float:
        """Minimum pairwise harmonic mean of cluster sizes."""
        if self.k < 2:
            raise ValueError("n_star needs at least two clusters")
        return min(
            2.0 * a * b / (a + b)
            for i, a in enumerate(self.sizes)
            for b in self.sizes[i + 1:]
        )

    @property
    def n_min(self) -> int:
        return min(self.sizes)


@dataclass(frozen=True)
class WeightVector:
    """Per-point Bernoulli sampling probabilities.

    ``clipped`` flags that at least one raw weight exceeded 1 and was
    truncated; downstream diagnostics surface it.
    """

    w: np.ndarray
    clipped: bool = False

    def __post_init__(self):
        w = np.asarray(self.w, dtype=float)
        object.__setattr__(self, "w", w)
        if w.ndim != 1:
            raise ValueError("weights must be a 1-D vector")
        if w.size and (w.min() < 0.0 or w.max() > 1.0):
            raise ValueError("weights must lie in [0, 1]")

    @property
    def n(self) -> int:
        return self.w.size

    def uniform_value(self) -> float:
        """The common weight, when weights are uniform; error otherwise."""
        if self.n == 0 or np.any(self.w != self.w[0]):
            raise ValueError("weights are not uniform")
        return float(self.w[0])


def _threshold_core(n: int, p: int, sigma: float, n_eff: float) -> float:
    if n < 2:
        raise ValueError("threshold needs n >= 2")
    if n_eff <= 0:
        raise ValueError("effective cluster size must be positive")
    log_n = math.log(n)
    return 4.0 * sigma**2 * (1.0 + math.sqrt(1.0 + p / (n_eff * log_n))) * log_n


def threshold_full(inputs: ThresholdInputs) -> float:
    """Exact-recovery cutoff for the full-data program.

    4 sigma^2 (1 + sqrt(1 + p/(n* log n))) log n with n* the minimum
    pairwise harmonic mean of the cluster sizes.
    """
    return _threshold_core(inputs.n, inputs.p, inputs.sigma, inputs.n_star)


def threshold_sl(n: int, k: int, p: int, sigma: float, gamma: float) -> float:
    """Cutoff for uniform sketching at subsampling factor gamma.

    4 sigma^2 (1 + sqrt(1 + K p/(gamma n log n))) log n.  At gamma=1 with
    equal cluster sizes this equals :func:`threshold_full` exactly.
    """
    if not 0.0 < gamma <= 1.0:
        raise ValueError("gamma must lie in (0, 1]")
    if k < 1:
        raise ValueError("k must be >= 1")
    return _threshold_core(n, p, sigma, gamma * n / k)


def threshold_bcsl(n: int, n_min: int, p: int, sigma: float, gamma: float) -> float:
    """Cutoff for the bias-corrected variant, driven by the smallest cluster.

    4 sigma^2 (1 + sqrt(1 + p/(gamma n_min log n))) log n.  With equal
    sizes (n_min = n/K) it coincides with :func:`threshold_sl`.
    """
    if not 0.0 < gamma <= 1.0:
        raise ValueError("gamma must lie in (0, 1]")
    if n_min < 1:
        raise ValueError("n_min must be >= 1")
    return _threshold_core(n, p, sigma, gamma * n_min)


def separation_from_lambda(lambda_star: float, inputs: ThresholdInputs) -> float:
    """Squared separation at a multiple of the full-data cutoff.

    Experiments parametrize difficulty by lambda*: the squared center
    separation is (lambda*)^2 times the cutoff of :func:`threshold_full`,
    so lambda* > 1 sits above the recovery threshold and lambda* < 1 below.
    """
    if lambda_star < 0:
        raise ValueError("lambda_star must be >= 0")
    return lambda_star**2 * threshold_full(inputs)


def ideal_weights(labeling: Labeling, gamma: float) -> WeightVector:
    """Size-balancing sampling weights gamma*n/(K n_k), clipped to [0, 1].

    Under these weights every cluster contributes about gamma*n/K points
    to the sketch in expectation, regardless of its size.  Requires every
    cluster non-empty.
    """
    if not 0.0 < gamma <= 1.0:
        raise ValueError("gamma must lie in (0, 1]")
    sizes = labeling.sizes
    if (sizes == 0).any():
        empty = int(np.flatnonzero(sizes == 0)[0]) + 1
        raise ValueError(f"cluster {empty} is empty; weights undefined")
    per_cluster = gamma * labeling.n / (labeling.k * sizes.astype(float))
    raw = per_cluster[labeling.labels - 1]
    clipped = bool(raw.max(initial=0.0) > 1.0)
    return WeightVector(np.minimum(raw, 1.0), clipped=clipped)


def epsilon_delta_fraction(weights: WeightVector, ideal: WeightVector, epsilon: float) -> float:
    """Smallest delta such that weights are (epsilon, delta)-accurate.

    Returns 1 minus the fraction of points whose relative deviation
    |w_i/w_i* - 1| from the ideal weight is at most epsilon; 0 means every
    point is within the band.
    """
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    if weights.n != ideal.n:
        raise ValueError("weight vectors differ in length")
    if ideal.n == 0:
        return 0.0
    if ideal.w.min() <= 0.0:
        raise ValueError("ideal weights must be positive")
    within = np.abs(weights.w / ideal.w - 1.0) <= epsilon
    return float(1.0 - within.mean())
