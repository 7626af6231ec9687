"""Lloyd's algorithm with K-means++ seeding and nearest-centroid assignment.

Serves three roles: the stand-alone clustering baseline, the pilot
partition for weighted sketching, and the engine that turns spectral
embeddings into labels during rounding.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .datasets import Labeling, subseed

__all__ = [
    "Centroids",
    "LloydResult",
    "kmeanspp_init",
    "lloyd",
    "nearest_centroid_assign",
    "kmeans",
]


@dataclass(frozen=True)
class Centroids:
    """K cluster centers as the rows of a (k, p) matrix."""

    centers: np.ndarray

    def __post_init__(self):
        centers = np.asarray(self.centers, dtype=float)
        object.__setattr__(self, "centers", centers)
        if centers.ndim != 2 or centers.shape[0] < 1:
            raise ValueError("centers must be a (k, p) matrix with k >= 1")
        if not np.all(np.isfinite(centers)):
            raise ValueError("centers must be finite")

    @property
    def k(self) -> int:
        return self.centers.shape[0]

    @property
    def p(self) -> int:
        return self.centers.shape[1]


@dataclass(frozen=True)
class LloydResult:
    """Labeling, centroids, and final within-cluster sum of squares.

    ``objective_trace`` records the objective after each centroid update;
    it is non-increasing by construction of the algorithm.
    """

    labeling: Labeling
    centroids: Centroids
    objective: float
    iterations: int
    converged: bool
    objective_trace: tuple


def _sq_dist(data, centers):
    # cdist computes |x - c|^2 by direct differencing, so exactly
    # coincident points tie exactly and argmin resolves to the lowest id.
    return cdist(data, centers, metric="sqeuclidean")


def kmeanspp_init(data, k: int, seed) -> Centroids:
    """D²-weighted seeding: spread initial centers across the data.

    The first center is uniform over points; each later center is a point
    sampled with probability proportional to its squared distance from the
    nearest center chosen so far.  ``seed`` may be an int or a Generator
    (the latter lets callers thread one stream through several restarts).
    """
    data = np.asarray(data, dtype=float)
    n = data.shape[0]
    if k > n:
        raise ValueError(f"k={k} exceeds the number of points n={n}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    chosen = np.empty(k, dtype=np.int64)
    chosen[0] = rng.integers(n)
    d2 = _sq_dist(data, data[chosen[0]][None, :])[:, 0]
    for j in range(1, k):
        total = d2.sum()
        if total > 0:
            probs = d2 / total
            chosen[j] = rng.choice(n, p=probs)
        else:
            # all remaining mass at already-chosen points (duplicates)
            chosen[j] = rng.integers(n)
        d2 = np.minimum(d2, _sq_dist(data, data[chosen[j]][None, :])[:, 0])
    return Centroids(data[chosen].copy())


def nearest_centroid_assign(data, centroids: Centroids) -> Labeling:
    """Assign every point to its closest center, ties to the lowest id."""
    data = np.asarray(data, dtype=float)
    if data.ndim != 2 or data.shape[1] != centroids.p:
        raise ValueError(
            f"data dimension {data.shape} does not match centroid dimension p={centroids.p}"
        )
    labels = np.argmin(_sq_dist(data, centroids.centers), axis=1) + 1
    return Labeling(labels, centroids.k)


def _repair_empty(data, labels, centers, d2):
    """Reseed each empty cluster at the point farthest from its center."""
    k = centers.shape[0]
    assigned = d2[np.arange(len(labels)), labels - 1].copy()
    for c in range(1, k + 1):
        if np.any(labels == c):
            continue
        far = int(np.argmax(assigned))
        labels[far] = c
        centers[c - 1] = data[far]
        assigned[far] = 0.0
    return labels, centers


def lloyd(data, k: int, init: Centroids, max_iter: int = 100) -> LloydResult:
    """Alternate nearest-center assignment and within-cluster means.

    Stops when the assignment stabilizes or after ``max_iter`` rounds.  A
    cluster left empty by an assignment step is reseeded at the point
    farthest from its current center, which strictly lowers the objective,
    so the recorded objective trace stays non-increasing regardless.
    """
    data = np.asarray(data, dtype=float)
    n = data.shape[0]
    if k > n:
        raise ValueError(f"k={k} exceeds the number of points n={n}")
    if init.k != k or init.p != data.shape[1]:
        raise ValueError("init shape does not match (k, p)")
    centers = init.centers.copy()
    labels = np.zeros(n, dtype=np.int64)
    trace = []
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        d2 = _sq_dist(data, centers)
        new_labels = np.argmin(d2, axis=1) + 1
        repaired = len(np.unique(new_labels)) < k
        if repaired:
            new_labels, centers = _repair_empty(data, new_labels, centers, d2)
        # a repair moves a center, so the state is not yet a fixed point
        if not repaired and np.array_equal(new_labels, labels):
            converged = True
            break
        labels = new_labels
        for c in range(1, k + 1):
            members = labels == c
            centers[c - 1] = data[members].mean(axis=0)
        within = data - centers[labels - 1]
        trace.append(float(np.einsum("ij,ij->", within, within)))
    return LloydResult(
        labeling=Labeling(labels, k),
        centroids=Centroids(centers),
        objective=trace[-1] if trace else 0.0,
        iterations=it,
        converged=converged,
        objective_trace=tuple(trace),
    )


def kmeans(data, k: int, seed: int = 0, restarts: int = 1, max_iter: int = 100) -> LloydResult:
    """K-means++ followed by Lloyd, keeping the best of ``restarts`` runs."""
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    best = None
    for r in range(restarts):
        rng = np.random.default_rng(subseed(seed, r))
        init = kmeanspp_init(data, k, rng)
        result = lloyd(data, k, init, max_iter=max_iter)
        if best is None or result.objective < best.objective:
            best = result
    return best
