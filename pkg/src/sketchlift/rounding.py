"""Spectral rounding: turn a relaxed membership matrix into a partition.

At high separation the solver's matrix is (numerically) the integral
optimum and its top eigenvectors are exact cluster indicators; rounding
then reads the partition off directly.  Away from that regime the same
procedure degrades gracefully: embed points by the leading eigenvectors
and cluster the embedding rows.
"""

from __future__ import annotations

import numpy as np

from .datasets import Labeling
from .kmeans import kmeans
from .sdp import MembershipMatrix

__all__ = ["spectral_round"]

_RESTARTS = 10  # rounding runs on m x k rows; restarts are cheap insurance


def spectral_round(z: MembershipMatrix, k: int, seed: int = 0) -> Labeling:
    """Cluster the rows of the top-k eigenvector embedding of z.

    The matrix is symmetrized first (solver output carries roundoff-level
    asymmetry).  The embedding is fed to seeded K-means++ with
    ``_RESTARTS`` restarts, so the result is deterministic in (z, k, seed).
    Empty clusters cannot occur: the K-means engine repairs them.
    """
    m = z.m
    if k > m:
        raise ValueError(f"k={k} exceeds the matrix size m={m}")
    sym = 0.5 * (z.z + z.z.T)
    try:
        _, vecs = np.linalg.eigh(sym)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(
            f"eigendecomposition failed during rounding: {exc}"
        ) from exc
    embedding = vecs[:, m - k:]  # eigh orders eigenvalues ascending
    return kmeans(embedding, k, seed=seed, restarts=_RESTARTS).labeling
