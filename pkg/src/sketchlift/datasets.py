"""Gaussian-mixture instance generation and CSV dataset I/O.

Points are stored row-wise (one observation per row).  Generated datasets
are cluster-contiguous: the first ``sizes[0]`` rows belong to cluster 1,
the next ``sizes[1]`` to cluster 2, and so on.  Clustering routines in this
package are order-invariant, so callers that want shuffled inputs can apply
a seeded permutation themselves.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Labeling",
    "GmmSpec",
    "CsvFormatError",
    "simplex_centers",
    "generate_gmm",
    "load_csv",
    "save_csv",
    "subseed",
]


def subseed(seed: int, *tags: int) -> int:
    """Derive an independent child seed from ``seed`` and integer tags.

    Wraps :class:`numpy.random.SeedSequence` so that replicate and
    component substreams are decorrelated by construction and reproducible
    across platforms.  Child seeds are plain non-negative ints and can be
    derived from each other recursively.
    """
    state = np.random.SeedSequence((seed,) + tags).generate_state(2, np.uint64)
    return int(state[0])


class CsvFormatError(ValueError):
    """Raised when a dataset CSV cannot be parsed; names the offending cell."""


@dataclass(frozen=True)
class Labeling:
    """A partition of n points into clusters labeled 1..k.

    ``labels[i]`` is the cluster id of point i.  Empty clusters are
    permitted (ids are a label *space*, not a promise of occupancy);
    consumers that require non-empty clusters check ``sizes``.
    """

    labels: np.ndarray
    k: int

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64)
        object.__setattr__(self, "labels", labels)
        if labels.ndim != 1:
            raise ValueError("labels must be a 1-D array")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if labels.size and (labels.min() < 1 or labels.max() > self.k):
            raise ValueError(f"labels must lie in 1..{self.k}")

    @property
    def n(self) -> int:
        return self.labels.size

    @property
    def sizes(self) -> np.ndarray:
        """Occupancy of each cluster, shape (k,); sums to n."""
        return np.bincount(self.labels, minlength=self.k + 1)[1:]

    def groups(self) -> list[np.ndarray]:
        """Index sets G_1..G_k as arrays of point indices."""
        return [np.flatnonzero(self.labels == c) for c in range(1, self.k + 1)]

    def same_partition(self, other: "Labeling") -> bool:
        """True if both labelings induce the same partition up to renaming."""
        if self.n != other.n:
            return False
        pairs = set(zip(self.labels.tolist(), other.labels.tolist()))
        return len(pairs) == len(set(self.labels.tolist())) == len(set(other.labels.tolist()))


@dataclass(frozen=True)
class GmmSpec:
    """Parameters of an isotropic Gaussian-mixture instance.

    ``layout`` is either the string ``"simplex"`` (centers at the vertices
    of a regular simplex, pairwise distance exactly ``delta``) or an
    explicit (k, p) array of centers.  ``sigma = 0`` yields noiseless data.
    """

    sizes: tuple[int, ...]
    p: int
    sigma: float = 1.0
    delta: float = 0.0
    layout: object = "simplex"
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "sizes", tuple(int(s) for s in self.sizes))
        if not self.sizes or any(s < 1 for s in self.sizes):
            raise ValueError("sizes must be a non-empty tuple of counts >= 1")
        if self.p < 1:
            raise ValueError("p must be >= 1")
        if self.sigma < 0:
            raise ValueError("sigma must be >= 0")
        if self.delta < 0:
            raise ValueError("delta must be >= 0")
        if isinstance(self.layout, str):
            if self.layout != "simplex":
                raise ValueError(f"unknown layout {self.layout!r}")
            if self.p < self.k:
                raise ValueError(
                    f"simplex layout needs p >= k (got p={self.p}, k={self.k})"
                )
        else:
            centers = np.asarray(self.layout, dtype=float)
            if centers.shape != (self.k, self.p):
                raise ValueError(
                    f"explicit centers must have shape ({self.k}, {self.p})"
                )
            object.__setattr__(self, "layout", centers)
        if self.seed < 0:
            raise ValueError("seed must be a non-negative integer")

    @property
    def k(self) -> int:
        return len(self.sizes)

    @property
    def n(self) -> int:
        return sum(self.sizes)

    def centers(self) -> np.ndarray:
        """The (k, p) matrix of cluster centers implied by the layout."""
        if isinstance(self.layout, str):
            return simplex_centers(self.k, self.p, self.delta)
        return np.array(self.layout, dtype=float)


def simplex_centers(k: int, p: int, delta: float) -> np.ndarray:
    """Centers on the vertices of a regular simplex, embedded in R^p.

    Row l is (delta / sqrt(2)) * e_l, so every pair of centers is at
    distance exactly ``delta``.

    Parameters
    ----------
    k : number of centers.
    p : ambient dimension, must satisfy p >= k.
    delta : common pairwise distance between centers, >= 0.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if p < k:
        raise ValueError(f"simplex layout needs p >= k (got p={p}, k={k})")
    if delta < 0:
        raise ValueError("delta must be >= 0")
    centers = np.zeros((k, p))
    centers[np.arange(k), np.arange(k)] = delta / np.sqrt(2.0)
    return centers


def generate_gmm(spec: GmmSpec) -> tuple[np.ndarray, Labeling]:
    """Draw a dataset from the mixture described by ``spec``.

    Rows are cluster-contiguous: the first sizes[0] rows are
    N(mu_1, sigma^2 I_p), the next sizes[1] rows N(mu_2, sigma^2 I_p), etc.
    Noise is generated by numpy's PCG64 generator seeded with ``spec.seed``
    (normal variates via the ziggurat transform of uniforms), so a fixed
    seed reproduces the dataset bit for bit.

    Returns the (n, p) data matrix and the ground-truth labeling.
    """
    centers = spec.centers()
    rng = np.random.default_rng(spec.seed)
    points = rng.standard_normal((spec.n, spec.p))
    points *= spec.sigma
    labels = np.repeat(np.arange(1, spec.k + 1), spec.sizes)
    points += centers[labels - 1]
    return points, Labeling(labels, spec.k)


LABEL_COLUMN = "label"


def _parse_cell(text: str, row: int, col: int) -> float:
    try:
        return float(text)
    except ValueError:
        raise CsvFormatError(
            f"non-numeric cell {text!r} at row {row}, column {col}"
        ) from None


def load_csv(path) -> tuple[np.ndarray, Labeling | None]:
    """Load a numeric CSV dataset, with an optional trailing label column.

    The file may start with a header row; a final header cell named
    ``label`` marks the last column as integer cluster ids 1..K.  Parse
    failures raise :class:`CsvFormatError` naming the 1-based row and
    column of the offending cell.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        rows = [row for row in _rows_iter(reader)]
    if not rows:
        raise CsvFormatError(f"{path}: empty file")

    header = rows[0]
    has_header = any(not _is_number(cell) for cell in header)
    has_labels = has_header and header[-1].strip() == LABEL_COLUMN
    body = rows[1:] if has_header else rows
    if not body:
        raise CsvFormatError(f"{path}: no data rows")

    width = len(body[0])
    values = np.empty((len(body), width))
    for i, row in enumerate(body):
        row_no = i + 2 if has_header else i + 1
        if len(row) != width:
            raise CsvFormatError(
                f"ragged row {row_no}: expected {width} cells, got {len(row)}"
            )
        for j, cell in enumerate(row):
            values[i, j] = _parse_cell(cell, row_no, j + 1)

    if not has_labels:
        return values, None
    if width < 2:
        raise CsvFormatError("label column present but no data columns")
    raw = values[:, -1]
    labels = raw.astype(np.int64)
    if not np.array_equal(labels, raw) or labels.min() < 1:
        raise CsvFormatError("label column must contain integer ids >= 1")
    return values[:, :-1], Labeling(labels, int(labels.max()))


def _rows_iter(reader):
    for row in reader:
        if row and not all(cell.strip() == "" for cell in row):
            yield row


def _is_number(text: str) -> bool:
    try:
        float(text)
        return True
    except ValueError:
        return False


def save_csv(data: np.ndarray, path, labeling: Labeling | None = None) -> None:
    """Write a dataset to CSV with 17-significant-digit precision.

    The header names the data columns x1..xp; when a labeling is given a
    final ``label`` column carries the integer cluster ids.  Values survive
    a save/load round trip exactly.
    """
    data = np.asarray(data, dtype=float)
    if data.ndim != 2:
        raise ValueError("data must be a 2-D array")
    if labeling is not None and labeling.n != data.shape[0]:
        raise ValueError("labeling length does not match the number of rows")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        header = [f"x{j + 1}" for j in range(data.shape[1])]
        if labeling is not None:
            header.append(LABEL_COLUMN)
        writer.writerow(header)
        for i, row in enumerate(data):
            cells = [f"{v:.17g}" for v in row]
            if labeling is not None:
                cells.append(str(int(labeling.labels[i])))
            writer.writerow(cells)
