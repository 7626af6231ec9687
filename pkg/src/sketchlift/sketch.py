"""Sketch-and-lift clustering: solve the SDP on a subsample, lift to all points.

Five procedures share the same skeleton: draw an index sketch T, solve the
relaxed program on the sketched rows, round to a sketch partition, compute
per-cluster centroids, then label the remaining points by nearest
centroid.  They differ in how T is drawn and how centroids are formed:

* ``sl_cluster``      uniform sketch, plain centroids
* ``bcsl_cluster``    uniform sketch, centroids from equal-size subsets
* ``wsl_cluster``     size-adaptive Bernoulli weights from a pilot partition
* ``mesl_cluster``    disjoint blocks, centroids aligned and averaged
* ``mrwsl_cluster``   weighted sketching iterated over several rounds

All procedures are deterministic given their config and are invariant to
input row order: per-point randomness is keyed by point identity, and the
sketched subproblem is assembled in a canonical id-sorted frame, so a
seeded shuffle of the rows permutes the output labels and changes nothing
else.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.spatial.distance import cdist

from .datasets import Labeling, subseed
from .kmeans import Centroids, kmeans, nearest_centroid_assign
from .rounding import spectral_round
from .sdp import SolverConfig, affinity, solve_kmeans_sdp
from .theory import WeightVector, ideal_weights

__all__ = [
    "SketchConfig",
    "ClusterResult",
    "SketchTooSmall",
    "sketch_indices",
    "sdp_cluster",
    "sl_cluster",
    "bcsl_cluster",
    "wsl_cluster",
    "mesl_cluster",
    "mrwsl_cluster",
]

MODES = ("fixed-size", "bernoulli")

# substream tags; round one of every method keeps the base streams so that
# single-round reductions collapse to their parent method exactly
_TAG_SKETCH = 0
_TAG_PILOT = 1
_TAG_ROUNDING = 2
_TAG_DOWNSAMPLE = 3
_TAG_EPOCH = 4
_TAG_ROUND = 5


@dataclass(frozen=True)
class SketchConfig:
    """Shared knobs of the sketch-and-lift family.

    ``gamma`` is the subsampling factor in (0, 1].  ``mode`` selects the
    sketch law for uniform weights: "fixed-size" draws exactly
    floor(n*gamma) points without replacement, "bernoulli" includes each
    point independently.  Weighted procedures always sketch Bernoulli.
    ``rounding_seed`` defaults to a substream of ``seed``.  When ``relift``
    is set, sketch points are relabeled by nearest centroid during the
    lift instead of keeping their sketch-partition labels.
    """

    gamma: float
    mode: str = "fixed-size"
    seed: int = 0
    solver: SolverConfig = field(default_factory=SolverConfig)
    rounding_seed: int | None = None
    relift: bool = False

    def __post_init__(self):
        if not 0.0 < self.gamma <= 1.0:
            raise ValueError("gamma must lie in (0, 1]")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")

    @property
    def resolved_rounding_seed(self) -> int:
        if self.rounding_seed is not None:
            return self.rounding_seed
        return subseed(self.seed, _TAG_ROUNDING)


@dataclass(frozen=True)
class ClusterResult:
    """A labeling plus method diagnostics.

    ``info`` always carries ``centroids``; sketch-based methods add
    ``sketch_size``, ``iterations``, ``converged``, and method-specific
    entries (``weights``, ``round_weights``, ``epochs_used``, ...).
    """

    labeling: Labeling
    info: dict


class SketchTooSmall(RuntimeError):
    """The sketch cannot support K clusters; carries diagnostics."""

    def __init__(self, message: str, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics


def _point_uniforms(seed: int, ids: np.ndarray) -> np.ndarray:
    """One uniform variate per point, keyed by point id.

    Draw j of the stream belongs to id j, so the variate a point receives
    does not depend on where its row currently sits.
    """
    universe = int(ids.max()) + 1 if ids.size else 0
    u = np.random.default_rng(seed).random(universe)
    return u[ids]


def sketch_indices(n: int, weights: WeightVector, mode: str, seed: int,
                   point_ids=None) -> np.ndarray:
    """Draw the sketch index set T, returned as sorted positions in [0, n).

    Bernoulli mode includes position i independently with probability
    w_i.  Fixed-size mode requires uniform weights and draws exactly
    floor(n * w) positions uniformly without replacement (the w lowest of
    per-point uniform variates).
    """
    if weights.n != n:
        raise ValueError("weights length does not match n")
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    ids = np.arange(n) if point_ids is None else np.asarray(point_ids)
    u = _point_uniforms(seed, ids)
    if mode == "bernoulli":
        return np.flatnonzero(u < weights.w)
    value = weights.uniform_value()  # raises on non-uniform weights
    m = int(np.floor(n * value))
    take = np.argsort(u, kind="stable")[:m]
    return np.sort(take)


def _canonical_frame(data, point_ids):
    """Sort rows by point id; return (sorted data, sorted ids, order).

    ``order[j]`` is the input position of the j-th canonical row, so
    labels computed in the canonical frame map back via out[order] = lab.
    """
    data = np.asarray(data, dtype=float)
    if data.ndim != 2:
        raise ValueError("data must be a 2-D array")
    if not np.all(np.isfinite(data)):
        raise ValueError("data must be finite")
    n = data.shape[0]
    if point_ids is None:
        ids = np.arange(n)
        return data, ids, ids
    ids = np.asarray(point_ids)
    if ids.shape != (n,):
        raise ValueError("point_ids must have one entry per row")
    if ids.min(initial=0) < 0 or np.unique(ids).size != n:
        raise ValueError("point_ids must be unique non-negative integers")
    order = np.argsort(ids, kind="stable")
    return data[order], ids[order], order


def _delift(labels_canon: np.ndarray, order: np.ndarray, k: int) -> Labeling:
    out = np.empty(order.size, dtype=np.int64)
    out[order] = labels_canon
    return Labeling(out, k)


def _group_means(rows: np.ndarray, labels: np.ndarray, k: int) -> Centroids:
    centers = np.empty((k, rows.shape[1]))
    for c in range(1, k + 1):
        centers[c - 1] = rows[labels == c].mean(axis=0)
    return Centroids(centers)


def _solve_sketch(sketch_rows, k, solver, rounding_seed):
    """Sketched SDP, rounded; errors if any cluster comes back empty."""
    sol = solve_kmeans_sdp(affinity(sketch_rows), k, solver)
    lab = spectral_round(sol.z, k, seed=rounding_seed)
    sizes = lab.sizes
    if (sizes == 0).any():
        raise SketchTooSmall(
            "rounding produced an empty sketch cluster",
            sketch_size=sketch_rows.shape[0], k=k, cluster_sizes=sizes.tolist(),
        )
    return sol, lab


def _lift(data_c, k, t, sketch_labels, centroids, relift):
    """Labels for all points: sketch points keep theirs unless relifting."""
    if relift:
        return nearest_centroid_assign(data_c, centroids).labels
    labels = np.empty(data_c.shape[0], dtype=np.int64)
    labels[t] = sketch_labels
    outside = np.setdiff1d(np.arange(data_c.shape[0]), t, assume_unique=True)
    if outside.size:
        labels[outside] = nearest_centroid_assign(data_c[outside], centroids).labels
    return labels


def _sketch_pipeline(data_c, ids_c, k, config, weights, mode, sketch_seed,
                     rounding_seed):
    """Common SL core in the canonical frame: sketch, solve, round, lift."""
    n = data_c.shape[0]
    t = sketch_indices(n, weights, mode, sketch_seed, point_ids=ids_c)
    if t.size < k:
        raise SketchTooSmall(
            f"sketch of size {t.size} cannot hold {k} clusters",
            sketch_size=int(t.size), k=k,
        )
    sol, sketch_lab = _solve_sketch(data_c[t], k, config.solver, rounding_seed)
    centroids = _group_means(data_c[t], sketch_lab.labels, k)
    labels = _lift(data_c, k, t, sketch_lab.labels, centroids, config.relift)
    info = {
        "sketch_size": int(t.size),
        "sketch_members": ids_c[t].copy(),
        "iterations": sol.iterations,
        "converged": sol.converged,
        "objective": sol.objective,
        "centroids": centroids,
    }
    return labels, t, sketch_lab, info


def sdp_cluster(data, k: int, solver: SolverConfig | None = None,
                rounding_seed: int = 0, point_ids=None) -> ClusterResult:
    """The full-data pipeline: relaxed program on all n points, then rounding.

    This is the quality reference the sketch methods approximate; its cost
    grows cubically with n, which is what sketching is for.
    """
    data_c, _, order = _canonical_frame(data, point_ids)
    sol = solve_kmeans_sdp(affinity(data_c), k, solver or SolverConfig())
    lab = spectral_round(sol.z, k, seed=rounding_seed)
    info = {
        "iterations": sol.iterations,
        "converged": sol.converged,
        "objective": sol.objective,
        "centroids": _group_means(data_c, lab.labels, k),
    }
    return ClusterResult(_delift(lab.labels, order, k), info)


def sl_cluster(data, k: int, config: SketchConfig, point_ids=None) -> ClusterResult:
    """Sketch-and-lift with a uniform sketch at rate gamma.

    At gamma=1 the sketch is the whole dataset and the output coincides
    with :func:`sdp_cluster` under the same seeds.
    """
    data_c, ids_c, order = _canonical_frame(data, point_ids)
    n = data_c.shape[0]
    if n * config.gamma < k:
        raise SketchTooSmall(
            f"expected sketch size {n * config.gamma:.1f} is below k={k}",
            sketch_size=int(n * config.gamma), k=k,
        )
    weights = WeightVector(np.full(n, config.gamma))
    labels, _, _, info = _sketch_pipeline(
        data_c, ids_c, k, config, weights, config.mode,
        subseed(config.seed, _TAG_SKETCH), config.resolved_rounding_seed,
    )
    return ClusterResult(_delift(labels, order, k), info)


def bcsl_cluster(data, k: int, config: SketchConfig, point_ids=None) -> ClusterResult:
    """Sketch-and-lift with bias-corrected centroids.

    Centroids are computed from equal-size random subsets (of size
    min_k |R_k|) of the sketch clusters, so every centroid carries the
    same sampling variance; with equal sketch clusters the subsets are the
    whole clusters and the result matches :func:`sl_cluster` exactly.
    """
    data_c, ids_c, order = _canonical_frame(data, point_ids)
    n = data_c.shape[0]
    weights = WeightVector(np.full(n, config.gamma))
    t = sketch_indices(n, weights, config.mode,
                       subseed(config.seed, _TAG_SKETCH), point_ids=ids_c)
    if t.size < k:
        raise SketchTooSmall(
            f"sketch of size {t.size} cannot hold {k} clusters",
            sketch_size=int(t.size), k=k,
        )
    sol, sketch_lab = _solve_sketch(
        data_c[t], k, config.solver, config.resolved_rounding_seed)
    m_low = int(sketch_lab.sizes.min())
    u = _point_uniforms(subseed(config.seed, _TAG_DOWNSAMPLE), ids_c)
    centers = np.empty((k, data_c.shape[1]))
    for c in range(1, k + 1):
        members = t[sketch_lab.labels == c]
        keep = members[np.argsort(u[members], kind="stable")[:m_low]]
        # ascending order so the equal-size case reproduces SL bitwise
        centers[c - 1] = data_c[np.sort(keep)].mean(axis=0)
    centroids = Centroids(centers)
    labels = _lift(data_c, k, t, sketch_lab.labels, centroids, config.relift)
    info = {
        "sketch_size": int(t.size),
        "sketch_members": ids_c[t].copy(),
        "iterations": sol.iterations,
        "converged": sol.converged,
        "objective": sol.objective,
        "centroids": centroids,
        "centroid_sample_size": m_low,
    }
    return ClusterResult(_delift(labels, order, k), info)


def _pilot_partition(data_c, k, config, warm_start, order):
    if warm_start is None:
        return kmeans(data_c, k, seed=subseed(config.seed, _TAG_PILOT)).labeling
    if warm_start.n != data_c.shape[0]:
        raise ValueError("warm_start length does not match the data")
    if (warm_start.sizes == 0).any():
        raise ValueError("pilot partition has an empty cluster")
    return Labeling(warm_start.labels[order], warm_start.k)


def wsl_cluster(data, k: int, config: SketchConfig,
                warm_start: Labeling | None = None, point_ids=None) -> ClusterResult:
    """Weighted sketch-and-lift.

    A pilot partition (``warm_start`` or a single K-means++ run) sets the
    Bernoulli inclusion probability of each point to gamma*n/(K n_k) for
    its pilot cluster, so small clusters are oversampled and each cluster
    lands about gamma*n/K sketch points.  The sketch is always Bernoulli:
    the weights are non-uniform by design.
    """
    data_c, ids_c, order = _canonical_frame(data, point_ids)
    pilot = _pilot_partition(data_c, k, config, warm_start, order)
    weights = ideal_weights(pilot, config.gamma)
    labels, _, _, info = _sketch_pipeline(
        data_c, ids_c, k, config, weights, "bernoulli",
        subseed(config.seed, _TAG_SKETCH), config.resolved_rounding_seed,
    )
    info["weights"] = WeightVector(weights.w[np.argsort(order)], weights.clipped)
    info["weights_clipped"] = weights.clipped
    info["pilot_sizes"] = pilot.sizes.tolist()
    return ClusterResult(_delift(labels, order, k), info)


def mesl_cluster(data, k: int, m: int, config: SketchConfig,
                 point_ids=None) -> ClusterResult:
    """Multi-epoch sketch-and-lift.

    The points are split into S = floor(n/m) disjoint random blocks of
    size m (any remainder is never sketched).  Each block is solved and
    rounded on its own; per-epoch centroids are aligned to the first
    successful epoch by minimum-cost matching, averaged, and every point
    is labeled by its nearest averaged centroid.  A failing epoch is
    dropped with a warning in ``info``.
    """
    data_c, ids_c, order = _canonical_frame(data, point_ids)
    n = data_c.shape[0]
    if m < k:
        raise ValueError(f"block size m={m} is below k={k}")
    if m > n:
        raise ValueError(f"block size m={m} exceeds n={n}")
    epochs = n // m
    u = _point_uniforms(subseed(config.seed, _TAG_SKETCH), ids_c)
    ranked = np.argsort(u, kind="stable")
    base_rounding = config.resolved_rounding_seed
    epoch_centroids = []
    warnings = []
    for s in range(epochs):
        block = np.sort(ranked[s * m:(s + 1) * m])
        seed_s = base_rounding if s == 0 else subseed(base_rounding, _TAG_EPOCH, s)
        try:
            _, lab_s = _solve_sketch(data_c[block], k, config.solver, seed_s)
        except (SketchTooSmall, np.linalg.LinAlgError) as exc:
            warnings.append(f"epoch {s + 1} dropped: {exc}")
            continue
        epoch_centroids.append(_group_means(data_c[block], lab_s.labels, k).centers)
    if not epoch_centroids:
        raise SketchTooSmall(
            "every epoch failed to produce k clusters",
            epochs=epochs, k=k, warnings=warnings,
        )
    reference = epoch_centroids[0]
    aligned = [reference]
    for centers in epoch_centroids[1:]:
        cost = cdist(reference, centers, metric="sqeuclidean")
        _, cols = linear_sum_assignment(cost)
        aligned.append(centers[cols])
    centroids = Centroids(np.mean(aligned, axis=0))
    labels = nearest_centroid_assign(data_c, centroids).labels
    info = {
        "epochs": epochs,
        "epochs_used": len(epoch_centroids),
        "warnings": warnings,
        "centroids": centroids,
        "sketch_size": m,
    }
    return ClusterResult(_delift(labels, order, k), info)


def mrwsl_cluster(data, k: int, config: SketchConfig, rounds: int = 4,
                  warm_start: Labeling | None = None, point_ids=None) -> ClusterResult:
    """Multi-round weighted sketch-and-lift.

    Round 1 is :func:`wsl_cluster`; each later round recomputes the
    sampling weights from the previous round's cluster sizes and sketches
    afresh.  Returns the final round's labeling.  If a round ever yields a
    partition with an empty cluster the iteration stops and the last
    complete round is returned, flagged in ``info``.
    """
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    data_c, ids_c, order = _canonical_frame(data, point_ids)
    pilot = _pilot_partition(data_c, k, config, warm_start, order)
    base_rounding = config.resolved_rounding_seed
    current = pilot
    round_weights = []
    round_labelings = []
    info: dict = {}
    stopped_early = False
    for r in range(1, rounds + 1):
        if (current.sizes == 0).any():
            stopped_early = True
            break
        weights = ideal_weights(current, config.gamma)
        sketch_seed = (subseed(config.seed, _TAG_SKETCH) if r == 1
                       else subseed(config.seed, _TAG_ROUND, r))
        rounding_seed = (base_rounding if r == 1
                         else subseed(base_rounding, _TAG_ROUND, r))
        labels, _, _, info = _sketch_pipeline(
            data_c, ids_c, k, config, weights, "bernoulli",
            sketch_seed, rounding_seed,
        )
        round_weights.append(WeightVector(weights.w[np.argsort(order)], weights.clipped))
        round_labelings.append(_delift(labels, order, k))
        current = Labeling(labels, k)
    info = dict(info)
    info["rounds_requested"] = rounds
    info["rounds_completed"] = len(round_labelings)
    info["stopped_early"] = stopped_early
    info["round_weights"] = round_weights
    info["round_labelings"] = round_labelings
    return ClusterResult(round_labelings[-1], info)
