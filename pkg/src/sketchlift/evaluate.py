"""Benchmark harness: error metric, method registry, replicates, aggregation.

The misclassification error is permutation-invariant: labels are matched
between prediction and truth by a minimum-cost assignment before counting
mismatches, so cluster ids never need to agree.  Replicate runs regenerate
data from per-replicate substreams and time only the clustering call.
"""

from __future__ import annotations

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .datasets import GmmSpec, Labeling, generate_gmm, subseed
from .kmeans import kmeans
from .sdp import SolverConfig
from .sketch import (
    ClusterResult,
    SketchConfig,
    bcsl_cluster,
    mesl_cluster,
    mrwsl_cluster,
    sdp_cluster,
    sl_cluster,
    wsl_cluster,
)
from .theory import ThresholdInputs, separation_from_lambda

__all__ = [
    "METHOD_TAGS",
    "ResultRecord",
    "ExperimentConfig",
    "MethodSummary",
    "misclassification_error",
    "run_method",
    "run_replicates",
    "aggregate",
    "write_records",
    "RECORD_COLUMNS",
]

logger = logging.getLogger(__name__)

# Canonical method tags and their spellable aliases.
METHOD_TAGS = ("M0", "M1", "M2", "M3", "M4", "M5", "O")
_ALIASES = {
    "KMEANS": "M0",
    "SL": "M1",
    "BCSL": "M2",
    "WSL": "M3",
    "MESL": "M4",
    "ME-SL": "M4",
    "MRWSL": "M5",
    "MR-WSL": "M5",
    "SDP": "O",
    "FULL": "O",
}

RECORD_COLUMNS = (
    "method", "n", "p", "k", "gamma", "lambda_star", "sigma",
    "seed", "error", "wall_time_s", "iterations", "converged",
)


@dataclass(frozen=True)
class ResultRecord:
    """One (method, replicate) outcome in the fixed benchmark schema."""

    method: str
    n: int
    p: int
    k: int
    gamma: float | None
    lambda_star: float | None
    sigma: float
    seed: int
    error: float
    wall_time_s: float
    iterations: int | None
    converged: bool | None

    def __post_init__(self):
        if not 0.0 <= self.error <= 1.0:
            raise ValueError("error must lie in [0, 1]")
        if self.wall_time_s < 0:
            raise ValueError("wall_time_s must be >= 0")


@dataclass(frozen=True)
class MethodSummary:
    method: str
    replicates: int
    mean_error: float
    error_bar: float
    mean_time: float


def normalize_method(tag: str) -> str:
    canon = _ALIASES.get(tag.upper(), tag.upper())
    if canon not in METHOD_TAGS:
        raise ValueError(f"unknown method {tag!r}; expected one of {METHOD_TAGS}")
    return canon


def misclassification_error(pred: Labeling, truth: Labeling) -> float:
    """Fraction of points mislabeled under the best label matching.

    Builds the K x K confusion matrix (padded square when the two sides
    use different numbers of ids) and maximizes the matched count with a
    minimum-cost assignment, which equals the brute-force minimum over all
    label permutations.
    """
    if pred.n != truth.n:
        raise ValueError(f"labelings differ in length: {pred.n} vs {truth.n}")
    if pred.n == 0:
        return 0.0
    kk = max(pred.k, truth.k)
    confusion = np.zeros((kk, kk), dtype=np.int64)
    np.add.at(confusion, (pred.labels - 1, truth.labels - 1), 1)
    rows, cols = linear_sum_assignment(confusion, maximize=True)
    matched = int(confusion[rows, cols].sum())
    return float(1.0 - matched / pred.n)


def run_method(tag: str, data, k: int, *, gamma: float = 0.1, seed: int = 0,
               mode: str = "fixed-size", rounds: int = 4,
               mesl_m: int | None = None, solver: SolverConfig | None = None,
               cap_full_sdp: int = 3000, relift: bool = False,
               warm_start: Labeling | None = None, point_ids=None) -> ClusterResult:
    """Dispatch one clustering method by tag.

    M0 = K-means++ baseline, O = full-data SDP pipeline (refused above
    ``cap_full_sdp`` points), M1 = SL, M2 = BCSL, M3 = WSL, M4 = ME-SL
    (block size ``mesl_m`` or floor(n*gamma)), M5 = MR-WSL.
    """
    tag = normalize_method(tag)
    data = np.asarray(data, dtype=float)
    n = data.shape[0]
    solver = solver or SolverConfig()
    if tag == "M0":
        fit = kmeans(data, k, seed=seed)
        return ClusterResult(fit.labeling, {
            "objective": fit.objective,
            "iterations": fit.iterations,
            "converged": fit.converged,
            "centroids": fit.centroids,
        })
    if tag == "O":
        if n > cap_full_sdp:
            raise ValueError(
                f"full SDP refused: n={n} exceeds cap {cap_full_sdp} "
                "(raise cap_full_sdp to override)"
            )
        ref = SketchConfig(gamma=1.0, seed=seed, solver=solver)
        return sdp_cluster(data, k, solver,
                           rounding_seed=ref.resolved_rounding_seed,
                           point_ids=point_ids)
    config = SketchConfig(gamma=gamma, mode=mode, seed=seed, solver=solver,
                          relift=relift)
    if tag == "M1":
        return sl_cluster(data, k, config, point_ids=point_ids)
    if tag == "M2":
        return bcsl_cluster(data, k, config, point_ids=point_ids)
    if tag == "M3":
        return wsl_cluster(data, k, config, warm_start=warm_start,
                           point_ids=point_ids)
    if tag == "M4":
        m = mesl_m if mesl_m is not None else int(np.floor(n * gamma))
        return mesl_cluster(data, k, m, config, point_ids=point_ids)
    return mrwsl_cluster(data, k, config, rounds=rounds,
                         warm_start=warm_start, point_ids=point_ids)


@dataclass(frozen=True)
class ExperimentConfig:
    """A synthetic benchmark: mixture design, difficulty, and method roster.

    Difficulty is set either by ``lambda_star`` (separation as a multiple
    of the full-data recovery threshold) or by an explicit center distance
    ``delta``; exactly one must be given.
    """

    sizes: tuple
    p: int
    sigma: float = 1.0
    lambda_star: float | None = None
    delta: float | None = None
    methods: tuple = ("M1",)
    gamma: float = 0.1
    mode: str = "fixed-size"
    rounds: int = 4
    mesl_m: int | None = None
    solver: SolverConfig = field(default_factory=SolverConfig)
    cap_full_sdp: int = 3000

    def __post_init__(self):
        object.__setattr__(self, "sizes", tuple(int(s) for s in self.sizes))
        object.__setattr__(
            self, "methods", tuple(normalize_method(m) for m in self.methods))
        if (self.lambda_star is None) == (self.delta is None):
            raise ValueError("give exactly one of lambda_star or delta")

    @property
    def k(self) -> int:
        return len(self.sizes)

    @property
    def n(self) -> int:
        return sum(self.sizes)

    def resolved_delta(self) -> float:
        if self.delta is not None:
            return float(self.delta)
        inputs = ThresholdInputs(self.sizes, self.p, self.sigma)
        return float(np.sqrt(separation_from_lambda(self.lambda_star, inputs)))


def _replicate_records(config: ExperimentConfig, rep: int, base_seed: int):
    seed = subseed(base_seed, rep)
    spec = GmmSpec(sizes=config.sizes, p=config.p, sigma=config.sigma,
                   delta=config.resolved_delta(), seed=subseed(seed, 0))
    data, truth = generate_gmm(spec)
    records = []
    for tag in config.methods:
        started = time.perf_counter()
        try:
            result = run_method(
                tag, data, config.k, gamma=config.gamma, seed=subseed(seed, 1),
                mode=config.mode, rounds=config.rounds, mesl_m=config.mesl_m,
                solver=config.solver, cap_full_sdp=config.cap_full_sdp,
            )
            error = misclassification_error(result.labeling, truth)
            iterations = result.info.get("iterations")
            converged = result.info.get("converged")
        except Exception:
            # a failed run is scored as total misclassification, which
            # never flatters the failing method in comparisons
            logger.warning("method %s failed on replicate %d", tag, rep,
                           exc_info=True)
            error, iterations, converged = 1.0, None, False
        wall = time.perf_counter() - started
        records.append(ResultRecord(
            method=tag, n=config.n, p=config.p, k=config.k,
            gamma=None if tag in ("M0", "O") else config.gamma,
            lambda_star=config.lambda_star, sigma=config.sigma, seed=seed,
            error=error, wall_time_s=wall, iterations=iterations,
            converged=converged,
        ))
    return records


def run_replicates(config: ExperimentConfig, replicates: int,
                   base_seed: int = 0, jobs: int = 1) -> list:
    """Run every configured method on ``replicates`` fresh instances.

    Each replicate draws its own dataset from a child seed of
    ``base_seed``; all methods see the same data within a replicate, so
    comparisons are paired.  With ``jobs`` > 1 replicates run in a process
    pool; records come back sorted by (method, seed) either way.
    """
    if replicates < 1:
        raise ValueError("replicates must be >= 1")
    records = []
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_replicate_records, config, r, base_seed)
                       for r in range(replicates)]
            for fut in futures:
                records.extend(fut.result())
    else:
        for r in range(replicates):
            records.extend(_replicate_records(config, r, base_seed))
    records.sort(key=lambda rec: (rec.method, rec.seed))
    return records


def aggregate(records) -> list:
    """Per-method mean error, standard error of the mean, and mean time.

    A zero mean error stays an exact 0 here; any display flooring is the
    plot emitter's business.
    """
    by_method: dict = {}
    for rec in sorted(records, key=lambda r: (r.method, r.seed)):
        by_method.setdefault(rec.method, []).append(rec)
    out = []
    for method in sorted(by_method):
        group = by_method[method]
        errors = np.array([r.error for r in group])
        times = np.array([r.wall_time_s for r in group])
        bar = float(errors.std(ddof=1) / np.sqrt(len(group))) if len(group) > 1 else 0.0
        out.append(MethodSummary(
            method=method, replicates=len(group),
            mean_error=float(errors.mean()), error_bar=bar,
            mean_time=float(times.mean()),
        ))
    return out


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def write_records(records, path) -> None:
    """Write records as CSV in the fixed benchmark column order."""
    import csv

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RECORD_COLUMNS)
        for rec in records:
            writer.writerow([_format_cell(getattr(rec, col))
                             for col in RECORD_COLUMNS])
