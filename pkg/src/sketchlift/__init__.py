"""sketchlift: SDP-relaxed K-means with linear-time sketch-and-lift variants.

The library solves the semidefinite relaxation of K-means on a random
subsample (the sketch), rounds it to a partition, and propagates labels to
the full dataset by nearest-centroid assignment (the lift).  Closed-form
separation thresholds predict when recovery is exact, and a benchmark
harness plus CLI reproduce the supporting experiments.
"""

from .datasets import (
    CsvFormatError,
    GmmSpec,
    Labeling,
    generate_gmm,
    load_csv,
    save_csv,
    simplex_centers,
    subseed,
)
from .evaluate import (
    ExperimentConfig,
    MethodSummary,
    ResultRecord,
    aggregate,
    misclassification_error,
    run_method,
    run_replicates,
    write_records,
)
from .kmeans import (
    Centroids,
    LloydResult,
    kmeans,
    kmeanspp_init,
    lloyd,
    nearest_centroid_assign,
)
from .rounding import spectral_round
from .sdp import (
    FeasibilityReport,
    MembershipMatrix,
    SdpSolution,
    SolverConfig,
    affinity,
    check_feasibility,
    ideal_membership,
    project_affine,
    project_psd,
    solve_kmeans_sdp,
)
from .sketch import (
    ClusterResult,
    SketchConfig,
    SketchTooSmall,
    bcsl_cluster,
    mesl_cluster,
    mrwsl_cluster,
    sdp_cluster,
    sketch_indices,
    sl_cluster,
    wsl_cluster,
)
from .theory import (
    ThresholdInputs,
    WeightVector,
    epsilon_delta_fraction,
    ideal_weights,
    separation_from_lambda,
    threshold_bcsl,
    threshold_full,
    threshold_sl,
)

__version__ = "0.1.0"

__all__ = [
    "CsvFormatError",
    "GmmSpec",
    "Labeling",
    "generate_gmm",
    "load_csv",
    "save_csv",
    "simplex_centers",
    "subseed",
    "ExperimentConfig",
    "MethodSummary",
    "ResultRecord",
    "aggregate",
    "misclassification_error",
    "run_method",
    "run_replicates",
    "write_records",
    "Centroids",
    "LloydResult",
    "kmeans",
    "kmeanspp_init",
    "lloyd",
    "nearest_centroid_assign",
    "spectral_round",
    "FeasibilityReport",
    "MembershipMatrix",
    "SdpSolution",
    "SolverConfig",
    "affinity",
    "check_feasibility",
    "ideal_membership",
    "project_affine",
    "project_psd",
    "solve_kmeans_sdp",
    "ClusterResult",
    "SketchConfig",
    "SketchTooSmall",
    "bcsl_cluster",
    "mesl_cluster",
    "mrwsl_cluster",
    "sdp_cluster",
    "sketch_indices",
    "sl_cluster",
    "wsl_cluster",
    "ThresholdInputs",
    "WeightVector",
    "epsilon_delta_fraction",
    "ideal_weights",
    "separation_from_lambda",
    "threshold_bcsl",
    "threshold_full",
    "threshold_sl",
    "__version__",
]
