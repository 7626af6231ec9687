"""SDP-relaxed K-means: membership matrices and a first-order solver.

The relaxation optimizes over the spectrahedron

    max <A, Z>   s.t.   Z >= 0 (entrywise), Z psd, tr(Z) = K, Z 1 = 1,

whose integral optima are the block matrices built by
:func:`ideal_membership`.  :func:`solve_kmeans_sdp` runs consensus ADMM
over three copies of Z, one per constraint group, each with a closed-form
projection: an affine projection for {symmetric, Z1=1, tr Z=K}, an
eigenvalue clip for the psd cone, and an entrywise clip for nonnegativity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "MembershipMatrix",
    "SolverConfig",
    "SdpSolution",
    "FeasibilityReport",
    "affinity",
    "ideal_membership",
    "check_feasibility",
    "project_psd",
    "project_affine",
    "solve_kmeans_sdp",
]


@dataclass(frozen=True)
class MembershipMatrix:
    """A square matrix paired with its trace target K."""

    z: np.ndarray
    k: int

    def __post_init__(self):
        z = np.asarray(self.z, dtype=float)
        object.__setattr__(self, "z", z)
        if z.ndim != 2 or z.shape[0] != z.shape[1]:
            raise ValueError(f"membership matrix must be square, got shape {z.shape}")
        if self.k < 1:
            raise ValueError("k must be >= 1")

    @property
    def m(self) -> int:
        return self.z.shape[0]


@dataclass(frozen=True)
class SolverConfig:
    """Knobs for :func:`solve_kmeans_sdp`.

    ``tol`` bounds both the relative primal/dual residuals and the absolute
    constraint violations of the returned iterate.  ``over_relaxation`` is
    the standard ADMM relaxation parameter in [1, 2).
    """

    rho: float = 1.0
    tol: float = 1e-5
    max_iter: int = 10000
    verbose: bool = False
    over_relaxation: float = 1.0

    def __post_init__(self):
        if self.rho <= 0:
            raise ValueError("rho must be > 0")
        if self.tol <= 0:
            raise ValueError("tol must be > 0")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if not 1.0 <= self.over_relaxation < 2.0:
            raise ValueError("over_relaxation must be in [1, 2)")


@dataclass(frozen=True)
class SdpSolution:
    """Solver output: iterate, unscaled objective, and diagnostics."""

    z: MembershipMatrix
    objective: float
    iterations: int
    primal_residual: float
    dual_residual: float
    converged: bool


@dataclass(frozen=True)
class FeasibilityReport:
    """Worst-case violation of each membership-matrix constraint.

    All fields are non-negative; ``trace`` is the absolute deviation
    |tr Z - K| and ``min_eigenvalue`` is max(0, -lambda_min).
    """

    symmetry: float
    nonnegativity: float
    row_sum: float
    trace: float
    min_eigenvalue: float
    tol: float

    @property
    def worst(self) -> float:
        return max(
            self.symmetry,
            self.nonnegativity,
            self.row_sum,
            self.trace,
            self.min_eigenvalue,
        )

    @property
    def passes(self) -> bool:
        return self.worst <= self.tol


def affinity(data: np.ndarray) -> np.ndarray:
    """Inner-product similarity matrix of globally mean-centered data.

    A[i, j] = <X_i - xbar, X_j - xbar> where xbar is the mean row.  The
    argmax partition of the K-means objective is translation invariant, so
    centering changes the objective only by an additive constant over the
    feasible set while improving conditioning.
    """
    data = np.asarray(data, dtype=float)
    if data.ndim != 2:
        raise ValueError("data must be a 2-D array")
    if not np.all(np.isfinite(data)):
        raise ValueError("data must be finite")
    centered = data - data.mean(axis=0)
    a = centered @ centered.T
    return 0.5 * (a + a.T)


def ideal_membership(labeling) -> MembershipMatrix:
    """The integral membership matrix of a partition.

    Entry (i, j) is 1/n_k when i and j share cluster k and 0 otherwise; the
    result is feasible for the relaxation with equality in every
    constraint.  Requires every cluster to be non-empty.
    """
    sizes = labeling.sizes
    if (sizes == 0).any():
        empty = int(np.flatnonzero(sizes == 0)[0]) + 1
        raise ValueError(f"cluster {empty} is empty; ideal membership undefined")
    z = np.zeros((labeling.n, labeling.n))
    for g in labeling.groups():
        z[np.ix_(g, g)] = 1.0 / g.size
    return MembershipMatrix(z, labeling.k)


def check_feasibility(z: MembershipMatrix, tol: float = 1e-5) -> FeasibilityReport:
    """Measure how far a matrix is from the relaxation's feasible set."""
    m = z.z
    sym = float(np.abs(m - m.T).max())
    ms = 0.5 * (m + m.T)
    eigvals = np.linalg.eigvalsh(ms)
    return FeasibilityReport(
        symmetry=sym,
        nonnegativity=float(max(0.0, -m.min())),
        row_sum=float(np.abs(m.sum(axis=1) - 1.0).max()),
        trace=float(abs(np.trace(m) - z.k)),
        min_eigenvalue=float(max(0.0, -eigvals[0])),
        tol=tol,
    )


def project_psd(m: np.ndarray) -> np.ndarray:
    """Nearest (Frobenius) positive semidefinite matrix.

    Symmetrizes, then clips negative eigenvalues to zero.  Idempotent up to
    floating-point roundoff.
    """
    ms = 0.5 * (m + m.T)
    w, v = np.linalg.eigh(ms)
    w = np.maximum(w, 0.0)
    out = (v * w) @ v.T
    return 0.5 * (out + out.T)


def project_affine(m: np.ndarray, k: int) -> np.ndarray:
    """Nearest matrix in {Z symmetric, Z1 = 1, tr Z = K}.

    Closed form from the KKT conditions: the projection is
    M_sym + a 1' + 1 a' + b I for a vector a and scalar b determined by the
    row-sum and trace constraints.
    """
    n = m.shape[0]
    if n < 2:
        raise ValueError("affine projection needs n >= 2")
    ms = 0.5 * (m + m.T)
    r = ms.sum(axis=1)
    big_r = float(r.sum())
    t = float(np.trace(ms))
    b = (k - t - 1.0 + big_r / n) / (n - 1.0)
    two_s = (n - big_r) / n - b
    shift = 0.5 * two_s + b  # s + b
    a = (1.0 - r) / n - shift / n
    out = ms + a[:, None] + a[None, :]
    out[np.diag_indices(n)] += b
    return out


def _mixed_feasible(m: int, k: int) -> np.ndarray:
    """Interior feasible start: a*I + b*11' with exact trace and row sums."""
    a = (k - 1.0) / (m - 1.0)
    b = (1.0 - a) / m
    z = np.full((m, m), b)
    z[np.diag_indices(m)] += a
    return z


def solve_kmeans_sdp(a: np.ndarray, k: int, config: SolverConfig | None = None) -> SdpSolution:
    """Maximize <A, Z> over the K-means spectrahedron by consensus ADMM.

    The affinity is normalized by its Frobenius norm internally so that
    ``rho`` and ``tol`` are problem-size independent; the reported
    objective is unscaled.  Convergence requires relative primal and dual
    residuals below ``tol`` and absolute constraint violations of the
    consensus iterate below ``tol``.  On hitting ``max_iter`` the current
    iterate is returned with ``converged=False``.
    """
    if config is None:
        config = SolverConfig()
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("affinity must be a square matrix")
    m = a.shape[0]
    scale = max(1.0, float(np.abs(a).max()))
    if float(np.abs(a - a.T).max()) > 1e-8 * scale:
        raise ValueError("affinity must be symmetric")
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > m:
        raise ValueError(f"k={k} exceeds the number of points m={m}")

    if k == 1:
        z = np.full((m, m), 1.0 / m)
        obj = float(np.tensordot(a, z))
        return SdpSolution(MembershipMatrix(z, 1), obj, 0, 0.0, 0.0, True)

    norm_a = float(np.linalg.norm(a))
    ahat = a / norm_a if norm_a > 0 else np.zeros_like(a)
    rho = config.rho
    alpha = config.over_relaxation
    drive = ahat / (3.0 * rho)

    z = _mixed_feasible(m, k)
    u1 = np.zeros_like(z)
    u2 = np.zeros_like(z)
    u3 = np.zeros_like(z)

    rel_primal = np.inf
    rel_dual = np.inf
    converged = False
    it = 0
    for it in range(1, config.max_iter + 1):
        x1 = project_affine(z - u1, k)
        x2 = project_psd(z - u2)
        x3 = np.maximum(z - u3, 0.0)
        if alpha != 1.0:
            x1 = alpha * x1 + (1.0 - alpha) * z
            x2 = alpha * x2 + (1.0 - alpha) * z
            x3 = alpha * x3 + (1.0 - alpha) * z
        z_prev = z
        z = (x1 + u1 + x2 + u2 + x3 + u3) / 3.0 + drive
        z = 0.5 * (z + z.T)
        u1 += x1 - z
        u2 += x2 - z
        u3 += x3 - z

        z_norm = float(np.linalg.norm(z))
        primal = np.sqrt(
            np.linalg.norm(x1 - z) ** 2
            + np.linalg.norm(x2 - z) ** 2
            + np.linalg.norm(x3 - z) ** 2
        )
        dual = rho * np.sqrt(3.0) * float(np.linalg.norm(z - z_prev))
        u_norm = rho * np.sqrt(
            np.linalg.norm(u1) ** 2 + np.linalg.norm(u2) ** 2 + np.linalg.norm(u3) ** 2
        )
        rel_primal = primal / (np.sqrt(3.0) * max(1.0, z_norm))
        rel_dual = dual / (np.sqrt(3.0) * max(1.0, u_norm))

        if rel_primal <= config.tol and rel_dual <= config.tol:
            feas = max(
                float(np.abs(z.sum(axis=1) - 1.0).max()),
                float(abs(np.trace(z) - k)),
                float(max(0.0, -z.min())),
                float(np.linalg.norm(z - x2)),  # upper bound on -lambda_min
            )
            if feas <= config.tol:
                converged = True
                break
        if config.verbose and it % 50 == 0:
            print(
                f"iter={it} rel_primal={rel_primal:.3e} rel_dual={rel_dual:.3e}"
            )

    obj = float(np.tensordot(a, z))
    return SdpSolution(
        z=MembershipMatrix(z, k),
        objective=obj,
        iterations=it,
        primal_residual=float(rel_primal),
        dual_residual=float(rel_dual),
        converged=converged,
    )
