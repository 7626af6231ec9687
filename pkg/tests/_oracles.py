"""Independent reference implementations used to cross-check the library.

Everything here is deliberately naive: double loops, exhaustive
enumeration, and generic linear algebra.  Tests compute these oracles
first and assert the library matches them.
"""

import itertools

import numpy as np


def pairwise_affinity(data):
    """Double-loop inner products of mean-centered rows."""
    data = np.asarray(data, dtype=float)
    centered = data - data.mean(axis=0)
    n = centered.shape[0]
    out = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            out[i, j] = float(np.dot(centered[i], centered[j]))
    return out


def membership_from_labels(labels, k):
    labels = np.asarray(labels)
    n = labels.size
    z = np.zeros((n, n))
    for c in range(1, k + 1):
        members = np.flatnonzero(labels == c)
        if members.size:
            z[np.ix_(members, members)] = 1.0 / members.size
    return z


def partition_objective(a, labels, k):
    """<A, Z(labels)> computed from the block definition."""
    a = np.asarray(a, dtype=float)
    total = 0.0
    for c in range(1, k + 1):
        members = np.flatnonzero(np.asarray(labels) == c)
        if members.size == 0:
            continue
        block = a[np.ix_(members, members)]
        total += float(block.sum()) / members.size
    return total


def all_assignments(n, k):
    """Every surjective labeling of n points onto labels 1..k."""
    for assign in itertools.product(range(1, k + 1), repeat=n):
        if len(set(assign)) == k:
            yield np.array(assign)


def brute_force_best_partition(a, k):
    """Argmax of the partition objective over all surjective labelings."""
    best_value = -np.inf
    best_labels = None
    for labels in all_assignments(a.shape[0], k):
        value = partition_objective(a, labels, k)
        if value > best_value:
            best_value = value
            best_labels = labels
    return best_value, best_labels


def exhaustive_misclassification(pred_labels, truth_labels, k_pred, k_truth):
    """Minimum mismatch fraction over all injections of label ids."""
    pred_labels = np.asarray(pred_labels)
    truth_labels = np.asarray(truth_labels)
    n = pred_labels.size
    kk = max(k_pred, k_truth)
    best = n + 1
    for perm in itertools.permutations(range(1, kk + 1)):
        mapped = np.array(perm)[pred_labels - 1]
        best = min(best, int((mapped != truth_labels).sum()))
    return best / n


def nearest_center_scan(data, centers):
    """Per-point linear scan; ties go to the lowest center index."""
    data = np.asarray(data, dtype=float)
    centers = np.asarray(centers, dtype=float)
    labels = np.empty(data.shape[0], dtype=np.int64)
    for i, x in enumerate(data):
        best_c, best_d = 0, np.inf
        for c, mu in enumerate(centers):
            d = float(np.dot(x - mu, x - mu))
            if d < best_d:
                best_c, best_d = c, d
        labels[i] = best_c + 1
    return labels


def generic_affine_projection(m, k):
    """Projection onto {symmetric, row sums 1, trace k} via stacked
    equality constraints and a pseudo-inverse solve."""
    m = np.asarray(m, dtype=float)
    n = m.shape[0]
    rows, rhs = [], []
    for i in range(n):
        c = np.zeros((n, n))
        c[i, :] = 1.0
        rows.append(c.ravel())
        rhs.append(1.0)
    rows.append(np.eye(n).ravel())
    rhs.append(float(k))
    for i in range(n):
        for j in range(i + 1, n):
            c = np.zeros((n, n))
            c[i, j], c[j, i] = 1.0, -1.0
            rows.append(c.ravel())
            rhs.append(0.0)
    cmat = np.array(rows)
    rhs = np.array(rhs)
    v = m.ravel()
    lam = np.linalg.lstsq(cmat @ cmat.T, rhs - cmat @ v, rcond=None)[0]
    return (v + cmat.T @ lam).reshape(n, n)


def wcss(data, labels, k):
    """Within-cluster sum of squares about cluster means."""
    data = np.asarray(data, dtype=float)
    total = 0.0
    for c in range(1, k + 1):
        members = data[np.asarray(labels) == c]
        if len(members):
            mu = members.mean(axis=0)
            total += float(((members - mu) ** 2).sum())
    return total
