"""End-to-end acceptance suite.

Ten criteria covering the library's contract: threshold arithmetic against
a high-precision oracle, solver optimality against brute-force partition
enumeration, exact recovery at high separation, the exact collapse
identities between methods, solver feasibility, the error metric against
exhaustive matching, qualitative method orderings at desk scale, linear
time scaling in n at fixed sketch size, multi-round weight refinement, and
sketch-size concentration.

Each test prints one pass/fail line with its numeric evidence (visible
with ``pytest -s`` or on failure); the test verdict itself is the binding
result.  Statistical tests use pinned seeds and were sized so the checked
margins hold with large slack.
"""

import itertools
import time
from decimal import Decimal, getcontext

import numpy as np

from _oracles import exhaustive_misclassification
from sketchlift import (
    ExperimentConfig,
    GmmSpec,
    Labeling,
    SketchConfig,
    ThresholdInputs,
    WeightVector,
    affinity,
    aggregate,
    bcsl_cluster,
    check_feasibility,
    epsilon_delta_fraction,
    generate_gmm,
    ideal_membership,
    ideal_weights,
    mesl_cluster,
    misclassification_error,
    mrwsl_cluster,
    project_psd,
    run_replicates,
    sdp_cluster,
    separation_from_lambda,
    sketch_indices,
    sl_cluster,
    solve_kmeans_sdp,
    spectral_round,
    subseed,
    threshold_full,
    threshold_sl,
    wsl_cluster,
)


def report(num, ok, detail):
    print(f"criterion {num}: {'PASS' if ok else 'FAIL'} ({detail})")
    return ok


def decimal_core(n, p, sigma, n_eff):
    """Threshold core at 50 significant digits via the decimal module."""
    getcontext().prec = 50
    ln_n = Decimal(n).ln()
    inner = 1 + Decimal(p) / (Decimal(repr(float(n_eff))) * ln_n)
    return float(4 * Decimal(repr(float(sigma))) ** 2 * (1 + inner.sqrt()) * ln_n)


def test_criterion_01_threshold_formulas():
    full = threshold_full(ThresholdInputs((500,) * 4, 1000, 1.0))
    full_oracle = decimal_core(2000, 1000, 1.0, 500.0)
    rel_full = abs(full - full_oracle) / full_oracle

    sl = threshold_sl(10000, 4, 1000, 1.0, 0.1)
    sl_oracle = decimal_core(10000, 1000, 1.0, 0.1 * 10000 / 4)
    rel_sl = abs(sl - sl_oracle) / sl_oracle

    collapse = all(
        threshold_sl(500 * k, k, 1000, 1.0, 1.0)
        == threshold_full(ThresholdInputs((500,) * k, 1000, 1.0))
        for k in (2, 3, 4)
    )
    ok = (rel_full <= 1e-9 and rel_sl <= 1e-9 and collapse
          and abs(full - 64.574) < 1e-3 and abs(sl - 80.97) < 5e-2)
    assert report(1, ok,
                  f"full={full:.12f} (rel {rel_full:.1e}), "
                  f"sl={sl:.12f} (rel {rel_sl:.1e}), gamma=1 collapse exact")


def brute_force_best(a, k):
    n = a.shape[0]
    best, best_labels = -np.inf, None
    for assign in itertools.product(range(1, k + 1), repeat=n):
        if len(set(assign)) != k:
            continue
        labels = np.array(assign)
        value = 0.0
        for c in range(1, k + 1):
            members = np.flatnonzero(labels == c)
            value += float(a[np.ix_(members, members)].sum()) / members.size
        if value > best:
            best, best_labels = value, labels
    return best, best_labels


def test_criterion_02_sdp_matches_brute_force():
    started = time.perf_counter()
    rng = np.random.default_rng(7)
    worst_gap = np.inf
    rounding_checked = 0
    ok = True
    for trial in range(50):
        n = int(rng.integers(4, 11))
        p = int(rng.integers(1, 6))
        data = rng.standard_normal((n, p)) * rng.uniform(0.5, 3.0)
        a = affinity(data)
        sol = solve_kmeans_sdp(a, 2)
        best, best_labels = brute_force_best(a, 2)
        margin = 1e-4 * float(np.linalg.norm(a))
        worst_gap = min(worst_gap, sol.objective - best)
        if sol.objective < best - margin:
            ok = False
        best_lab = Labeling(best_labels, 2)
        z_star = ideal_membership(best_lab).z
        if np.linalg.norm(sol.z.z - z_star) <= 1e-3:
            rounding_checked += 1
            rounded = spectral_round(sol.z, 2, seed=0)
            if not rounded.same_partition(best_lab):
                ok = False
    elapsed = time.perf_counter() - started
    ok = ok and elapsed < 60.0
    assert report(2, ok,
                  f"50 instances, worst objective gap {worst_gap:.2e}, "
                  f"{rounding_checked} near-integral roundings checked, "
                  f"{elapsed:.1f}s")


def test_criterion_03_integrality_at_high_separation():
    started = time.perf_counter()
    sizes, p, k = (40, 40, 40), 10, 3

    delta2_full = 2.0 * threshold_full(ThresholdInputs(sizes, p, 1.0))
    zeros_full = 0
    for rep in range(50):
        seed = subseed(100, rep)
        data, truth = generate_gmm(GmmSpec(sizes, p, 1.0,
                                           float(np.sqrt(delta2_full)),
                                           seed=subseed(seed, 0)))
        result = sdp_cluster(data, k, rounding_seed=subseed(seed, 1))
        zeros_full += misclassification_error(result.labeling, truth) == 0.0

    delta2_sl = 2.0 * threshold_sl(120, k, p, 1.0, 0.5)
    zeros_sl = 0
    for rep in range(50):
        seed = subseed(200, rep)
        data, truth = generate_gmm(GmmSpec(sizes, p, 1.0,
                                           float(np.sqrt(delta2_sl)),
                                           seed=subseed(seed, 0)))
        result = sl_cluster(data, k, SketchConfig(gamma=0.5,
                                                  seed=subseed(seed, 1)))
        zeros_sl += misclassification_error(result.labeling, truth) == 0.0

    elapsed = time.perf_counter() - started
    ok = zeros_full >= 48 and zeros_sl >= 45 and elapsed < 300.0
    assert report(3, ok,
                  f"full pipeline {zeros_full}/50 exact (need 48), "
                  f"SL gamma=0.5 {zeros_sl}/50 exact (need 45), {elapsed:.0f}s")


def test_criterion_04_collapse_identities():
    # SL at gamma=1 against the full pipeline, both sketch modes
    data, _ = generate_gmm(GmmSpec((30, 30), 8, 1.0, 12.0, seed=3))
    checks = []
    for mode in ("fixed-size", "bernoulli"):
        config = SketchConfig(gamma=1.0, seed=5, mode=mode)
        full = sdp_cluster(data, 2, rounding_seed=config.resolved_rounding_seed)
        checks.append(np.array_equal(sl_cluster(data, 2, config).labeling.labels,
                                     full.labeling.labels))

    # single-round MR-WSL against WSL under the same seeds
    config = SketchConfig(gamma=0.4, seed=8)
    one_round = mrwsl_cluster(data, 2, config, rounds=1)
    weighted = wsl_cluster(data, 2, config)
    checks.append(np.array_equal(one_round.labeling.labels,
                                 weighted.labeling.labels))

    # single-epoch ME-SL against fixed-size SL with all-point lift,
    # with and without a never-sketched remainder
    # gamma values here are exact binary fractions so floor(n * gamma) == m
    for m, gamma in ((60, 1.0), (45, 0.75)):
        config = SketchConfig(gamma=gamma, seed=6, relift=True)
        epochs = mesl_cluster(data, 2, m, config)
        relifted = sl_cluster(data, 2, config)
        checks.append(epochs.info["epochs"] == 1)
        checks.append(np.array_equal(epochs.labeling.labels,
                                     relifted.labeling.labels))

    # BCSL against SL on a pinned instance whose sketch clusters are equal
    delta2 = 3.0 * threshold_sl(80, 2, 10, 1.0, 0.5)
    data_b, _ = generate_gmm(GmmSpec((40, 40), 10, 1.0,
                                     float(np.sqrt(delta2)), seed=1))
    config = SketchConfig(gamma=0.5, seed=1)
    plain = sl_cluster(data_b, 2, config)
    corrected = bcsl_cluster(data_b, 2, config)
    equal_clusters = (corrected.info["centroid_sample_size"] * 2
                      == plain.info["sketch_size"])
    checks.append(equal_clusters)
    checks.append(np.array_equal(corrected.info["centroids"].centers,
                                 plain.info["centroids"].centers))
    checks.append(np.array_equal(corrected.labeling.labels,
                                 plain.labeling.labels))

    ok = all(checks)
    assert report(4, ok,
                  "SL(gamma=1)=full both modes, MR-WSL(1)=WSL, "
                  "ME-SL(1 epoch)=SL+relift (m=n and remainder), "
                  f"BCSL=SL on equal sketch clusters; {sum(checks)}/"
                  f"{len(checks)} identities exact")


def test_criterion_05_feasibility_and_psd_idempotence():
    rng = np.random.default_rng(13)
    worst = 0.0
    converged = 0
    ok = True
    for trial in range(100):
        m = int(rng.integers(5, 61))
        k = int(rng.integers(1, min(m, 6) + 1))
        if trial % 2 == 0:
            data = rng.standard_normal((m, int(rng.integers(1, 8))))
            data *= rng.uniform(0.5, 4.0)
            a = affinity(data)
        else:
            raw = rng.standard_normal((m, m)) * rng.uniform(0.5, 10.0)
            a = 0.5 * (raw + raw.T)
        sol = solve_kmeans_sdp(a, k)
        converged += sol.converged
        rep = check_feasibility(sol.z, tol=1e-5)
        worst = max(worst, rep.worst)
        if not rep.passes:
            ok = False

    idem_worst = 0.0
    for trial in range(20):
        m = int(rng.integers(2, 40))
        mat = rng.standard_normal((m, m)) * 5.0
        once = project_psd(mat)
        twice = project_psd(once)
        scale = max(1.0, float(np.abs(once).max()))
        idem_worst = max(idem_worst, float(np.abs(twice - once).max()) / scale)
    ok = ok and idem_worst <= 1e-12
    assert report(5, ok,
                  f"100 solves feasible at 1e-5 (worst violation {worst:.2e}, "
                  f"{converged} converged), psd idempotence {idem_worst:.2e}")


def test_criterion_06_metric_matches_exhaustive_matching():
    rng = np.random.default_rng(11)
    ok = True
    for pair in range(200):
        n = int(rng.integers(2, 51))
        k_pred = int(rng.integers(1, 7))
        k_truth = int(rng.integers(1, 7))
        pred = Labeling(rng.integers(1, k_pred + 1, size=n), k_pred)
        truth = Labeling(rng.integers(1, k_truth + 1, size=n), k_truth)
        fast = misclassification_error(pred, truth)
        slow = exhaustive_misclassification(pred.labels, truth.labels,
                                            k_pred, k_truth)
        if abs(fast - slow) > 1e-12:
            ok = False

    n = 2000
    truth = Labeling(np.repeat([1, 2], n // 2), 2)
    flipped = truth.labels.copy()
    flipped[0] = 2
    single = misclassification_error(Labeling(flipped, 2), truth)
    errors = [0.0] * 99 + [single]
    mean = float(np.mean(errors))
    arithmetic = abs(mean - 5e-6) <= 1e-9 * 5e-6
    ok = ok and arithmetic
    assert report(6, ok,
                  f"200 pairs equal exhaustive minimum, single flip mean "
                  f"{mean:.3e} vs 5e-6")


def test_criterion_07_desk_scale_orderings():
    started = time.perf_counter()
    equal = ExperimentConfig(sizes=(100,) * 4, p=100, lambda_star=1.2,
                             methods=("M0", "M1", "M2", "M3", "M4", "M5"),
                             gamma=0.25)
    eq = {s.method: s.mean_error
          for s in aggregate(run_replicates(equal, 20, base_seed=7, jobs=4))}

    unequal = ExperimentConfig(sizes=(50, 50, 150, 150), p=100, lambda_star=1.2,
                               methods=("M1", "M2", "M3"), gamma=0.25)
    un = {s.method: s.mean_error
          for s in aggregate(run_replicates(unequal, 20, base_seed=7, jobs=4))}

    variants_beat_baseline = all(eq[m] < eq["M0"]
                                 for m in ("M1", "M2", "M3", "M4", "M5"))
    mesl_at_most_sl = eq["M4"] <= eq["M1"]
    corrected_helps = un["M2"] <= un["M1"] and un["M3"] <= un["M1"]
    elapsed = time.perf_counter() - started
    ok = variants_beat_baseline and mesl_at_most_sl and corrected_helps
    assert report(7, ok,
                  f"equal: M0={eq['M0']:.4f} M1={eq['M1']:.5f} M2={eq['M2']:.5f} "
                  f"M3={eq['M3']:.5f} M4={eq['M4']:.5f} M5={eq['M5']:.5f}; "
                  f"unequal: M1={un['M1']:.5f} M2={un['M2']:.5f} "
                  f"M3={un['M3']:.5f}; {elapsed:.0f}s")


def test_criterion_08_linear_scaling_in_n():
    m, k, p = 100, 4, 50
    medians = {}
    for n in (4000, 8000):
        gamma = m / n
        delta2 = 2.0 * threshold_sl(n, k, p, 1.0, gamma)
        data, _ = generate_gmm(GmmSpec((n // k,) * k, p, 1.0,
                                       float(np.sqrt(delta2)), seed=42))
        runs = []
        for i in range(5):
            t0 = time.perf_counter()
            sl_cluster(data, k, SketchConfig(gamma=gamma, seed=i))
            runs.append(time.perf_counter() - t0)
        medians[n] = float(np.median(runs))
    ratio = medians[8000] / medians[4000]
    ok = ratio <= 2.5
    assert report(8, ok,
                  f"median wall time {medians[4000]:.3f}s at n=4000, "
                  f"{medians[8000]:.3f}s at n=8000, ratio {ratio:.2f} (cap 2.5)")


def test_criterion_09_multiround_weight_refinement():
    sizes, p, gamma, rounds = (50, 50, 150, 150), 100, 0.25, 4
    delta2 = separation_from_lambda(1.2, ThresholdInputs(sizes, p, 1.0))
    deltas = []
    zero_by_last = 0
    for rep in range(20):
        seed = subseed(300, rep)
        data, truth = generate_gmm(GmmSpec(sizes, p, 1.0,
                                           float(np.sqrt(delta2)),
                                           seed=subseed(seed, 0)))
        result = mrwsl_cluster(data, 4,
                               SketchConfig(gamma=gamma, seed=subseed(seed, 1)),
                               rounds=rounds)
        ideal = ideal_weights(truth, gamma)
        per_round = [epsilon_delta_fraction(w, ideal, 0.2)
                     for w in result.info["round_weights"]]
        per_round += [per_round[-1]] * (rounds - len(per_round))
        deltas.append(per_round)
        zero_by_last += per_round[-1] == 0.0
    mean_deltas = np.array(deltas).mean(axis=0)
    non_increasing = bool(np.all(np.diff(mean_deltas) <= 1e-12))
    ok = non_increasing and zero_by_last >= 16
    assert report(9, ok,
                  f"mean delta by round {np.round(mean_deltas, 5).tolist()}, "
                  f"zero at round {rounds} in {zero_by_last}/20 (need 16)")


def test_criterion_10_sketch_size_concentration():
    n, gamma, k = 5000, 0.1, 4
    truth = Labeling(np.repeat(np.arange(1, k + 1), n // k), k)
    weights = WeightVector(np.full(n, gamma))
    tau = float(np.sqrt(6.0 * k * np.log(n) / (n * gamma)))
    expected_cluster = gamma * n / k

    sizes = np.empty(1000)
    b_tau_hits = 0
    for draw in range(1000):
        t = sketch_indices(n, weights, "bernoulli", seed=draw)
        sizes[draw] = t.size
        counts = np.bincount(truth.labels[t], minlength=k + 1)[1:]
        if np.all(np.abs(counts - expected_cluster) <= tau * expected_cluster):
            b_tau_hits += 1

    mean_dev = abs(sizes.mean() - n * gamma)
    band = 4.0 * np.sqrt(n * gamma * (1 - gamma))
    ok = mean_dev <= band and b_tau_hits >= 950
    assert report(10, ok,
                  f"mean |T| deviation {mean_dev:.2f} (band {band:.2f}), "
                  f"B_tau held in {b_tau_hits}/1000 draws "
                  f"(tau={tau:.3f}, need 950)")
