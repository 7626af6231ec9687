"""Command-line front end: generate data, cluster, sweep, report.

Every subcommand is driven by a YAML config file (see the README for the
full schema) plus a few overriding flags, and is deterministic given its
inputs: all randomness flows from seeds recorded in the config or flags.
"""

from __future__ import annotations

import argparse
import csv
import sys
import time
from pathlib import Path

import numpy as np
import yaml

from .datasets import GmmSpec, Labeling, generate_gmm, load_csv, save_csv, subseed
from .evaluate import (
    ExperimentConfig,
    aggregate,
    misclassification_error,
    normalize_method,
    run_method,
    run_replicates,
    write_records,
)
from .sdp import SolverConfig
from .theory import (
    ThresholdInputs,
    ideal_weights,
    separation_from_lambda,
    threshold_bcsl,
    threshold_full,
    threshold_sl,
)

__all__ = ["main"]

PLOT_FLOOR = 1e-6  # display floor for zero error on log-scale plots

SWEEP_PARAMETERS = ("p", "n", "gamma", "lambda_star")


class ConfigError(ValueError):
    """A config file is missing or malformed; message names the field."""


def _load_config(path) -> dict:
    if path is None:
        raise ConfigError("this command needs --config")
    try:
        with open(path) as fh:
            cfg = yaml.safe_load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"config file {path} is not valid YAML: {exc}") from None
    if not isinstance(cfg, dict):
        raise ConfigError(f"config file {path} must be a mapping at top level")
    return cfg


def _require(section: dict, key: str, where: str):
    if key not in section:
        raise ConfigError(f"missing config field {where}.{key}")
    return section[key]


def _sizes_from_config(g: dict) -> tuple:
    if "sizes" in g:
        sizes = g["sizes"]
        if not isinstance(sizes, list) or not sizes:
            raise ConfigError("gmm.sizes must be a non-empty list")
        return tuple(int(s) for s in sizes)
    n = int(_require(g, "n", "gmm"))
    k = int(_require(g, "k", "gmm"))
    ratios = g.get("size_ratios", [1] * k)
    if len(ratios) != k:
        raise ConfigError("gmm.size_ratios must have one entry per cluster")
    return _apportion(n, ratios)


def _apportion(n: int, ratios) -> tuple:
    """Split n into parts proportional to ratios; remainder goes to the
    earliest clusters, so the split is deterministic."""
    ratios = np.asarray(ratios, dtype=float)
    if np.any(ratios <= 0):
        raise ConfigError("gmm.size_ratios must be positive")
    raw = n * ratios / ratios.sum()
    sizes = np.floor(raw).astype(int)
    for i in range(int(n - sizes.sum())):
        sizes[i % len(sizes)] += 1
    if sizes.min() < 1:
        raise ConfigError("size apportionment produced an empty cluster; raise n")
    return tuple(int(s) for s in sizes)


def _solver_from_config(cfg: dict) -> SolverConfig:
    s = cfg.get("solver", {}) or {}
    allowed = {"rho", "tol", "max_iter", "verbose", "over_relaxation"}
    unknown = set(s) - allowed
    if unknown:
        raise ConfigError(f"unknown solver field(s): {sorted(unknown)}")
    return SolverConfig(**s)


def _gmm_spec(cfg: dict, seed_override=None) -> tuple[GmmSpec, float | None]:
    g = cfg.get("gmm")
    if not isinstance(g, dict):
        raise ConfigError("missing config section gmm")
    sizes = _sizes_from_config(g)
    p = int(_require(g, "p", "gmm"))
    sigma = float(g.get("sigma", 1.0))
    lambda_star = g.get("lambda_star")
    delta = g.get("delta")
    if (lambda_star is None) == (delta is None):
        raise ConfigError("gmm needs exactly one of lambda_star or delta")
    if lambda_star is not None:
        inputs = ThresholdInputs(sizes, p, sigma)
        delta = float(np.sqrt(separation_from_lambda(float(lambda_star), inputs)))
    seed = int(g.get("seed", 0)) if seed_override is None else int(seed_override)
    try:
        spec = GmmSpec(sizes=sizes, p=p, sigma=sigma, delta=float(delta), seed=seed)
    except ValueError as exc:
        raise ConfigError(f"invalid gmm config: {exc}") from None
    return spec, (float(lambda_star) if lambda_star is not None else None)


def cmd_generate(args) -> int:
    cfg = _load_config(args.config)
    spec, lambda_star = _gmm_spec(cfg, seed_override=args.seed)
    if args.out is None:
        raise ConfigError("generate needs --out")
    data, labeling = generate_gmm(spec)
    save_csv(data, args.out, labeling)
    if lambda_star is not None:
        print(f"delta2 = {spec.delta ** 2:.6f} (lambda_star = {lambda_star})")
    print(f"wrote {args.out} n={spec.n} p={spec.p} k={spec.k} "
          f"sigma={spec.sigma} seed={spec.seed}")
    return 0


def _method_section(cfg: dict) -> dict:
    section = cfg.get("method", {}) or {}
    if not isinstance(section, dict):
        raise ConfigError("config section method must be a mapping")
    return section


def cmd_cluster(args) -> int:
    cfg = _load_config(args.config) if args.config else {}
    section = _method_section(cfg)
    tag = args.method or section.get("name")
    if tag is None:
        raise ConfigError("give --method or set method.name in the config")
    tag = normalize_method(tag)
    data, truth = load_csv(args.data)
    k = section.get("k", truth.k if truth is not None else None)
    if k is None:
        raise ConfigError("method.k is required when the data has no label column")
    gamma = args.gamma if args.gamma is not None else float(section.get("gamma", 0.1))
    rounds = args.rounds if args.rounds is not None else int(section.get("rounds", 4))
    seed = args.seed if args.seed is not None else int(section.get("seed", 0))
    cap = (args.cap_full_sdp if args.cap_full_sdp is not None
           else int(section.get("cap_full_sdp", 3000)))
    mesl_m = section.get("mesl_m")

    started = time.perf_counter()
    result = run_method(
        tag, data, int(k), gamma=gamma, seed=seed,
        mode=section.get("mode", "fixed-size"), rounds=rounds,
        mesl_m=None if mesl_m is None else int(mesl_m),
        solver=_solver_from_config(cfg), cap_full_sdp=cap,
        relift=bool(section.get("relift", False)),
    )
    wall = time.perf_counter() - started

    if args.out:
        with open(args.out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["label"])
            for lab in result.labeling.labels:
                writer.writerow([int(lab)])
    error = ("n/a" if truth is None
             else f"{misclassification_error(result.labeling, truth):.17g}")
    iterations = result.info.get("iterations", "n/a")
    converged = result.info.get("converged", "n/a")
    print(f"method={tag} n={result.labeling.n} k={int(k)} error={error} "
          f"wall_time_s={wall:.6f} iterations={iterations} "
          f"converged={str(converged).lower()}")
    return 0


def _sweep_configs(cfg: dict, args):
    sweep = cfg.get("sweep")
    if not isinstance(sweep, dict):
        raise ConfigError("missing config section sweep")
    parameter = _require(sweep, "parameter", "sweep")
    if not isinstance(parameter, str) or parameter not in SWEEP_PARAMETERS:
        raise ConfigError(
            f"sweep.parameter must be one of {SWEEP_PARAMETERS} (one axis per sweep)")
    grid = _require(sweep, "grid", "sweep")
    if not isinstance(grid, list) or not grid:
        raise ConfigError("sweep.grid must be a non-empty list")
    methods = tuple(sweep.get("methods", ["M1"]))
    replicates = (args.replicates if args.replicates is not None
                  else int(sweep.get("replicates", 10)))
    seed = args.seed if args.seed is not None else int(sweep.get("seed", 0))
    jobs = args.jobs if args.jobs is not None else int(sweep.get("jobs", 1))

    g = cfg.get("gmm")
    if not isinstance(g, dict):
        raise ConfigError("missing config section gmm")
    section = _method_section(cfg)
    # when p itself is the swept axis the base value is a placeholder,
    # replaced at every grid point
    base_p = 0 if parameter == "p" else int(_require(g, "p", "gmm"))
    base = {
        "p": base_p,
        "sigma": float(g.get("sigma", 1.0)),
        "lambda_star": g.get("lambda_star"),
        "delta": g.get("delta"),
        "gamma": (args.gamma if args.gamma is not None
                  else float(section.get("gamma", 0.1))),
        "mode": section.get("mode", "fixed-size"),
        "rounds": (args.rounds if args.rounds is not None
                   else int(section.get("rounds", 4))),
        "mesl_m": section.get("mesl_m"),
        "solver": _solver_from_config(cfg),
        "cap_full_sdp": (args.cap_full_sdp if args.cap_full_sdp is not None
                         else int(section.get("cap_full_sdp", 3000))),
    }
    configs = []
    for x in grid:
        params = dict(base)
        if parameter == "n":
            k = int(_require(g, "k", "gmm"))
            sizes = _apportion(int(x), g.get("size_ratios", [1] * k))
        else:
            sizes = _sizes_from_config(g)
            if parameter == "p":
                params["p"] = int(x)
            elif parameter == "gamma":
                params["gamma"] = float(x)
            else:
                params["lambda_star"] = float(x)
                params["delta"] = None
        if params["lambda_star"] is not None and params["delta"] is not None:
            raise ConfigError("gmm needs exactly one of lambda_star or delta")
        try:
            configs.append((x, ExperimentConfig(
                sizes=sizes, methods=methods, **params)))
        except ValueError as exc:
            raise ConfigError(f"invalid sweep point {parameter}={x}: {exc}") from None
    return parameter, configs, replicates, seed, jobs


def _plot_path(out) -> Path:
    out = Path(out)
    return out.with_name(out.stem + "_plot" + (out.suffix or ".csv"))


def cmd_sweep(args) -> int:
    cfg = _load_config(args.config)
    if args.out is None:
        raise ConfigError("sweep needs --out")
    parameter, configs, replicates, seed, jobs = _sweep_configs(cfg, args)

    all_records = []
    plot_rows = []
    for idx, (x, experiment) in enumerate(configs):
        records = run_replicates(experiment, replicates,
                                 base_seed=subseed(seed, idx), jobs=jobs)
        all_records.extend(records)
        for summary in aggregate(records):
            if summary.method in ("M0", "O"):
                threshold = threshold_full(ThresholdInputs(
                    experiment.sizes, experiment.p, experiment.sigma))
            else:
                threshold = threshold_sl(experiment.n, experiment.k,
                                         experiment.p, experiment.sigma,
                                         experiment.gamma)
            floored = summary.mean_error < PLOT_FLOOR
            plot_rows.append([
                parameter, _format(x), summary.method,
                _format(max(summary.mean_error, PLOT_FLOOR)),
                "true" if floored else "false",
                _format(summary.error_bar), _format(summary.mean_time),
                _format(threshold),
            ])

    all_records.sort(key=lambda rec: (rec.method, rec.seed))
    write_records(all_records, args.out)
    plot_file = _plot_path(args.out)
    with open(plot_file, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["parameter", "value", "method", "mean_error",
                         "error_floored", "error_bar", "mean_time_s",
                         "threshold"])
        writer.writerows(plot_rows)
    print(f"wrote {args.out} ({len(all_records)} records) and {plot_file}")
    return 0


def _format(value) -> str:
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def cmd_report(args) -> int:
    cfg = _load_config(args.config)
    spec, lambda_star = _gmm_spec(cfg)
    section = _method_section(cfg)
    gamma = args.gamma if args.gamma is not None else float(section.get("gamma", 0.1))
    inputs = ThresholdInputs(spec.sizes, spec.p, spec.sigma, gamma)

    print(f"n = {spec.n}")
    print(f"k = {spec.k}")
    print(f"p = {spec.p}")
    print(f"sigma = {spec.sigma}")
    print(f"sizes = {list(spec.sizes)}")
    print(f"threshold_full = {threshold_full(inputs):.9f}")
    print(f"threshold_sl(gamma={gamma}) = "
          f"{threshold_sl(spec.n, spec.k, spec.p, spec.sigma, gamma):.9f}")
    print(f"threshold_bcsl(gamma={gamma}) = "
          f"{threshold_bcsl(spec.n, inputs.n_min, spec.p, spec.sigma, gamma):.9f}")
    if lambda_star is not None:
        print(f"lambda_star = {lambda_star}")
    print(f"delta2 = {spec.delta ** 2:.9f}")
    print(f"sketch_size = {int(np.floor(spec.n * gamma))}")
    truth = Labeling(np.repeat(np.arange(1, spec.k + 1), spec.sizes), spec.k)
    weights = ideal_weights(truth, gamma)
    per_cluster = sorted({f"{w:.6g}" for w in weights.w})
    print(f"ideal_weights = {per_cluster} (clipped = {str(weights.clipped).lower()})")
    print(f"expected_bernoulli_sketch_size = {weights.w.sum():.3f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sketchlift",
        description="SDP-relaxed K-means clustering with sketch-and-lift "
                    "approximations: dataset generation, clustering, "
                    "parameter sweeps, and threshold reports.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, out=True):
        p.add_argument("--config", help="YAML config file")
        if out:
            p.add_argument("--out", help="output file path")
        p.add_argument("--seed", type=int, help="override the config seed")

    p_gen = sub.add_parser("generate", help="write a synthetic mixture as CSV")
    common(p_gen)
    p_gen.set_defaults(func=cmd_generate)

    p_cluster = sub.add_parser("cluster", help="cluster a CSV dataset")
    p_cluster.add_argument("data", help="input CSV (optional label column)")
    common(p_cluster)
    p_cluster.add_argument("--method", help="M0|M1|M2|M3|M4|M5|O or an alias")
    p_cluster.add_argument("--gamma", type=float, help="subsampling factor")
    p_cluster.add_argument("--rounds", type=int, help="MR-WSL round count")
    p_cluster.add_argument("--cap-full-sdp", type=int,
                           help="refuse the full SDP above this n")
    p_cluster.set_defaults(func=cmd_cluster)

    p_sweep = sub.add_parser("sweep", help="run a one-parameter benchmark sweep")
    common(p_sweep)
    p_sweep.add_argument("--gamma", type=float, help="subsampling factor")
    p_sweep.add_argument("--rounds", type=int, help="MR-WSL round count")
    p_sweep.add_argument("--replicates", type=int, help="replicates per grid point")
    p_sweep.add_argument("--jobs", type=int, help="parallel worker processes")
    p_sweep.add_argument("--cap-full-sdp", type=int,
                         help="refuse the full SDP above this n")
    p_sweep.set_defaults(func=cmd_sweep)

    p_report = sub.add_parser("report", help="print thresholds and sketch sizes")
    common(p_report, out=False)
    p_report.add_argument("--gamma", type=float, help="subsampling factor")
    p_report.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BrokenPipeError:
        return 1
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
