"""Command-line front door: classify, simulate, drift-check and experiments.

Configuration precedence: explicit flags > HAWKES_SEED environment
variable (seed only) > --config file > built-in defaults.  Every command
can echo its fully resolved configuration to a JSON file; re-ingesting
that file reproduces the identical run.

Exit codes: 0 success, 2 usage or parse error, 3 output I/O error,
4 flagged numerical anomaly (dirty boundary shell, partial gallery).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .classify import classify, grid_values
from .cubic import alpha_q, cubic_report
from .drift import certify_drift, scan_violations, verify_small_set, small_set_applicable
from .experiments import (
    GalleryResult,
    SweepSpec,
    disc_grid,
    exploding_gallery,
    sweep_explosion,
    sweep_rows_json,
    tau_cdf_experiment,
    write_ecdf_csv,
    write_gallery_csv,
    write_grid_csv,
    write_json,
    write_sweep_csv,
    write_trajectory_csv,
)
from .model import Params
from .simulate import SimConfig, run_trajectory

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_ANOMALY = 4

_SIM_DEFAULTS = {"horizon": 10_000, "threshold": 10**9, "seed": 0}

DEFAULTS: dict[str, dict] = {
    "classify": {"p": None, "a": None, "b": None, "c": None, "coeffs": None, "lam": 1.0},
    "simulate": {
        "p": None, "a": None, "b": None, "c": None, "coeffs": None, "lam": 1.0,
        "length": 100, "replica": 0, "out": None, **_SIM_DEFAULTS,
    },
    "sweep": {
        "fix": None, "sweep": None, "replicas": 100_000, "alpha": 0.01, "lam": 1.0,
        "jobs": None, "out": None, **_SIM_DEFAULTS,
    },
    "ecdf": {
        "fix": None, "sweep": None, "replicas": 100_000, "alpha": 0.01, "lam": 1.0,
        "jobs": None, "out": None, **_SIM_DEFAULTS,
    },
    "gallery": {
        "a": None, "b": None, "c": None, "lam": 1.0, "want": 5, "prefix": 30,
        "cap": 10_000_000, "out": None, **_SIM_DEFAULTS,
    },
    "drift": {
        "a": None, "b": None, "c": None, "lam": 1.0, "radius": 200,
        "max_radius": 1600, "epsilon": None, "out": None,
    },
    "grid": {
        "a_values": None, "b_range": None, "c_range": None, "step": None,
        "lam": 1.0, "out": None,
    },
}


def _parse_floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v != ""]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"bad number list {text!r}: {e}") from None


def _parse_fix(text: str) -> dict[str, float]:
    out: dict[str, float] = {}
    try:
        for part in text.split(","):
            name, val = part.split("=")
            out[name.strip()] = float(val)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"bad fix argument {text!r}: {e}") from None
    return out


def _parse_sweep(text: str) -> tuple[str, list[float]]:
    try:
        name, rhs = text.split("=")
        name = name.strip()
        if ":" in rhs:
            start, stop, step = (float(v) for v in rhs.split(":"))
            return name, grid_values(start, stop, step)
        return name, [float(v) for v in rhs.split(",")]
    except (ValueError, TypeError) as e:
        raise argparse.ArgumentTypeError(f"bad sweep argument {text!r}: {e}") from None


def _parse_range(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(v) for v in text.split(":"))
        return lo, hi
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"bad range {text!r}: {e}") from None


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="dhawkes", description=__doc__)
    sub = top.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="JSON config file; flags override its values")
        p.add_argument("--echo-config", help="write the resolved configuration to this path")

    def add_params(p: argparse.ArgumentParser) -> None:
        p.add_argument("-p", type=int, dest="p", help="memory length")
        p.add_argument("-a", type=float, help="lag-1 coefficient")
        p.add_argument("-b", type=float, help="lag-2 coefficient")
        p.add_argument("-c", type=float, help="lag-3 coefficient")
        p.add_argument("--coeffs", type=_parse_floats, help="comma-separated a_1..a_p")
        p.add_argument("--lam", type=float, help="baseline intensity (default 1)")

    def add_sim(p: argparse.ArgumentParser) -> None:
        p.add_argument("--horizon", type=int, help="censoring horizon (default 10000)")
        p.add_argument("--threshold", type=int, help="explosion threshold (default 1e9)")
        p.add_argument("--seed", type=int, help="master seed")

    p = sub.add_parser("classify", help="stability verdict for a parameter point")
    add_params(p)
    add_common(p)

    p = sub.add_parser("simulate", help="write one trajectory as CSV")
    add_params(p)
    add_sim(p)
    p.add_argument("--length", type=int, help="number of steps (default 100)")
    p.add_argument("--replica", type=int, help="replica index (default 0)")
    p.add_argument("--out", help="output CSV path (default stdout)")
    add_common(p)

    for name, help_text in (
        ("sweep", "explosion-proportion sweep with exact intervals"),
        ("ecdf", "empirical CDFs of the truncated return time"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--fix", type=_parse_fix, help="fixed coordinates, e.g. a=3,c=-15")
        p.add_argument(
            "--sweep", type=_parse_sweep, dest="sweep",
            help="swept coordinate, e.g. b=0:4:0.5 or b=0.9,1,4",
        )
        p.add_argument("--replicas", type=int, help="excursions per point")
        p.add_argument("--alpha", type=float, help="interval significance (default 0.01)")
        p.add_argument("--lam", type=float)
        p.add_argument("--jobs", type=int, help="worker processes (default: all cores)")
        p.add_argument("--out", help="output basename (.csv/.json emitted)")
        add_sim(p)
        add_common(p)

    p = sub.add_parser("gallery", help="collect exploding excursion prefixes")
    p.add_argument("-a", type=float)
    p.add_argument("-b", type=float)
    p.add_argument("-c", type=float)
    p.add_argument("--lam", type=float)
    p.add_argument("--want", type=int, help="number of exploding excursions (default 5)")
    p.add_argument("--prefix", type=int, help="prefix length to record (default 30)")
    p.add_argument("--cap", type=int, help="replica cap (default 1e7)")
    p.add_argument("--out", help="output basename")
    add_sim(p)
    add_common(p)

    p = sub.add_parser("drift", help="verify the drift construction numerically")
    p.add_argument("-a", type=float)
    p.add_argument("-b", type=float)
    p.add_argument("-c", type=float)
    p.add_argument("--lam", type=float)
    p.add_argument("--radius", type=int, help="scan box radius (default 200)")
    p.add_argument("--max-radius", type=int, dest="max_radius", help="doubling cap (default 1600)")
    p.add_argument("--epsilon", type=float, help="fixed epsilon instead of the grid search")
    p.add_argument("--out", help="write the report as JSON")
    add_common(p)

    p = sub.add_parser("grid", help="discriminant-sign / classification grid data")
    p.add_argument("--a-values", type=_parse_floats, dest="a_values", help="e.g. 0.5,1,2,3")
    p.add_argument("--b-range", type=_parse_range, dest="b_range", help="e.g. -3:2")
    p.add_argument("--c-range", type=_parse_range, dest="c_range", help="e.g. -3:2")
    p.add_argument("--step", type=float)
    p.add_argument("--lam", type=float)
    p.add_argument("--out", help="output basename")
    add_common(p)

    return top


def _resolve(args: argparse.Namespace) -> dict:
    """Merge defaults, config file, HAWKES_SEED and explicit flags."""
    command = args.command
    merged = dict(DEFAULTS[command])
    if args.config:
        with open(args.config, encoding="utf-8") as f:
            loaded = json.load(f)
        if not isinstance(loaded, dict):
            raise ValueError("config root must be a JSON object")
        cfg_cmd = loaded.pop("command", command)
        if cfg_cmd != command:
            raise ValueError(f"config is for command {cfg_cmd!r}, not {command!r}")
        unknown = set(loaded) - set(merged)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        for key, val in loaded.items():
            if key == "sweep" and isinstance(val, list):
                val = (val[0], [float(v) for v in val[1]])
            merged[key] = val
    if "seed" in merged and os.environ.get("HAWKES_SEED"):
        merged["seed"] = int(os.environ["HAWKES_SEED"])
    for key in merged:
        flag_val = getattr(args, key, None)
        if flag_val is not None:
            merged[key] = flag_val
    return merged


def _echo(args: argparse.Namespace, merged: dict) -> None:
    if args.echo_config:
        write_json({"command": args.command, **merged}, args.echo_config)


def _params_from(merged: dict) -> Params:
    lam = merged.get("lam") or 1.0
    if merged.get("coeffs"):
        coeffs = [float(v) for v in merged["coeffs"]]
        p = merged.get("p") or len(coeffs)
        return Params(p=p, coeffs=tuple(coeffs), lam=lam)
    letters = [merged.get("a"), merged.get("b"), merged.get("c")]
    provided = [v for v in letters if v is not None]
    p = merged.get("p") or len(provided)
    if len(provided) != p or p == 0:
        raise ValueError(f"need {p or 'some'} coefficients; got {provided}")
    return Params(p=p, coeffs=tuple(provided), lam=lam)


def _sim_config(merged: dict) -> SimConfig:
    return SimConfig(
        horizon_n=merged["horizon"],
        explosion_threshold_m=merged["threshold"],
        master_seed=merged["seed"],
    )


def _fmt(x: float) -> str:
    return f"{x:.10g}"


def cmd_classify(args: argparse.Namespace) -> int:
    merged = _resolve(args)
    _echo(args, merged)
    params = _params_from(merged)
    label = classify(params)
    print(f"verdict={label.verdict.value}")
    print(f"rule={label.rule}")
    w = label.witness
    if w is not None:
        print(f"disc={_fmt(w.disc)}")
        print(f"real_roots={[float(_fmt(r)) for r in w.real_roots]}")
        print(f"spectral_radius={_fmt(w.spectral_radius)}")
        if w.alpha_q is not None:
            print(f"alpha_q={_fmt(w.alpha_q)}")
            print(f"r_at_alpha_q={_fmt(w.r_at_alpha_q)}")
            print(f"k_at_alpha_q={_fmt(w.k_at_alpha_q)}")
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    merged = _resolve(args)
    _echo(args, merged)
    params = _params_from(merged)
    cfg = _sim_config(merged)
    traj = run_trajectory(params, cfg, merged["length"], merged["replica"])
    if merged["out"]:
        write_trajectory_csv(traj.states, merged["out"])
        dest = merged["out"]
    else:
        for n, s in enumerate(traj.states, start=1):
            print(f"{n},{s[0]}")
        dest = "stdout"
    note = " (explosion threshold crossed)" if traj.exploded else ""
    print(f"simulate: {len(traj.states)} steps -> {dest}{note}", file=sys.stderr)
    return EXIT_OK


def _sweep_spec(merged: dict) -> SweepSpec:
    if not merged.get("fix") or not merged.get("sweep"):
        raise ValueError("sweep requires --fix and --sweep")
    name, values = merged["sweep"]
    return SweepSpec(
        fixed={k: float(v) for k, v in merged["fix"].items()},
        sweep_name=name,
        values=tuple(values),
        lam=merged.get("lam") or 1.0,
        replicas=merged["replicas"],
        sim=_sim_config(merged),
        alpha=merged["alpha"],
        jobs=merged.get("jobs"),
    )


def _out_paths(base: str) -> tuple[str, str]:
    if base.endswith(".csv"):
        return base, base[:-4] + ".json"
    return base + ".csv", base + ".json"


def cmd_sweep(args: argparse.Namespace) -> int:
    merged = _resolve(args)
    _echo(args, merged)
    spec = _sweep_spec(merged)
    rows = sweep_explosion(spec)
    if merged["out"]:
        csv_path, json_path = _out_paths(merged["out"])
        write_sweep_csv(rows, csv_path)
        write_json(sweep_rows_json(spec, rows), json_path)
        print(f"sweep: {len(rows)} points x {spec.replicas} replicas -> {csv_path}")
    else:
        for r in rows:
            print(
                f"{spec.sweep_name}={_fmt(r.value)} exploded={r.exploded}/{r.replicas} "
                f"ci=[{_fmt(r.interval.lower)},{_fmt(r.interval.upper)}]"
            )
    return EXIT_OK


def cmd_ecdf(args: argparse.Namespace) -> int:
    merged = _resolve(args)
    _echo(args, merged)
    spec = _sweep_spec(merged)
    curves = tau_cdf_experiment(spec)
    base = merged["out"] or "ecdf"
    if base.endswith(".csv"):
        base = base[:-4]
    mirror = {"spec": sweep_rows_json(spec, []), "curves": {}}
    for value, points in curves.items():
        path = f"{base}_{spec.sweep_name}{value:g}.csv"
        write_ecdf_csv(points, path)
        mirror["curves"][f"{value:.17g}"] = [[t, f] for t, f in points]
    write_json(mirror, base + ".json")
    print(f"ecdf: {len(curves)} curves -> {base}_*.csv")
    return EXIT_OK


def cmd_gallery(args: argparse.Namespace) -> int:
    merged = _resolve(args)
    _echo(args, merged)
    params = Params.p3(merged["a"], merged["b"], merged["c"], merged.get("lam") or 1.0)
    cfg = _sim_config(merged)
    result = exploding_gallery(
        params, cfg, want=merged["want"], prefix_len=merged["prefix"], replica_cap=merged["cap"]
    )
    base = merged["out"] or "gallery"
    csv_path, json_path = _out_paths(base)
    write_gallery_csv(result, csv_path)
    write_json(_gallery_json(result), json_path)
    status = "partial" if result.partial else "complete"
    print(
        f"gallery: {len(result.entries)}/{merged['want']} exploding excursions "
        f"({status}, {result.replicas_scanned} replicas scanned) -> {csv_path}"
    )
    return EXIT_ANOMALY if result.partial else EXIT_OK


def _gallery_json(result: GalleryResult) -> dict:
    return {
        "partial": result.partial,
        "replicas_scanned": result.replicas_scanned,
        "entries": [
            {
                "replica": e.replica,
                "alternation_onset": e.alternation_onset,
                "prefix": list(e.prefix),
            }
            for e in result.entries
        ],
    }


def cmd_drift(args: argparse.Namespace) -> int:
    merged = _resolve(args)
    _echo(args, merged)
    a, b, c = merged["a"], merged["b"], merged["c"]
    lam = merged.get("lam") or 1.0
    if a is None or b is None or c is None:
        raise ValueError("drift requires -a, -b and -c")
    params = Params.p3(a, b, c, lam)
    report = cubic_report(a, b, c)
    print(f"disc={_fmt(report.disc)}")

    if merged["epsilon"] is not None or not (b < 0 and c < 0 and report.disc < 0):
        # manual/exploratory scan (also covers 0 <= b <= 1 with Disc < 0)
        if not (report.disc < 0 and c < 0):
            print("drift construction needs Disc < 0 and c < 0", file=sys.stderr)
            return EXIT_USAGE
        alpha = alpha_q(a, b, c)
        eps_list = [merged["epsilon"]] if merged["epsilon"] else [2.0**-k for k in range(1, 21)]
        for eps in eps_list:
            rep = scan_violations(params, alpha, eps, merged["radius"])
            if rep.shell_clean:
                small = (
                    verify_small_set(params, merged["radius"]).verified
                    if small_set_applicable(params)
                    else False
                )
                print(
                    f"exploratory scan: alpha={_fmt(alpha)} epsilon={_fmt(eps)} "
                    f"violations={rep.violations_total} shell_clean=True "
                    f"small_set_verified={small}"
                )
                if merged["out"]:
                    write_json(_drift_json(rep, alpha, small), merged["out"])
                return EXIT_OK
        print("no epsilon produced a clean boundary shell", file=sys.stderr)
        return EXIT_ANOMALY

    cert = certify_drift(params, box_radius=merged["radius"], max_radius=merged["max_radius"])
    print(f"alpha_q={_fmt(cert.alpha)}")
    print(f"r_at_alpha_q={_fmt(cert.cubic.r_at_alpha_q)}")
    print(f"k_at_alpha_q={_fmt(cert.cubic.k_at_alpha_q)}")
    print(f"epsilon={_fmt(cert.epsilon)}")
    print(f"violations={cert.report.violations_total} (radius {cert.report.box_radius})")
    print(f"shell_clean={cert.report.shell_clean}")
    print(f"k_bound={_fmt(cert.report.k_bound)}")
    print(f"q_max_on_octant={_fmt(cert.q_max_on_octant)}")
    print(f"det_identity_residual={cert.det_identity_residual:.3e}")
    print(
        f"small_set_verified={cert.small_set.verified} "
        f"(witness={_fmt(cert.small_set.witness_probability)}, "
        f"bound={_fmt(cert.small_set.bound)})"
    )
    if merged["out"]:
        write_json(_drift_json(cert.report, cert.alpha, cert.small_set.verified), merged["out"])
    return EXIT_OK if cert.complete else EXIT_ANOMALY


def _drift_json(report, alpha: float, small_verified: bool) -> dict:
    return {
        "alpha": alpha,
        "epsilon": report.epsilon,
        "box_radius": report.box_radius,
        "violations_total": report.violations_total,
        "violations": [list(v) for v in report.violation_set[:1000]],
        "k_bound": report.k_bound,
        "shell_clean": report.shell_clean,
        "small_set_verified": small_verified,
    }


def cmd_grid(args: argparse.Namespace) -> int:
    merged = _resolve(args)
    _echo(args, merged)
    for key in ("a_values", "b_range", "c_range", "step"):
        if merged.get(key) is None:
            raise ValueError(f"grid requires --{key.replace('_', '-')}")
    cells = disc_grid(
        [float(v) for v in merged["a_values"]],
        tuple(merged["b_range"]),
        tuple(merged["c_range"]),
        merged["step"],
        merged.get("lam") or 1.0,
    )
    base = merged["out"] or "grid"
    csv_path, json_path = _out_paths(base)
    write_grid_csv(cells, csv_path)
    write_json(
        {
            "cells": [
                {
                    "a": g.a, "b": g.b, "c": g.c, "disc": g.disc,
                    "disc_sign": g.disc_sign, "linear_stable": g.linear_stable,
                    "verdict": g.verdict, "rule": g.rule,
                }
                for g in cells
            ]
        },
        json_path,
    )
    print(f"grid: {len(cells)} cells -> {csv_path}")
    return EXIT_OK


_HANDLERS = {
    "classify": cmd_classify,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "ecdf": cmd_ecdf,
    "gallery": cmd_gallery,
    "drift": cmd_drift,
    "grid": cmd_grid,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except (ValueError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"i/o error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
