"""Batch experiment drivers: explosion sweeps, return-time ECDFs, galleries, grids.

All drivers are deterministic given the sweep's master seed: every sweep
point gets a derived seed (splitmix64 of the master seed and the point
index) and every replica inside a point draws from its own stream, so
results do not depend on worker count, chunking or execution order.
Replica batches can be spread over a process pool; reductions are
order-insensitive counts and merges keyed by replica index.
"""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

from .classify import classify, grid_values
from .cubic import discriminant, spectral_radius
from .model import Params
from .simulate import (
    ExcursionKind,
    ExcursionOutcome,
    SimConfig,
    detect_alternation,
    run_excursion,
    run_trajectory,
)
from .stats import ConfidenceInterval, clopper_pearson, ecdf

_MASK64 = (1 << 64) - 1

GALLERY_REPLICA_CAP = 10_000_000


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_point_seed(master_seed: int, point_index: int) -> int:
    """Deterministic per-point master seed, stable across runs and workers."""
    return _splitmix64(_splitmix64(master_seed & _MASK64) ^ (point_index + 1))


@dataclass(frozen=True)
class SweepSpec:
    """One-coordinate sweep of the three-parameter model."""

    fixed: dict[str, float]  # two of "a", "b", "c"
    sweep_name: str  # the remaining coordinate
    values: tuple[float, ...]
    lam: float = 1.0
    replicas: int = 100_000  # desk-scale default; raise toward 1e6 for production runs
    sim: SimConfig = field(default_factory=SimConfig)
    alpha: float = 0.01
    jobs: int | None = None

    def __post_init__(self) -> None:
        names = set(self.fixed) | {self.sweep_name}
        if names != {"a", "b", "c"} or self.sweep_name in self.fixed:
            raise ValueError(
                f"fixed {sorted(self.fixed)} plus swept '{self.sweep_name}' "
                "must cover a, b, c exactly"
            )
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if not all(math.isfinite(v) for v in self.values):
            raise ValueError("swept values must be finite")
        if self.replicas < 1:
            raise ValueError(f"replicas must be >= 1, got {self.replicas}")
        if not (0.0 < self.alpha < 1.0):
            raise ValueError(f"alpha must be in (0, 1), got {self.alpha}")

    def params_at(self, value: float) -> Params:
        coeffs = dict(self.fixed)
        coeffs[self.sweep_name] = value
        return Params.p3(coeffs["a"], coeffs["b"], coeffs["c"], self.lam)


@dataclass(frozen=True)
class SweepRow:
    value: float
    exploded: int
    replicas: int
    proportion: float
    interval: ConfidenceInterval
    mean_tau_returned: float | None


def _batch_task(payload: tuple[Params, SimConfig, int, int]) -> tuple[int, list[tuple[str, int, int]]]:
    params, cfg, start, stop = payload
    out = []
    for r in range(start, stop):
        o = run_excursion(params, cfg, r)
        out.append((o.kind.value, o.steps, o.peak))
    return start, out


def run_excursions(
    params: Params, cfg: SimConfig, n_replicas: int, jobs: int | None = None
) -> list[ExcursionOutcome]:
    """Outcomes of replicas 0..n-1, bit-identical for any worker count."""
    if n_replicas < 1:
        raise ValueError(f"n_replicas must be >= 1, got {n_replicas}")
    if jobs is None:
        jobs = os.cpu_count() or 1
    jobs = max(1, min(jobs, n_replicas))
    if jobs == 1 or n_replicas < 256:
        return [run_excursion(params, cfg, r) for r in range(n_replicas)]
    chunk = max(256, -(-n_replicas // (jobs * 8)))
    payloads = [
        (params, cfg, start, min(start + chunk, n_replicas))
        for start in range(0, n_replicas, chunk)
    ]
    results: dict[int, list[tuple[str, int, int]]] = {}
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        for start, rows in pool.map(_batch_task, payloads):
            results[start] = rows
    out: list[ExcursionOutcome] = []
    for start in sorted(results):
        out.extend(
            ExcursionOutcome(ExcursionKind(kind), steps, peak)
            for kind, steps, peak in results[start]
        )
    return out


def _point_config(spec: SweepSpec, point_index: int) -> SimConfig:
    return replace(
        spec.sim, master_seed=derive_point_seed(spec.sim.master_seed, point_index)
    )


def sweep_explosion(spec: SweepSpec) -> list[SweepRow]:
    """Explosion proportion with exact confidence interval per swept value."""
    rows = []
    for idx, value in enumerate(spec.values):
        params = spec.params_at(value)
        outcomes = run_excursions(params, _point_config(spec, idx), spec.replicas, spec.jobs)
        exploded = sum(1 for o in outcomes if o.kind is ExcursionKind.EXPLODED)
        returned = [o.steps for o in outcomes if o.kind is ExcursionKind.RETURNED]
        rows.append(
            SweepRow(
                value=value,
                exploded=exploded,
                replicas=spec.replicas,
                proportion=exploded / spec.replicas,
                interval=clopper_pearson(exploded, spec.replicas, spec.alpha),
                mean_tau_returned=sum(returned) / len(returned) if returned else None,
            )
        )
    return rows


def tau_cdf_experiment(spec: SweepSpec) -> dict[float, list[tuple[int, float]]]:
    """Empirical CDF of the truncated return time per swept value.

    Exploded excursions carry the sentinel horizon+1 and appear as a
    final atom; censored ones sit at the horizon itself.
    """
    out: dict[float, list[tuple[int, float]]] = {}
    for idx, value in enumerate(spec.values):
        params = spec.params_at(value)
        outcomes = run_excursions(params, _point_config(spec, idx), spec.replicas, spec.jobs)
        out[value] = ecdf([o.steps for o in outcomes])
    return out


@dataclass(frozen=True)
class GalleryEntry:
    replica: int
    prefix: tuple[int, ...]
    alternation_onset: int | None


@dataclass(frozen=True)
class GalleryResult:
    entries: tuple[GalleryEntry, ...]
    partial: bool
    replicas_scanned: int


def exploding_gallery(
    params3: Params,
    cfg: SimConfig,
    want: int,
    prefix_len: int,
    replica_cap: int = GALLERY_REPLICA_CAP,
) -> GalleryResult:
    """Collect the first `want` exploding excursions (by replica index).

    Each entry replays its replica's stream to extract the first
    prefix_len counts, which is exact because trajectories and excursions
    consume randomness identically.  If the cap is hit first, the result
    is flagged partial rather than silently short.
    """
    if want < 1:
        raise ValueError(f"want must be >= 1, got {want}")
    if prefix_len < 1:
        raise ValueError(f"prefix_len must be >= 1, got {prefix_len}")
    found: list[int] = []
    scanned = 0
    while scanned < replica_cap and len(found) < want:
        o = run_excursion(params3, cfg, scanned)
        if o.kind is ExcursionKind.EXPLODED:
            found.append(scanned)
        scanned += 1
    entries = []
    for r in found[:want]:
        traj = run_trajectory(params3, cfg, prefix_len, r)
        prefix = tuple(s[0] for s in traj.states)
        onset = detect_alternation(list(prefix)) if len(prefix) >= 4 else None
        entries.append(GalleryEntry(replica=r, prefix=prefix, alternation_onset=onset))
    return GalleryResult(
        entries=tuple(entries), partial=len(found) < want, replicas_scanned=scanned
    )


@dataclass(frozen=True)
class GridCell:
    a: float
    b: float
    c: float
    disc: float
    disc_sign: int
    linear_stable: bool
    verdict: str
    rule: str


def disc_grid(
    a_values: list[float],
    b_range: tuple[float, float],
    c_range: tuple[float, float],
    step: float,
    lam: float = 1.0,
) -> list[GridCell]:
    """Sign of the discriminant, linear stability and fired rule per grid cell."""
    cells = []
    for a in a_values:
        for b in grid_values(*b_range, step):
            for c in grid_values(*c_range, step):
                d = discriminant(a, b, c)
                label = classify(Params.p3(a, b, c, lam))
                cells.append(
                    GridCell(
                        a=a,
                        b=b,
                        c=c,
                        disc=d,
                        disc_sign=(d > 0) - (d < 0),
                        linear_stable=spectral_radius(a, b, c) < 1.0,
                        verdict=label.verdict.value,
                        rule=label.rule,
                    )
                )
    return cells


# ---------------------------------------------------------------------------
# Serialization: CSV plus JSON mirrors, 17 significant digits throughout
# ---------------------------------------------------------------------------


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _open_csv(path: str):
    return open(path, "w", newline="", encoding="utf-8")


def write_sweep_csv(rows: list[SweepRow], path: str) -> None:
    with _open_csv(path) as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(
            ["swept_value", "exploded", "N", "proportion", "ci_lower", "ci_upper", "mean_tau_returned"]
        )
        for r in rows:
            w.writerow(
                [
                    _fmt(r.value),
                    r.exploded,
                    r.replicas,
                    _fmt(r.proportion),
                    _fmt(r.interval.lower),
                    _fmt(r.interval.upper),
                    "" if r.mean_tau_returned is None else _fmt(r.mean_tau_returned),
                ]
            )


def sweep_rows_json(spec: SweepSpec, rows: list[SweepRow]) -> dict:
    return {
        "fixed": spec.fixed,
        "sweep": spec.sweep_name,
        "lam": spec.lam,
        "replicas": spec.replicas,
        "alpha": spec.alpha,
        "horizon": spec.sim.horizon_n,
        "explosion_threshold": spec.sim.explosion_threshold_m,
        "master_seed": spec.sim.master_seed,
        "rows": [
            {
                "swept_value": r.value,
                "exploded": r.exploded,
                "N": r.replicas,
                "proportion": r.proportion,
                "ci_lower": r.interval.lower,
                "ci_upper": r.interval.upper,
                "mean_tau_returned": r.mean_tau_returned,
            }
            for r in rows
        ],
    }


def write_json(obj: dict, path: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(obj, f, indent=2, sort_keys=True)
        f.write("\n")


def write_ecdf_csv(points: list[tuple[int, float]], path: str) -> None:
    with _open_csv(path) as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["tau", "cumulative_fraction"])
        for tau, frac in points:
            w.writerow([tau, _fmt(frac)])


def write_gallery_csv(result: GalleryResult, path: str) -> None:
    width = max((len(e.prefix) for e in result.entries), default=0)
    with _open_csv(path) as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["replica", "alternation_onset"] + [f"x{t}" for t in range(width)])
        for e in result.entries:
            onset = "" if e.alternation_onset is None else e.alternation_onset
            w.writerow([e.replica, onset] + list(e.prefix))


def write_grid_csv(cells: list[GridCell], path: str) -> None:
    with _open_csv(path) as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["a", "b", "c", "disc", "disc_sign", "linear_stable", "verdict", "rule"])
        for cell in cells:
            w.writerow(
                [
                    _fmt(cell.a),
                    _fmt(cell.b),
                    _fmt(cell.c),
                    _fmt(cell.disc),
                    cell.disc_sign,
                    int(cell.linear_stable),
                    cell.verdict,
                    cell.rule,
                ]
            )


def write_trajectory_csv(states: list[tuple[int, ...]], path: str) -> None:
    with _open_csv(path) as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["step", "count"])
        for n, s in enumerate(states, start=1):
            w.writerow([n, s[0]])
