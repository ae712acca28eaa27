"""Replicated sweeps over cache size, cost factor, and caching scheme.

One sweep cell is (scheme, cache size, cost factor, replication).  Every
cell regenerates the vehicle population from ``base_seed + replication``
when the scenario carries a generator recipe, solves the requested scheme,
and records one row.  Cells are independent, so any execution order (or a
parallel executor) produces the same rows; rows are sorted canonically
before emission and reals printed at fixed precision, making the CSV
byte-identical across runs and platforms.

Row columns:

* ``per_file_delay``: expected seconds per deliverable file over the whole
  chain, with downstream demand conditioned on what vehicles actually
  received upstream (the no-cache baseline keeps original demand at every
  RSU; it models a network that never hands content forward).
* ``caching_gain``: the no-cache per-file delay minus the scheme's.
* ``objective_value``: what the scheme's solver minimizes — for the
  non-cooperative schemes the sum of independent per-RSU objectives, for
  the cooperative schemes the chain objective with information flow.
* ``cached_count``: total cached copies across the chain.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, replace
from typing import Sequence

from .mobility import vehicles_from_spec
from .model import CachePolicy, EnumerationLimitError, Scenario, VehicleProfile
from .solvers import (
    evaluate_chain,
    greedy_coop,
    greedy_noncoop,
    objective_noncoop,
    reactive_chain_delay,
    solve_exhaustive_coop,
    solve_exhaustive_noncoop,
)

__all__ = [
    "SCHEMES",
    "CSV_HEADER",
    "SweepSpec",
    "SweepRow",
    "load_sweep_spec",
    "run_sweep",
    "emit_csv",
    "read_csv",
    "emit_plot",
    "sweep_metadata",
]

SCHEMES = (
    "reactive",
    "noncoop_greedy",
    "noncoop_optimal",
    "coop_greedy",
    "coop_optimal",
)

CSV_HEADER = (
    "scheme,cache_size,gamma,replication,per_file_delay,"
    "caching_gain,objective,cached_count"
)


@dataclass(frozen=True)
class SweepSpec:
    """Axes of one experiment batch.

    ``gammas`` and ``base_seed`` may be left None to inherit the
    scenario's cost factor and seed.
    """

    cache_sizes: tuple[int, ...]
    gammas: tuple[float, ...] | None = None
    schemes: tuple[str, ...] = SCHEMES
    replications: int = 20
    base_seed: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "cache_sizes", tuple(int(z) for z in self.cache_sizes))
        if self.gammas is not None:
            object.__setattr__(self, "gammas", tuple(float(g) for g in self.gammas))
        object.__setattr__(self, "schemes", tuple(self.schemes))
        if not self.cache_sizes:
            raise ValueError("cache_sizes must be non-empty")
        if any(z < 0 for z in self.cache_sizes):
            raise ValueError("cache sizes must be nonnegative")
        if self.gammas is not None and any(g < 0 for g in self.gammas):
            raise ValueError("cost factors must be nonnegative")
        if self.replications < 1:
            raise ValueError("replications must be at least 1")
        unknown = [s for s in self.schemes if s not in SCHEMES]
        if unknown:
            raise ValueError(
                f"unknown schemes {unknown}; valid schemes are {list(SCHEMES)}"
            )


@dataclass(frozen=True)
class SweepRow:
    """One (scheme, cache size, cost factor, replication) measurement.

    A row whose scheme could not run (enumeration guard, too few RSUs)
    has ``skipped`` set and carries the reason; its numeric fields are
    NaN/0 and it is left out of CSV output.
    """

    scheme: str
    cache_size: int
    gamma: float
    replication: int
    per_file_delay: float
    caching_gain: float
    objective_value: float
    cached_count: int
    skipped: bool = False
    skip_reason: str = ""


def load_sweep_spec(path: str) -> SweepSpec:
    """Read a SweepSpec from a JSON file.

    Recognized keys: cache_sizes (required), gammas, schemes,
    replications, base_seed.
    """
    from .config import ConfigError  # local import keeps module deps one-way

    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read file: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected a JSON object")
    if "cache_sizes" not in data:
        raise ConfigError(f"{path}: cache_sizes: required field is missing")
    known = {"cache_sizes", "gammas", "schemes", "replications", "base_seed"}
    stray = sorted(set(data) - known)
    if stray:
        raise ConfigError(f"{path}: unknown fields {stray}")
    try:
        return SweepSpec(
            cache_sizes=tuple(data["cache_sizes"]),
            gammas=tuple(data["gammas"]) if "gammas" in data else None,
            schemes=tuple(data.get("schemes", SCHEMES)),
            replications=int(data.get("replications", 20)),
            base_seed=int(data["base_seed"]) if "base_seed" in data else None,
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _cell_scenario(
    scenario: Scenario,
    cache_size: int,
    gamma: float,
    vehicles: tuple[VehicleProfile, ...],
) -> Scenario:
    """The scenario with every cache set to ``cache_size`` files."""
    cap_bytes = cache_size * scenario.library.item_size_bytes
    rsus = tuple(replace(r, cache_capacity_bytes=cap_bytes) for r in scenario.rsus)
    return replace(
        scenario, rsus=rsus, vehicles=vehicles, cost_factor=gamma
    )


def _skip(scheme, z, gamma, rep, reason) -> SweepRow:
    return SweepRow(
        scheme=scheme,
        cache_size=z,
        gamma=gamma,
        replication=rep,
        per_file_delay=math.nan,
        caching_gain=math.nan,
        objective_value=math.nan,
        cached_count=0,
        skipped=True,
        skip_reason=reason,
    )


def _run_cell(cell: Scenario, scheme: str, z: int, gamma: float, rep: int) -> SweepRow:
    reactive_total, reactive_caps, reactive_pf = reactive_chain_delay(cell)

    if scheme == "reactive":
        empty = CachePolicy.empty(cell.library.item_count)
        objective = math.fsum(
            objective_noncoop(cell, s, empty) for s in range(len(cell.rsus))
        )
        return SweepRow(
            scheme=scheme,
            cache_size=z,
            gamma=gamma,
            replication=rep,
            per_file_delay=reactive_pf,
            caching_gain=0.0,
            objective_value=objective,
            cached_count=0,
        )

    try:
        if scheme == "noncoop_greedy":
            results = [greedy_noncoop(cell, s) for s in range(len(cell.rsus))]
            policies = tuple(r.policies[0] for r in results)
            objective = math.fsum(r.objective_value for r in results)
        elif scheme == "noncoop_optimal":
            results = [
                solve_exhaustive_noncoop(cell, s) for s in range(len(cell.rsus))
            ]
            policies = tuple(r.policies[0] for r in results)
            objective = math.fsum(r.objective_value for r in results)
        elif scheme == "coop_greedy":
            result = greedy_coop(cell)
            policies = result.policies
            objective = result.objective_value
        elif scheme == "coop_optimal":
            result = solve_exhaustive_coop(cell)
            policies = result.policies
            objective = result.objective_value
        else:  # pragma: no cover - SweepSpec already rejects these
            raise ValueError(f"unknown scheme {scheme!r}")
    except EnumerationLimitError as exc:
        return _skip(scheme, z, gamma, rep, str(exc))
    except ValueError as exc:
        # coop schemes on chains they do not support
        return _skip(scheme, z, gamma, rep, str(exc))

    chain = evaluate_chain(cell, policies)
    return SweepRow(
        scheme=scheme,
        cache_size=z,
        gamma=gamma,
        replication=rep,
        per_file_delay=chain.per_file_delay,
        caching_gain=reactive_pf - chain.per_file_delay,
        objective_value=objective,
        cached_count=sum(p.cached_count for p in policies),
    )


def run_sweep(scenario: Scenario, spec: SweepSpec) -> list[SweepRow]:
    """Run every sweep cell and return canonically sorted rows.

    With a generator recipe on the scenario, replication r redraws the
    vehicle population from seed ``base_seed + r``; otherwise the
    scenario's fixed vehicles are reused for every replication.
    """
    base_seed = spec.base_seed if spec.base_seed is not None else scenario.rng_seed
    gammas = spec.gammas if spec.gammas is not None else (scenario.cost_factor,)

    populations: list[tuple[VehicleProfile, ...]] = []
    for rep in range(spec.replications):
        if scenario.generator is not None:
            populations.append(
                tuple(
                    vehicles_from_spec(
                        scenario.library,
                        len(scenario.rsus),
                        scenario.generator,
                        base_seed + rep,
                    )
                )
            )
        else:
            populations.append(scenario.vehicles)

    rows = []
    for scheme in spec.schemes:
        for z in spec.cache_sizes:
            for gamma in gammas:
                for rep in range(spec.replications):
                    cell = _cell_scenario(scenario, z, gamma, populations[rep])
                    rows.append(_run_cell(cell, scheme, z, gamma, rep))
    rows.sort(key=lambda r: (r.scheme, r.cache_size, r.gamma, r.replication))
    return rows


def _real(x: float) -> str:
    return format(x, ".9g")


def emit_csv(rows: Sequence[SweepRow], path: str) -> None:
    """Write rows as CSV with a fixed header and 9-significant-digit reals.

    Skipped rows are omitted (they carry no numbers); identical row lists
    produce byte-identical files.
    """
    if not rows:
        raise ValueError("no rows to write")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(CSV_HEADER + "\n")
        for r in rows:
            if r.skipped:
                continue
            fh.write(
                f"{r.scheme},{r.cache_size},{_real(r.gamma)},{r.replication},"
                f"{_real(r.per_file_delay)},{_real(r.caching_gain)},"
                f"{_real(r.objective_value)},{r.cached_count}\n"
            )


def read_csv(path: str) -> list[SweepRow]:
    """Read rows back from an emit_csv file."""
    rows = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        expected = CSV_HEADER.split(",")
        if reader.fieldnames != expected:
            raise ValueError(
                f"{path}: header {reader.fieldnames} does not match {expected}"
            )
        for rec in reader:
            rows.append(
                SweepRow(
                    scheme=rec["scheme"],
                    cache_size=int(rec["cache_size"]),
                    gamma=float(rec["gamma"]),
                    replication=int(rec["replication"]),
                    per_file_delay=float(rec["per_file_delay"]),
                    caching_gain=float(rec["caching_gain"]),
                    objective_value=float(rec["objective"]),
                    cached_count=int(rec["cached_count"]),
                )
            )
    return rows


def _series(rows: Sequence[SweepRow], metric: str):
    """Group rows into ((scheme, gamma) -> cache_size -> mean, std)."""
    groups: dict[tuple[str, float], dict[int, list[float]]] = {}
    for r in rows:
        if r.skipped:
            continue
        cell = groups.setdefault((r.scheme, r.gamma), {}).setdefault(r.cache_size, [])
        cell.append(getattr(r, metric))
    out = []
    for (scheme, gamma), by_size in sorted(groups.items()):
        sizes = sorted(by_size)
        means = []
        stds = []
        for z in sizes:
            vals = by_size[z]
            mean = math.fsum(vals) / len(vals)
            if len(vals) >= 2:
                var = math.fsum((v - mean) ** 2 for v in vals) / (len(vals) - 1)
                stds.append(math.sqrt(var))
            else:
                stds.append(0.0)
            means.append(mean)
        out.append(((scheme, gamma), sizes, means, stds))
    return out


_METRIC_LABELS = {
    "per_file_delay": "expected delay per file (s)",
    "objective_value": "placement objective",
    "caching_gain": "delay saved per file (s)",
}


def emit_plot(rows: Sequence[SweepRow], path: str, metric: str = "per_file_delay"):
    """Render metric-vs-cache-size curves, one series per (scheme, gamma).

    With two or more replications each curve shows the replication mean
    with a one-standard-deviation band.  Output format follows the file
    extension; SVG output is deterministic.
    """
    if metric not in _METRIC_LABELS:
        raise ValueError(f"unknown metric {metric!r}; pick from {sorted(_METRIC_LABELS)}")
    if not rows:
        raise ValueError("no rows to plot")
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    series = _series(rows, metric)
    gammas = {g for (_, g), *_ in series}
    plt.rcParams["svg.hashsalt"] = "rsu-cache-sweep"
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    for (scheme, gamma), sizes, means, stds in series:
        label = scheme if len(gammas) == 1 else f"{scheme}, cost={gamma:g}"
        (line,) = ax.plot(sizes, means, marker="o", markersize=3.5, label=label)
        if any(s > 0 for s in stds):
            lo = [m - s for m, s in zip(means, stds)]
            hi = [m + s for m, s in zip(means, stds)]
            ax.fill_between(sizes, lo, hi, alpha=0.15, color=line.get_color())
    ax.set_xlabel("cache size (files)")
    ax.set_ylabel(_METRIC_LABELS[metric])
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, metadata={"Date": None} if path.endswith(".svg") else None)
    plt.close(fig)


def sweep_metadata(scenario: Scenario, spec: SweepSpec) -> dict:
    """Everything a reader needs to rerun or question a sweep's numbers.

    Records the resolved axes and the stochastic-input conventions the
    rows depend on (how velocities and demand vectors were drawn, what
    the gain is measured against).
    """
    gen = scenario.generator
    return {
        "schemes": list(spec.schemes),
        "cache_sizes": list(spec.cache_sizes),
        "gammas": list(spec.gammas) if spec.gammas is not None
        else [scenario.cost_factor],
        "replications": spec.replications,
        "base_seed": spec.base_seed if spec.base_seed is not None
        else scenario.rng_seed,
        "library": {
            "item_count": scenario.library.item_count,
            "item_size_bytes": scenario.library.item_size_bytes,
        },
        "rsu_count": len(scenario.rsus),
        "vehicle_count": gen.count if gen is not None else len(scenario.vehicles),
        "vehicle_generator": None
        if gen is None
        else {
            "velocity_mean_ms": gen.velocity_mean_ms,
            "velocity_variance_ms2": gen.velocity_variance_ms2,
            "velocity_min_ms": gen.velocity_min_ms,
            "velocity_max_ms": gen.velocity_max_ms,
            "zipf_exponents": list(gen.zipf_exponents),
            "note": "velocities drawn per replication from base_seed + replication",
        },
        "definitions": {
            "per_file_delay": "chain expected seconds per deliverable file; "
            "downstream demand conditioned on upstream deliveries",
            "caching_gain": "no-cache per-file delay minus the scheme's",
            "objective": "solver objective: per-RSU sum (non-cooperative) or "
            "chain objective (cooperative), plus cost_factor x cached copies",
            "gain_percent": "caching_gain / reactive per_file_delay x 100",
        },
    }
