"""Command-line front end.

Verbs: ``validate`` checks a scenario file, ``solve`` prints placements
for one scenario, ``sweep`` runs a replicated experiment batch to CSV,
``plot`` renders curves from a CSV or by running the sweep in place.

Exit codes: 0 success; 1 parse or validation failure; 2 the requested
work was entirely infeasible (enumeration guards, chain too short);
3 output I/O failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import replace

from . import config
from .experiment import (
    SCHEMES,
    SweepSpec,
    emit_csv,
    emit_plot,
    load_sweep_spec,
    read_csv,
    run_sweep,
    sweep_metadata,
)
from .mobility import vehicles_from_spec
from .model import EnumerationLimitError, Scenario
from .solvers import (
    evaluate_chain,
    greedy_coop,
    greedy_noncoop,
    reactive_chain_delay,
    solve_exhaustive_coop,
    solve_exhaustive_noncoop,
)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_INFEASIBLE = 2
EXIT_IO = 3


def _load_scenario_ref(ref: str) -> Scenario:
    """A scenario argument is a file path or a bundled scenario name."""
    if os.path.exists(ref):
        return config.load_scenario(ref)
    if ref in config.bundled_scenario_names():
        return config.load_bundled_scenario(ref)
    raise config.ConfigError(
        f"{ref}: no such file or bundled scenario "
        f"(bundled: {', '.join(config.bundled_scenario_names())})"
    )


def _reseed(scenario: Scenario, seed: int) -> Scenario:
    """Override the scenario seed, redrawing vehicles when possible."""
    if scenario.generator is not None:
        vehicles = tuple(
            vehicles_from_spec(
                scenario.library, len(scenario.rsus), scenario.generator, seed
            )
        )
        return replace(scenario, rng_seed=seed, vehicles=vehicles)
    return replace(scenario, rng_seed=seed)


def _scenario_summary(scenario: Scenario) -> str:
    lib = scenario.library
    return (
        f"{len(scenario.rsus)} RSU(s), {lib.item_count} items of "
        f"{lib.item_size_bytes:g} bytes, {len(scenario.vehicles)} vehicle(s), "
        f"cost factor {scenario.cost_factor:g}, seed {scenario.rng_seed}"
    )


def _cmd_validate(args) -> int:
    scenario = _load_scenario_ref(args.scenario)
    print(f"valid: {_scenario_summary(scenario)}")
    return EXIT_OK


_SOLVERS = {
    "noncoop_greedy": lambda sc: _per_rsu(sc, greedy_noncoop),
    "noncoop_optimal": lambda sc: _per_rsu(sc, solve_exhaustive_noncoop),
    "coop_greedy": greedy_coop,
    "coop_optimal": solve_exhaustive_coop,
}


def _per_rsu(scenario: Scenario, solver):
    results = [solver(scenario, s) for s in range(len(scenario.rsus))]
    policies = tuple(r.policies[0] for r in results)
    objective = math.fsum(r.objective_value for r in results)
    evaluations = sum(r.evaluations for r in results)
    from .solvers import SolveResult

    return SolveResult(
        policies=policies, objective_value=objective, evaluations=evaluations
    )


def _cmd_solve(args) -> int:
    scenario = _load_scenario_ref(args.scenario)
    if args.seed is not None:
        scenario = _reseed(scenario, args.seed)
    schemes = [args.scheme] if args.scheme else [
        s for s in SCHEMES if s != "reactive"
    ]

    _, _, reactive_pf = reactive_chain_delay(scenario)
    print(f"scenario: {_scenario_summary(scenario)}")
    print(f"no-cache baseline: {reactive_pf:.9g} s per file")

    report: dict = {"scenario": _scenario_summary(scenario), "schemes": {}}
    solved_any = False
    explicit = args.scheme is not None
    for scheme in schemes:
        try:
            result = _SOLVERS[scheme](scenario)
        except (EnumerationLimitError, ValueError) as exc:
            print(f"\nscheme {scheme}: skipped ({exc})")
            report["schemes"][scheme] = {"skipped": str(exc)}
            if explicit:
                return EXIT_INFEASIBLE
            continue
        solved_any = True
        chain = evaluate_chain(scenario, result.policies)
        gain = reactive_pf - chain.per_file_delay
        pct = 100.0 * gain / reactive_pf if reactive_pf > 0 else math.nan
        print(f"\nscheme {scheme}")
        for s, policy in enumerate(result.policies):
            items = list(policy.cached_items)
            print(f"  rsu {s}: cached items {items} ({len(items)} files)")
        print(f"  objective        {result.objective_value:.9g}")
        print(f"  per-file delay   {chain.per_file_delay:.9g} s")
        print(f"  delay saved      {gain:.9g} s per file ({pct:.1f}%)")
        report["schemes"][scheme] = {
            "policies": [list(p.cached_items) for p in result.policies],
            "objective": result.objective_value,
            "per_file_delay": chain.per_file_delay,
            "caching_gain": gain,
            "evaluations": result.evaluations,
        }

    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2)
            fh.write("\n")
    return EXIT_OK if solved_any else EXIT_INFEASIBLE


def _default_spec(scenario: Scenario) -> SweepSpec:
    return SweepSpec(cache_sizes=tuple(range(1, scenario.library.item_count + 1)))


def _cmd_sweep(args) -> int:
    scenario = _load_scenario_ref(args.scenario)
    spec = load_sweep_spec(args.spec) if args.spec else _default_spec(scenario)
    if args.seed is not None:
        scenario = _reseed(scenario, args.seed)
        spec = replace(spec, base_seed=args.seed)

    rows = run_sweep(scenario, spec)
    skipped = [r for r in rows if r.skipped]
    kept = [r for r in rows if not r.skipped]
    if skipped:
        reasons = sorted({r.skip_reason for r in skipped})
        print(
            f"skipped {len(skipped)}/{len(rows)} cells:", file=sys.stderr)
        for reason in reasons:
            print(f"  - {reason}", file=sys.stderr)
    if not kept:
        print("every sweep cell was skipped; nothing to write", file=sys.stderr)
        return EXIT_INFEASIBLE

    emit_csv(rows, args.out)
    meta_path = args.out + ".meta.json"
    with open(meta_path, "w", encoding="utf-8") as fh:
        json.dump(sweep_metadata(scenario, spec), fh, indent=2)
        fh.write("\n")
    print(f"wrote {len(kept)} rows to {args.out} (metadata: {meta_path})")
    if args.plot:
        emit_plot(rows, args.plot, metric=args.metric)
        print(f"wrote plot to {args.plot}")
    return EXIT_OK


def _cmd_plot(args) -> int:
    if args.csv:
        rows = read_csv(args.csv)
    else:
        if not args.scenario:
            raise config.ConfigError("plot: provide --csv or --scenario")
        scenario = _load_scenario_ref(args.scenario)
        spec = load_sweep_spec(args.spec) if args.spec else _default_spec(scenario)
        if args.seed is not None:
            scenario = _reseed(scenario, args.seed)
            spec = replace(spec, base_seed=args.seed)
        rows = run_sweep(scenario, spec)
    live = [r for r in rows if not r.skipped]
    if not live:
        print("no plottable rows", file=sys.stderr)
        return EXIT_INFEASIBLE
    emit_plot(rows, args.out, metric=args.metric)
    print(f"wrote plot to {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="procache",
        description="Cache placement and delay experiments for RSU chains.",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    def add_common(p, scenario_required=True):
        p.add_argument(
            "-s",
            "--scenario",
            required=scenario_required,
            help="scenario JSON file or bundled scenario name",
        )
        p.add_argument("-x", "--spec", help="sweep spec JSON file")
        p.add_argument("--seed", type=int, help="override the scenario seed")

    p = sub.add_parser("validate", help="check a scenario file")
    add_common(p)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("solve", help="solve one scenario and print placements")
    add_common(p)
    p.add_argument("--scheme", choices=[s for s in SCHEMES if s != "reactive"])
    p.add_argument("-o", "--out", help="also write a JSON report here")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("sweep", help="run a replicated sweep to CSV")
    add_common(p)
    p.add_argument("-o", "--out", required=True, help="output CSV path")
    p.add_argument("--plot", help="also render curves to this SVG/PNG path")
    p.add_argument(
        "--metric",
        default="per_file_delay",
        choices=["per_file_delay", "objective_value", "caching_gain"],
    )
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("plot", help="render curves from a CSV or a fresh sweep")
    add_common(p, scenario_required=False)
    p.add_argument("--csv", help="existing sweep CSV to plot")
    p.add_argument("-o", "--out", required=True, help="output SVG/PNG path")
    p.add_argument(
        "--metric",
        default="per_file_delay",
        choices=["per_file_delay", "objective_value", "caching_gain"],
    )
    p.set_defaults(func=_cmd_plot)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except config.ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
