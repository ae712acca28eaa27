"""Proactive content caching at roadside units.

Expected-delay models for vehicles crossing a chain of cache-equipped
roadside units, placement solvers (greedy and exact, independent and
cooperative), and a replicated experiment harness with CSV/plot output.
"""

from .config import (
    ConfigError,
    bundled_scenario_names,
    load_bundled_scenario,
    load_scenario,
    save_scenario,
)
from .delay import (
    FileCaps,
    caching_gain,
    combination_probability,
    delay_report,
    proactive_caps,
    proactive_delay_bruteforce,
    proactive_delay_fast,
    reactive_cap,
    reactive_delay_bruteforce,
    reactive_delay_fast,
    transmission_time,
)
from .experiment import (
    SCHEMES,
    SweepRow,
    SweepSpec,
    emit_csv,
    emit_plot,
    load_sweep_spec,
    read_csv,
    run_sweep,
)
from .mobility import (
    DeliveredSet,
    TruncatedGaussian,
    contact_time,
    generate_vehicles,
    kmh_to_ms,
    sample_velocity,
    update_demand,
    update_presence,
    vehicles_from_spec,
    velocity_pdf,
    zipf_demand,
)
from .model import (
    CachePolicy,
    DelayReport,
    EnumerationLimitError,
    Library,
    RsuConfig,
    Scenario,
    VehicleGeneratorSpec,
    VehicleProfile,
    validate_policy,
    validate_scenario,
)
from .solvers import (
    ChainEvaluation,
    ItemScore,
    SolveResult,
    capacity_item_limit,
    evaluate_chain,
    greedy_coop,
    greedy_noncoop,
    item_scores,
    objective_coop,
    objective_noncoop,
    reactive_chain_delay,
    simulate_delivery,
    solve_exhaustive_coop,
    solve_exhaustive_noncoop,
    throughput_item_limit,
    updated_vehicles,
)

__version__ = "0.1.0"

__all__ = [
    "CachePolicy",
    "ChainEvaluation",
    "ConfigError",
    "DelayReport",
    "DeliveredSet",
    "EnumerationLimitError",
    "FileCaps",
    "ItemScore",
    "Library",
    "RsuConfig",
    "SCHEMES",
    "Scenario",
    "SolveResult",
    "SweepRow",
    "SweepSpec",
    "TruncatedGaussian",
    "VehicleGeneratorSpec",
    "VehicleProfile",
    "bundled_scenario_names",
    "caching_gain",
    "capacity_item_limit",
    "combination_probability",
    "contact_time",
    "delay_report",
    "emit_csv",
    "emit_plot",
    "evaluate_chain",
    "generate_vehicles",
    "greedy_coop",
    "greedy_noncoop",
    "item_scores",
    "kmh_to_ms",
    "load_bundled_scenario",
    "load_scenario",
    "load_sweep_spec",
    "objective_coop",
    "objective_noncoop",
    "proactive_caps",
    "proactive_delay_bruteforce",
    "proactive_delay_fast",
    "reactive_cap",
    "reactive_chain_delay",
    "reactive_delay_bruteforce",
    "reactive_delay_fast",
    "read_csv",
    "run_sweep",
    "sample_velocity",
    "save_scenario",
    "simulate_delivery",
    "solve_exhaustive_coop",
    "solve_exhaustive_noncoop",
    "throughput_item_limit",
    "transmission_time",
    "update_demand",
    "update_presence",
    "updated_vehicles",
    "validate_policy",
    "validate_scenario",
    "vehicles_from_spec",
    "velocity_pdf",
    "zipf_demand",
]
