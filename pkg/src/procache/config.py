"""Scenario files: JSON with unit-suffixed field names.

Every physical field carries its unit in its name (``coverage_length_m``,
``velocity_mean_kmh``, ``cache_capacity_files``) so a config file can never
be misread; loading converts everything to the model's internal units
(meters, seconds, bytes, m/s).

A scenario supplies vehicles either explicitly (``vehicles``) or through a
``vehicle_generator`` recipe, or both; explicit vehicles win for the loaded
instance while the recipe is kept for replication redraws.
"""

from __future__ import annotations

import json
import os
from importlib import resources
from typing import Any

from .mobility import kmh_to_ms, vehicles_from_spec
from .model import (
    Library,
    RsuConfig,
    Scenario,
    VehicleGeneratorSpec,
    VehicleProfile,
    validate_scenario,
)

__all__ = [
    "ConfigError",
    "load_scenario",
    "save_scenario",
    "scenario_from_dict",
    "scenario_to_dict",
    "bundled_scenario_names",
    "load_bundled_scenario",
]

KMH_PER_MS = 3.6


class ConfigError(Exception):
    """A scenario file failed to parse or validate.

    The message names the offending file, field, and value.
    """


def _as_mapping(value: Any, where: str) -> dict:
    if not isinstance(value, dict):
        raise ConfigError(f"{where}: expected an object, got {type(value).__name__}")
    return value


def _as_list(value: Any, where: str) -> list:
    if not isinstance(value, list):
        raise ConfigError(f"{where}: expected an array, got {type(value).__name__}")
    return value


def _get(mapping: dict, key: str, where: str) -> Any:
    if key not in mapping:
        raise ConfigError(f"{where}.{key}: required field is missing")
    return mapping[key]


def _as_number(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}: expected a number, got {value!r}")
    return float(value)

def _as_int(value: Any, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{where}: expected an integer, got {value!r}")
    return value


def _number_field(mapping: dict, key: str, where: str) -> float:
    return _as_number(_get(mapping, key, where), f"{where}.{key}")


def _parse_library(data: dict) -> Library:
    lib = _as_mapping(_get(data, "library", "scenario"), "library")
    count = _as_int(_get(lib, "item_count", "library"), "library.item_count")
    size = _number_field(lib, "item_size_bytes", "library")
    if count < 1:
        raise ConfigError(f"library.item_count: must be at least 1, got {count}")
    if size <= 0:
        raise ConfigError(f"library.item_size_bytes: must be positive, got {size:g}")
    return Library(item_count=count, item_size_bytes=size)


def _parse_rsus(data: dict, library: Library) -> tuple[RsuConfig, ...]:
    raw = _as_list(_get(data, "rsus", "scenario"), "rsus")
    rsus = []
    for i, entry in enumerate(raw):
        where = f"rsus[{i}]"
        entry = _as_mapping(entry, where)
        capacity_files = _number_field(entry, "cache_capacity_files", where)
        if capacity_files < 0:
            raise ConfigError(f"{where}.cache_capacity_files: must be nonnegative")
        rsus.append(
            RsuConfig(
                id=i,
                coverage_length_m=_number_field(entry, "coverage_length_m", where),
                cache_capacity_bytes=capacity_files * library.item_size_bytes,
                service_rate_bytes_per_s=_number_field(
                    entry, "service_rate_bytes_per_s", where
                ),
                backhaul_latency_s=_number_field(entry, "backhaul_latency_s", where),
            )
        )
    return tuple(rsus)


def _parse_generator(data: dict) -> VehicleGeneratorSpec | None:
    if "vehicle_generator" not in data:
        return None
    gen = _as_mapping(data["vehicle_generator"], "vehicle_generator")
    where = "vehicle_generator"
    exps = _as_list(_get(gen, "zipf_exponents", where), f"{where}.zipf_exponents")
    exponents = tuple(
        _as_number(e, f"{where}.zipf_exponents[{k}]") for k, e in enumerate(exps)
    )
    # Variance in (km/h)^2 scales by the square of the km/h -> m/s factor.
    return VehicleGeneratorSpec(
        count=_as_int(_get(gen, "count", where), f"{where}.count"),
        velocity_mean_ms=kmh_to_ms(_number_field(gen, "velocity_mean_kmh", where)),
        velocity_variance_ms2=_number_field(gen, "velocity_variance_kmh2", where)
        / KMH_PER_MS**2,
        velocity_min_ms=kmh_to_ms(_number_field(gen, "velocity_min_kmh", where)),
        velocity_max_ms=kmh_to_ms(_number_field(gen, "velocity_max_kmh", where)),
        zipf_exponents=exponents,
    )


def _parse_vehicles(
    data: dict, library: Library, rsu_count: int
) -> tuple[VehicleProfile, ...] | None:
    if "vehicles" not in data:
        return None
    raw = _as_list(data["vehicles"], "vehicles")
    vehicles = []
    for j, entry in enumerate(raw):
        where = f"vehicles[{j}]"
        entry = _as_mapping(entry, where)
        demand = _as_list(_get(entry, "demand", where), f"{where}.demand")
        if len(demand) != library.item_count:
            raise ConfigError(
                f"{where}.demand: length {len(demand)} != item count"
                f" {library.item_count}"
            )
        if "presence" in entry:
            presence = _as_list(entry["presence"], f"{where}.presence")
        else:
            presence = [1.0] * rsu_count
        vehicles.append(
            VehicleProfile(
                velocity_ms=_number_field(entry, "velocity_ms", where),
                demand=tuple(
                    _as_number(p, f"{where}.demand[{m}]") for m, p in enumerate(demand)
                ),
                presence=tuple(
                    _as_number(t, f"{where}.presence[{s}]")
                    for s, t in enumerate(presence)
                ),
            )
        )
    return tuple(vehicles)


def scenario_from_dict(data: dict, source: str = "scenario") -> Scenario:
    """Build and validate a Scenario from already-parsed JSON data."""
    data = _as_mapping(data, source)
    library = _parse_library(data)
    rsus = _parse_rsus(data, library)
    cost_factor = _number_field(data, "cost_factor", "scenario")
    rng_seed = _as_int(_get(data, "rng_seed", "scenario"), "scenario.rng_seed")
    generator = _parse_generator(data)
    vehicles = _parse_vehicles(data, library, len(rsus))

    if vehicles is None and generator is None:
        raise ConfigError(
            "scenario: provide either a vehicles list or a vehicle_generator"
        )
    if vehicles is None:
        vehicles = tuple(
            vehicles_from_spec(library, len(rsus), generator, rng_seed)
        )

    scenario = Scenario(
        library=library,
        rsus=rsus,
        vehicles=vehicles,
        cost_factor=cost_factor,
        rng_seed=rng_seed,
        generator=generator,
    )
    violations = validate_scenario(scenario)
    if violations:
        detail = "; ".join(violations)
        raise ConfigError(f"{source}: invalid scenario: {detail}")
    return scenario


def load_scenario(path: str) -> Scenario:
    """Load and validate a scenario JSON file."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read file: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from exc
    return scenario_from_dict(data, source=os.path.basename(path))


def scenario_to_dict(scenario: Scenario) -> dict:
    """Inverse of scenario_from_dict.

    Vehicles are always written explicitly so the exact population is
    pinned; the generator recipe (if any) rides along for sweeps.
    """
    lib = scenario.library
    data: dict[str, Any] = {
        "library": {
            "item_count": lib.item_count,
            "item_size_bytes": lib.item_size_bytes,
        },
        "cost_factor": scenario.cost_factor,
        "rng_seed": scenario.rng_seed,
        "rsus": [
            {
                "coverage_length_m": rsu.coverage_length_m,
                "cache_capacity_files": rsu.cache_capacity_bytes
                / lib.item_size_bytes,
                "service_rate_bytes_per_s": rsu.service_rate_bytes_per_s,
                "backhaul_latency_s": rsu.backhaul_latency_s,
            }
            for rsu in scenario.rsus
        ],
        "vehicles": [
            {
                "velocity_ms": veh.velocity_ms,
                "demand": list(veh.demand),
                "presence": list(veh.presence),
            }
            for veh in scenario.vehicles
        ],
    }
    gen = scenario.generator
    if gen is not None:
        data["vehicle_generator"] = {
            "count": gen.count,
            "velocity_mean_kmh": gen.velocity_mean_ms * KMH_PER_MS,
            "velocity_variance_kmh2": gen.velocity_variance_ms2 * KMH_PER_MS**2,
            "velocity_min_kmh": gen.velocity_min_ms * KMH_PER_MS,
            "velocity_max_kmh": gen.velocity_max_ms * KMH_PER_MS,
            "zipf_exponents": list(gen.zipf_exponents),
        }
    return data


def save_scenario(scenario: Scenario, path: str) -> None:
    """Write a scenario back to JSON; load_scenario round-trips it."""
    try:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(scenario_to_dict(scenario), fh, indent=2)
            fh.write("\n")
    except OSError as exc:
        raise ConfigError(f"{path}: cannot write file: {exc.strerror}") from exc


def bundled_scenario_names() -> tuple[str, ...]:
    """Names accepted by load_bundled_scenario."""
    root = resources.files(__package__).joinpath("data")
    return tuple(
        sorted(
            entry.name[: -len(".json")]
            for entry in root.iterdir()
            if entry.name.endswith(".json")
        )
    )


def load_bundled_scenario(name: str = "paper_s6") -> Scenario:
    """Load a scenario shipped inside the package."""
    node = resources.files(__package__).joinpath("data", f"{name}.json")
    try:
        text = node.read_text(encoding="utf-8")
    except FileNotFoundError:
        known = ", ".join(bundled_scenario_names())
        raise ConfigError(f"no bundled scenario named {name!r} (have: {known})")
    return scenario_from_dict(json.loads(text), source=f"bundled:{name}")
