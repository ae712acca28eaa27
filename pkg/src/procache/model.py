"""Core value types for the roadside-unit caching model."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

__all__ = [
    "Library",
    "RsuConfig",
    "VehicleProfile",
    "VehicleGeneratorSpec",
    "CachePolicy",
    "Scenario",
    "DelayReport",
    "EnumerationLimitError",
    "validate_scenario",
    "validate_policy",
]

# Sum of a demand vector may drift from 1 by at most this much.
DEMAND_SUM_TOL = 1e-9


class EnumerationLimitError(Exception):
    """Raised when an exact enumeration would exceed its size guard."""


@dataclass(frozen=True)
class Library:
    """Content catalog: ``item_count`` files, each of ``item_size_bytes``."""

    item_count: int
    item_size_bytes: float

    def __post_init__(self) -> None:
        if self.item_count < 1:
            raise ValueError("library needs at least one item")
        if self.item_size_bytes <= 0:
            raise ValueError("item size must be positive")


@dataclass(frozen=True)
class RsuConfig:
    """One roadside unit on the chain.

    ``id`` is the 0-based position along the road; vehicles traverse RSUs
    in increasing id order.  Capacity is stored in bytes, the wireless
    service rate in bytes per second, and the backhaul round trip in
    seconds.
    """

    id: int
    coverage_length_m: float
    cache_capacity_bytes: float
    service_rate_bytes_per_s: float
    backhaul_latency_s: float

    def service_time_s(self, library: Library) -> float:
        """Seconds to push one file over the downlink (no backhaul)."""
        return library.item_size_bytes / self.service_rate_bytes_per_s


@dataclass(frozen=True)
class VehicleProfile:
    """A vehicle's speed, per-item demand, and per-RSU presence weight.

    ``velocity_ms`` is in meters/second.  ``demand[m]`` is the probability
    the vehicle requests item ``m`` (items are 0-based).  ``presence[s]``
    weights the vehicle's contribution at RSU ``s``; 1.0 means the vehicle
    surely passes that RSU.
    """

    velocity_ms: float
    demand: tuple[float, ...]
    presence: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "demand", tuple(float(p) for p in self.demand))
        object.__setattr__(self, "presence", tuple(float(t) for t in self.presence))


@dataclass(frozen=True)
class CachePolicy:
    """Binary placement vector: ``placements[m]`` is 1 iff item m is cached."""

    placements: tuple[int, ...]

    def __post_init__(self) -> None:
        placements = tuple(int(x) for x in self.placements)
        if any(x not in (0, 1) for x in placements):
            raise ValueError("placements must be 0/1")
        object.__setattr__(self, "placements", placements)

    @classmethod
    def empty(cls, item_count: int) -> CachePolicy:
        return cls((0,) * item_count)

    @classmethod
    def from_items(cls, item_count: int, items) -> CachePolicy:
        vec = [0] * item_count
        for m in items:
            vec[m] = 1
        return cls(tuple(vec))

    @property
    def cached_items(self) -> tuple[int, ...]:
        return tuple(m for m, x in enumerate(self.placements) if x)

    @property
    def cached_count(self) -> int:
        return sum(self.placements)

    def cached_bytes(self, library: Library) -> float:
        return self.cached_count * library.item_size_bytes


@dataclass(frozen=True)
class VehicleGeneratorSpec:
    """Recipe for drawing a fresh vehicle population.

    Velocities are truncated-Gaussian in meters/second (already converted
    from whatever units the config file used); demand vectors are Zipf
    with exponents cycled across vehicles.  Kept on the scenario so sweep
    replications can redraw vehicles instead of reusing one sample.
    """

    count: int
    velocity_mean_ms: float
    velocity_variance_ms2: float
    velocity_min_ms: float
    velocity_max_ms: float
    zipf_exponents: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "zipf_exponents", tuple(float(e) for e in self.zipf_exponents)
        )


@dataclass(frozen=True)
class Scenario:
    """A full problem instance: catalog, RSU chain, vehicles, cost factor.

    ``generator``, when present, records how ``vehicles`` were (or can be)
    drawn; sweeps use it to regenerate the population per replication.
    """

    library: Library
    rsus: tuple[RsuConfig, ...]
    vehicles: tuple[VehicleProfile, ...]
    cost_factor: float
    rng_seed: int
    generator: VehicleGeneratorSpec | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "rsus", tuple(self.rsus))
        object.__setattr__(self, "vehicles", tuple(self.vehicles))


@dataclass(frozen=True)
class DelayReport:
    """Expected-delay summary for one RSU under one cache policy.

    Delays are expected total seconds per pass (all vehicles combined);
    the cap sums count how many files those vehicles can receive, and the
    gain is the drop in expected seconds per deliverable file.  The gain
    is NaN when either cap sum is zero.
    """

    reactive_delay: float
    proactive_delay: float
    reactive_cap_sum: int
    proactive_cap_sum: int
    caching_gain: float


def validate_policy(policy: CachePolicy, library: Library, rsu: RsuConfig) -> list[str]:
    """Return human-readable violations of the placement constraints."""
    violations = []
    if len(policy.placements) != library.item_count:
        violations.append(
            f"policy covers {len(policy.placements)} items, library has {library.item_count}"
        )
    used = policy.cached_bytes(library)
    if used > rsu.cache_capacity_bytes:
        violations.append(
            f"rsu {rsu.id}: cached bytes {used:g} exceed cache capacity "
            f"{rsu.cache_capacity_bytes:g}"
        )
    return violations


def validate_scenario(scenario: Scenario) -> list[str]:
    """Check a scenario against the model constraints.

    Returns a list of violation strings, each naming the offending field
    and index; an empty list means the scenario is valid.
    """
    v: list[str] = []
    lib = scenario.library
    n_rsu = len(scenario.rsus)

    if n_rsu == 0:
        v.append("rsus: at least one roadside unit required")
    for i, rsu in enumerate(scenario.rsus):
        if rsu.id != i:
            v.append(f"rsus[{i}].id: expected chain position {i}, got {rsu.id}")
        if rsu.coverage_length_m <= 0:
            v.append(f"rsus[{i}].coverage_length_m: must be positive")
        if rsu.cache_capacity_bytes < 0:
            v.append(f"rsus[{i}].cache_capacity_bytes: must be nonnegative")
        if rsu.service_rate_bytes_per_s <= 0:
            v.append(f"rsus[{i}].service_rate_bytes_per_s: must be positive")
        if rsu.backhaul_latency_s < 0:
            v.append(f"rsus[{i}].backhaul_latency_s: must be nonnegative")

    if len(scenario.vehicles) == 0:
        v.append("vehicles: at least one vehicle required")
    for j, veh in enumerate(scenario.vehicles):
        if not veh.velocity_ms > 0:
            v.append(f"vehicles[{j}].velocity_ms: must be positive")
        if len(veh.demand) != lib.item_count:
            v.append(
                f"vehicles[{j}].demand: length {len(veh.demand)} != item count {lib.item_count}"
            )
        if any(p < 0 or p > 1 for p in veh.demand):
            v.append(f"vehicles[{j}].demand: entries must lie in [0, 1]")
        elif veh.demand and abs(math.fsum(veh.demand) - 1.0) > DEMAND_SUM_TOL:
            v.append(
                f"vehicles[{j}].demand: sums to {math.fsum(veh.demand):.12g}, expected 1"
            )
        if len(veh.presence) != n_rsu:
            v.append(
                f"vehicles[{j}].presence: length {len(veh.presence)} != rsu count {n_rsu}"
            )
        if any(t < 0 or t > 1 for t in veh.presence):
            v.append(f"vehicles[{j}].presence: entries must lie in [0, 1]")

    if scenario.cost_factor < 0:
        v.append("cost_factor: must be nonnegative")

    gen = scenario.generator
    if gen is not None:
        if gen.count < 1:
            v.append("generator.count: must be at least 1")
        if gen.velocity_variance_ms2 <= 0:
            v.append("generator.velocity_variance_ms2: must be positive")
        if not gen.velocity_min_ms < gen.velocity_max_ms:
            v.append("generator: velocity_min_ms must be below velocity_max_ms")
        if gen.velocity_min_ms <= 0:
            v.append("generator.velocity_min_ms: must be positive")
        if not gen.zipf_exponents:
            v.append("generator.zipf_exponents: at least one exponent required")
        elif any(e < 0 for e in gen.zipf_exponents):
            v.append("generator.zipf_exponents: exponents must be nonnegative")
    return v
