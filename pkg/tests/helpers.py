"""Shared builders for randomized test instances."""

from __future__ import annotations

import numpy as np

from procache.mobility import zipf_demand
from procache.model import (
    CachePolicy,
    Library,
    RsuConfig,
    Scenario,
    VehicleProfile,
)

MB = 1e6


def random_scenario(
    rng: np.random.Generator,
    *,
    item_count: int | None = None,
    vehicle_count: int | None = None,
    rsu_count: int = 1,
    capacity_files: int | None = None,
    gamma: float = 0.0,
    contact_range: tuple[float, float] = (2.0, 20.0),
    tau_range: tuple[float, float] = (0.2, 2.0),
) -> Scenario:
    """A random instance with unit-size files and unit service time.

    Coverage length is 1 m and velocities are chosen as 1/h, so each
    vehicle's contact time lands uniformly in ``contact_range`` at every
    RSU of the chain.
    """
    m = item_count if item_count is not None else int(rng.integers(2, 11))
    vc = vehicle_count if vehicle_count is not None else int(rng.integers(1, 5))
    lib = Library(item_count=m, item_size_bytes=MB)
    rsus = tuple(
        RsuConfig(
            id=s,
            coverage_length_m=1.0,
            cache_capacity_bytes=(
                capacity_files
                if capacity_files is not None
                else int(rng.integers(0, m + 1))
            )
            * MB,
            service_rate_bytes_per_s=MB,
            backhaul_latency_s=float(rng.uniform(*tau_range)),
        )
        for s in range(rsu_count)
    )
    vehicles = tuple(
        VehicleProfile(
            velocity_ms=1.0 / float(rng.uniform(*contact_range)),
            demand=zipf_demand(m, float(rng.uniform(0.4, 1.6)), rng),
            presence=(1.0,) * rsu_count,
        )
        for _ in range(vc)
    )
    return Scenario(
        library=lib,
        rsus=rsus,
        vehicles=vehicles,
        cost_factor=gamma,
        rng_seed=0,
    )


def random_policy(rng: np.random.Generator, scenario: Scenario, rsu_index: int = 0) -> CachePolicy:
    """A random placement that fits the given RSU's cache."""
    m = scenario.library.item_count
    max_items = int(
        scenario.rsus[rsu_index].cache_capacity_bytes // scenario.library.item_size_bytes
    )
    count = int(rng.integers(0, min(max_items, m) + 1))
    items = rng.choice(m, size=count, replace=False) if count else []
    return CachePolicy.from_items(m, (int(i) for i in items))
