"""Vehicle mobility and demand: velocity law, contact times, demand vectors."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, ndtri

from .model import Library, RsuConfig, VehicleGeneratorSpec, VehicleProfile

__all__ = [
    "TruncatedGaussian",
    "DeliveredSet",
    "velocity_pdf",
    "sample_velocity",
    "contact_time",
    "zipf_demand",
    "generate_demands",
    "generate_vehicles",
    "vehicles_from_spec",
    "update_demand",
    "update_presence",
    "kmh_to_ms",
]

# A delivered-demand mass this close to 1 leaves nothing to renormalize.
FULLY_SERVED_TOL = 1e-12


def kmh_to_ms(value: float) -> float:
    """Convert km/h to m/s."""
    return value / 3.6


@dataclass(frozen=True)
class TruncatedGaussian:
    """Gaussian with mean ``mean`` and variance ``variance`` confined to
    ``[lower, upper]``.  Unit-agnostic; the config layer feeds it m/s."""

    mean: float
    variance: float
    lower: float
    upper: float

    def __post_init__(self) -> None:
        if self.variance <= 0:
            raise ValueError("variance must be positive")
        if not self.lower < self.upper:
            raise ValueError("lower bound must be below upper bound")

    @property
    def sigma(self) -> float:
        return math.sqrt(self.variance)


def velocity_pdf(dist: TruncatedGaussian, u: float) -> float:
    """Density of the truncated Gaussian velocity law at ``u``.

    Zero outside ``[dist.lower, dist.upper]``; inside, the Gaussian bell
    rescaled by the probability mass the truncation retains:

        2 exp(-(u - mean)^2 / (2 var))
        ------------------------------------------------------------
        sqrt(2 pi var) (erf((upper-mean)/(sigma sqrt 2)) - erf((lower-mean)/(sigma sqrt 2)))
    """
    if u < dist.lower or u > dist.upper:
        return 0.0
    sigma = dist.sigma
    span = math.erf((dist.upper - dist.mean) / (sigma * math.sqrt(2.0))) - math.erf(
        (dist.lower - dist.mean) / (sigma * math.sqrt(2.0))
    )
    if span <= 0.0:
        raise ValueError("truncation interval carries no probability mass")
    num = 2.0 * math.exp(-((u - dist.mean) ** 2) / (2.0 * dist.variance))
    return num / (math.sqrt(2.0 * math.pi * dist.variance) * span)


def sample_velocity(dist: TruncatedGaussian, rng: np.random.Generator) -> float:
    """Draw one velocity by inverse-CDF sampling.

    A uniform draw is mapped through the Gaussian quantile restricted to
    the truncation interval, so equal generator states yield equal
    samples and no draw is ever rejected.
    """
    sigma = dist.sigma
    lo = ndtr((dist.lower - dist.mean) / sigma)
    hi = ndtr((dist.upper - dist.mean) / sigma)
    if hi - lo <= 0.0:
        raise ValueError("truncation interval carries no probability mass")
    q = lo + rng.uniform() * (hi - lo)
    u = dist.mean + sigma * float(ndtri(q))
    return min(max(u, dist.lower), dist.upper)


def contact_time(rsu: RsuConfig, vehicle: VehicleProfile) -> float:
    """Seconds the vehicle spends inside the RSU's coverage."""
    if not vehicle.velocity_ms > 0:
        raise ValueError("vehicle velocity must be positive")
    return rsu.coverage_length_m / vehicle.velocity_ms


def zipf_demand(item_count: int, exponent: float, rng: np.random.Generator) -> tuple[float, ...]:
    """One demand vector: Zipf weights assigned through a random rank permutation.

    Item ``m`` gets weight ``rank^-exponent`` where its rank is drawn by a
    uniform permutation of ``1..item_count``; weights are normalized to
    sum to 1.
    """
    if exponent < 0:
        raise ValueError("zipf exponent must be nonnegative")
    ranks = rng.permutation(item_count)  # ranks[m] is item m's 0-based rank
    weights = (np.arange(1, item_count + 1, dtype=float)) ** (-float(exponent))
    weights /= weights.sum()
    return tuple(float(weights[r]) for r in ranks)


def generate_demands(
    library: Library,
    vehicle_count: int,
    zipf_exponents,
    rng: np.random.Generator,
) -> list[tuple[float, ...]]:
    """Demand vectors for ``vehicle_count`` vehicles, drawn in vehicle order.

    ``zipf_exponents`` is cycled when shorter than the vehicle count.
    """
    exponents = list(zipf_exponents)
    if not exponents:
        raise ValueError("need at least one zipf exponent")
    return [
        zipf_demand(library.item_count, exponents[v % len(exponents)], rng)
        for v in range(vehicle_count)
    ]


def generate_vehicles(
    library: Library,
    rsu_count: int,
    vehicle_count: int,
    dist: TruncatedGaussian,
    zipf_exponents,
    seed: int,
) -> list[VehicleProfile]:
    """Materialize vehicles from one seed.

    Each vehicle owns an independent RNG substream (velocity drawn first,
    then the demand permutation), so generation order or parallel
    evaluation cannot change the result.
    """
    exponents = list(zipf_exponents)
    if not exponents:
        raise ValueError("need at least one zipf exponent")
    streams = np.random.SeedSequence(seed).spawn(vehicle_count)
    vehicles = []
    for v in range(vehicle_count):
        rng = np.random.Generator(np.random.PCG64(streams[v]))
        velocity = sample_velocity(dist, rng)
        demand = zipf_demand(library.item_count, exponents[v % len(exponents)], rng)
        vehicles.append(
            VehicleProfile(
                velocity_ms=velocity,
                demand=demand,
                presence=(1.0,) * rsu_count,
            )
        )
    return vehicles


def vehicles_from_spec(
    library: Library,
    rsu_count: int,
    spec: VehicleGeneratorSpec,
    seed: int,
) -> list[VehicleProfile]:
    """Materialize vehicles from a scenario's stored generator recipe."""
    dist = TruncatedGaussian(
        mean=spec.velocity_mean_ms,
        variance=spec.velocity_variance_ms2,
        lower=spec.velocity_min_ms,
        upper=spec.velocity_max_ms,
    )
    return generate_vehicles(
        library, rsu_count, spec.count, dist, spec.zipf_exponents, seed
    )


@dataclass(frozen=True)
class DeliveredSet:
    """Items a vehicle already holds when it reaches the next RSU."""

    items: frozenset[int]

    def __post_init__(self) -> None:
        object.__setattr__(self, "items", frozenset(int(m) for m in self.items))

    def __contains__(self, item: int) -> bool:
        return item in self.items

    def __len__(self) -> int:
        return len(self.items)

    def union(self, other: DeliveredSet) -> DeliveredSet:
        return DeliveredSet(self.items | other.items)

    @classmethod
    def empty(cls) -> DeliveredSet:
        return cls(frozenset())


def update_demand(
    demand: tuple[float, ...], delivered: DeliveredSet
) -> tuple[tuple[float, ...], bool]:
    """Condition a demand vector on files already delivered.

    Delivered entries drop to zero and the rest renormalize to sum 1.
    When the delivered entries carried (almost) all the mass there is
    nothing left to request: the vector becomes all zeros and the
    returned flag marks the vehicle as fully served.
    """
    kept = math.fsum(
        p for m, p in enumerate(demand) if m not in delivered.items
    )
    if kept <= FULLY_SERVED_TOL:
        return (0.0,) * len(demand), True
    removed = math.fsum(demand[m] for m in delivered.items if 0 <= m < len(demand))
    remaining = 1.0 - removed
    updated = tuple(
        0.0 if m in delivered.items else p / remaining for m, p in enumerate(demand)
    )
    return updated, False


def update_presence(vehicle: VehicleProfile, upstream_rsu: RsuConfig) -> float:
    """Presence weight at the next RSU given the vehicle's upstream path.

    A vehicle seen at the upstream RSU is certain to arrive downstream
    (weight 1); one that skipped it contributes nothing (weight 0).
    """
    return 1.0 if vehicle.presence[upstream_rsu.id] > 0.0 else 0.0
