"""Expected-delay evaluation for reactive and cache-assisted service.

A vehicle crossing an RSU requests a random subset of the catalog (each
item independently, per its demand vector) and is served one file at a
time while it stays in coverage.  A cached file costs one downlink
service time; an uncached file additionally pays the backhaul round
trip.  Expected delays below are exact sums over request subsets, either
enumerated directly (reference path) or folded by a dynamic program over
request counts (fast path).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

from .model import CachePolicy, EnumerationLimitError, Library, RsuConfig, VehicleProfile

__all__ = [
    "FileCaps",
    "ENUMERATION_GUARD",
    "reactive_cap",
    "proactive_caps",
    "combination_probability",
    "transmission_time",
    "reactive_delay_bruteforce",
    "proactive_delay_bruteforce",
    "reactive_delay_fast",
    "proactive_delay_fast",
    "reactive_cap_sum",
    "proactive_cap_sum",
    "caching_gain",
    "delay_report",
]

# Exact subset enumeration is refused above this catalog size.
ENUMERATION_GUARD = 22


@dataclass(frozen=True)
class FileCaps:
    """How many whole files one vehicle can receive during one pass.

    ``reactive_cap``: every file pays downlink plus backhaul.
    ``cached_cap``: files served straight from the cache, downlink only.
    ``backhaul_cap``: uncached files squeezed into the remaining time.
    ``total_cap``: cached plus backhaul, never above the catalog size.
    """

    reactive_cap: int
    cached_cap: int
    backhaul_cap: int
    total_cap: int


def reactive_cap(rsu: RsuConfig, library: Library, contact_time: float) -> int:
    """Files deliverable when every request goes over the backhaul."""
    if contact_time < 0:
        raise ValueError("contact time must be nonnegative")
    per_file = rsu.service_time_s(library) + rsu.backhaul_latency_s
    return min(int(math.floor(contact_time / per_file)), library.item_count)


def proactive_caps(
    rsu: RsuConfig, library: Library, policy: CachePolicy, contact_time: float
) -> FileCaps:
    """Files deliverable when cached items are pushed downlink-only first."""
    if contact_time < 0:
        raise ValueError("contact time must be nonnegative")
    service = rsu.service_time_s(library)
    per_file = service + rsu.backhaul_latency_s
    cached = min(int(math.floor(contact_time / service)), policy.cached_count)
    leftover = contact_time - cached * service
    backhaul = int(math.floor(leftover / per_file)) if leftover > 0 else 0
    total = min(cached + backhaul, library.item_count)
    return FileCaps(
        reactive_cap=min(int(math.floor(contact_time / per_file)), library.item_count),
        cached_cap=cached,
        backhaul_cap=backhaul,
        total_cap=total,
    )


def combination_probability(demand: Sequence[float], subset: Sequence[int]) -> float:
    """Probability that exactly the items in ``subset`` are requested."""
    chosen = set(subset)
    prob = 1.0
    for m, p in enumerate(demand):
        prob *= p if m in chosen else 1.0 - p
    return prob


def transmission_time(
    rsu: RsuConfig, library: Library, policy: CachePolicy, subset: Sequence[int]
) -> float:
    """Seconds to serve every item in ``subset``, crediting cached ones."""
    service = rsu.service_time_s(library)
    tau = rsu.backhaul_latency_s
    hits = sum(policy.placements[m] for m in subset)
    return len(subset) * (service + tau) - tau * hits


def _presence(vehicle: VehicleProfile, rsu: RsuConfig) -> float:
    return vehicle.presence[rsu.id]


def _subset_terms(rsu, library, policy, demand, cap):
    """Yield probability-weighted service times of every servable subset."""
    for k in range(cap + 1):
        for combo in itertools.combinations(range(library.item_count), k):
            q = combination_probability(demand, combo)
            if q == 0.0:
                continue
            yield q * transmission_time(rsu, library, policy, combo)


def proactive_delay_bruteforce(
    rsu: RsuConfig,
    library: Library,
    policy: CachePolicy,
    vehicles: Sequence[VehicleProfile],
    contact_times: Sequence[float],
) -> float:
    """Reference expected delay: explicit sum over all request subsets.

    Exact but exponential in the catalog size; refuses to run above
    ``ENUMERATION_GUARD`` items (use the fast path instead).
    """
    if library.item_count > ENUMERATION_GUARD:
        raise EnumerationLimitError(
            f"subset enumeration over {library.item_count} items exceeds the "
            f"guard of {ENUMERATION_GUARD}; use proactive_delay_fast"
        )
    total = []
    for vehicle, h in zip(vehicles, contact_times):
        cap = proactive_caps(rsu, library, policy, h).total_cap
        w = math.fsum(_subset_terms(rsu, library, policy, vehicle.demand, cap))
        total.append(_presence(vehicle, rsu) * w)
    return math.fsum(total)


def reactive_delay_bruteforce(
    rsu: RsuConfig,
    library: Library,
    vehicles: Sequence[VehicleProfile],
    contact_times: Sequence[float],
) -> float:
    """Reference expected delay with no cache: every file pays backhaul."""
    empty = CachePolicy.empty(library.item_count)
    return proactive_delay_bruteforce(rsu, library, empty, vehicles, contact_times)


def _truncated_delay_dp(
    demand: Sequence[float],
    placements: Sequence[int],
    cap: int,
    service: float,
    tau: float,
) -> float:
    """Expected service time over request subsets of size at most ``cap``.

    One pass over the catalog tracks, for each request count k <= cap,
    the total probability of the paths reaching k and the
    probability-weighted number of cached items among their requests.
    Subsets larger than the cap are never served and drop out.
    """
    prob = [0.0] * (cap + 1)
    hits = [0.0] * (cap + 1)
    prob[0] = 1.0
    for m, p in enumerate(demand):
        x = placements[m]
        q = 1.0 - p
        new_prob = [v * q for v in prob]
        new_hits = [v * q for v in hits]
        for k in range(cap):
            if prob[k] == 0.0 and hits[k] == 0.0:
                continue
            new_prob[k + 1] += prob[k] * p
            new_hits[k + 1] += (hits[k] + x * prob[k]) * p
        prob, hits = new_prob, new_hits
    served = math.fsum(k * prob[k] for k in range(cap + 1)) * (service + tau)
    credit = tau * math.fsum(hits)
    return served - credit


def proactive_delay_fast(
    rsu: RsuConfig,
    library: Library,
    policy: CachePolicy,
    vehicles: Sequence[VehicleProfile],
    contact_times: Sequence[float],
) -> float:
    """Expected delay under ``policy``; polynomial-time equivalent of the
    brute-force enumeration."""
    service = rsu.service_time_s(library)
    tau = rsu.backhaul_latency_s
    total = []
    for vehicle, h in zip(vehicles, contact_times):
        cap = proactive_caps(rsu, library, policy, h).total_cap
        w = _truncated_delay_dp(vehicle.demand, policy.placements, cap, service, tau)
        total.append(_presence(vehicle, rsu) * w)
    return math.fsum(total)


def reactive_delay_fast(
    rsu: RsuConfig,
    library: Library,
    vehicles: Sequence[VehicleProfile],
    contact_times: Sequence[float],
) -> float:
    """Expected delay with no cache; same dynamic program, zero placements."""
    empty = CachePolicy.empty(library.item_count)
    return proactive_delay_fast(rsu, library, empty, vehicles, contact_times)


def reactive_cap_sum(
    rsu: RsuConfig,
    library: Library,
    vehicles: Sequence[VehicleProfile],
    contact_times: Sequence[float],
) -> int:
    return sum(reactive_cap(rsu, library, h) for h in contact_times)


def proactive_cap_sum(
    rsu: RsuConfig,
    library: Library,
    policy: CachePolicy,
    vehicles: Sequence[VehicleProfile],
    contact_times: Sequence[float],
) -> int:
    return sum(proactive_caps(rsu, library, policy, h).total_cap for h in contact_times)


def caching_gain(
    reactive_delay: float,
    reactive_cap_sum: int,
    proactive_delay: float,
    proactive_cap_sum: int,
) -> float:
    """Drop in expected seconds per deliverable file achieved by the cache."""
    if reactive_cap_sum <= 0 or proactive_cap_sum <= 0:
        raise ValueError(
            "caching gain undefined: a file-cap sum is zero (no deliverable files)"
        )
    return reactive_delay / reactive_cap_sum - proactive_delay / proactive_cap_sum


def delay_report(
    rsu: RsuConfig,
    library: Library,
    policy: CachePolicy,
    vehicles: Sequence[VehicleProfile],
    contact_times: Sequence[float],
):
    """Bundle reactive and proactive evaluations of one RSU into a report."""
    from .model import DelayReport

    r_delay = reactive_delay_fast(rsu, library, vehicles, contact_times)
    p_delay = proactive_delay_fast(rsu, library, policy, vehicles, contact_times)
    r_caps = reactive_cap_sum(rsu, library, vehicles, contact_times)
    p_caps = proactive_cap_sum(rsu, library, policy, vehicles, contact_times)
    if r_caps > 0 and p_caps > 0:
        gain = caching_gain(r_delay, r_caps, p_delay, p_caps)
    else:
        gain = math.nan
    return DelayReport(
        reactive_delay=r_delay,
        proactive_delay=p_delay,
        reactive_cap_sum=r_caps,
        proactive_cap_sum=p_caps,
        caching_gain=gain,
    )
