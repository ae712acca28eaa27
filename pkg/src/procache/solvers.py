"""Cache placement solvers and chain evaluation.

Placement is a 0/1 vector per RSU minimizing expected per-file delay
plus a per-item caching cost.  Solvers come in two families: a greedy
fill ranked by contact-weighted popularity, and an exact search over
every feasible placement.  On a chain, downstream RSUs can reuse what
upstream RSUs already delivered: vehicles arrive with delivered files
struck from their demand, and placements there are chosen (and delays
evaluated) against that updated demand.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .delay import (
    ENUMERATION_GUARD,
    delay_report,
    proactive_cap_sum,
    proactive_caps,
    proactive_delay_fast,
    reactive_cap,
    reactive_delay_fast,
)
from .mobility import DeliveredSet, contact_time, update_demand, update_presence
from .model import (
    CachePolicy,
    DelayReport,
    EnumerationLimitError,
    Library,
    RsuConfig,
    Scenario,
    VehicleProfile,
)

__all__ = [
    "ItemScore",
    "SolveResult",
    "ChainEvaluation",
    "COOP_ENUMERATION_GUARD",
    "item_scores",
    "throughput_item_limit",
    "objective_noncoop",
    "greedy_noncoop",
    "solve_exhaustive_noncoop",
    "simulate_delivery",
    "updated_vehicles",
    "evaluate_chain",
    "reactive_chain_delay",
    "objective_coop",
    "greedy_coop",
    "solve_exhaustive_coop",
]

# The joint two-RSU search enumerates 2^(2M) pairs; refuse above this.
COOP_ENUMERATION_GUARD = 12


@dataclass(frozen=True)
class ItemScore:
    """Contact-weighted popularity of one item at one RSU."""

    item: int
    score: float


@dataclass(frozen=True)
class SolveResult:
    """Solver output: one policy per solved RSU, the achieved objective,
    and how many candidate objective evaluations the search performed."""

    policies: tuple[CachePolicy, ...]
    objective_value: float
    evaluations: int


@dataclass(frozen=True)
class ChainEvaluation:
    """Delay summary of fixed policies across the whole RSU chain.

    ``reports[s]`` pairs RSU s's no-cache baseline (original demand) with
    the cache-assisted evaluation under the information-updated demand.
    ``per_rsu_per_file[s]`` is that RSU's expected seconds per
    deliverable file; ``per_file_delay`` aggregates the chain (total
    expected seconds over total deliverable files).
    """

    reports: tuple[DelayReport, ...]
    per_rsu_per_file: tuple[float, ...]
    total_delay: float
    total_cap_sum: int
    per_file_delay: float


# ---------- non-cooperative placement ----------


def item_scores(
    rsu: RsuConfig, vehicles: Sequence[VehicleProfile], contact_times: Sequence[float]
) -> list[ItemScore]:
    """Rank items by demand weighted with presence and dwell time.

    Slow vehicles stay in coverage longer, so their demand counts for
    more: each vehicle's weight is its contact time's share of the total.
    """
    total_h = math.fsum(contact_times)
    if total_h <= 0:
        weights = [0.0] * len(contact_times)
    else:
        weights = [h / total_h for h in contact_times]
    item_count = len(vehicles[0].demand) if vehicles else 0
    scores = []
    for m in range(item_count):
        s = math.fsum(
            v.presence[rsu.id] * v.demand[m] * w for v, w in zip(vehicles, weights)
        )
        scores.append(ItemScore(item=m, score=s))
    return scores


def throughput_item_limit(
    rsu: RsuConfig, library: Library, contact_times: Sequence[float]
) -> int:
    """Most files worth caching given the average dwell time.

    A vehicle cannot receive more whole files than fit in its contact
    window at downlink rate, so caching beyond that average is wasted.
    """
    if not contact_times:
        return 0
    mean_h = math.fsum(contact_times) / len(contact_times)
    return int(math.floor(mean_h / rsu.service_time_s(library)))


def capacity_item_limit(rsu: RsuConfig, library: Library) -> int:
    return int(math.floor(rsu.cache_capacity_bytes / library.item_size_bytes))


def objective_noncoop(scenario: Scenario, rsu_index: int, policy: CachePolicy) -> float:
    """Per-file expected delay at one RSU plus the caching cost.

    The delay term divides the expected delay by the number of files the
    vehicles can receive; with no deliverable files it is defined as 0.
    """
    rsu = scenario.rsus[rsu_index]
    lib = scenario.library
    hs = [contact_time(rsu, v) for v in scenario.vehicles]
    delay = proactive_delay_fast(rsu, lib, policy, scenario.vehicles, hs)
    cap_sum = proactive_cap_sum(rsu, lib, policy, scenario.vehicles, hs)
    per_file = delay / cap_sum if cap_sum > 0 else 0.0
    return per_file + scenario.cost_factor * policy.cached_count


def _greedy_policy(
    rsu: RsuConfig,
    library: Library,
    vehicles: Sequence[VehicleProfile],
    contact_times: Sequence[float],
) -> CachePolicy:
    """Fill the cache in score order up to capacity and throughput limits."""
    scores = item_scores(rsu, vehicles, contact_times)
    order = sorted(scores, key=lambda s: (-s.score, s.item))
    limit = min(
        capacity_item_limit(rsu, library),
        throughput_item_limit(rsu, library, contact_times),
        library.item_count,
    )
    limit = max(limit, 0)
    return CachePolicy.from_items(library.item_count, (s.item for s in order[:limit]))


def greedy_noncoop(scenario: Scenario, rsu_index: int) -> SolveResult:
    """Greedy placement at one RSU: highest-scoring items first, while
    both the cache capacity and the dwell-time throughput allow."""
    rsu = scenario.rsus[rsu_index]
    hs = [contact_time(rsu, v) for v in scenario.vehicles]
    policy = _greedy_policy(rsu, scenario.library, scenario.vehicles, hs)
    return SolveResult(
        policies=(policy,),
        objective_value=objective_noncoop(scenario, rsu_index, policy),
        evaluations=1,
    )


# ---------- exact search ----------


class _VehicleTables:
    """Per-vehicle precomputation that makes the delay linear in the policy.

    For a fixed cached count the file caps are fixed, and the expected
    delay is an affine function of which items are cached:

        W = (service + tau) * T[cap] - tau * sum_{cached l} p[l] * Q[l][cap-1]

    where T[c] is the expected number of requests among subsets of size
    <= c and Q[l][c] the probability that at most c of the *other* items
    are requested.  Both depend only on the demand vector.
    """

    def __init__(self, demand: Sequence[float], presence: float):
        self.demand = np.asarray(demand, dtype=float)
        self.presence = float(presence)
        m = len(demand)
        # Request-count distributions over prefixes and suffixes of the catalog.
        prefix = [np.array([1.0])]
        for p in self.demand:
            prev = prefix[-1]
            nxt = np.zeros(len(prev) + 1)
            nxt[: len(prev)] += prev * (1.0 - p)
            nxt[1:] += prev * p
            prefix.append(nxt)
        suffix = [np.array([1.0])]
        for p in self.demand[::-1]:
            prev = suffix[-1]
            nxt = np.zeros(len(prev) + 1)
            nxt[: len(prev)] += prev * (1.0 - p)
            nxt[1:] += prev * p
            suffix.append(nxt)
        suffix.reverse()  # suffix[j] covers items j..m-1

        dist = prefix[m]
        k = np.arange(m + 1)
        self.trunc_expectation = np.cumsum(k * dist)  # T[c], c = 0..m

        # leave_out_cdf[l][c] = P(at most c requests among items != l)
        self.leave_out_cdf = np.empty((m, m), dtype=float)
        for l in range(m):
            other = np.convolve(prefix[l], suffix[l + 1])  # length m
            self.leave_out_cdf[l] = np.cumsum(other)

    def delay_terms(self, cap: int, service: float, tau: float):
        """Return (base delay, per-item credit vector) at a given file cap."""
        base = (service + tau) * float(self.trunc_expectation[min(cap, len(self.demand))])
        if cap <= 0 or len(self.demand) == 0:
            credit = np.zeros(len(self.demand))
        else:
            c = min(cap - 1, len(self.demand) - 1)
            credit = tau * self.demand * self.leave_out_cdf[:, c]
        return self.presence * base, self.presence * credit


def _caps_by_count(
    rsu: RsuConfig,
    library: Library,
    contact_times: Sequence[float],
    max_count: int,
) -> list[list[int]]:
    """caps[v][n]: vehicle v's total file cap when n items are cached."""
    out = []
    for h in contact_times:
        row = []
        for n in range(max_count + 1):
            policy = CachePolicy.from_items(library.item_count, range(n))
            row.append(proactive_caps(rsu, library, policy, h).total_cap)
        out.append(row)
    return out


def solve_exhaustive_noncoop(scenario: Scenario, rsu_index: int) -> SolveResult:
    """Exact minimizer of the single-RSU objective over all placements
    that fit the cache.

    All placements with the same cached count share their file caps, so
    the search reduces to, per count, keeping the items with the largest
    delay credits; every placement the cache admits is thereby covered
    exactly.  Ties prefer fewer cached items, then lower item indices.
    """
    lib = scenario.library
    m = lib.item_count
    if m > ENUMERATION_GUARD:
        raise EnumerationLimitError(
            f"exact search over 2^{m} placements exceeds the guard of "
            f"2^{ENUMERATION_GUARD}; use greedy_noncoop"
        )
    rsu = scenario.rsus[rsu_index]
    hs = [contact_time(rsu, v) for v in scenario.vehicles]
    max_count = min(capacity_item_limit(rsu, lib), m)
    tables = [
        _VehicleTables(v.demand, v.presence[rsu.id]) for v in scenario.vehicles
    ]
    caps = _caps_by_count(rsu, lib, hs, max_count)
    service = rsu.service_time_s(lib)
    tau = rsu.backhaul_latency_s

    best_obj = math.inf
    best_items: tuple[int, ...] = ()
    evaluations = 0
    for n in range(max_count + 1):
        base = 0.0
        credit = np.zeros(m)
        cap_sum = 0
        for v, tab in enumerate(tables):
            cap = caps[v][n]
            cap_sum += cap
            b, c = tab.delay_terms(cap, service, tau)
            base += b
            credit = credit + c
        order = sorted(range(m), key=lambda l: (-credit[l], l))
        chosen = tuple(sorted(order[:n]))
        delay = base - float(credit[list(chosen)].sum()) if chosen else base
        per_file = delay / cap_sum if cap_sum > 0 else 0.0
        obj = per_file + scenario.cost_factor * n
        evaluations += 1
        if obj < best_obj:
            best_obj = obj
            best_items = chosen
    policy = CachePolicy.from_items(m, best_items)
    return SolveResult(
        policies=(policy,), objective_value=best_obj, evaluations=evaluations
    )


def enumerate_policies(library: Library, rsu: RsuConfig):
    """Yield every placement that fits the cache, in lexicographic order
    of the placement vector (reference-oracle helper)."""
    m = library.item_count
    if m > ENUMERATION_GUARD:
        raise EnumerationLimitError(
            f"enumerating 2^{m} placements exceeds the guard of 2^{ENUMERATION_GUARD}"
        )
    max_count = capacity_item_limit(rsu, library)
    for mask in range(2**m):
        items = [l for l in range(m) if mask >> l & 1]
        if len(items) <= max_count:
            yield CachePolicy.from_items(m, items)


# ---------- cooperation along the chain ----------


def simulate_delivery(
    rsu: RsuConfig,
    library: Library,
    policy: CachePolicy,
    vehicle: VehicleProfile,
    contact_time: float,
) -> DeliveredSet:
    """Files the vehicle walks away with after one pass.

    Most-wanted first: up to the cached cap from the cache, then up to
    the backhaul cap from the rest of the catalog.
    """
    caps = proactive_caps(rsu, library, policy, contact_time)
    order = sorted(
        range(library.item_count), key=lambda m: (-vehicle.demand[m], m)
    )
    cached = [m for m in order if policy.placements[m]][: caps.cached_cap]
    uncached = [m for m in order if not policy.placements[m]][: caps.backhaul_cap]
    return DeliveredSet(frozenset(cached + uncached))


def updated_vehicles(
    scenario: Scenario,
    rsu_index: int,
    policy: CachePolicy,
    vehicles: Sequence[VehicleProfile],
) -> list[VehicleProfile]:
    """Vehicle states after passing RSU ``rsu_index`` under ``policy``.

    Delivered files leave each vehicle's demand (renormalized), and the
    next RSU's presence weight becomes certain or zero depending on
    whether the vehicle's path includes this RSU.  Vehicles not on this
    RSU's path receive nothing.
    """
    rsu = scenario.rsus[rsu_index]
    lib = scenario.library
    out = []
    for v, current in enumerate(vehicles):
        original = scenario.vehicles[v]
        if original.presence[rsu.id] > 0.0:
            h = contact_time(rsu, current)
            delivered = simulate_delivery(rsu, lib, policy, current, h)
        else:
            delivered = DeliveredSet.empty()
        demand, _served = update_demand(current.demand, delivered)
        presence = list(current.presence)
        if rsu_index + 1 < len(presence):
            presence[rsu_index + 1] = update_presence(original, rsu)
        out.append(
            VehicleProfile(
                velocity_ms=current.velocity_ms,
                demand=demand,
                presence=tuple(presence),
            )
        )
    return out


def evaluate_chain(scenario: Scenario, policies: Sequence[CachePolicy]) -> ChainEvaluation:
    """Evaluate fixed placements over the whole chain with information flow.

    At each RSU the cache-assisted delay uses the demand and presence the
    vehicles actually arrive with (files delivered upstream no longer
    requested); the reactive baseline in each report keeps the original
    demand.  Per-file terms with no deliverable files count as 0.
    """
    if len(policies) != len(scenario.rsus):
        raise ValueError("need exactly one policy per RSU")
    lib = scenario.library
    current = list(scenario.vehicles)
    reports = []
    per_rsu_pf = []
    delays = []
    cap_total = 0
    for s, rsu in enumerate(scenario.rsus):
        hs_orig = [contact_time(rsu, v) for v in scenario.vehicles]
        hs = [contact_time(rsu, v) for v in current]
        r_delay = reactive_delay_fast(rsu, lib, scenario.vehicles, hs_orig)
        r_caps = sum(reactive_cap(rsu, lib, h) for h in hs_orig)
        p_delay = proactive_delay_fast(rsu, lib, policies[s], current, hs)
        p_caps = proactive_cap_sum(rsu, lib, policies[s], current, hs)
        gain = (
            r_delay / r_caps - p_delay / p_caps
            if r_caps > 0 and p_caps > 0
            else math.nan
        )
        reports.append(
            DelayReport(
                reactive_delay=r_delay,
                proactive_delay=p_delay,
                reactive_cap_sum=r_caps,
                proactive_cap_sum=p_caps,
                caching_gain=gain,
            )
        )
        per_rsu_pf.append(p_delay / p_caps if p_caps > 0 else 0.0)
        delays.append(p_delay)
        cap_total += p_caps
        if s + 1 < len(scenario.rsus):
            current = updated_vehicles(scenario, s, policies[s], current)
    total_delay = math.fsum(delays)
    return ChainEvaluation(
        reports=tuple(reports),
        per_rsu_per_file=tuple(per_rsu_pf),
        total_delay=total_delay,
        total_cap_sum=cap_total,
        per_file_delay=total_delay / cap_total if cap_total > 0 else 0.0,
    )


def reactive_chain_delay(scenario: Scenario) -> tuple[float, int, float]:
    """No-cache baseline over the chain: (total delay, total cap, per-file)."""
    lib = scenario.library
    delays = []
    caps = 0
    for rsu in scenario.rsus:
        hs = [contact_time(rsu, v) for v in scenario.vehicles]
        delays.append(reactive_delay_fast(rsu, lib, scenario.vehicles, hs))
        caps += sum(reactive_cap(rsu, lib, h) for h in hs)
    total = math.fsum(delays)
    return total, caps, total / caps if caps > 0 else 0.0


def objective_coop(scenario: Scenario, policies: Sequence[CachePolicy]) -> float:
    """Chain objective: sum of per-RSU per-file delays under information
    flow, plus the caching cost of every cached copy on the chain."""
    ev = evaluate_chain(scenario, policies)
    cached_total = sum(p.cached_count for p in policies)
    return math.fsum(ev.per_rsu_per_file) + scenario.cost_factor * cached_total


def greedy_coop(scenario: Scenario) -> SolveResult:
    """Greedy placement along the chain, reusing upstream deliveries.

    The first RSU is solved like the single-RSU greedy; each later RSU
    re-scores items against the demand and presence the vehicles will
    actually arrive with.
    """
    if len(scenario.rsus) < 2:
        raise ValueError("cooperative placement needs at least two RSUs")
    lib = scenario.library
    current = list(scenario.vehicles)
    policies = []
    for s, rsu in enumerate(scenario.rsus):
        hs = [contact_time(rsu, v) for v in current]
        policy = _greedy_policy(rsu, lib, current, hs)
        policies.append(policy)
        if s + 1 < len(scenario.rsus):
            current = updated_vehicles(scenario, s, policy, current)
    return SolveResult(
        policies=tuple(policies),
        objective_value=objective_coop(scenario, policies),
        evaluations=1,
    )


def _downstream_best(
    scenario: Scenario,
    rsu: RsuConfig,
    vehicles: Sequence[VehicleProfile],
) -> tuple[float, tuple[int, ...], int]:
    """Exact best downstream placement given arrived vehicle states.

    Returns (per-file delay + cost at the optimum, chosen items,
    evaluations performed).  Same count-reduction as the single-RSU
    exact search, but against the updated demand and presence.
    """
    lib = scenario.library
    m = lib.item_count
    hs = [contact_time(rsu, v) for v in vehicles]
    max_count = min(capacity_item_limit(rsu, lib), m)
    tables = [_VehicleTables(v.demand, v.presence[rsu.id]) for v in vehicles]
    caps = _caps_by_count(rsu, lib, hs, max_count)
    service = rsu.service_time_s(lib)
    tau = rsu.backhaul_latency_s
    best = (math.inf, ())
    evaluations = 0
    for n in range(max_count + 1):
        base = 0.0
        credit = np.zeros(m)
        cap_sum = 0
        for v, tab in enumerate(tables):
            cap = caps[v][n]
            cap_sum += cap
            b, c = tab.delay_terms(cap, service, tau)
            base += b
            credit = credit + c
        order = sorted(range(m), key=lambda l: (-credit[l], l))
        chosen = tuple(sorted(order[:n]))
        delay = base - float(credit[list(chosen)].sum()) if chosen else base
        per_file = delay / cap_sum if cap_sum > 0 else 0.0
        obj = per_file + scenario.cost_factor * n
        evaluations += 1
        if obj < best[0]:
            best = (obj, chosen)
    return best[0], best[1], evaluations


def solve_exhaustive_coop(scenario: Scenario) -> SolveResult:
    """Exact joint placement for a two-RSU chain.

    Enumerates every feasible upstream placement; for each, updates the
    vehicles it would leave behind and solves the downstream RSU exactly.
    Upstream ties keep the earlier placement in lexicographic order.
    """
    if len(scenario.rsus) != 2:
        raise ValueError("joint exact search is defined for exactly two RSUs")
    lib = scenario.library
    m = lib.item_count
    if m > COOP_ENUMERATION_GUARD:
        raise EnumerationLimitError(
            f"joint search over 2^{2 * m} placement pairs exceeds the guard of "
            f"2^{2 * COOP_ENUMERATION_GUARD}; use greedy_coop"
        )
    up_rsu, down_rsu = scenario.rsus
    hs_up = [contact_time(up_rsu, v) for v in scenario.vehicles]
    max_up = min(capacity_item_limit(up_rsu, lib), m)
    up_tables = [
        _VehicleTables(v.demand, v.presence[up_rsu.id]) for v in scenario.vehicles
    ]
    up_caps = _caps_by_count(up_rsu, lib, hs_up, max_up)
    service = up_rsu.service_time_s(lib)
    tau = up_rsu.backhaul_latency_s

    best_obj = math.inf
    best_pair: tuple[tuple[int, ...], tuple[int, ...]] = ((), ())
    evaluations = 0
    for mask in range(2**m):
        items = tuple(l for l in range(m) if mask >> l & 1)
        n = len(items)
        if n > max_up:
            continue
        up_policy = CachePolicy.from_items(m, items)
        base = 0.0
        credit_sum = 0.0
        cap_sum = 0
        for v, tab in enumerate(up_tables):
            cap = up_caps[v][n]
            cap_sum += cap
            b, c = tab.delay_terms(cap, service, tau)
            base += b
            credit_sum += float(c[list(items)].sum()) if items else 0.0
        up_per_file = (base - credit_sum) / cap_sum if cap_sum > 0 else 0.0

        arrived = updated_vehicles(scenario, 0, up_policy, scenario.vehicles)
        down_obj, down_items, down_evals = _downstream_best(scenario, down_rsu, arrived)
        evaluations += 1 + down_evals
        obj = up_per_file + scenario.cost_factor * n + down_obj
        if obj < best_obj:
            best_obj = obj
            best_pair = (items, down_items)
    policies = (
        CachePolicy.from_items(m, best_pair[0]),
        CachePolicy.from_items(m, best_pair[1]),
    )
    return SolveResult(
        policies=policies, objective_value=best_obj, evaluations=evaluations
    )
