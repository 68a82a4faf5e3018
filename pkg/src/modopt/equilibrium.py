"""Day-to-day inner loop: choice -> simulate -> attribute update.

Travelers choose among the on-demand tiers and transit from utilities
built on remembered (cluster-pair) service attributes; the fleet
simulator then realizes the on-demand demand, unserved travelers fall
back to transit, and the attribute memory is updated by exponential
smoothing. The loop stops once the average mode-share change between
consecutive iterations drops below the threshold.

Mode shares are reported under two conventions: `chosen` counts the mode
each traveler picked (what the choice model stabilizes on, used by the
stopping rule) and `realized` counts where travelers ended up after
unserved on-demand requests switched to transit.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .choice import (
    ChoiceCoefficients,
    DiscountFunctionParams,
    ModeAttributes,
    blended_utility,
    choice_probabilities,
    discount_penalty,
    draw_mode,
    utility,
)
from .errors import MissingOD, ModeSetMismatch, ValidationError
from .fleetsim.engine import SimStats, run_period
from .fleetsim.fares import fare
from .fleetsim.types import Constraints, FareRates, TripRequest
from .geo import meters_to_miles
from .modes import ALL_MODES, MOD_MODES, TRANSIT
from .netgraph.roads import NodeId, RoadGraph
from .netgraph.transit import TransitAttributes

# initial guesses before any service has been observed: travel time and
# waiting time multipliers per tier (applied to the direct time and to
# the waiting cap respectively), service rate 1
INIT_TIME_MULTIPLIER = {"ridehail": 1.0, "ridepool": 1.2, "microtransit": 1.5}
INIT_WAIT_MULTIPLIER = {"ridehail": 0.30, "ridepool": 0.36, "microtransit": 0.45}


@dataclass(frozen=True)
class AttrEntry:
    """Remembered level of service of one mode on one cluster pair."""
    ivtt_min: float
    wait_min: float
    service_rate: float

    def __post_init__(self):
        if self.ivtt_min < 0 or self.wait_min < 0:
            raise ValidationError("negative remembered times")
        if not 0.0 <= self.service_rate <= 1.0:
            raise ValidationError("service rate outside [0, 1]")


@dataclass
class AttributeStore:
    entries: Dict[Tuple[object, object, str], AttrEntry] = field(default_factory=dict)
    iteration: int = 0

    def get(self, ci, cj, mode) -> AttrEntry:
        key = (ci, cj, mode)
        if key not in self.entries:
            raise MissingOD(f"no remembered attributes for {key}")
        return self.entries[key]

    def copy(self) -> "AttributeStore":
        return AttributeStore(entries=dict(self.entries), iteration=self.iteration)


@dataclass
class SupplyParams:
    """Decision vector of the outer loop: fleet sizes and fare discounts."""
    n_ridehail: int
    n_ridepool: int
    n_microtransit: int
    gamma_ridepool: float
    gamma_microtransit: float

    def __post_init__(self):
        for label, n in self.fleet_sizes().items():
            if n < 0 or int(n) != n:
                raise ValidationError(f"fleet size for {label} must be a nonnegative integer")
        for label, g in self.discounts().items():
            if not 0.0 <= g <= 1.0:
                raise ValidationError(f"discount for {label} outside [0, 1]")

    def fleet_sizes(self) -> Dict[str, int]:
        return {
            "ridehail": int(self.n_ridehail),
            "ridepool": int(self.n_ridepool),
            "microtransit": int(self.n_microtransit),
        }

    def discounts(self) -> Dict[str, float]:
        # the base tier is never discounted
        return {
            "ridehail": 0.0,
            "ridepool": float(self.gamma_ridepool),
            "microtransit": float(self.gamma_microtransit),
        }


@dataclass(frozen=True)
class DemandRecord:
    """One traveler's origin-destination-time, before mode choice."""
    request_id: str
    origin: NodeId
    destination: NodeId
    request_time_s: float


@dataclass
class EquilibriumConfig:
    beta: float = 0.5                       # memory weight in the attribute update
    threshold: float = 0.01                 # stopping value for the share metric
    max_iterations: int = 20
    transit_penalty_multiplier: float = 2.0  # c_m applied to the transit fallback
    blend_includes_asc: bool = True          # transit ASC inside the fallback utility

    def __post_init__(self):
        if not 0.0 <= self.beta <= 1.0:
            raise ValidationError("beta outside [0, 1]")
        if self.max_iterations < 2:
            raise ValidationError("need at least 2 iterations to measure a share change")


@dataclass
class IterationResult:
    chosen_shares: Dict[str, float]
    realized_shares: Dict[str, float]
    stats: SimStats
    transit_choosers: int
    transit_fallback: int


@dataclass
class EquilibriumResult:
    chosen_shares: Dict[str, float]
    realized_shares: Dict[str, float]
    z_trace: List[float]
    share_history: List[Dict[str, float]]
    iterations: int
    converged: bool
    stats: SimStats
    store: AttributeStore


class EquilibriumProblem:
    """Everything the inner loop needs that is fixed across iterations."""

    def __init__(
        self,
        graph: RoadGraph,
        demand: Sequence[DemandRecord],
        transit_attrs: Mapping[Tuple[NodeId, NodeId], TransitAttributes],
        node_cluster: Optional[Mapping[NodeId, object]] = None,
        coefficients: Optional[ChoiceCoefficients] = None,
        constraints: Optional[Constraints] = None,
        fare_rates: Optional[FareRates] = None,
        discount_functions: Optional[Mapping[str, DiscountFunctionParams]] = None,
        config: Optional[EquilibriumConfig] = None,
        modes: Sequence[str] = ALL_MODES,
        capacities: Optional[Mapping[str, int]] = None,
    ):
        self.graph = graph
        self.demand = sorted(demand, key=lambda r: (r.request_time_s, r.request_id))
        self.transit_attrs = transit_attrs
        self.node_cluster = node_cluster
        self.coef = coefficients or ChoiceCoefficients()
        self.constraints = constraints or Constraints()
        self.fare_rates = fare_rates or FareRates()
        self.discount_functions = dict(discount_functions or {})
        self.config = config or EquilibriumConfig()
        self.modes = list(modes)
        self.mod_modes = [m for m in self.modes if m != TRANSIT]
        self.capacities = capacities
        self._direct: Dict[Tuple[NodeId, NodeId], Tuple[float, float]] = {}
        for rec in self.demand:
            od = (rec.origin, rec.destination)
            if od not in self._direct:
                self._direct[od] = (
                    graph.shortest_path_time(*od),
                    graph.shortest_path_length_m(*od),
                )
            if od not in transit_attrs:
                raise MissingOD(f"transit attributes missing for {od}")

    def cluster_of(self, node: NodeId):
        return self.node_cluster[node] if self.node_cluster is not None else node

    def direct(self, od) -> Tuple[float, float]:
        return self._direct[od]

    def init_store(self) -> AttributeStore:
        return init_attributes(
            [(r.origin, r.destination) for r in self.demand],
            self.constraints.max_wait_s,
            lambda o, d: self._direct[(o, d)][0],
            node_cluster=self.node_cluster,
            modes=self.mod_modes,
        )


def init_attributes(
    demand_ods: Sequence[Tuple[NodeId, NodeId]],
    max_wait_s: float,
    shortest_time_s: Callable[[NodeId, NodeId], float],
    node_cluster: Optional[Mapping[NodeId, object]] = None,
    modes: Sequence[str] = MOD_MODES,
) -> AttributeStore:
    """Seed the memory with the stated multipliers of direct time and wait cap."""
    def cluster(n):
        return node_cluster[n] if node_cluster is not None else n

    sums: Dict[Tuple[object, object], List[float]] = {}
    for o, d in demand_ods:
        t = shortest_time_s(o, d)
        if t is None or not math.isfinite(t):
            raise MissingOD(f"no shortest time for ({o}, {d})")
        sums.setdefault((cluster(o), cluster(d)), []).append(t)

    store = AttributeStore()
    for (ci, cj), times in sums.items():
        mean_t_min = (sum(times) / len(times)) / 60.0
        for mode in modes:
            store.entries[(ci, cj, mode)] = AttrEntry(
                ivtt_min=INIT_TIME_MULTIPLIER.get(mode, 1.0) * mean_t_min,
                wait_min=INIT_WAIT_MULTIPLIER.get(mode, 0.30) * (max_wait_s / 60.0),
                service_rate=1.0,
            )
    return store


def update_attributes(hist: AttrEntry, iteration: AttrEntry, beta: float) -> AttrEntry:
    """Exponential smoothing: new = beta * remembered + (1 - beta) * observed."""
    if not 0.0 <= beta <= 1.0:
        raise ValidationError("beta outside [0, 1]")
    return AttrEntry(
        ivtt_min=beta * hist.ivtt_min + (1.0 - beta) * iteration.ivtt_min,
        wait_min=beta * hist.wait_min + (1.0 - beta) * iteration.wait_min,
        service_rate=beta * hist.service_rate + (1.0 - beta) * iteration.service_rate,
    )


def stopping_metric(shares_n: Mapping[str, float], shares_prev: Mapping[str, float]) -> float:
    """Average absolute mode-share change between consecutive iterations."""
    if set(shares_n) != set(shares_prev):
        raise ModeSetMismatch(f"{sorted(shares_n)} vs {sorted(shares_prev)}")
    if not shares_n:
        return 0.0
    return sum(abs(shares_n[m] - shares_prev[m]) for m in shares_n) / len(shares_n)


def mode_utilities(problem: EquilibriumProblem, store: AttributeStore,
                   params: SupplyParams, rec: DemandRecord) -> Dict[str, float]:
    """Utilities of every alternative for one traveler, with the service
    rate blending applied to the on-demand tiers."""
    cfg = problem.config
    coef = problem.coef
    od = (rec.origin, rec.destination)
    ta = problem.transit_attrs[od]
    transit_attrs = ModeAttributes(
        ovtt_min=ta.ovtt_s / 60.0, ivtt_min=ta.ivtt_s / 60.0, cost=ta.fare)
    u_transit = utility(transit_attrs, coef, TRANSIT)
    u_fallback = u_transit if cfg.blend_includes_asc else u_transit - coef.asc[TRANSIT]

    direct_t, direct_d = problem.direct(od)
    gammas = params.discounts()
    ci, cj = problem.cluster_of(rec.origin), problem.cluster_of(rec.destination)
    utilities: Dict[str, float] = {}
    for mode in problem.mod_modes:
        entry = store.get(ci, cj, mode)
        est_fare = fare(direct_t, meters_to_miles(direct_d), problem.fare_rates,
                        gammas.get(mode, 0.0))
        penalty = discount_penalty(gammas.get(mode, 0.0),
                                   problem.discount_functions.get(mode))
        u_served = utility(
            ModeAttributes(ovtt_min=entry.wait_min, ivtt_min=entry.ivtt_min, cost=est_fare),
            coef, mode, discount_penalty_u=penalty,
        )
        utilities[mode] = blended_utility(
            u_served, u_fallback, entry.service_rate, cfg.transit_penalty_multiplier)
    utilities[TRANSIT] = u_transit
    return utilities


def iterate_day(
    problem: EquilibriumProblem,
    store: AttributeStore,
    params: SupplyParams,
    rng: np.random.Generator,
) -> Tuple[IterationResult, AttributeStore]:
    """One simulated day: draw modes, run the fleet, update the memory."""
    n_total = len(problem.demand)
    chosen: Dict[str, List[DemandRecord]] = {m: [] for m in problem.modes}
    for rec in problem.demand:
        probs = choice_probabilities(mode_utilities(problem, store, params, rec))
        chosen[draw_mode(probs, rng)].append(rec)

    demand_by_tier: Dict[str, List[TripRequest]] = {}
    for mode in problem.mod_modes:
        demand_by_tier[mode] = [
            TripRequest(
                request_id=rec.request_id, origin=rec.origin,
                destination=rec.destination, request_time_s=rec.request_time_s,
                mode=mode, direct_time_s=problem.direct((rec.origin, rec.destination))[0],
                direct_dist_m=problem.direct((rec.origin, rec.destination))[1],
            )
            for rec in chosen[mode]
        ]

    stats = run_period(
        demand_by_tier,
        {m: params.fleet_sizes().get(m, 0) for m in problem.mod_modes},
        problem.constraints,
        problem.graph,
        rng,
        node_cluster=problem.node_cluster,
        fare_rates=problem.fare_rates,
        discounts=params.discounts(),
        capacities=problem.capacities,
    )

    new_store = store.copy()
    new_store.iteration = store.iteration + 1
    for key, hist in store.entries.items():
        cell = stats.cells.get(key)
        if cell is None or cell.requested == 0:
            continue  # no observation: memory unchanged
        observed = AttrEntry(
            ivtt_min=(cell.mean_ivtt_s / 60.0) if cell.served else hist.ivtt_min,
            wait_min=(cell.mean_wait_s / 60.0) if cell.served else hist.wait_min,
            service_rate=cell.service_rate,
        )
        new_store.entries[key] = update_attributes(hist, observed, problem.config.beta)

    if n_total == 0:
        uniform = {m: 1.0 / len(problem.modes) for m in problem.modes}
        result = IterationResult(uniform, dict(uniform), stats, 0, 0)
        return result, new_store

    chosen_shares = {m: len(chosen[m]) / n_total for m in problem.modes}
    fallback = sum(t.expired for t in stats.tiers.values())
    realized = {m: stats.tiers[m].served / n_total if m in stats.tiers else 0.0
                for m in problem.mod_modes}
    realized[TRANSIT] = (len(chosen[TRANSIT]) + fallback) / n_total
    result = IterationResult(
        chosen_shares=chosen_shares,
        realized_shares=realized,
        stats=stats,
        transit_choosers=len(chosen[TRANSIT]),
        transit_fallback=fallback,
    )
    return result, new_store


def run_to_equilibrium(
    problem: EquilibriumProblem,
    params: SupplyParams,
    seed: int,
    store: Optional[AttributeStore] = None,
) -> EquilibriumResult:
    """Iterate days until the share metric falls below the threshold.

    Non-convergence within max_iterations is a reported outcome (the last
    iterate is returned with converged=False), not an error. Pass `store`
    to warm-start from a previous equilibrium's memory.
    """
    cfg = problem.config
    store = store.copy() if store is not None else problem.init_store()
    z_trace: List[float] = []
    share_history: List[Dict[str, float]] = []
    last: Optional[IterationResult] = None
    converged = False
    iterations = 0

    for it in range(1, cfg.max_iterations + 1):
        ss = np.random.SeedSequence([int(seed), it])
        rng = np.random.default_rng(ss)
        result, store = iterate_day(problem, store, params, rng)
        share_history.append(result.chosen_shares)
        iterations = it
        if last is not None:
            z = stopping_metric(result.chosen_shares, last.chosen_shares)
            z_trace.append(z)
            if z < cfg.threshold:
                last = result
                converged = True
                break
        last = result

    return EquilibriumResult(
        chosen_shares=last.chosen_shares,
        realized_shares=last.realized_shares,
        z_trace=z_trace,
        share_history=share_history,
        iterations=iterations,
        converged=converged,
        stats=last.stats,
        store=store,
    )
