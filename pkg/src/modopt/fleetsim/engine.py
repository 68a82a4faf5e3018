"""Batched fleet simulation: epoch stepping, vehicle motion, statistics.

Each assignment epoch pools newly arrived requests, expires the ones that
can no longer meet the waiting cap, runs RV -> RTV -> assignment ->
rebalancing independently per tier, and then advances every vehicle along
its plan for one epoch, emitting pickup/dropoff events. Requests already
assigned but not yet picked up float back into the pool each epoch when
reassignment is enabled (the default), so the batch optimizer may revise
decisions until the moment of pickup.
"""

import warnings
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from ..geo import meters_to_miles
from ..modes import TIER_CAPACITY
from ..netgraph.roads import NodeId, RoadGraph
from .assign import assign, rebalance
from .fares import fare
from .routing import feasible_route
from .rtv import build_rtv_graph, build_rv_graph
from .types import (
    DROPOFF,
    PICKUP,
    Constraints,
    FareRates,
    Onboard,
    RoutePlan,
    Stop,
    TripRequest,
    VehicleState,
)

_TOL = 1e-6


@dataclass
class SimEvent:
    kind: str              # "pickup" | "dropoff" | "expired"
    time_s: float
    request_id: str
    vehicle_id: Optional[str]
    node: NodeId


@dataclass
class CellStats:
    requested: int = 0
    served: int = 0
    wait_sum_s: float = 0.0
    ivtt_sum_s: float = 0.0

    @property
    def service_rate(self) -> float:
        return 1.0 if self.requested == 0 else self.served / self.requested

    @property
    def mean_wait_s(self) -> Optional[float]:
        return None if self.served == 0 else self.wait_sum_s / self.served

    @property
    def mean_ivtt_s(self) -> Optional[float]:
        return None if self.served == 0 else self.ivtt_sum_s / self.served


@dataclass
class TierStats:
    requested: int = 0
    served: int = 0
    expired: int = 0
    vmt_miles: float = 0.0
    pmt_miles: float = 0.0
    fares_total: float = 0.0
    direct_miles_served: float = 0.0

    @property
    def pmt_over_vmt(self) -> Optional[float]:
        return None if self.vmt_miles == 0 else self.pmt_miles / self.vmt_miles


@dataclass
class PassengerRecord:
    request_id: str
    tier: str
    origin: NodeId
    destination: NodeId
    request_time_s: float
    pickup_s: float
    dropoff_s: float
    wait_s: float
    ivtt_s: float
    delay_s: float
    fare: float


@dataclass
class SimStats:
    """Aggregated outcomes of one simulated period."""

    cells: Dict[Tuple[str, str, str], CellStats] = field(default_factory=dict)
    tiers: Dict[str, TierStats] = field(default_factory=dict)
    passengers: List[PassengerRecord] = field(default_factory=list)
    expired_ids: List[str] = field(default_factory=list)
    violations: List[str] = field(default_factory=list)
    epochs_run: int = 0

    def cell(self, ci, cj, tier) -> CellStats:
        return self.cells.setdefault((ci, cj, tier), CellStats())

    def tier(self, tier: str) -> TierStats:
        return self.tiers.setdefault(tier, TierStats())

    def service_rate(self, ci, cj, tier) -> float:
        """Zero-demand cells report a neutral service rate of 1."""
        cs = self.cells.get((ci, cj, tier))
        return 1.0 if cs is None else cs.service_rate

    def total_fares(self) -> float:
        return sum(t.fares_total for t in self.tiers.values())


class SimState:
    """Single-writer mutable state of one running simulation."""

    def __init__(
        self,
        graph: RoadGraph,
        cfg: Constraints,
        vehicles: Iterable[VehicleState],
        node_cluster: Optional[Mapping[NodeId, object]] = None,
        fare_rates: Optional[FareRates] = None,
        discounts: Optional[Mapping[str, float]] = None,
    ):
        self.graph = graph
        self.cfg = cfg
        self.vehicles: Dict[str, VehicleState] = {}
        for v in vehicles:
            if v.vehicle_id in self.vehicles:
                raise ValueError(f"duplicate vehicle id {v.vehicle_id}")
            self.vehicles[v.vehicle_id] = v
        self.node_cluster = node_cluster
        self.fare_rates = fare_rates or FareRates()
        self.discounts = dict(discounts or {})
        self.pool: Dict[str, TripRequest] = {}
        self.now = 0.0
        self.stats = SimStats()

    def cluster_of(self, node: NodeId):
        return self.node_cluster[node] if self.node_cluster is not None else node

    def cell_key(self, r: TripRequest):
        return (self.cluster_of(r.origin), self.cluster_of(r.destination), r.mode)

    def busy(self) -> bool:
        return bool(self.pool) or any(
            v.onboard or v.locked for v in self.vehicles.values()
        )


def step_epoch(state: SimState, arrivals: Sequence[TripRequest], now: float) -> List[SimEvent]:
    """Run one assignment round at time `now` and advance one epoch."""
    events: List[SimEvent] = []
    cfg = state.cfg

    for r in sorted(arrivals, key=lambda r: r.request_id):
        if r.request_time_s > now + _TOL:
            raise ValueError(f"request {r.request_id} arrives after epoch boundary")
        state.pool[r.request_id] = r
        state.stats.cell(*state.cell_key(r)).requested += 1
        state.stats.tier(r.mode).requested += 1

    # expire requests that can no longer be picked up within the cap
    for rid in sorted(state.pool):
        r = state.pool[rid]
        if now - r.request_time_s > cfg.max_wait_s + _TOL:
            del state.pool[rid]
            state.stats.tier(r.mode).expired += 1
            state.stats.expired_ids.append(rid)
            events.append(SimEvent("expired", now, rid, None, r.origin))

    tiers = sorted({v.tier for v in state.vehicles.values()}
                   | {r.mode for r in state.pool.values()})
    for tier in tiers:
        tier_vehicles = [v for v in state.vehicles.values() if v.tier == tier]
        tier_requests = [r for r in state.pool.values() if r.mode == tier]
        for v in tier_vehicles:
            v.plan = RoutePlan([])
            v.rebalance_target = None

        assigned_ids = set()
        if tier_vehicles and tier_requests:
            rv = build_rv_graph(tier_requests, tier_vehicles, now, cfg, state.graph)
            rtv = build_rtv_graph(rv, tier_requests, tier_vehicles, now, cfg, state.graph)
            sol = assign(rtv, cfg)
            for ei in sol.selected_edges:
                edge = rtv.edges[ei]
                vehicle = state.vehicles[edge.vehicle_id]
                vehicle.plan = RoutePlan(list(edge.plan.stops))
                trip = rtv.trips[edge.trip_index]
                assigned_ids |= set(trip)
                if not cfg.allow_reassignment:
                    for rid in sorted(trip):
                        vehicle.locked.append(state.pool.pop(rid))

        # vehicles without a new trip still owe their passengers a route
        for v in tier_vehicles:
            if not v.plan and (v.onboard or v.locked):
                res = feasible_route(v, [], now, cfg, state.graph)
                if res is None:
                    state.stats.violations.append(
                        f"vehicle {v.vehicle_id}: no feasible continuation at t={now}")
                else:
                    v.plan = res[0]

        unserved = [r.origin for rid, r in sorted(state.pool.items())
                    if r.mode == tier and rid not in assigned_ids]
        idle = [v for v in tier_vehicles if v.is_idle()]
        for vid, target in rebalance(idle, unserved, now, state.graph):
            state.vehicles[vid].rebalance_target = target

    _advance(state, now, now + cfg.epoch_s, events)
    state.now = now + cfg.epoch_s
    state.stats.epochs_run += 1
    return events


def _accrue_motion(state: SimState, v: VehicleState, dist_m: float) -> None:
    miles = meters_to_miles(dist_m)
    state.stats.tier(v.tier).vmt_miles += miles
    state.stats.tier(v.tier).pmt_miles += miles * len(v.onboard)


def _execute_stop(state: SimState, v: VehicleState, stop: Stop, t: float,
                  events: List[SimEvent]) -> None:
    cfg = state.cfg
    r = stop.request
    if stop.kind == PICKUP:
        if r.request_id in state.pool:
            del state.pool[r.request_id]
        else:
            for k, lr in enumerate(v.locked):
                if lr.request_id == r.request_id:
                    v.locked.pop(k)
                    break
            else:
                state.stats.violations.append(
                    f"pickup of unknown request {r.request_id} at t={t}")
                return
        wait = t - r.request_time_s
        if wait > cfg.max_wait_s + _TOL:
            state.stats.violations.append(
                f"request {r.request_id}: wait {wait:.1f}s exceeds cap")
        v.onboard.append(Onboard(request=r, pickup_s=t))
        if v.occupancy > v.capacity:
            state.stats.violations.append(
                f"vehicle {v.vehicle_id}: occupancy {v.occupancy} over capacity")
        events.append(SimEvent("pickup", t, r.request_id, v.vehicle_id, stop.node))
    else:
        for k, ob in enumerate(v.onboard):
            if ob.request.request_id == r.request_id:
                v.onboard.pop(k)
                wait = ob.pickup_s - r.request_time_s
                ivtt = t - ob.pickup_s
                delay = t - r.earliest_arrival_s
                if delay > cfg.max_delay_s(r) + _TOL:
                    state.stats.violations.append(
                        f"request {r.request_id}: delay {delay:.1f}s exceeds cap")
                gamma = state.discounts.get(r.mode, 0.0)
                paid = fare(r.direct_time_s, meters_to_miles(r.direct_dist_m),
                            state.fare_rates, gamma)
                cs = state.stats.cell(*state.cell_key(r))
                cs.served += 1
                cs.wait_sum_s += wait
                cs.ivtt_sum_s += ivtt
                ts = state.stats.tier(r.mode)
                ts.served += 1
                ts.fares_total += paid
                ts.direct_miles_served += meters_to_miles(r.direct_dist_m)
                state.stats.passengers.append(PassengerRecord(
                    request_id=r.request_id, tier=r.mode,
                    origin=r.origin, destination=r.destination,
                    request_time_s=r.request_time_s, pickup_s=ob.pickup_s,
                    dropoff_s=t, wait_s=wait, ivtt_s=ivtt, delay_s=delay,
                    fare=paid,
                ))
                events.append(SimEvent("dropoff", t, r.request_id, v.vehicle_id, stop.node))
                return
        state.stats.violations.append(
            f"dropoff of request {r.request_id} not onboard {v.vehicle_id}")


def _start_edge(state: SimState, v: VehicleState, target: NodeId, t: float) -> bool:
    path = state.graph.shortest_path_nodes(v.node, target)
    if len(path) < 2:
        return False
    nxt = path[1]
    et, el = state.graph.edge_attrs(v.node, nxt)
    v.next_node = nxt
    v.edge_depart_s = t
    v.edge_arrive_s = t + et
    v.edge_length_m = el
    return True


def _advance(state: SimState, t_start: float, t_end: float, events: List[SimEvent]) -> None:
    for vid in sorted(state.vehicles):
        v = state.vehicles[vid]
        t = t_start
        guard = 0
        while t < t_end - 1e-9:
            guard += 1
            if guard > 100000:
                state.stats.violations.append(f"vehicle {vid}: advance loop guard hit")
                break
            if v.next_node is not None:
                seg_end = min(v.edge_arrive_s, t_end)
                span = v.edge_arrive_s - v.edge_depart_s
                if span > 0 and seg_end > t:
                    _accrue_motion(state, v, v.edge_length_m * (seg_end - t) / span)
                if v.edge_arrive_s <= t_end + 1e-9:
                    v.node = v.next_node
                    v.next_node = None
                    t = v.edge_arrive_s
                else:
                    break
            elif v.plan:
                stop = v.plan.stops[0]
                if stop.node == v.node:
                    v.plan.stops.pop(0)
                    _execute_stop(state, v, stop, t, events)
                elif not _start_edge(state, v, stop.node, t):
                    state.stats.violations.append(
                        f"vehicle {vid}: cannot route to {stop.node}")
                    v.plan.stops.pop(0)
            elif v.rebalance_target is not None:
                if v.rebalance_target == v.node:
                    v.rebalance_target = None
                elif not _start_edge(state, v, v.rebalance_target, t):
                    v.rebalance_target = None
            else:
                break


def place_fleet(
    fleets: Mapping[str, int],
    graph: RoadGraph,
    rng: np.random.Generator,
    capacities: Optional[Mapping[str, int]] = None,
) -> List[VehicleState]:
    """Uniform random initial placement over road nodes, seeded."""
    caps = dict(TIER_CAPACITY)
    if capacities:
        caps.update(capacities)
    node_ids = graph.node_ids
    vehicles = []
    for tier in sorted(fleets):
        if tier not in caps:
            raise ValueError(f"no capacity configured for tier {tier!r}")
        for i in range(int(fleets[tier])):
            node = node_ids[int(rng.integers(len(node_ids)))]
            vehicles.append(VehicleState(
                vehicle_id=f"{tier}-{i:05d}", capacity=caps[tier], tier=tier, node=node,
            ))
    return vehicles


def run_period(
    demand: Mapping[str, Sequence[TripRequest]],
    fleets: Mapping[str, int],
    cfg: Constraints,
    graph: RoadGraph,
    rng: np.random.Generator,
    node_cluster: Optional[Mapping[NodeId, object]] = None,
    fare_rates: Optional[FareRates] = None,
    discounts: Optional[Mapping[str, float]] = None,
    capacities: Optional[Mapping[str, int]] = None,
    max_epochs: int = 100000,
) -> SimStats:
    """Simulate a demand period plus a drain phase; aggregate statistics.

    `demand` maps tier -> requests (any order); vehicles are placed
    uniformly at random using `rng`, which is the only source of
    randomness in the simulation.
    """
    requests: List[TripRequest] = []
    for tier in sorted(demand):
        for r in demand[tier]:
            if r.mode != tier:
                raise ValueError(f"request {r.request_id} in stream {tier} has mode {r.mode}")
            requests.append(r)
    requests.sort(key=lambda r: (r.request_time_s, r.request_id))

    vehicles = place_fleet(fleets, graph, rng, capacities)
    state = SimState(graph, cfg, vehicles, node_cluster, fare_rates, discounts)

    horizon = max((r.request_time_s for r in requests), default=0.0)
    idx = 0
    k = 1
    while True:
        now = k * cfg.epoch_s
        if idx >= len(requests) and now > horizon + cfg.epoch_s and not state.busy():
            break
        arrivals = []
        while idx < len(requests) and requests[idx].request_time_s < now:
            arrivals.append(requests[idx])
            idx += 1
        step_epoch(state, arrivals, now)
        k += 1
        if k > max_epochs:
            warnings.warn("simulation drain exceeded max_epochs; truncating")
            break
    return state.stats
