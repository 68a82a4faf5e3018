"""Shareability (RV) and request-trip-vehicle (RTV) graph construction.

The RV graph links two requests when an empty probe vehicle placed at one
of their origins could serve both within constraints, and links a request
to a vehicle when the vehicle can absorb it on top of its current load.
Feasible trips are then enumerated per vehicle incrementally by size: a
size-k candidate is formed by extending a size-(k-1) trip with a request
ranked above all its members, and is tested only when every size-(k-1)
subset is already a feasible trip for that vehicle and all request pairs
are shareable. Cheap deadline prefilters cut most probe searches before
the exact ordering search runs.
"""

import time
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, FrozenSet, List, Optional, Set, Tuple

from ..netgraph.roads import RoadGraph
from .routing import feasible_route
from .types import Constraints, RoutePlan, TripRequest, VehicleState

_TOL = 1e-6


@dataclass
class RVGraph:
    rr_edges: Set[FrozenSet[str]] = field(default_factory=set)
    rv_edges: Dict[Tuple[str, str], Tuple[float, RoutePlan]] = field(default_factory=dict)

    def shareable(self, r1: str, r2: str) -> bool:
        return frozenset((r1, r2)) in self.rr_edges


@dataclass
class TVEdge:
    trip_index: int
    vehicle_id: str
    cost: float
    plan: RoutePlan


@dataclass
class RTVGraph:
    trips: List[FrozenSet[str]] = field(default_factory=list)
    edges: List[TVEdge] = field(default_factory=list)
    request_ids: List[str] = field(default_factory=list)
    vehicle_ids: List[str] = field(default_factory=list)
    c_p: float = 0.0
    truncated: bool = False

    def trip_sizes(self) -> Dict[int, int]:
        out: Dict[int, int] = {}
        for t in self.trips:
            out[len(t)] = out.get(len(t), 0) + 1
        return out

    def vehicle_trips(self, vehicle_id: str) -> List[FrozenSet[str]]:
        return [self.trips[e.trip_index] for e in self.edges if e.vehicle_id == vehicle_id]


@dataclass
class Assignment:
    selected_edges: List[int]             # indices into RTVGraph.edges
    request_vehicle: Dict[str, str]       # request id -> vehicle id
    unassigned: Set[str]
    objective: float                      # reduced objective: sum (cost - c_p * trip size)
    optimal: bool


def _probe_vehicle(origin, capacity: int, tier: str) -> VehicleState:
    return VehicleState(vehicle_id="__probe__", capacity=capacity, tier=tier, node=origin)


def unassigned_penalty(requests: List[TripRequest], vehicles: List[VehicleState],
                       cfg: Constraints) -> float:
    """Penalty large enough that serving one more request always wins.

    Every request's contribution to a route cost is bounded by its waiting
    cap plus its delay cap, so 1 + sum of those bounds (over pool plus
    onboard/locked passengers) dominates any total-cost difference.
    """
    if cfg.unassigned_penalty is not None:
        return cfg.unassigned_penalty
    bound = 0.0
    for r in requests:
        bound += cfg.max_wait_s + cfg.max_delay_s(r)
    for v in vehicles:
        for ob in v.onboard:
            bound += cfg.max_delay_s(ob.request)
        for r in v.locked:
            bound += cfg.max_wait_s + cfg.max_delay_s(r)
    return 1.0 + bound


def build_rv_graph(
    requests: List[TripRequest],
    vehicles: List[VehicleState],
    now: float,
    cfg: Constraints,
    graph: RoadGraph,
) -> RVGraph:
    """Pairwise shareability graph for one tier's pool and fleet."""
    rv = RVGraph()
    reqs = sorted(requests, key=lambda r: r.request_id)
    vehs = sorted(vehicles, key=lambda v: v.vehicle_id)
    capacity = max((v.capacity for v in vehs), default=0)
    index, tmat, _ = graph.matrices()

    if capacity >= 2:
        oidx = {r.request_id: index[r.origin] for r in reqs}
        for a, r1 in enumerate(reqs):
            for r2 in reqs[a + 1:]:
                # quick window test: one origin must reach the other in time
                ok = (now + tmat[oidx[r1.request_id], oidx[r2.request_id]]
                      <= r2.request_time_s + cfg.max_wait_s + _TOL) or \
                     (now + tmat[oidx[r2.request_id], oidx[r1.request_id]]
                      <= r1.request_time_s + cfg.max_wait_s + _TOL)
                if not ok:
                    continue
                for origin in (r1.origin, r2.origin):
                    probe = _probe_vehicle(origin, capacity, r1.mode)
                    if feasible_route(probe, [r1, r2], now, cfg, graph) is not None:
                        rv.rr_edges.add(frozenset((r1.request_id, r2.request_id)))
                        break

    for v in vehs:
        node, ready = v.position(now)
        ni = index[node]
        for r in reqs:
            if ready + tmat[ni, index[r.origin]] > r.request_time_s + cfg.max_wait_s + _TOL:
                continue
            res = feasible_route(v, [r], now, cfg, graph)
            if res is not None:
                plan, cost = res
                rv.rv_edges[(r.request_id, v.vehicle_id)] = (cost, plan)
    return rv


def build_rtv_graph(
    rv: RVGraph,
    requests: List[TripRequest],
    vehicles: List[VehicleState],
    now: float,
    cfg: Constraints,
    graph: RoadGraph,
) -> RTVGraph:
    """Enumerate feasible trips per vehicle, incrementally in trip size."""
    reqs = {r.request_id: r for r in requests}
    rtv = RTVGraph(
        request_ids=sorted(reqs),
        vehicle_ids=sorted(v.vehicle_id for v in vehicles),
        c_p=unassigned_penalty(requests, vehicles, cfg),
    )
    trip_index: Dict[FrozenSet[str], int] = {}

    def intern_trip(trip: FrozenSet[str]) -> int:
        if trip not in trip_index:
            trip_index[trip] = len(rtv.trips)
            rtv.trips.append(trip)
        return trip_index[trip]

    share: Dict[str, Set[str]] = {rid: set() for rid in rtv.request_ids}
    for pair in rv.rr_edges:
        a, b = sorted(pair)
        share[a].add(b)
        share[b].add(a)

    for v in sorted(vehicles, key=lambda v: v.vehicle_id):
        started = time.monotonic()
        max_size = v.capacity - v.occupancy - len(v.locked)
        if cfg.max_trip_size is not None:
            max_size = min(max_size, cfg.max_trip_size)

        singles: Dict[FrozenSet[str], Tuple[float, RoutePlan]] = {}
        single_ids: List[str] = []
        for rid in rtv.request_ids:
            hit = rv.rv_edges.get((rid, v.vehicle_id))
            if hit is not None:
                singles[frozenset((rid,))] = hit
                single_ids.append(rid)
        by_size: Dict[int, Dict[FrozenSet[str], Tuple[float, RoutePlan]]] = {1: singles}

        size = 2
        while size <= max_size and by_size.get(size - 1):
            prev = by_size[size - 1]
            level: Dict[FrozenSet[str], Tuple[float, RoutePlan]] = {}
            budget_hit = False
            for trip in sorted(prev, key=sorted):
                trip_max = max(trip)
                members = sorted(trip)
                for rid in single_ids:
                    if rid <= trip_max:
                        continue
                    if any(m not in share[rid] for m in members):
                        continue
                    cand = trip | {rid}
                    if size > 2 and any(
                        cand - {x} not in prev for x in members
                    ):
                        continue
                    if cfg.rtv_vehicle_budget_s is not None and \
                            time.monotonic() - started > cfg.rtv_vehicle_budget_s:
                        rtv.truncated = True
                        budget_hit = True
                        break
                    res = feasible_route(
                        v, [reqs[r] for r in sorted(cand)], now, cfg, graph)
                    if res is not None:
                        plan, cost = res
                        level[cand] = (cost, plan)
                if budget_hit:
                    break
            by_size[size] = level
            size += 1

        for sz in sorted(by_size):
            for trip, (cost, plan) in sorted(by_size[sz].items(), key=lambda kv: sorted(kv[0])):
                rtv.edges.append(TVEdge(
                    trip_index=intern_trip(trip),
                    vehicle_id=v.vehicle_id,
                    cost=cost,
                    plan=plan,
                ))
    return rtv
