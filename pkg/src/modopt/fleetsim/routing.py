"""Single-vehicle route feasibility: minimum-cost stop ordering search.

Exhaustive over stop orderings (pickup before dropoff, capacity respected
at every stop) with prefix pruning on the waiting-time, delay, and
cost-so-far bounds, so the effective search stays small at realistic trip
sizes. Route cost is the waiting time of the not-yet-picked-up requests
plus the arrival delay (relative to the earliest possible arrival) of
every request the vehicle is responsible for. Travel times come from the
graph's dense all-pairs matrix.
"""

from typing import Iterable, List, Optional, Tuple

from ..errors import ValidationError
from ..netgraph.roads import RoadGraph
from .types import DROPOFF, PICKUP, Constraints, RoutePlan, Stop, TripRequest, VehicleState

_TOL = 1e-6


def feasible_route(
    vehicle: VehicleState,
    new_requests: Iterable[TripRequest],
    now: float,
    cfg: Constraints,
    graph: RoadGraph,
) -> Optional[Tuple[RoutePlan, float]]:
    """Best stop ordering serving onboard + locked + new requests, if any.

    Returns (plan, cost) or None when no ordering satisfies the waiting
    time, delay, and capacity constraints. An empty task set yields an
    empty plan at zero cost.
    """
    new = sorted(new_requests, key=lambda r: r.request_id)
    onboard_ids = {ob.request.request_id for ob in vehicle.onboard}
    for r in new:
        if r.request_id in onboard_ids:
            raise ValidationError(f"request {r.request_id} already onboard")

    pending = sorted(vehicle.locked, key=lambda r: r.request_id) + new
    if vehicle.occupancy + len(pending) > vehicle.capacity:
        # trip-level capacity rule: passengers plus all accepted requests
        # must fit simultaneously, independent of stop interleaving
        return None

    # task arrays: onboard dropoffs first, then pickup/dropoff pairs
    tasks: List[Tuple[str, TripRequest]] = []
    for ob in sorted(vehicle.onboard, key=lambda o: o.request.request_id):
        tasks.append((DROPOFF, ob.request))
    for r in pending:
        tasks.append((PICKUP, r))
        tasks.append((DROPOFF, r))
    if not tasks:
        return RoutePlan([]), 0.0

    index, tmat, _ = graph.matrices()
    start_node, ready = vehicle.position(now)
    start_idx = index[start_node]

    n = len(tasks)
    target = [0] * n
    is_pickup = [False] * n
    deadline = [0.0] * n
    tref = [0.0] * n           # request time for pickups, earliest arrival for dropoffs
    needs_pick = [-1] * n      # index of the pickup a dropoff waits on, -1 if none
    pick_pos = {}
    for i, (kind, req) in enumerate(tasks):
        if kind == PICKUP:
            target[i] = index[req.origin]
            is_pickup[i] = True
            deadline[i] = req.request_time_s + cfg.max_wait_s
            tref[i] = req.request_time_s
            pick_pos[req.request_id] = i
        else:
            target[i] = index[req.destination]
            deadline[i] = req.earliest_arrival_s + cfg.max_delay_s(req)
            tref[i] = req.earliest_arrival_s
    for i, (kind, req) in enumerate(tasks):
        if kind == DROPOFF and req.request_id in pick_pos:
            needs_pick[i] = pick_pos[req.request_id]

    used = [False] * n
    order: List[int] = []
    best_cost = [float("inf")]
    best_order: List[int] = []
    capacity = vehicle.capacity

    def dfs(node_idx: int, t: float, occ: int, cost: float) -> None:
        if cost >= best_cost[0] - 1e-12:
            return
        if len(order) == n:
            best_cost[0] = cost
            best_order[:] = order
            return
        for i in range(n):
            if used[i]:
                continue
            p = needs_pick[i]
            if p >= 0 and not used[p]:
                continue
            if is_pickup[i] and occ + 1 > capacity:
                continue
            ti = target[i]
            t2 = t + tmat[node_idx, ti] if ti != node_idx else t
            if t2 > deadline[i] + _TOL:
                continue
            step = t2 - tref[i] if is_pickup[i] else max(0.0, t2 - tref[i])
            used[i] = True
            order.append(i)
            dfs(ti, t2, occ + 1 if is_pickup[i] else occ - 1, cost + step)
            order.pop()
            used[i] = False

    dfs(start_idx, ready, vehicle.occupancy, 0.0)
    if not best_order and best_cost[0] == float("inf"):
        return None

    stops: List[Stop] = []
    node_idx, t = start_idx, ready
    for i in best_order:
        kind, req = tasks[i]
        ti = target[i]
        if ti != node_idx:
            t += tmat[node_idx, ti]
            node_idx = ti
        stops.append(Stop(kind=kind, request=req, scheduled_s=t))
    return RoutePlan(stops), best_cost[0]
