"""Trip-vehicle assignment ILPs and idle-vehicle rebalancing.

Two equivalent formulations are provided: the reduced one used in
production (per-trip reward for served requests, no explicit rejection
variables) and the baseline one with explicit per-request rejection
variables, kept as a cross-check. Both minimize total delay subject to
one trip per vehicle and one assignment per request, with the rejection
penalty chosen so that serving more requests always dominates.
"""

from typing import Dict, List, Optional, Sequence, Set, Tuple

from ..errors import Unreachable
from ..netgraph.roads import NodeId, RoadGraph
from ..solver import LE, EQ, LinearProgram, MilpModel, solve_lp, solve_milp
from .rtv import Assignment, RTVGraph
from .types import Constraints, VehicleState


def _components(rtv: RTVGraph) -> List[List[int]]:
    """Group edge indices into independent blocks joined by shared
    vehicles or requests; each block solves separately and exactly."""
    parent: Dict[str, str] = {}

    def find(x: str) -> str:
        while parent.setdefault(x, x) != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a: str, b: str) -> None:
        parent[find(a)] = find(b)

    for e in rtv.edges:
        vkey = f"v:{e.vehicle_id}"
        for rid in rtv.trips[e.trip_index]:
            union(vkey, f"r:{rid}")

    groups: Dict[str, List[int]] = {}
    for idx, e in enumerate(rtv.edges):
        groups.setdefault(find(f"v:{e.vehicle_id}"), []).append(idx)
    return [groups[k] for k in sorted(groups)]


def _solve_component(rtv: RTVGraph, edge_idx: List[int], c_p: float,
                     budget: Optional[float]) -> Tuple[List[int], float, bool]:
    vehicles = sorted({rtv.edges[i].vehicle_id for i in edge_idx})
    if len(vehicles) == 1:
        # one vehicle: choose its single best trip (always negative reduced
        # cost since the serving reward dominates any feasible route cost)
        best_i, best_obj = None, 0.0
        for i in edge_idx:
            e = rtv.edges[i]
            red = e.cost - c_p * len(rtv.trips[e.trip_index])
            if red < best_obj - 1e-12:
                best_obj, best_i = red, i
        return ([best_i] if best_i is not None else [], best_obj, True)

    requests = sorted({rid for i in edge_idx for rid in rtv.trips[rtv.edges[i].trip_index]})
    vrow = {v: k for k, v in enumerate(vehicles)}
    rrow = {r: len(vehicles) + k for k, r in enumerate(requests)}
    n = len(edge_idx)
    c = []
    A = [[0.0] * n for _ in range(len(vehicles) + len(requests))]
    for col, i in enumerate(edge_idx):
        e = rtv.edges[i]
        c.append(e.cost - c_p * len(rtv.trips[e.trip_index]))
        A[vrow[e.vehicle_id]][col] = 1.0
        for rid in rtv.trips[e.trip_index]:
            A[rrow[rid]][col] = 1.0
    lp = LinearProgram(
        c=c, A=A, senses=[LE] * len(A), b=[1.0] * len(A),
        bounds=[(0.0, 1.0)] * n,
    )
    sol = solve_milp(MilpModel(lp, [True] * n), budget=budget)
    if sol.values is None:
        return [], 0.0, False
    chosen = [edge_idx[col] for col in range(n) if sol.values[col] > 0.5]
    return chosen, float(sol.objective), bool(sol.certificate)


def assign(rtv: RTVGraph, cfg: Constraints) -> Assignment:
    """Optimal trip-vehicle assignment under the reduced formulation.

    Minimizes sum((cost_ij - c_p * trip_size) * x_ij) with at most one
    trip per vehicle and one per request; solved exactly per independent
    component.
    """
    c_p = cfg.unassigned_penalty if cfg.unassigned_penalty is not None else rtv.c_p
    selected: List[int] = []
    objective = 0.0
    optimal = True
    for comp in _components(rtv):
        chosen, obj, cert = _solve_component(rtv, comp, c_p, cfg.assign_budget_s)
        selected.extend(chosen)
        objective += obj
        optimal = optimal and cert

    assigned: Dict[str, str] = {}
    for i in sorted(selected):
        e = rtv.edges[i]
        for rid in rtv.trips[e.trip_index]:
            assigned[rid] = e.vehicle_id
    return Assignment(
        selected_edges=sorted(selected),
        request_vehicle=assigned,
        unassigned=set(rtv.request_ids) - set(assigned),
        objective=objective,
        optimal=optimal,
    )


def assign_baseline(rtv: RTVGraph, cfg: Constraints) -> Assignment:
    """Same assignment via the formulation with explicit rejection
    variables; objective equals assign's plus the constant c_p * |R|."""
    c_p = cfg.unassigned_penalty if cfg.unassigned_penalty is not None else rtv.c_p
    n_e = len(rtv.edges)
    req_ids = list(rtv.request_ids)
    n = n_e + len(req_ids)
    vehicles = sorted({e.vehicle_id for e in rtv.edges} | set(rtv.vehicle_ids))

    c = [e.cost for e in rtv.edges] + [c_p] * len(req_ids)
    rows: List[List[float]] = []
    senses: List[str] = []
    b: List[float] = []
    vrow = {}
    for v in vehicles:
        vrow[v] = len(rows)
        rows.append([0.0] * n)
        senses.append(LE)
        b.append(1.0)
    rrow = {}
    for k, rid in enumerate(req_ids):
        rrow[rid] = len(rows)
        row = [0.0] * n
        row[n_e + k] = 1.0
        rows.append(row)
        senses.append(EQ)
        b.append(1.0)
    for col, e in enumerate(rtv.edges):
        rows[vrow[e.vehicle_id]][col] = 1.0
        for rid in rtv.trips[e.trip_index]:
            rows[rrow[rid]][col] = 1.0

    lp = LinearProgram(c=c, A=rows, senses=senses, b=b, bounds=[(0.0, 1.0)] * n)
    sol = solve_milp(MilpModel(lp, [True] * n), budget=cfg.assign_budget_s)
    if sol.values is None:
        return Assignment([], {}, set(req_ids), float("nan"), False)
    selected = [i for i in range(n_e) if sol.values[i] > 0.5]
    assigned: Dict[str, str] = {}
    for i in selected:
        e = rtv.edges[i]
        for rid in rtv.trips[e.trip_index]:
            assigned[rid] = e.vehicle_id
    return Assignment(
        selected_edges=selected,
        request_vehicle=assigned,
        unassigned=set(req_ids) - set(assigned),
        objective=float(sol.objective),
        optimal=bool(sol.certificate),
    )


def rebalance(
    idle_vehicles: Sequence[VehicleState],
    unserved_origins: Sequence[NodeId],
    now: float,
    graph: RoadGraph,
) -> List[Tuple[str, NodeId]]:
    """Min-cost matching of idle vehicles to unserved request origins.

    Matches min(#idle, #origins) pairs on travel-time cost via a
    transportation LP (integral at a simplex vertex); exact cost ties are
    then canonicalized in favor of lower vehicle ids. Returns
    (vehicle_id, target_node) moves sorted by vehicle id.
    """
    vehs = sorted(idle_vehicles, key=lambda v: v.vehicle_id)
    origins = sorted(set(unserved_origins))
    if not vehs or not origins:
        return []

    cost: Dict[Tuple[int, int], float] = {}
    for i, v in enumerate(vehs):
        node, ready = v.position(now)
        for j, o in enumerate(origins):
            try:
                cost[(i, j)] = (ready - now) + graph.shortest_path_time(node, o)
            except Unreachable:
                cost[(i, j)] = float("inf")

    pairs = [(i, j) for (i, j), c in sorted(cost.items()) if c != float("inf")]
    if not pairs:
        return []
    k = min(len(vehs), len(origins))
    n = len(pairs)
    rows: List[List[float]] = []
    senses: List[str] = []
    b: List[float] = []
    for i in range(len(vehs)):
        rows.append([1.0 if p[0] == i else 0.0 for p in pairs])
        senses.append(LE)
        b.append(1.0)
    for j in range(len(origins)):
        rows.append([1.0 if p[1] == j else 0.0 for p in pairs])
        senses.append(LE)
        b.append(1.0)
    rows.append([1.0] * n)
    senses.append(EQ)
    b.append(float(min(k, n)))

    lp = LinearProgram(
        c=[cost[p] for p in pairs], A=rows, senses=senses, b=b,
        bounds=[(0.0, 1.0)] * n,
    )
    sol = solve_lp(lp)
    if sol.status != "optimal":
        # fewer feasible pairs than k; match greedily by cost then id
        sol = None
    matches: Dict[int, int] = {}
    if sol is not None:
        for col, p in enumerate(pairs):
            if sol.values[col] > 0.5:
                matches[p[0]] = p[1]
    else:
        taken: Set[int] = set()
        for c, i, j in sorted((cost[p], p[0], p[1]) for p in pairs):
            if i not in matches and j not in taken:
                matches[i] = j
                taken.add(j)

    _canonicalize_ties(matches, cost)
    return [(vehs[i].vehicle_id, origins[j]) for i, j in sorted(matches.items())]


def _canonicalize_ties(matches: Dict[int, int], cost: Dict[Tuple[int, int], float]) -> None:
    """Swap equal-total-cost pairs so lower vehicle indices get their
    cheaper origin; repeats until stable."""
    changed = True
    while changed:
        changed = False
        idxs = sorted(matches)
        for a in range(len(idxs)):
            for bn in range(a + 1, len(idxs)):
                i, j = idxs[a], idxs[bn]
                oi, oj = matches[i], matches[j]
                cur = cost[(i, oi)] + cost[(j, oj)]
                swp = cost.get((i, oj), float("inf")) + cost.get((j, oi), float("inf"))
                if abs(cur - swp) <= 1e-9 and cost.get((i, oj), float("inf")) < cost[(i, oi)] - 1e-12:
                    matches[i], matches[j] = oj, oi
                    changed = True
