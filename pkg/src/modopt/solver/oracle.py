"""Brute-force enumeration oracle for the trip-vehicle assignment ILPs."""

from itertools import product

from ..errors import InstanceTooLarge

ENUMERATION_CAP = 10 ** 6


def enumerate_assignments(rtv, c_p: float = None):
    """Exhaustively search every vehicle->trip choice vector.

    Ground truth for the reduced assignment formulation: minimizes
    sum((cost - c_p * trip_size) * x) subject to one trip per vehicle and
    one trip per request. Intended for test-scale instances only; raises
    InstanceTooLarge when the product space exceeds 10^6.
    """
    from ..fleetsim.rtv import Assignment  # deferred: avoids import cycle

    if c_p is None:
        c_p = rtv.c_p
    edges_by_vehicle = {}
    for eidx, edge in enumerate(rtv.edges):
        edges_by_vehicle.setdefault(edge.vehicle_id, []).append(eidx)
    vehicle_ids = sorted(edges_by_vehicle)

    space = 1
    for vid in vehicle_ids:
        space *= len(edges_by_vehicle[vid]) + 1
        if space > ENUMERATION_CAP:
            raise InstanceTooLarge(f"assignment product space exceeds {ENUMERATION_CAP}")

    best_obj = 0.0  # empty assignment serves nothing at zero reduced cost
    best_choice = tuple()
    options = [[None] + edges_by_vehicle[vid] for vid in vehicle_ids]
    for choice in product(*options):
        served = set()
        obj = 0.0
        ok = True
        for eidx in choice:
            if eidx is None:
                continue
            edge = rtv.edges[eidx]
            trip = rtv.trips[edge.trip_index]
            if served & trip:
                ok = False
                break
            served |= trip
            obj += edge.cost - c_p * len(trip)
        if ok and obj < best_obj - 1e-12:
            best_obj = obj
            best_choice = choice

    selected = []
    assigned = {}
    for eidx in best_choice:
        if eidx is None:
            continue
        edge = rtv.edges[eidx]
        selected.append(eidx)
        for rid in rtv.trips[edge.trip_index]:
            assigned[rid] = edge.vehicle_id
    unassigned = {r for r in rtv.request_ids} - set(assigned)
    return Assignment(
        selected_edges=sorted(selected),
        request_vehicle=assigned,
        unassigned=unassigned,
        objective=best_obj,
        optimal=True,
    )
