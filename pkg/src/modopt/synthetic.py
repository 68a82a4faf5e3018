"""Synthetic networks, demand, and closed-form objectives.

Desk-scale stand-ins for the full case study: small grid road networks
with crossing transit lines, seeded demand generators, a closed-form
profit surface for optimizer benchmarking, and a static-choice harness
for the ASC calibration protocol.
"""

import math
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .choice import ChoiceCoefficients, ModeAttributes, choice_probabilities, utility
from .equilibrium import DemandRecord
from .modes import ALL_MODES, MICROTRANSIT, RIDEHAIL, RIDEPOOL, TRANSIT
from .netgraph.roads import RoadEdge, RoadGraph, RoadNode
from .netgraph.transit import TransitGraph, TransitLine, TransitStation


def grid_road_network(
    rows: int,
    cols: int,
    edge_time_s: float = 60.0,
    edge_length_m: float = 500.0,
    origin: Tuple[float, float] = (40.70, -74.02),
    spacing_deg: float = 0.0045,
) -> RoadGraph:
    """Bidirectional rows x cols lattice with uniform edge weights.

    Node ids are "r{i}c{j}"; geographic spacing roughly matches the edge
    length so straight-line and network distances stay consistent.
    """
    nodes = []
    for i in range(rows):
        for j in range(cols):
            nodes.append(RoadNode(
                f"r{i}c{j}",
                origin[0] + i * spacing_deg,
                origin[1] + j * spacing_deg / math.cos(math.radians(origin[0])),
            ))
    edges = []
    for i in range(rows):
        for j in range(cols):
            a = f"r{i}c{j}"
            if j + 1 < cols:
                b = f"r{i}c{j + 1}"
                edges.append(RoadEdge(a, b, edge_time_s, edge_length_m))
                edges.append(RoadEdge(b, a, edge_time_s, edge_length_m))
            if i + 1 < rows:
                b = f"r{i + 1}c{j}"
                edges.append(RoadEdge(a, b, edge_time_s, edge_length_m))
                edges.append(RoadEdge(b, a, edge_time_s, edge_length_m))
    return RoadGraph(nodes, edges)


def crossing_transit(
    road: RoadGraph,
    rows: int,
    cols: int,
    headway_s: float = 480.0,
    fare: float = 2.75,
    segment_time_s: float = 90.0,
) -> TransitGraph:
    """Two lines over a grid network: one along the middle row, one along
    the middle column, sharing the central station."""
    mid_i, mid_j = rows // 2, cols // 2
    stations = {}
    def station_at(i, j):
        sid = f"s{i}_{j}"
        if sid not in stations:
            nd = road.nodes[f"r{i}c{j}"]
            stations[sid] = TransitStation(sid, nd.lat, nd.lon)
        return sid

    ew = [station_at(mid_i, j) for j in range(0, cols, 2)]
    ns = [station_at(i, mid_j) for i in range(0, rows, 2)]
    lines = []
    if len(ew) >= 2:
        lines.append(TransitLine("ew", ew, headway_s, fare,
                                 [segment_time_s] * (len(ew) - 1)))
    if len(ns) >= 2:
        lines.append(TransitLine("ns", ns, headway_s * 1.25, fare,
                                 [segment_time_s] * (len(ns) - 1)))
    return TransitGraph(list(stations.values()), lines)


def uniform_demand(
    graph: RoadGraph,
    n_requests: int,
    horizon_s: float,
    rng: np.random.Generator,
    prefix: str = "q",
) -> List[DemandRecord]:
    """Uniform OD pairs (origin != destination) with uniform request times."""
    ids = graph.node_ids
    out = []
    for k in range(n_requests):
        o = ids[int(rng.integers(len(ids)))]
        d = ids[int(rng.integers(len(ids)))]
        while d == o:
            d = ids[int(rng.integers(len(ids)))]
        t = float(rng.uniform(0.0, horizon_s))
        out.append(DemandRecord(f"{prefix}{k:05d}", o, d, t))
    return out


# -- closed-form objectives ------------------------------------------------

FLEET_SURFACE_BOUNDS = [(25.0, 800.0), (0.0, 300.0), (0.0, 150.0)]


def fleet_profit_surface(x: Sequence[float]) -> float:
    """Smooth synthetic profit over (n1, n4, n10) at fixed discounts.

    Saturating revenue per tier minus linear fleet cost, plus a mild
    congestion-style coupling; single interior optimum, no simulation.
    """
    n1, n4, n10 = float(x[0]), float(x[1]), float(x[2])
    rev = 9000.0 * (1.0 - math.exp(-n1 / 150.0))
    rev += 5200.0 * (1.0 - math.exp(-n4 / 70.0))
    rev += 2600.0 * (1.0 - math.exp(-n10 / 45.0))
    cost = 12.0 * n1 + 11.0 * n4 + 9.0 * n10
    coupling = 1.5e-3 * (n1 * n4 + 0.5 * n4 * n10)
    return rev - cost - coupling


SUPPLY_SURFACE_BOUNDS = [
    (0.0, 3000.0), (0.0, 2000.0), (0.0, 1000.0), (0.0, 1.0), (0.0, 1.0),
]


def supply_profit_surface(x: Sequence[float]) -> float:
    """Closed-form profit over the full (n1, n4, n10, g4, g10) vector.

    Discounts trade demand uptake against fare loss so the shared tiers
    have interior-optimal discount factors.
    """
    n1, n4, n10, g4, g10 = (float(v) for v in x)
    def tier(n, scale, rev, unit_cost, gamma, uptake):
        served = 1.0 - math.exp(-n / scale)
        demand = 0.55 + 0.45 * (1.0 - math.exp(-uptake * gamma))
        return rev * served * demand * (1.0 - gamma) - unit_cost * n
    total = tier(n1, 450.0, 90000.0, 18.0, 0.0, 1.0)
    total += tier(n4, 320.0, 70000.0, 15.0, g4, 6.0)
    total += tier(n10, 200.0, 30000.0, 12.0, g10, 4.0)
    return total


BRANIN_BOUNDS = [(-5.0, 10.0), (0.0, 15.0)]
BRANIN_MAX = -0.39788735772973816   # negated global minimum


def neg_branin(x: Sequence[float]) -> float:
    """Negated Branin function (maximization convention, two dimensions)."""
    x1, x2 = float(x[0]), float(x[1])
    a, b, c = 1.0, 5.1 / (4.0 * math.pi ** 2), 5.0 / math.pi
    r, s, t = 6.0, 10.0, 1.0 / (8.0 * math.pi)
    val = a * (x2 - b * x1 ** 2 + c * x1 - r) ** 2 + s * (1.0 - t) * math.cos(x1) + s
    return -val


def mnl_share_harness(
    coef: Optional[ChoiceCoefficients] = None,
    attrs: Optional[Dict[str, ModeAttributes]] = None,
) -> Callable[[float], float]:
    """Static stand-in for the calibration harness: transit share of one
    representative choice situation as a function of the transit ASC."""
    base = coef or ChoiceCoefficients()
    attrs = attrs or {
        RIDEHAIL: ModeAttributes(ovtt_min=4.0, ivtt_min=14.0, cost=12.5),
        RIDEPOOL: ModeAttributes(ovtt_min=6.0, ivtt_min=17.0, cost=10.0),
        MICROTRANSIT: ModeAttributes(ovtt_min=8.0, ivtt_min=21.0, cost=7.5),
        TRANSIT: ModeAttributes(ovtt_min=12.0, ivtt_min=24.0, cost=2.75),
    }

    def harness(asc: float) -> float:
        asc_map = dict(base.asc)
        asc_map[TRANSIT] = asc
        c = ChoiceCoefficients(
            beta_ovtt=base.beta_ovtt, beta_ivtt=base.beta_ivtt,
            beta_cost=base.beta_cost, beta_parking=base.beta_parking,
            beta_electric=base.beta_electric, beta_automation=base.beta_automation,
            asc=asc_map,
        )
        utilities = {m: utility(attrs[m], c, m) for m in ALL_MODES}
        return choice_probabilities(utilities)[TRANSIT]

    return harness
