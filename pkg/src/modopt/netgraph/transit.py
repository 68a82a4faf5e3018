"""Transit network and the combined walk-transit-walk router.

The combined graph is directed. Road edges double as walk links (both
directions, weighted by walking time over the edge length). Boarding a
line from a road node is a single access link carrying the full
generalized cost of entry: walk time + expected wait (half headway) +
fare converted to seconds. Leaving a station toward a road node costs
walk time only, and changing lines inside a station costs the next
line's wait plus its fare. Every edge carries its cost decomposition so
itineraries can report out-of-vehicle time, in-vehicle time, and fare
that add up exactly to the generalized cost.
"""

import csv
import heapq
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from ..errors import ParseError, Unreachable, ValidationError
from ..geo import great_circle_miles, walk_seconds
from .roads import NodeId, RoadGraph

# Default currency-to-seconds conversion keeps the router's generalized
# cost consistent with the choice model's cost/time trade-off:
# (beta_cost / beta_ovtt) * 60 = (0.074 / 0.032) * 60 = 138.75 s/$.
DEFAULT_FARE_TO_SECONDS = 0.074 / 0.032 * 60.0


@dataclass(frozen=True)
class TransitStation:
    station_id: str
    lat: float
    lon: float


@dataclass
class TransitLine:
    line_id: str
    stations: List[str]             # ordered station ids
    headway_s: float
    fare: float
    segment_times_s: List[float]    # len(stations) - 1, time between consecutive stops

    def __post_init__(self):
        if self.headway_s <= 0:
            raise ValidationError(f"line {self.line_id!r}: headway must be positive")
        if self.fare < 0:
            raise ValidationError(f"line {self.line_id!r}: negative fare")
        if len(self.segment_times_s) != len(self.stations) - 1:
            raise ValidationError(f"line {self.line_id!r}: segment count mismatch")
        for t in self.segment_times_s:
            if t <= 0:
                raise ValidationError(f"line {self.line_id!r}: nonpositive segment time")


class TransitGraph:
    def __init__(self, stations: List[TransitStation], lines: List[TransitLine]):
        self.stations: Dict[str, TransitStation] = {}
        for s in stations:
            if s.station_id in self.stations:
                raise ValidationError(f"duplicate station id {s.station_id!r}")
            self.stations[s.station_id] = s
        self.lines: List[TransitLine] = []
        for line in lines:
            for sid in line.stations:
                if sid not in self.stations:
                    raise ValidationError(f"line {line.line_id!r} stops at unknown station {sid!r}")
            self.lines.append(line)

    def lines_at(self, station_id: str) -> List[TransitLine]:
        return [ln for ln in self.lines if station_id in ln.stations]


@dataclass
class TransitAccessConfig:
    walk_speed_mph: float = 3.1
    walk_range_miles: float = 0.5
    fare_to_seconds: float = DEFAULT_FARE_TO_SECONDS

    def __post_init__(self):
        if self.walk_speed_mph <= 0 or self.walk_range_miles <= 0 or self.fare_to_seconds <= 0:
            raise ValidationError("transit access config values must be positive")


@dataclass(frozen=True)
class TransitAttributes:
    """Attributes of one walk-transit-walk itinerary."""
    ovtt_s: float     # walking + expected waiting
    ivtt_s: float     # scheduled in-vehicle time
    fare: float       # sum of boarded lines' fares

    def generalized_cost_s(self, fare_to_seconds: float) -> float:
        return self.ovtt_s + self.ivtt_s + self.fare * fare_to_seconds


@dataclass(frozen=True)
class _EdgeCost:
    walk_s: float = 0.0
    wait_s: float = 0.0
    ivt_s: float = 0.0
    fare: float = 0.0

    def weight(self, fts: float) -> float:
        return self.walk_s + self.wait_s + self.ivt_s + self.fare * fts


class CombinedGraph:
    """Walk + transit router over road nodes and per-line platform nodes."""

    def __init__(self, cfg: TransitAccessConfig):
        self.cfg = cfg
        self.adj: Dict[tuple, List[Tuple[tuple, _EdgeCost]]] = {}
        self._sp_cache: Dict[tuple, Tuple[dict, dict]] = {}

    def _add_edge(self, u: tuple, v: tuple, cost: _EdgeCost) -> None:
        self.adj.setdefault(u, []).append((v, cost))
        self.adj.setdefault(v, [])

    def _dijkstra(self, source: tuple):
        if source in self._sp_cache:
            return self._sp_cache[source]
        fts = self.cfg.fare_to_seconds
        dist = {source: 0.0}
        pred: Dict[tuple, Optional[Tuple[tuple, _EdgeCost]]] = {source: None}
        heap = [(0.0, source)]
        done = set()
        while heap:
            d, u = heapq.heappop(heap)
            if u in done:
                continue
            done.add(u)
            for v, cost in sorted(self.adj.get(u, []), key=lambda t: t[0]):
                nd = d + cost.weight(fts)
                if v not in dist or nd < dist[v] - 1e-12:
                    dist[v] = nd
                    pred[v] = (u, cost)
                    heapq.heappush(heap, (nd, v))
        self._sp_cache[source] = (dist, pred)
        return dist, pred

    def itinerary(self, o: NodeId, d: NodeId) -> TransitAttributes:
        src, dst = ("road", o), ("road", d)
        if src not in self.adj or dst not in self.adj:
            raise Unreachable(f"node {o!r} or {d!r} not in combined network")
        if o == d:
            return TransitAttributes(0.0, 0.0, 0.0)
        dist, pred = self._dijkstra(src)
        if dst not in dist:
            raise Unreachable(f"no walk-transit path {o!r} -> {d!r}")
        walk = wait = ivt = fare = 0.0
        node = dst
        while pred[node] is not None:
            node, cost = pred[node]
            walk += cost.walk_s
            wait += cost.wait_s
            ivt += cost.ivt_s
            fare += cost.fare
        return TransitAttributes(ovtt_s=walk + wait, ivtt_s=ivt, fare=fare)

    def generalized_cost_s(self, o: NodeId, d: NodeId) -> float:
        return self.itinerary(o, d).generalized_cost_s(self.cfg.fare_to_seconds)


def build_combined_network(
    road: RoadGraph, transit: TransitGraph, cfg: TransitAccessConfig
) -> CombinedGraph:
    """Assemble the combined graph; see the module docstring for the rules."""
    for sid in transit.stations:
        if not transit.lines_at(sid):
            raise ValidationError(f"station {sid!r} belongs to no line")

    g = CombinedGraph(cfg)
    fts = cfg.fare_to_seconds

    # walk links over road edges, both directions
    for e in road.edges:
        w = walk_seconds(e.length_m / 1609.344, cfg.walk_speed_mph)
        g._add_edge(("road", e.u), ("road", e.v), _EdgeCost(walk_s=w))
        g._add_edge(("road", e.v), ("road", e.u), _EdgeCost(walk_s=w))
    for n in road.nodes:
        g.adj.setdefault(("road", n), [])

    # in-vehicle links between consecutive platforms of a line, both ways
    for line in transit.lines:
        for i in range(len(line.stations) - 1):
            a = ("plat", line.line_id, line.stations[i])
            b = ("plat", line.line_id, line.stations[i + 1])
            t = line.segment_times_s[i]
            g._add_edge(a, b, _EdgeCost(ivt_s=t))
            g._add_edge(b, a, _EdgeCost(ivt_s=t))

    # access/egress links between road nodes and platforms within walk range
    for nid, node in road.nodes.items():
        for sid, st in transit.stations.items():
            dist_mi = great_circle_miles(node.lat, node.lon, st.lat, st.lon)
            if dist_mi > cfg.walk_range_miles:
                continue
            w = walk_seconds(dist_mi, cfg.walk_speed_mph)
            for line in transit.lines_at(sid):
                plat = ("plat", line.line_id, sid)
                g._add_edge(
                    ("road", nid), plat,
                    _EdgeCost(walk_s=w, wait_s=line.headway_s / 2.0, fare=line.fare),
                )
                g._add_edge(plat, ("road", nid), _EdgeCost(walk_s=w))

    # transfers between lines sharing a station: pay the next line's wait + fare
    for sid in transit.stations:
        lines_here = transit.lines_at(sid)
        for l1 in lines_here:
            for l2 in lines_here:
                if l1.line_id == l2.line_id:
                    continue
                g._add_edge(
                    ("plat", l1.line_id, sid),
                    ("plat", l2.line_id, sid),
                    _EdgeCost(wait_s=l2.headway_s / 2.0, fare=l2.fare),
                )
    return g


def transit_itinerary(combined: CombinedGraph, o: NodeId, d: NodeId) -> TransitAttributes:
    """Cheapest walk-transit-walk itinerary between two road nodes."""
    return combined.itinerary(o, d)


def access_link_weight_s(
    distance_miles: float, headway_s: float, fare: float, cfg: TransitAccessConfig
) -> float:
    """Generalized cost of one boarding link; exposed for audits."""
    return walk_seconds(distance_miles, cfg.walk_speed_mph) + headway_s / 2.0 \
        + fare * cfg.fare_to_seconds


def load_transit_network(stations_file, lines_file, line_stops_file) -> TransitGraph:
    """Read the transit CSV bundle.

    stations: station_id,lat,lon ; lines: line_id,headway_s,fare ;
    line_stops: line_id,seq,station_id,time_from_prev_s (time blank or 0
    on the first stop of each line).
    """
    from .roads import _read_csv_rows

    stations = []
    for lineno, row in _read_csv_rows(stations_file, ["station_id", "lat", "lon"]):
        try:
            stations.append(TransitStation(row[0].strip(), float(row[1]), float(row[2])))
        except ValueError as exc:
            raise ParseError(f"{stations_file}:{lineno}: {exc}") from None

    meta = {}
    for lineno, row in _read_csv_rows(lines_file, ["line_id", "headway_s", "fare"]):
        try:
            meta[row[0].strip()] = (float(row[1]), float(row[2]))
        except ValueError as exc:
            raise ParseError(f"{lines_file}:{lineno}: {exc}") from None

    stops: Dict[str, List[Tuple[int, str, float]]] = {}
    header = ["line_id", "seq", "station_id", "time_from_prev_s"]
    for lineno, row in _read_csv_rows(line_stops_file, header):
        try:
            t = float(row[3]) if row[3].strip() else 0.0
            stops.setdefault(row[0].strip(), []).append((int(row[1]), row[2].strip(), t))
        except ValueError as exc:
            raise ParseError(f"{line_stops_file}:{lineno}: {exc}") from None

    lines = []
    for line_id, (headway, fare) in sorted(meta.items()):
        seq = sorted(stops.get(line_id, []))
        if len(seq) < 2:
            raise ValidationError(f"line {line_id!r} has fewer than 2 stops")
        lines.append(TransitLine(
            line_id=line_id,
            stations=[s for _, s, _ in seq],
            headway_s=headway,
            fare=fare,
            segment_times_s=[t for _, _, t in seq[1:]],
        ))
    return TransitGraph(stations, lines)
