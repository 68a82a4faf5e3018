"""Road network: CSV loading, validation, and shortest-path services.

Edge weights are travel times in seconds; edge lengths in meters are kept
alongside so that queries can also report the distance of the
time-shortest path (needed for fares and vehicle/passenger mileage).
"""

import csv
import heapq
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np

from ..errors import ParseError, Unreachable, ValidationError

NodeId = str


@dataclass(frozen=True)
class RoadNode:
    node_id: NodeId
    lat: float
    lon: float


@dataclass(frozen=True)
class RoadEdge:
    u: NodeId
    v: NodeId
    travel_time_s: float
    length_m: float


class RoadGraph:
    """Directed road graph, immutable after construction.

    Shortest-path results are cached per source node, so a shared instance
    is cheap to query repeatedly; caches are filled lazily.
    """

    def __init__(self, nodes: Iterable[RoadNode], edges: Iterable[RoadEdge]):
        self.nodes: Dict[NodeId, RoadNode] = {}
        for nd in nodes:
            if nd.node_id in self.nodes:
                raise ValidationError(f"duplicate node id {nd.node_id!r}")
            self.nodes[nd.node_id] = nd
        self.edges: List[RoadEdge] = []
        self.adj: Dict[NodeId, List[Tuple[NodeId, float, float]]] = {n: [] for n in self.nodes}
        for e in edges:
            if e.u not in self.nodes or e.v not in self.nodes:
                raise ValidationError(f"edge {e.u!r}->{e.v!r} references unknown node")
            if e.travel_time_s <= 0 or e.length_m <= 0:
                raise ValidationError(f"edge {e.u!r}->{e.v!r} has nonpositive weight")
            self.edges.append(e)
            self.adj[e.u].append((e.v, e.travel_time_s, e.length_m))
        for n in self.adj:
            self.adj[n].sort()  # deterministic tie-breaking in path search
        self._sp_cache: Dict[NodeId, Tuple[dict, dict, dict]] = {}
        self._matrices: Optional[Tuple[Dict[NodeId, int], np.ndarray, np.ndarray]] = None

    @property
    def node_ids(self) -> List[NodeId]:
        return sorted(self.nodes)

    def validate_connectivity(self, demand_nodes: Optional[Iterable[NodeId]] = None) -> None:
        """Require all demand-relevant nodes to be mutually reachable."""
        targets = sorted(demand_nodes) if demand_nodes is not None else self.node_ids
        if not targets:
            return
        for t in targets:
            if t not in self.nodes:
                raise ValidationError(f"demand node {t!r} not in graph")
        root = targets[0]
        fwd = self._reachable(root, reverse=False)
        bwd = self._reachable(root, reverse=True)
        bad = [t for t in targets if t not in fwd or t not in bwd]
        if bad:
            raise ValidationError(f"demand nodes not strongly connected: {bad[:5]}")

    def _reachable(self, root: NodeId, reverse: bool) -> set:
        if reverse:
            radj: Dict[NodeId, List[NodeId]] = {n: [] for n in self.nodes}
            for e in self.edges:
                radj[e.v].append(e.u)
            nbrs = lambda n: radj[n]
        else:
            nbrs = lambda n: [v for v, _, _ in self.adj[n]]
        seen = {root}
        stack = [root]
        while stack:
            n = stack.pop()
            for v in nbrs(n):
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return seen

    # -- shortest paths ---------------------------------------------------

    def _dijkstra(self, source: NodeId):
        if source in self._sp_cache:
            return self._sp_cache[source]
        dist: Dict[NodeId, float] = {source: 0.0}
        length: Dict[NodeId, float] = {source: 0.0}
        pred: Dict[NodeId, Optional[NodeId]] = {source: None}
        heap = [(0.0, source)]
        done = set()
        while heap:
            d, u = heapq.heappop(heap)
            if u in done:
                continue
            done.add(u)
            for v, t, ell in self.adj[u]:
                nd = d + t
                if v not in dist or nd < dist[v] - 1e-12:
                    dist[v] = nd
                    length[v] = length[u] + ell
                    pred[v] = u
                    heapq.heappush(heap, (nd, v))
        self._sp_cache[source] = (dist, length, pred)
        return dist, length, pred

    def shortest_path_time(self, o: NodeId, d: NodeId) -> float:
        """Minimal travel time in seconds from o to d; 0 when o == d."""
        if o not in self.nodes or d not in self.nodes:
            raise ValidationError(f"unknown node in query ({o!r}, {d!r})")
        dist, _, _ = self._dijkstra(o)
        if d not in dist:
            raise Unreachable(f"no path {o!r} -> {d!r}")
        return dist[d]

    def shortest_path_length_m(self, o: NodeId, d: NodeId) -> float:
        """Length in meters of the time-shortest path from o to d."""
        if o not in self.nodes or d not in self.nodes:
            raise ValidationError(f"unknown node in query ({o!r}, {d!r})")
        _, length, _ = self._dijkstra(o)
        if d not in length:
            raise Unreachable(f"no path {o!r} -> {d!r}")
        return length[d]

    def shortest_path_nodes(self, o: NodeId, d: NodeId) -> List[NodeId]:
        """Node sequence of the time-shortest path, inclusive of endpoints."""
        dist, _, pred = self._dijkstra(o)
        if d not in dist:
            raise Unreachable(f"no path {o!r} -> {d!r}")
        path = [d]
        while pred[path[-1]] is not None:
            path.append(pred[path[-1]])
        path.reverse()
        return path

    def edge_attrs(self, u: NodeId, v: NodeId) -> Tuple[float, float]:
        """(travel_time_s, length_m) of the direct edge u -> v."""
        for w, t, ell in self.adj[u]:
            if w == v:
                return t, ell
        raise ValidationError(f"no edge {u!r} -> {v!r}")

    def matrices(self) -> Tuple[Dict[NodeId, int], np.ndarray, np.ndarray]:
        """(node index map, time matrix, length matrix) over all nodes.

        Dense all-pairs tables sized for desk-scale graphs; unreachable
        pairs hold +inf. Built once on first use, then shared by the hot
        loops of the fleet simulator.
        """
        if self._matrices is None:
            ids = self.node_ids
            index = {n: i for i, n in enumerate(ids)}
            n = len(ids)
            T = np.full((n, n), np.inf)
            L = np.full((n, n), np.inf)
            for s in ids:
                dist, length, _ = self._dijkstra(s)
                si = index[s]
                for node, d in dist.items():
                    T[si, index[node]] = d
                for node, ell in length.items():
                    L[si, index[node]] = ell
            self._matrices = (index, T, L)
        return self._matrices


class TravelTimeTable:
    """Lazy all-pairs travel-time lookup over a set of source nodes.

    Entries for unreachable pairs are math.inf and flagged via
    `is_unreachable`, never silently zero.
    """

    def __init__(self, graph: RoadGraph, sources: Iterable[NodeId]):
        self.graph = graph
        self.sources = sorted(set(sources))
        for s in self.sources:
            if s not in graph.nodes:
                raise ValidationError(f"source {s!r} not in graph")

    def time(self, o: NodeId, d: NodeId) -> float:
        if o not in self.sources:
            raise ValidationError(f"{o!r} is not a table source")
        dist, _, _ = self.graph._dijkstra(o)
        return dist.get(d, math.inf)

    def is_unreachable(self, o: NodeId, d: NodeId) -> bool:
        return math.isinf(self.time(o, d))

    def rows(self):
        """Yield (o, d, seconds) over all source pairs, in sorted order."""
        for o in self.sources:
            for d in self.sources:
                yield o, d, self.time(o, d)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["o", "d", "seconds"])
            for o, d, t in self.rows():
                w.writerow([o, d, "inf" if math.isinf(t) else f"{t:.6f}"])


def all_pairs_table(graph: RoadGraph, sources: Iterable[NodeId]) -> TravelTimeTable:
    return TravelTimeTable(graph, sources)


def _read_csv_rows(path, expected_header: List[str]):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file") from None
        if [h.strip() for h in header] != expected_header:
            raise ParseError(f"{path}: expected header {expected_header}, got {header}")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(expected_header):
                raise ParseError(f"{path}:{lineno}: expected {len(expected_header)} fields")
            yield lineno, row


def load_road_network(node_file, edge_file, demand_nodes=None) -> RoadGraph:
    """Load and validate a road network from nodes.csv / edges.csv.

    nodes.csv: node_id,lat,lon ; edges.csv: from,to,travel_time_s,length_m.
    Connectivity is validated over `demand_nodes` (all nodes by default).
    """
    nodes = []
    for lineno, row in _read_csv_rows(node_file, ["node_id", "lat", "lon"]):
        try:
            nodes.append(RoadNode(row[0].strip(), float(row[1]), float(row[2])))
        except ValueError as exc:
            raise ParseError(f"{node_file}:{lineno}: {exc}") from None
    edges = []
    for lineno, row in _read_csv_rows(edge_file, ["from", "to", "travel_time_s", "length_m"]):
        try:
            edges.append(RoadEdge(row[0].strip(), row[1].strip(), float(row[2]), float(row[3])))
        except ValueError as exc:
            raise ParseError(f"{edge_file}:{lineno}: {exc}") from None
    graph = RoadGraph(nodes, edges)
    graph.validate_connectivity(demand_nodes)
    return graph
