"""Spatial K-means clustering of road nodes.

The cluster count follows the coverage rule total_area / k ~ 2*pi*r^2 for
walking radius r, so one cluster roughly spans a walkable disc. Assignment
uses great-circle distance; centroids are coordinate means. Seeded
k-means++ initialization plus Lloyd's iterations make the result a pure
function of (graph, radius, seed).
"""

import math
import warnings
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..errors import DegenerateInput
from ..geo import great_circle_miles
from .roads import NodeId, RoadGraph

MAX_LLOYD_ITERATIONS = 100


@dataclass
class Clustering:
    k: int
    assignment: Dict[NodeId, int]
    centroids: List[Tuple[float, float]]

    def cluster_of(self, node_id: NodeId) -> int:
        return self.assignment[node_id]


def cluster_count_for_area(area_sq_miles: float, walk_radius_miles: float) -> int:
    """k = ceil(area / (2*pi*r^2)), at least 1."""
    if walk_radius_miles <= 0:
        raise ValueError("walk radius must be positive")
    return max(1, math.ceil(area_sq_miles / (2.0 * math.pi * walk_radius_miles ** 2)))


def estimate_area_sq_miles(points: List[Tuple[float, float]]) -> float:
    """Convex-hull area of (lat, lon) points via a local flat projection."""
    if len(points) < 3:
        return 0.0
    lat0 = sum(p[0] for p in points) / len(points)
    # miles per degree at the reference latitude
    mlat = 69.055
    mlon = 69.172 * math.cos(math.radians(lat0))
    xy = [(p[1] * mlon, p[0] * mlat) for p in points]
    hull = _convex_hull(xy)
    if len(hull) < 3:
        return 0.0
    area = 0.0
    for i in range(len(hull)):
        x1, y1 = hull[i]
        x2, y2 = hull[(i + 1) % len(hull)]
        area += x1 * y2 - x2 * y1
    return abs(area) / 2.0


def _convex_hull(pts):
    pts = sorted(set(pts))
    if len(pts) <= 2:
        return pts
    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def _nearest(lat, lon, centroids) -> int:
    # ties broken by lowest cluster id: strict improvement required
    best, best_c = math.inf, 0
    for ci, (clat, clon) in enumerate(centroids):
        d = great_circle_miles(lat, lon, clat, clon)
        if d < best - 1e-15:
            best, best_c = d, ci
    return best_c


def cluster_nodes(
    graph: RoadGraph,
    walk_radius_miles: float,
    seed: int,
    area_sq_miles: Optional[float] = None,
) -> Clustering:
    """K-means over node coordinates with k set by the coverage rule.

    `area_sq_miles` overrides the convex-hull estimate when the true
    service area is known. Emits a DegenerateInput warning and clamps k
    when the graph has fewer nodes than clusters.
    """
    ids = graph.node_ids
    pts = [(graph.nodes[n].lat, graph.nodes[n].lon) for n in ids]
    if area_sq_miles is None:
        area_sq_miles = estimate_area_sq_miles(pts)
    k = cluster_count_for_area(area_sq_miles, walk_radius_miles)
    if k > len(ids):
        warnings.warn(
            f"only {len(ids)} nodes for k={k}; clamping", category=UserWarning,
        )
        if not ids:
            raise DegenerateInput("cannot cluster an empty graph")
        k = len(ids)

    rng = np.random.default_rng(seed)
    centroids = _kmeans_pp(pts, k, rng)
    assignment = [0] * len(pts)
    for _ in range(MAX_LLOYD_ITERATIONS):
        new_assignment = [_nearest(lat, lon, centroids) for lat, lon in pts]
        sums = [[0.0, 0.0, 0] for _ in range(k)]
        for (lat, lon), ci in zip(pts, new_assignment):
            sums[ci][0] += lat
            sums[ci][1] += lon
            sums[ci][2] += 1
        for ci in range(k):
            if sums[ci][2]:
                centroids[ci] = (sums[ci][0] / sums[ci][2], sums[ci][1] / sums[ci][2])
        if new_assignment == assignment:
            break
        assignment = new_assignment

    return Clustering(
        k=k,
        assignment={n: c for n, c in zip(ids, assignment)},
        centroids=[tuple(c) for c in centroids],
    )


def _kmeans_pp(pts, k, rng) -> list:
    """k-means++ seeding with the provided generator."""
    first = int(rng.integers(len(pts)))
    centroids = [pts[first]]
    d2 = np.array([great_circle_miles(*p, *centroids[0]) ** 2 for p in pts])
    while len(centroids) < k:
        total = d2.sum()
        if total <= 0:
            # all remaining points coincide with a centroid; pick in order
            for p in pts:
                if p not in centroids:
                    centroids.append(p)
                    break
            else:
                centroids.append(pts[0])
        else:
            r = rng.random() * total
            idx = int(np.searchsorted(np.cumsum(d2), r, side="right"))
            idx = min(idx, len(pts) - 1)
            centroids.append(pts[idx])
        nd = np.array([great_circle_miles(*p, *centroids[-1]) ** 2 for p in pts])
        d2 = np.minimum(d2, nd)
    return centroids
