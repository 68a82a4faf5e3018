from .roads import (
    RoadEdge,
    RoadGraph,
    RoadNode,
    TravelTimeTable,
    all_pairs_table,
    load_road_network,
)
from .clustering import Clustering, cluster_count_for_area, cluster_nodes, estimate_area_sq_miles
from .transit import (
    DEFAULT_FARE_TO_SECONDS,
    CombinedGraph,
    TransitAccessConfig,
    TransitAttributes,
    TransitGraph,
    TransitLine,
    TransitStation,
    access_link_weight_s,
    build_combined_network,
    load_transit_network,
    transit_itinerary,
)

__all__ = [
    "RoadNode", "RoadEdge", "RoadGraph", "TravelTimeTable",
    "load_road_network", "all_pairs_table",
    "Clustering", "cluster_nodes", "cluster_count_for_area", "estimate_area_sq_miles",
    "TransitStation", "TransitLine", "TransitGraph", "TransitAccessConfig",
    "TransitAttributes", "CombinedGraph", "build_combined_network",
    "transit_itinerary", "load_transit_network", "access_link_weight_s",
    "DEFAULT_FARE_TO_SECONDS",
]
