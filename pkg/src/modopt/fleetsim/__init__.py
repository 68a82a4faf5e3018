from .types import (
    Constraints,
    FareRates,
    Onboard,
    RoutePlan,
    Stop,
    TripRequest,
    VehicleState,
    make_request,
)
from .fares import fare
from .routing import feasible_route
from .rtv import Assignment, RTVGraph, RVGraph, TVEdge, build_rtv_graph, build_rv_graph
from .assign import assign, assign_baseline, rebalance
from .engine import (
    CellStats,
    PassengerRecord,
    SimEvent,
    SimState,
    SimStats,
    TierStats,
    place_fleet,
    run_period,
    step_epoch,
)

__all__ = [
    "TripRequest", "VehicleState", "RoutePlan", "Stop", "Onboard", "Constraints",
    "FareRates", "make_request", "fare", "feasible_route",
    "RVGraph", "RTVGraph", "TVEdge", "Assignment", "build_rv_graph", "build_rtv_graph",
    "assign", "assign_baseline", "rebalance",
    "SimEvent", "SimState", "SimStats", "CellStats", "TierStats", "PassengerRecord",
    "place_fleet", "run_period", "step_epoch",
]
