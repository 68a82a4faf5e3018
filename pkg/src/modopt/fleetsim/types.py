"""Demand and supply atoms of the fleet simulator.

All simulator times are seconds and positions are road-graph nodes; a
vehicle committed to an edge is modeled as (last node, next node, arrival
time) so plans can be rebuilt between assignment epochs without
teleporting off an edge.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional

from ..errors import ValidationError
from ..netgraph.roads import NodeId, RoadGraph


@dataclass(frozen=True)
class TripRequest:
    request_id: str
    origin: NodeId
    destination: NodeId
    request_time_s: float
    mode: str                      # fleet tier label, e.g. "ridepool"
    direct_time_s: float           # shortest-path travel time origin -> destination
    direct_dist_m: float           # length of that time-shortest path

    def __post_init__(self):
        if self.origin == self.destination:
            raise ValidationError(f"request {self.request_id}: origin equals destination")
        if self.direct_time_s < 0:
            raise ValidationError(f"request {self.request_id}: negative direct time")

    @property
    def earliest_arrival_s(self) -> float:
        return self.request_time_s + self.direct_time_s


def make_request(
    graph: RoadGraph, request_id: str, origin: NodeId, destination: NodeId,
    request_time_s: float, mode: str,
) -> TripRequest:
    """Build a request with its direct time/distance cached from the graph."""
    return TripRequest(
        request_id=request_id,
        origin=origin,
        destination=destination,
        request_time_s=request_time_s,
        mode=mode,
        direct_time_s=graph.shortest_path_time(origin, destination),
        direct_dist_m=graph.shortest_path_length_m(origin, destination),
    )


PICKUP = "pickup"
DROPOFF = "dropoff"


@dataclass(frozen=True)
class Stop:
    kind: str                     # PICKUP or DROPOFF
    request: TripRequest
    scheduled_s: float

    @property
    def node(self) -> NodeId:
        return self.request.origin if self.kind == PICKUP else self.request.destination


@dataclass
class RoutePlan:
    stops: List[Stop] = field(default_factory=list)

    def __bool__(self) -> bool:
        return bool(self.stops)


@dataclass
class Onboard:
    request: TripRequest
    pickup_s: float


@dataclass
class VehicleState:
    vehicle_id: str
    capacity: int
    tier: str
    node: NodeId                          # last node reached
    next_node: Optional[NodeId] = None    # set while committed to an edge
    edge_depart_s: float = 0.0
    edge_arrive_s: float = 0.0
    edge_length_m: float = 0.0
    onboard: List[Onboard] = field(default_factory=list)
    locked: List[TripRequest] = field(default_factory=list)   # assigned, not yet aboard
    plan: RoutePlan = field(default_factory=RoutePlan)
    rebalance_target: Optional[NodeId] = None

    def position(self, now: float):
        """(node, ready_time) where the vehicle can next be re-planned."""
        if self.next_node is not None:
            return self.next_node, max(now, self.edge_arrive_s)
        return self.node, now

    @property
    def occupancy(self) -> int:
        return len(self.onboard)

    def is_idle(self) -> bool:
        return not self.onboard and not self.locked and not self.plan


@dataclass
class Constraints:
    """Service-quality constraints and assignment-epoch settings.

    The delay budget per request is max_wait_s + delay_slack_ratio times
    the direct travel time, unless delay_cap_s pins an absolute cap.
    """

    max_wait_s: float = 600.0
    delay_slack_ratio: float = 0.3
    delay_cap_s: Optional[float] = None
    epoch_s: float = 60.0
    allow_reassignment: bool = True
    max_trip_size: Optional[int] = None
    rtv_vehicle_budget_s: Optional[float] = None
    assign_budget_s: Optional[float] = None
    unassigned_penalty: Optional[float] = None    # c_p override

    def max_delay_s(self, request: TripRequest) -> float:
        if self.delay_cap_s is not None:
            return self.delay_cap_s
        return self.max_wait_s + self.delay_slack_ratio * request.direct_time_s


@dataclass
class FareRates:
    """Ride-hailing fare components; shared tiers discount off this fare."""
    base: float = 2.55
    minimum: float = 8.00
    per_minute: float = 0.35
    per_mile: float = 1.75

    def __post_init__(self):
        if min(self.base, self.minimum, self.per_minute, self.per_mile) < 0:
            raise ValidationError("fare rates must be nonnegative")
