"""Trip fare: discounted time-and-distance meter with a floor."""

from .types import FareRates


def fare(trip_time_s: float, trip_dist_miles: float, rates: FareRates, gamma: float) -> float:
    """(1 - gamma) * max(minimum, base + per_minute * minutes + per_mile * miles).

    gamma is the tier's discount factor off the ride-hailing fare; the
    ride-hailing tier itself uses gamma = 0.
    """
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"discount factor {gamma} outside [0, 1]")
    metered = rates.base + rates.per_minute * (trip_time_s / 60.0) + rates.per_mile * trip_dist_miles
    return (1.0 - gamma) * max(rates.minimum, metered)
