"""Small geographic helpers: great-circle distance and unit constants."""

import math

EARTH_RADIUS_MILES = 3958.7613
METERS_PER_MILE = 1609.344
SECONDS_PER_HOUR = 3600.0


def great_circle_miles(lat1: float, lon1: float, lat2: float, lon2: float) -> float:
    """Haversine distance in miles between two (lat, lon) points in degrees."""
    phi1 = math.radians(lat1)
    phi2 = math.radians(lat2)
    dphi = phi2 - phi1
    dlam = math.radians(lon2 - lon1)
    a = math.sin(dphi / 2.0) ** 2 + math.cos(phi1) * math.cos(phi2) * math.sin(dlam / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_MILES * math.asin(min(1.0, math.sqrt(max(0.0, a))))


def walk_seconds(distance_miles: float, walk_speed_mph: float) -> float:
    """Walking time in seconds to cover a distance at a constant speed."""
    return distance_miles / walk_speed_mph * SECONDS_PER_HOUR


def meters_to_miles(meters: float) -> float:
    return meters / METERS_PER_MILE
