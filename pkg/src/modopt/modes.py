"""Canonical mode labels shared by the choice model and the simulator."""

RIDEHAIL = "ridehail"
RIDEPOOL = "ridepool"
MICROTRANSIT = "microtransit"
TRANSIT = "transit"

MOD_MODES = (RIDEHAIL, RIDEPOOL, MICROTRANSIT)
ALL_MODES = MOD_MODES + (TRANSIT,)

# maximum simultaneous passengers per fleet tier
TIER_CAPACITY = {RIDEHAIL: 1, RIDEPOOL: 4, MICROTRANSIT: 10}
