"""Operator economics: revenue, cost model, profit, and the per-ride tax.

Cost constants default to the case-study values: sedan leasing of
$11.97/day for the small tiers and $19.32/day for the high-capacity
tier, a $17/hour driver salary, and $0.1473/mile of operating cost,
with daily leasing normalized to the simulated period by the fraction
of daily demand it carries (5.94% for the studied rush hour).
"""

import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, Mapping, Optional

from .equilibrium import SupplyParams
from .errors import MissingTierStats, ValidationError
from .fleetsim.engine import SimStats
from .modes import MICROTRANSIT, RIDEHAIL, RIDEPOOL

DAILY_LEASING_SEDAN = 11.97
DAILY_LEASING_MINIVAN = 19.32
HOURLY_SALARY = 17.0
OPERATING_PER_MILE = 0.1473
DEMAND_FRACTION_RUSH_HOUR = 0.0594


@dataclass(frozen=True)
class TierCost:
    """Per-vehicle-period and per-mile costs of one fleet tier."""
    leasing_per_period: float
    salary_per_period: float
    operating_per_mile: float

    def __post_init__(self):
        if min(self.leasing_per_period, self.salary_per_period, self.operating_per_mile) < 0:
            raise ValidationError("cost components must be nonnegative")


@dataclass
class CostModel:
    tiers: Dict[str, TierCost]

    @classmethod
    def defaults(cls, horizon_hours: float = 1.0,
                 demand_fraction: float = DEMAND_FRACTION_RUSH_HOUR) -> "CostModel":
        def tier(daily_leasing: float) -> TierCost:
            return TierCost(
                leasing_per_period=daily_leasing * demand_fraction,
                salary_per_period=HOURLY_SALARY * horizon_hours,
                operating_per_mile=OPERATING_PER_MILE,
            )
        return cls(tiers={
            RIDEHAIL: tier(DAILY_LEASING_SEDAN),
            RIDEPOOL: tier(DAILY_LEASING_SEDAN),
            MICROTRANSIT: tier(DAILY_LEASING_MINIVAN),
        })


@dataclass
class TaxPolicy:
    """Per-ride levy charged to the operator, by tier; fares unchanged.

    `passthrough` is the fraction passed on to passengers (reserved
    lever; the studied policy absorbs the full levy, passthrough 0).
    """
    per_ride: Dict[str, float] = field(default_factory=dict)
    passthrough: float = 0.0

    def __post_init__(self):
        for tier, levy in self.per_ride.items():
            if levy < 0:
                raise ValidationError(f"negative tax for {tier}")

    def levy(self, tier: str) -> float:
        return self.per_ride.get(tier, 0.0)


def profit(stats: SimStats, params: SupplyParams, cost: CostModel,
           tax: Optional[TaxPolicy] = None) -> float:
    """Fare revenue minus fixed (leasing + salary) per vehicle, distance
    costs on simulated mileage, and any per-ride tax on served trips."""
    tax = tax or TaxPolicy()
    total = 0.0
    for tier, n in params.fleet_sizes().items():
        if tier not in cost.tiers:
            raise MissingTierStats(f"no cost entry for tier {tier!r}")
        if tier not in stats.tiers:
            raise MissingTierStats(f"simulation statistics missing tier {tier!r}")
        ts = stats.tiers[tier]
        tc = cost.tiers[tier]
        total += ts.fares_total
        total -= (tc.leasing_per_period + tc.salary_per_period) * n
        total -= tc.operating_per_mile * ts.vmt_miles
        total -= tax.levy(tier) * (1.0 - tax.passthrough) * ts.served
    return total


def profit_breakdown(stats: SimStats, params: SupplyParams, cost: CostModel,
                     tax: Optional[TaxPolicy] = None) -> Dict[str, dict]:
    """Per-tier revenue/cost components that reconcile with profit()."""
    tax = tax or TaxPolicy()
    out: Dict[str, dict] = {}
    for tier, n in params.fleet_sizes().items():
        if tier not in cost.tiers or tier not in stats.tiers:
            raise MissingTierStats(f"missing tier {tier!r}")
        ts = stats.tiers[tier]
        tc = cost.tiers[tier]
        out[tier] = {
            "fleet_size": n,
            "revenue": ts.fares_total,
            "fixed_cost": (tc.leasing_per_period + tc.salary_per_period) * n,
            "operating_cost": tc.operating_per_mile * ts.vmt_miles,
            "tax": tax.levy(tier) * (1.0 - tax.passthrough) * ts.served,
            "vmt_miles": ts.vmt_miles,
            "pmt_miles": ts.pmt_miles,
            "served": ts.served,
        }
    return out


def consumer_surplus(utilities_per_traveler: Iterable[Mapping[str, float]],
                     beta_cost: float) -> float:
    """Logsum welfare in currency units: sum of log(sum exp(U)) / |beta_cost|."""
    if beta_cost == 0:
        raise ValidationError("beta_cost must be nonzero")
    total = 0.0
    for utilities in utilities_per_traveler:
        if not utilities:
            raise ValidationError("traveler with empty choice set")
        peak = max(utilities.values())
        total += peak + math.log(sum(math.exp(u - peak) for u in utilities.values()))
    return total / abs(beta_cost)
