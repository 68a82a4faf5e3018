"""Multinomial-logit mode choice: utilities, probabilities, and helpers.

Times enter utilities in minutes and costs in dollars. Coefficient
defaults are the stated-preference estimates used throughout the
package; the transit alternative-specific constant defaults to the
calibrated value and `calibrate_transit_asc` reproduces the grid-search
calibration protocol against any share-producing harness.
"""

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import EmptyChoiceSet, UnknownMode, ValidationError
from .modes import ALL_MODES, MICROTRANSIT, MOD_MODES, RIDEHAIL, RIDEPOOL, TRANSIT


def _default_asc() -> Dict[str, float]:
    # ride-hailing takes the Uber constant, the shared tiers the UberPool
    # constant, and transit the grid-calibrated constant.
    return {RIDEHAIL: -0.821, RIDEPOOL: -1.266, MICROTRANSIT: -1.266, TRANSIT: -3.0}


@dataclass
class ChoiceCoefficients:
    """Marginal utilities (per minute / per dollar) plus mode constants."""

    beta_ovtt: float = -0.032
    beta_ivtt: float = -0.023
    beta_cost: float = -0.074
    beta_parking: float = -0.057
    beta_electric: float = -0.041
    beta_automation: float = -0.182
    asc: Dict[str, float] = field(default_factory=_default_asc)

    def __post_init__(self):
        if self.beta_ovtt >= 0 or self.beta_ivtt >= 0 or self.beta_cost >= 0:
            raise ValidationError("time and cost coefficients must be negative")


@dataclass(frozen=True)
class ModeAttributes:
    ovtt_min: float
    ivtt_min: float
    cost: float
    is_electric: bool = False
    is_automated: bool = False

    def __post_init__(self):
        if self.ovtt_min < 0 or self.ivtt_min < 0 or self.cost < 0:
            raise ValidationError("mode attributes must be nonnegative")


@dataclass(frozen=True)
class DiscountFunctionParams:
    """Parameters of the fare-discount disutility min(0, a + b*exp(-c*gamma))."""
    a: float
    b: float
    c: float


@dataclass
class ModeShareVector:
    shares: Dict[str, float]

    def __post_init__(self):
        total = sum(self.shares.values())
        if self.shares and abs(total - 1.0) > 1e-9:
            raise ValidationError(f"shares sum to {total}, expected 1")
        for m, s in self.shares.items():
            if s < 0:
                raise ValidationError(f"negative share for {m}")

    def __getitem__(self, mode: str) -> float:
        return self.shares[mode]

    def modes(self) -> List[str]:
        return list(self.shares)


def utility(
    attrs: ModeAttributes,
    coef: ChoiceCoefficients,
    mode: str,
    discount_penalty_u: float = 0.0,
) -> float:
    """Linear-in-attributes utility of one alternative.

    asc + b_ovtt*ovtt + b_ivtt*ivtt + b_cost*cost + powertrain/automation
    dummies + any additive discount penalty.
    """
    if mode not in coef.asc:
        raise UnknownMode(f"no ASC configured for mode {mode!r}")
    u = coef.asc[mode]
    u += coef.beta_ovtt * attrs.ovtt_min
    u += coef.beta_ivtt * attrs.ivtt_min
    u += coef.beta_cost * attrs.cost
    if attrs.is_electric:
        u += coef.beta_electric
    if attrs.is_automated:
        u += coef.beta_automation
    return u + discount_penalty_u


def choice_probabilities(utilities: Dict[str, float]) -> ModeShareVector:
    """Softmax over the given utilities, stabilized by max-subtraction."""
    if not utilities:
        raise EmptyChoiceSet("no alternatives")
    for m, u in utilities.items():
        if not math.isfinite(u):
            raise ValidationError(f"non-finite utility for {m}")
    peak = max(utilities.values())
    expu = {m: math.exp(u - peak) for m, u in utilities.items()}
    z = sum(expu.values())
    return ModeShareVector({m: e / z for m, e in expu.items()})


def draw_mode(probs: ModeShareVector, rng: np.random.Generator) -> str:
    """Inverse-CDF draw in the vector's mode order; exact given the rng stream."""
    r = rng.random()
    acc = 0.0
    modes = probs.modes()
    for m in modes:
        acc += probs[m]
        if r < acc:
            return m
    return modes[-1]


def discount_penalty(gamma: float, p: Optional[DiscountFunctionParams]) -> float:
    """Disutility of a shared tier offering discount factor gamma in [0, 1].

    min(0, a + b*exp(-c*gamma)); None parameters mean no penalty.
    """
    if p is None:
        return 0.0
    if not 0.0 <= gamma <= 1.0:
        raise ValidationError(f"discount factor {gamma} outside [0, 1]")
    return min(0.0, p.a + p.b * math.exp(-p.c * gamma))


def blended_utility(u_served: float, u_transit: float, service_rate: float, c_m: float) -> float:
    """Expected utility of an on-demand mode given its historical service rate.

    Travelers denied service fall back to transit at a penalty multiplier:
    s * u_served + (1 - s) * c_m * u_transit.
    """
    if not 0.0 <= service_rate <= 1.0:
        raise ValidationError(f"service rate {service_rate} outside [0, 1]")
    if c_m < 1.0:
        raise ValidationError("penalty multiplier must be >= 1")
    return service_rate * u_served + (1.0 - service_rate) * c_m * u_transit


@dataclass
class AscCalibration:
    asc: float
    table: List[Tuple[float, float]]   # (asc, equilibrium transit share)
    in_range: bool


def calibrate_transit_asc(
    target_share_range: Tuple[float, float],
    asc_grid: Sequence[float],
    harness: Callable[[float], float],
) -> AscCalibration:
    """Grid-search the transit constant against an equilibrium harness.

    `harness(asc)` must return the equilibrium transit share under that
    constant. Returns the first grid value whose share falls inside the
    target range, along with the full (asc, share) table. If no grid
    point lands inside, the closest one is returned with a warning.
    """
    if not asc_grid:
        raise ValidationError("empty ASC grid")
    lo, hi = target_share_range
    table = [(float(a), float(harness(a))) for a in asc_grid]
    for a, share in table:
        if lo <= share <= hi:
            return AscCalibration(asc=a, table=table, in_range=True)
    def range_dist(share: float) -> float:
        return lo - share if share < lo else share - hi
    best = min(table, key=lambda t: range_dist(t[1]))
    warnings.warn(
        f"no grid ASC reached transit share in [{lo}, {hi}]; "
        f"closest is {best[0]} at {best[1]:.4f}",
        category=UserWarning,
    )
    return AscCalibration(asc=best[0], table=table, in_range=False)
