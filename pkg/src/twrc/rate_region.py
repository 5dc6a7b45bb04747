"""Rate constraints of the composite decode-forward scheme and pentagon corners.

For a fixed power allocation the achievable rate pairs form a pentagon
(or a degenerate rectangle):

    r1 <= min(j1, j2),  r2 <= min(j3, j4),  r1 + r2 <= j5.

``j1``, ``j3``, ``j5`` bound decoding at the relay; ``j2`` and ``j4`` bound
decoding at the receiving users. All rates use log base 2, i.e. bits per
channel use.

Power allocation fields follow the transmit-signal structure: each user
splits its budget between a fresh-message part (``beta1``/``beta2``) and a
repeated part (``alpha1``/``alpha2``) that the relay amplifies coherently.
The relay splits its budget between the two coherent components (``pw1``,
``pw2``) and an independent binning component (``beta3``). ``pw1``/``pw2``
replace the unbounded per-user scaling factors ``k_i`` via
``pw_i = k_i * alpha_i``, which keeps the feasible set identical while
making it compact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .channel import LinkGains
from .errors import InfeasibleAllocationError, ValidationError

# Absolute slack (scaled by max(1, p)) when checking power budgets, so
# allocations produced by float arithmetic on the budget boundary pass.
BUDGET_SLACK = 1e-9

ALLOCATION_FIELDS = ("alpha1", "beta1", "alpha2", "beta2", "pw1", "pw2", "beta3")


@dataclass(frozen=True)
class PowerAllocation:
    """The seven transmit-power parameters, all nonnegative.

    Feasibility against a budget ``p`` means ``alpha1 + beta1 <= p``,
    ``alpha2 + beta2 <= p`` and ``pw1 + pw2 + beta3 <= p``. A positive
    ``pw_i`` additionally requires ``alpha_i > 0``, because ``pw_i``
    scales a signal that user ``i`` must actually transmit.
    """

    alpha1: float
    beta1: float
    alpha2: float
    beta2: float
    pw1: float
    pw2: float
    beta3: float

    @property
    def user1_total(self) -> float:
        return self.alpha1 + self.beta1

    @property
    def user2_total(self) -> float:
        return self.alpha2 + self.beta2

    @property
    def relay_total(self) -> float:
        return self.pw1 + self.pw2 + self.beta3

    def to_dict(self) -> dict:
        return {name: getattr(self, name) for name in ALLOCATION_FIELDS}

    @classmethod
    def from_dict(cls, data: dict) -> "PowerAllocation":
        missing = [k for k in ALLOCATION_FIELDS if k not in data]
        if missing:
            raise ValidationError(f"allocation object is missing keys: {', '.join(missing)}")
        return cls(**{k: float(data[k]) for k in ALLOCATION_FIELDS})


@dataclass(frozen=True)
class RateConstraints:
    """The five rate bounds (bits per channel use), all nonnegative."""

    j1: float
    j2: float
    j3: float
    j4: float
    j5: float

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return (self.j1, self.j2, self.j3, self.j4, self.j5)


@dataclass(frozen=True)
class RatePoint:
    """An achievable rate pair (bits per channel use)."""

    r1: float
    r2: float

    def weighted_sum(self, mu: float) -> float:
        return mu * self.r1 + (1.0 - mu) * self.r2

    def to_dict(self) -> dict:
        return {"r1": self.r1, "r2": self.r2}


def capacity(x: float) -> float:
    """Gaussian capacity ``log2(1 + x)`` in bits per channel use."""
    if x < 0:
        raise ValidationError(f"capacity argument must be nonnegative, got {x!r}")
    return math.log2(1.0 + x)


def validate_allocation(a: PowerAllocation, p: float) -> PowerAllocation:
    """Check nonnegativity, the three power budgets, and pw/alpha coupling.

    Raises :class:`InfeasibleAllocationError` naming the violated
    constraint. Budget checks allow slack ``BUDGET_SLACK * max(1, p)``.
    """
    for name in ALLOCATION_FIELDS:
        value = getattr(a, name)
        if not math.isfinite(value) or value < 0:
            raise InfeasibleAllocationError(
                f"allocation field {name} must be finite and nonnegative, got {value!r}"
            )
    slack = BUDGET_SLACK * max(1.0, p)
    if a.alpha1 + a.beta1 > p + slack:
        raise InfeasibleAllocationError(
            f"user 1 budget violated: alpha1 + beta1 = {a.alpha1 + a.beta1!r} > p = {p!r}"
        )
    if a.alpha2 + a.beta2 > p + slack:
        raise InfeasibleAllocationError(
            f"user 2 budget violated: alpha2 + beta2 = {a.alpha2 + a.beta2!r} > p = {p!r}"
        )
    if a.pw1 + a.pw2 + a.beta3 > p + slack:
        raise InfeasibleAllocationError(
            f"relay budget violated: pw1 + pw2 + beta3 = {a.relay_total!r} > p = {p!r}"
        )
    if a.pw1 > 0 and a.alpha1 == 0:
        raise InfeasibleAllocationError("pw1 > 0 requires alpha1 > 0")
    if a.pw2 > 0 and a.alpha2 == 0:
        raise InfeasibleAllocationError("pw2 > 0 requires alpha2 > 0")
    return a


def compute_constraints(g: LinkGains, a: PowerAllocation, *, validate: bool = True) -> RateConstraints:
    """Evaluate the five rate bounds for gains ``g`` and allocation ``a``.

    The user-side bounds ``j2``/``j4`` use the full budget ``p`` in their
    direct-link term regardless of the split chosen at the transmitter,
    plus the coherent cross term ``2 * g * g * sqrt(pw_i * alpha_i)`` and
    the relay's forwarded power.
    """
    if validate:
        validate_allocation(a, g.p)
    cross1 = 2.0 * g.g21 * g.g2r * math.sqrt(a.pw1 * a.alpha1)
    cross2 = 2.0 * g.g12 * g.g1r * math.sqrt(a.pw2 * a.alpha2)
    arg1 = g.gr1 ** 2 * a.beta1
    arg3 = g.gr2 ** 2 * a.beta2
    return RateConstraints(
        j1=math.log2(1.0 + arg1),
        j2=math.log2(1.0 + g.g21 ** 2 * g.p + cross1 + g.g2r ** 2 * (a.pw1 + a.beta3)),
        j3=math.log2(1.0 + arg3),
        j4=math.log2(1.0 + g.g12 ** 2 * g.p + cross2 + g.g1r ** 2 * (a.pw2 + a.beta3)),
        j5=math.log2(1.0 + arg1 + arg3),
    )


def best_weighted_point(c: RateConstraints, mu: float) -> RatePoint:
    """Maximizer of ``mu * r1 + (1 - mu) * r2`` over the pentagon.

    For ``mu >= 1/2`` this is the corner favoring user 1, symmetric for
    ``mu < 1/2`` (at ``mu = 1/2`` the two corners tie; the user-1 corner
    is returned). Each coordinate is clamped into the feasible region, so
    the result stays feasible even for hand-built constraint tuples where
    ``j5 < min(j1, j2)``.
    """
    if not 0.0 <= mu <= 1.0:
        raise ValidationError(f"mu must lie in [0, 1], got {mu!r}")
    for name in ("j1", "j2", "j3", "j4", "j5"):
        if getattr(c, name) < 0:
            raise ValidationError(f"rate constraint {name} must be nonnegative, got {getattr(c, name)!r}")
    if mu >= 0.5:
        r1 = min(c.j1, c.j2, c.j5)
        r2 = min(c.j3, c.j4, max(c.j5 - r1, 0.0))
    else:
        r2 = min(c.j3, c.j4, c.j5)
        r1 = min(c.j1, c.j2, max(c.j5 - r2, 0.0))
    return RatePoint(r1=r1, r2=r2)
