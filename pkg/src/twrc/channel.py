"""Link gains and path-loss geometry for the full-duplex two-way relay channel.

The network has three nodes: user 1, user 2, and a relay. Six amplitude
gains describe the links between them, using receiver-first subscripts:
``g12`` is the gain of the link into user 1 from user 2, ``gr1`` the gain
into the relay from user 1, and so on. The common transmit power budget
``p`` applies to every node.

Gains can either be given directly or derived from node coordinates with
the path-loss law ``g = 1 / d**(gamma / 2)``. The two path-loss exponents
model an FDD split: the three links that carry user 1's message
(``gr1``, ``g2r``, ``g21``) use ``gamma1``, and the three links that carry
user 2's message (``g1r``, ``gr2``, ``g12``) use ``gamma2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import CoincidentNodesError, ValidationError

GAIN_FIELDS = ("g12", "g21", "g1r", "gr1", "g2r", "gr2")


@dataclass(frozen=True)
class LinkGains:
    """Amplitude gains of the six links plus the per-node power budget.

    All values are dimensionless amplitudes; the rate formulas square
    them. Values must be finite and nonnegative (zero is allowed, e.g.
    ``g12 = g21 = 0`` models the multi-hop channel without direct links).
    """

    g12: float
    g21: float
    g1r: float
    gr1: float
    g2r: float
    gr2: float
    p: float = 1.0

    def swapped(self) -> "LinkGains":
        """Return the gains with the two user indices exchanged."""
        return LinkGains(
            g12=self.g21,
            g21=self.g12,
            g1r=self.g2r,
            g2r=self.g1r,
            gr1=self.gr2,
            gr2=self.gr1,
            p=self.p,
        )

    def to_dict(self) -> dict:
        return {
            "g12": self.g12,
            "g21": self.g21,
            "g1r": self.g1r,
            "gr1": self.gr1,
            "g2r": self.g2r,
            "gr2": self.gr2,
            "p": self.p,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "LinkGains":
        missing = [k for k in GAIN_FIELDS + ("p",) if k not in data]
        if missing:
            raise ValidationError(f"gains object is missing keys: {', '.join(missing)}")
        try:
            values = {k: float(data[k]) for k in GAIN_FIELDS + ("p",)}
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"gains values must be numbers: {exc}") from None
        return validate_gains(cls(**values))


def validate_gains(g: LinkGains) -> LinkGains:
    """Check that every gain and the power budget is finite and >= 0.

    Returns the input unchanged when valid so calls can be chained.
    Raises :class:`ValidationError` naming the offending field otherwise.
    """
    for name in GAIN_FIELDS:
        value = getattr(g, name)
        if not math.isfinite(value):
            raise ValidationError(f"gain {name} must be finite, got {value!r}")
        if value < 0:
            raise ValidationError(f"gain {name} must be nonnegative, got {value!r}")
    if not math.isfinite(g.p):
        raise ValidationError(f"power budget p must be finite, got {g.p!r}")
    if g.p < 0:
        raise ValidationError(f"power budget p must be nonnegative, got {g.p!r}")
    return g


@dataclass(frozen=True)
class Geometry:
    """2-D node positions in meters plus the two FDD path-loss exponents."""

    user1: tuple[float, float] = (0.0, 0.0)
    user2: tuple[float, float] = (20.0, 0.0)
    relay: tuple[float, float] = (10.0, 0.0)
    gamma1: float = 2.3
    gamma2: float = 3.6

    def with_relay(self, position: tuple[float, float]) -> "Geometry":
        return replace(self, relay=(float(position[0]), float(position[1])))

    def to_dict(self) -> dict:
        return {
            "user1": list(self.user1),
            "user2": list(self.user2),
            "relay": list(self.relay),
            "gamma1": self.gamma1,
            "gamma2": self.gamma2,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Geometry":
        kwargs = {}
        for key in ("user1", "user2", "relay"):
            if key in data:
                point = data[key]
                if not isinstance(point, (list, tuple)) or len(point) != 2:
                    raise ValidationError(f"geometry {key} must be an [x, y] pair")
                kwargs[key] = (float(point[0]), float(point[1]))
        for key in ("gamma1", "gamma2"):
            if key in data:
                kwargs[key] = float(data[key])
        return validate_geometry(cls(**kwargs))


def validate_geometry(geom: Geometry) -> Geometry:
    """Check coordinates are finite and exponents positive."""
    for name in ("user1", "user2", "relay"):
        point = getattr(geom, name)
        if not all(math.isfinite(v) for v in point):
            raise ValidationError(f"position {name} must have finite coordinates, got {point!r}")
    for name in ("gamma1", "gamma2"):
        value = getattr(geom, name)
        if not math.isfinite(value) or value <= 0:
            raise ValidationError(f"path-loss exponent {name} must be positive, got {value!r}")
    return geom


def _distance(p1: tuple[float, float], p2: tuple[float, float]) -> float:
    return math.hypot(p1[0] - p2[0], p1[1] - p2[1])


def _path_loss(distance: float, gamma: float) -> float:
    return distance ** (-gamma / 2.0)


def gains_from_geometry(geom: Geometry, p: float = 1.0) -> LinkGains:
    """Derive link gains from node positions via ``g = 1 / d**(gamma/2)``.

    ``gamma1`` applies to the links carrying user 1's message (``gr1``,
    ``g2r``, ``g21``) and ``gamma2`` to the links carrying user 2's message
    (``g1r``, ``gr2``, ``g12``). Forward and reverse links between the same
    node pair share a distance but use different exponents.

    Raises :class:`CoincidentNodesError` when any two nodes coincide, since
    the path-loss law diverges at zero distance.
    """
    validate_geometry(geom)
    if not math.isfinite(p) or p < 0:
        raise ValidationError(f"power budget p must be finite and nonnegative, got {p!r}")
    pairs = (
        ("user1", "user2", geom.user1, geom.user2),
        ("user1", "relay", geom.user1, geom.relay),
        ("user2", "relay", geom.user2, geom.relay),
    )
    distances = {}
    for name_a, name_b, pos_a, pos_b in pairs:
        dist = _distance(pos_a, pos_b)
        if dist == 0.0:
            raise CoincidentNodesError(
                f"nodes {name_a} and {name_b} coincide at {tuple(pos_a)}"
            )
        distances[(name_a, name_b)] = dist

    d12 = distances[("user1", "user2")]
    d1r = distances[("user1", "relay")]
    d2r = distances[("user2", "relay")]
    return LinkGains(
        gr1=_path_loss(d1r, geom.gamma1),
        g2r=_path_loss(d2r, geom.gamma1),
        g21=_path_loss(d12, geom.gamma1),
        g1r=_path_loss(d1r, geom.gamma2),
        gr2=_path_loss(d2r, geom.gamma2),
        g12=_path_loss(d12, geom.gamma2),
        p=p,
    )
