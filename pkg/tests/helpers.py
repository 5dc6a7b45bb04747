"""Shared fixtures-by-import: reference instances and gain samplers.

The named instances pin down gains used across several test modules:

* ``R3T5_GAINS``  - the region-comparison showcase instance; classifies
  as (R3,T5) with the side condition holding.
* ``R2T5_GAINS``  - the documented closed-form instance for the cell
  where user 1 relies on binning and user 2 on coherent relaying.
* ``R2T3_GAINS``  - the documented minimum-relay-power instance
  (squared gains 0.04/0.25/0.09 toward user 2's side, 0.04/0.25/0.16
  toward user 1's side).
"""

from __future__ import annotations

import math
import random

from twrc import Geometry, LinkGains, classify

R3T5_GAINS = LinkGains(g21=0.25, gr1=1.0, g12=0.25, gr2=1.0, g1r=0.5, g2r=0.7, p=1.0)

R2T5_GAINS = LinkGains(
    g21=0.2, g2r=0.5, gr1=math.sqrt(0.2), g12=0.2, g1r=0.3, gr2=0.5, p=1.0
)

R2T3_GAINS = LinkGains(
    g21=0.2, g2r=0.5, gr1=0.3, g12=0.2, g1r=0.5, gr2=0.4, p=1.0
)

# 20 m user separation with the FDD path-loss exponents; relay on the
# inter-user axis by default.
MAP_GEOMETRY = Geometry()

R_CELLS = ("R1", "R2", "R3")
T_CELLS = ("T1", "T2", "T3", "T4", "T5")


def random_gains(rng: random.Random, p_range=(0.5, 2.0)) -> LinkGains:
    """Log-uniform amplitudes in [0.05, 2.0], uniform power budget."""
    amps = [math.exp(rng.uniform(math.log(0.05), math.log(2.0))) for _ in range(6)]
    return LinkGains(
        g12=amps[0], g21=amps[1], g1r=amps[2],
        gr1=amps[3], g2r=amps[4], gr2=amps[5],
        p=rng.uniform(*p_range),
    )


def sample_cell(rng: random.Random, r_idx: str, t_idx: str,
                margin: float = 0.05) -> LinkGains:
    """Random gains strictly inside a classification cell.

    The four cross-link squared gains are log-uniform on [0.02, 1.0];
    the two user-to-relay squared gains are placed at an interior
    fraction of their target interval, at least ``margin`` away from
    both ends. Draws are rejected when the interval for T2/T4 is too
    thin to have an interior or when the side condition would come
    within 2% of failing.
    """
    for _ in range(10000):
        c = math.exp(rng.uniform(math.log(0.02), math.log(1.0)))
        d = math.exp(rng.uniform(math.log(0.02), math.log(1.0)))
        e = math.exp(rng.uniform(math.log(0.02), math.log(1.0)))
        f = math.exp(rng.uniform(math.log(0.02), math.log(1.0)))
        p = rng.uniform(0.5, 2.0)
        u = rng.uniform(margin, 1.0 - margin)
        if r_idx == "R1":
            a = u * c
        elif r_idx == "R2":
            a = c + u * d
        else:
            a = (c + d) * (1.0 + u * 1.5)
        s = 1.0 + a * p
        if t_idx in ("T2", "T4") and (s - 1.0) < 0.02:
            continue
        if e * s > (e + f) * 0.98:
            continue
        v = rng.uniform(margin, 1.0 - margin)
        if t_idx == "T1":
            b = v * e
        elif t_idx == "T2":
            b = e + v * e * (s - 1.0)
        elif t_idx == "T3":
            b = e * s + v * (e + f - e * s)
        elif t_idx == "T4":
            b = (e + f) + v * (e + f) * (s - 1.0)
        else:
            b = (e + f) * s * (1.0 + margin + v * 2.0)
        g = LinkGains(
            g21=math.sqrt(c), g2r=math.sqrt(d), gr1=math.sqrt(a),
            g12=math.sqrt(e), g1r=math.sqrt(f), gr2=math.sqrt(b), p=p,
        )
        reg = classify(g)
        if reg.cell == (r_idx, t_idx) and reg.side_condition_holds:
            return g
    raise RuntimeError(f"could not sample cell ({r_idx},{t_idx})")
