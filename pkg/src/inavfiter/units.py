"""
Sensor-error unit conversions.

Internally every magnitude is SI: rad/s for gyro bias, rad/sqrt(s) for
angle random walk, m/s^2 for accelerometer bias and m/s^1.5 for velocity
random walk. Datasheet units map onto them as follows.

=============  ====================  ========================
unit tag       dimension             factor to SI
=============  ====================  ========================
rad/s          rate                  1
deg/h          rate                  pi / 180 / 3600
rad/rt-s       angle_random_walk     1
deg/rt-h       angle_random_walk     pi / 180 / 60
m/s2           acceleration          1
m/s^1.5        velocity_random_walk  1
m/s2/rt-h      velocity_random_walk  1 / 60
m/s2/rt-hz     velocity_random_walk  1
=============  ====================  ========================
"""

import math
from typing import Literal

__all__ = ("Dimension", "UnitTag", "UNIT_TABLE", "to_si")

Dimension = Literal[
    "rate", "angle_random_walk", "acceleration", "velocity_random_walk"
]
UnitTag = Literal[
    "rad/s",
    "deg/h",
    "rad/rt-s",
    "deg/rt-h",
    "m/s2",
    "m/s^1.5",
    "m/s2/rt-h",
    "m/s2/rt-hz",
]

UNIT_TABLE: dict[str, tuple[Dimension, float]] = {
    "rad/s": ("rate", 1.0),
    "deg/h": ("rate", math.pi / 180.0 / 3600.0),
    "rad/rt-s": ("angle_random_walk", 1.0),
    "deg/rt-h": ("angle_random_walk", math.pi / 180.0 / 60.0),
    "m/s2": ("acceleration", 1.0),
    "m/s^1.5": ("velocity_random_walk", 1.0),
    "m/s2/rt-h": ("velocity_random_walk", 1.0 / 60.0),
    "m/s2/rt-hz": ("velocity_random_walk", 1.0),
}


def to_si(value: float, unit: str, dimension: Dimension) -> float:
    try:
        expected, factor = UNIT_TABLE[unit]
    except KeyError:
        raise ValueError(
            "Unknown unit %r, expected one of: %s" % (unit, ", ".join(UNIT_TABLE))
        ) from None
    if expected != dimension:
        raise ValueError(
            "Unit %r measures %s, expected a %s unit" % (unit, expected, dimension)
        )
    return value * factor
