import math
from typing import Annotated, Literal

import annotated_types

from .abstract import AbstractDTO

__all__ = ("TrajectoryParams", "FlightMode")

FlightMode = Literal["coning", "level"]


class TrajectoryParams(AbstractDTO):
    """
    Analytic flight profile along the equator, heading east.

    The east speed is ``v0 + a (1 - cos(w t)) / w``. In ``coning`` mode the body
    attitude performs a classical coning motion of half-angle ``alpha / 2`` at
    frequency ``zeta``; in ``level`` mode it stays aligned with the local-level
    frame.
    """

    mode: FlightMode = "coning"
    a: float = 10.0
    w: Annotated[float, annotated_types.Gt(0)] = 0.02 * math.pi
    v0: float = 500.0
    zeta: float = 0.74 * math.pi
    alpha: Annotated[float, annotated_types.Ge(0), annotated_types.Lt(math.pi)] = (
        math.radians(10.0)
    )
    sample_rate: Annotated[float, annotated_types.Gt(0)] = 100.0
    duration: Annotated[float, annotated_types.Gt(0)] = 100.0

    @property
    def sample_period(self) -> float:
        return 1.0 / self.sample_rate

    @property
    def total_samples(self) -> int:
        return int(round(self.duration * self.sample_rate))
