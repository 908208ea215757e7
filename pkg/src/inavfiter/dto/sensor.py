from typing import Annotated, Any, Literal, Self

import annotated_types
from pydantic import BaseModel, ConfigDict, ValidationInfo, field_validator

from ..units import Dimension, UnitTag, to_si
from .abstract import AbstractDTO

__all__ = ("Quantity", "SensorSpec", "SensorGrade", "SENSOR_GRADES")

SensorGrade = Literal["perfect", "nav", "high"]

NonNegative = Annotated[float, annotated_types.Ge(0)]


class Quantity(BaseModel):
    """A magnitude with an explicit unit tag, e.g. ``{value: 1e-4, unit: deg/h}``."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    value: float
    unit: UnitTag


_DIMENSIONS: dict[str, Dimension] = {
    "gyro_bias": "rate",
    "gyro_arw": "angle_random_walk",
    "accel_bias": "acceleration",
    "accel_vrw": "velocity_random_walk",
}


class SensorSpec(AbstractDTO):
    """
    Gyroscope and accelerometer error model, stored in SI units.

    Each magnitude may be given as a bare SI float or as a :class:`Quantity`,
    which is converted through :mod:`inavfiter.units`.

    Attributes:
        gyro_bias: Constant gyro bias, rad/s.
        gyro_arw: Angle random walk, rad/sqrt(s).
        accel_bias: Constant accelerometer bias, m/s^2.
        accel_vrw: Velocity random walk, m/s^1.5.
        seed: Seed of the noise generator.
    """

    gyro_bias: NonNegative = 0.0
    gyro_arw: NonNegative = 0.0
    accel_bias: NonNegative = 0.0
    accel_vrw: NonNegative = 0.0
    seed: Annotated[int, annotated_types.Ge(0)] = 0

    @field_validator(*_DIMENSIONS, mode="before")
    @classmethod
    def convert_quantity(cls, value: Any, info: ValidationInfo) -> Any:
        if isinstance(value, dict):
            value = Quantity.model_validate(value)
        if isinstance(value, Quantity):
            return to_si(value.value, value.unit, _DIMENSIONS[info.field_name])
        return value

    @property
    def is_perfect(self) -> bool:
        return not any(getattr(self, name) for name in _DIMENSIONS)

    @classmethod
    def preset(cls, grade: SensorGrade, seed: int = 0) -> Self:
        return cls.model_validate({**SENSOR_GRADES[grade], "seed": seed})


SENSOR_GRADES: dict[SensorGrade, dict[str, Any]] = {
    "perfect": {},
    "nav": {
        "gyro_bias": Quantity(value=1e-4, unit="deg/h"),
        "gyro_arw": Quantity(value=1e-4, unit="deg/rt-h"),
        "accel_bias": Quantity(value=1e-5, unit="m/s2"),
        "accel_vrw": Quantity(value=1e-6, unit="m/s2/rt-h"),
    },
    "high": {
        "gyro_bias": Quantity(value=1e-5, unit="deg/h"),
        "gyro_arw": Quantity(value=1e-5, unit="deg/rt-h"),
        "accel_bias": Quantity(value=1e-6, unit="m/s2"),
        "accel_vrw": Quantity(value=1e-7, unit="m/s2/rt-hz"),
    },
}
