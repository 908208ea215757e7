import pathlib
from typing import Annotated, Literal

import annotated_types
from pydantic import Field, field_validator

from .abstract import AbstractDTO
from .iteration import IterConfig
from .sensor import SensorSpec
from .trajectory import TrajectoryParams

__all__ = ("Algorithm", "ExperimentConfig", "ALGORITHMS")

Algorithm = Literal["inavfiter", "typical2", "improved2"]

ALGORITHMS: tuple[Algorithm, ...] = ("inavfiter", "typical2", "improved2")


class ExperimentConfig(AbstractDTO):
    """
    One simulation run: a flight profile, a sensor grade and the algorithms to
    compare over the same increment stream.

    Attributes:
        sensor_label: Name of the sensor grade, reported in the summary.
        dense: Also sample the iNavFIter series at every IMU sample time.
        dataset: Replay increments from this file instead of synthesizing them.
    """

    trajectory: TrajectoryParams = Field(default_factory=TrajectoryParams)
    sensors: SensorSpec = Field(default_factory=SensorSpec)
    sensor_label: str = "perfect"
    algorithms: Annotated[
        tuple[Algorithm, ...], annotated_types.MinLen(1)
    ] = ALGORITHMS
    iteration: IterConfig = Field(default_factory=IterConfig)
    damped: bool = False
    output_dir: pathlib.Path = pathlib.Path("out")
    emit_plots: bool = False
    dense: bool = False
    dataset: pathlib.Path | None = None

    @field_validator("algorithms")
    @classmethod
    def drop_duplicates(cls, value: tuple[Algorithm, ...]) -> tuple[Algorithm, ...]:
        return tuple(dict.fromkeys(value))
