import functools
import pathlib
from typing import Any, Callable, TypeVar, cast

import click

from ..dto import SENSOR_GRADES, SensorGrade, SensorSpec
from .exc import CLIError
from .manifest import load_sensor_spec

__all__ = ("flight_options", "SensorsParam", "resolve_sensors", "trajectory_payload")

F = TypeVar("F", bound=Callable[..., Any])

FILE_PREFIX = "file:"


class SensorsParam(click.ParamType):
    """``perfect``, ``nav``, ``high`` or ``file:PATH`` to a YAML sensor spec."""

    name = "sensors"

    def convert(
        self, value: Any, param: click.Parameter | None, ctx: click.Context | None
    ) -> str:
        if not isinstance(value, str):
            self.fail("Expected a string, got %r" % value, param, ctx)
        if value in SENSOR_GRADES:
            return value
        if value.startswith(FILE_PREFIX) and len(value) > len(FILE_PREFIX):
            return value
        self.fail(
            "Expected one of %s or file:PATH, got %r"
            % (", ".join(SENSOR_GRADES), value),
            param,
            ctx,
        )


def resolve_sensors(value: str, seed: int) -> tuple[SensorSpec, str]:
    """The sensor spec named by a ``--sensors`` value and its summary label."""
    if value.startswith(FILE_PREFIX):
        path = pathlib.Path(value[len(FILE_PREFIX) :])
        if not path.is_file():
            raise CLIError("Sensor spec %r does not exist" % str(path))
        return load_sensor_spec(path, seed), path.stem
    return SensorSpec.preset(cast(SensorGrade, value), seed), value


def trajectory_payload(
    trajectory: str, duration: float | None, rate: float | None
) -> dict[str, Any]:
    payload: dict[str, Any] = {"mode": trajectory}
    if duration is not None:
        payload["duration"] = duration
    if rate is not None:
        payload["sampleRate"] = rate
    return payload


def flight_options(fn: F) -> F:
    """Options shared by every command that synthesizes a sensor stream."""
    options = (
        click.option(
            "--trajectory",
            type=click.Choice(["coning", "level"]),
            default="coning",
            show_default=True,
            help="Reference flight: coning attitude or constant level attitude.",
        ),
        click.option(
            "--duration",
            type=click.FloatRange(min=0, min_open=True),
            help="Flight duration in seconds [default: 100].",
        ),
        click.option(
            "--rate",
            type=click.FloatRange(min=0, min_open=True),
            help="IMU sample rate in Hz [default: 100].",
        ),
        click.option(
            "--sensors",
            type=SensorsParam(),
            default="perfect",
            show_default=True,
            help="Sensor grade (perfect, nav, high) or file:PATH to a YAML spec.",
        ),
        click.option(
            "--seed",
            type=click.IntRange(min=0, max=2**64 - 1),
            default=0,
            show_default=True,
            help="Seed of the sensor noise generator.",
        ),
    )
    return functools.reduce(lambda f, option: option(f), reversed(options), fn)
