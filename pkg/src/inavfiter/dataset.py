"""
Columnar text format for sensor streams.

A file starts with ``#``-prefixed header lines, one ``key=value`` per line,
followed by a ``#``-prefixed column line and one comma-separated row per
sample::

    # format=inavfiter-increments
    # version=1
    # rate=100
    # mode=coning
    # kind=increments
    # t,dtheta_x,dtheta_y,dtheta_z,dv_x,dv_y,dv_z
    0.01,...

``t`` is the end time of the sample period. Values are written with 17
significant digits, so a stream survives a write/read cycle bit for bit.
"""

import logging
import pathlib
from typing import Annotated, Literal

import annotated_types
import numpy as np
from pydantic import ValidationError

from .dto.abstract import AbstractDTO
from .dto.trajectory import FlightMode
from .exc import DatasetSyntaxError, Location, OutputError
from .imu import BatchKind, ImuBatch
from .util.model import convert_errors, format_errors

__all__ = ("DatasetHeader", "write_dataset", "read_dataset", "COLUMNS")

logger = logging.getLogger(__name__)

FORMAT_NAME = "inavfiter-increments"

COLUMNS: dict[BatchKind, tuple[str, ...]] = {
    "increments": ("t", "dtheta_x", "dtheta_y", "dtheta_z", "dv_x", "dv_y", "dv_z"),
    "rates": ("t", "omega_x", "omega_y", "omega_z", "f_x", "f_y", "f_z"),
}


class DatasetHeader(AbstractDTO):
    format: Literal["inavfiter-increments"] = FORMAT_NAME
    version: Annotated[int, annotated_types.Ge(1), annotated_types.Le(1)] = 1
    rate: Annotated[float, annotated_types.Gt(0)]
    mode: FlightMode
    kind: BatchKind = "increments"


def write_dataset(
    path: pathlib.Path, batch: ImuBatch, rate: float, mode: FlightMode
) -> None:
    header = DatasetHeader(rate=rate, mode=mode, kind=batch.kind)
    lines = ["%s=%s" % (key, value) for key, value in header.model_dump().items()]
    lines.append(",".join(COLUMNS[batch.kind]))
    rows = np.column_stack((batch.t_start + batch.times, batch.gyro, batch.accel))
    try:
        np.savetxt(path, rows, fmt="%.17g", delimiter=",", header="\n".join(lines))
    except OSError as ex:
        raise OutputError(str(ex), ctx=OutputError.Context(path=path)) from ex
    logger.debug("wrote %d samples to %s", batch.n_samples, path)


def _syntax_error(
    path: pathlib.Path, message: str, line: int | None = None
) -> DatasetSyntaxError:
    loc = Location(filename=path)
    if line is not None:
        loc["line"] = line
    return DatasetSyntaxError(message, ctx=DatasetSyntaxError.Context(loc=loc))


def read_dataset(path: pathlib.Path) -> tuple[DatasetHeader, ImuBatch]:
    """
    Load a stream written by :func:`write_dataset`.

    Raises:
        DatasetSyntaxError: The header is incomplete or invalid, a row does not
            hold seven numbers, or the time column is not uniformly spaced at the
            declared rate.
    """
    try:
        text = path.read_text()
    except OSError as ex:
        raise _syntax_error(path, str(ex)) from ex

    fields: dict[str, str] = {}
    columns: tuple[str, ...] | None = None
    data: list[str] = []
    first_data_line = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if data:
                raise _syntax_error(path, "Header line after data", lineno)
            entry = line[1:].strip()
            if "=" in entry:
                key, _, value = entry.partition("=")
                fields[key.strip()] = value.strip()
            else:
                columns = tuple(name.strip() for name in entry.split(","))
            continue
        if not data:
            first_data_line = lineno
        data.append(line)

    try:
        header = DatasetHeader.model_validate(fields)
    except ValidationError as ex:
        raise _syntax_error(path, format_errors(convert_errors(ex))) from ex

    if columns != COLUMNS[header.kind]:
        raise _syntax_error(
            path, "Expected columns %s" % ",".join(COLUMNS[header.kind])
        )
    if len(data) < 2:
        raise _syntax_error(path, "A dataset needs at least 2 samples")

    try:
        rows = np.loadtxt(data, delimiter=",", ndmin=2, dtype=np.float64)
    except ValueError as ex:
        raise _syntax_error(path, str(ex), first_data_line) from ex
    if rows.shape[1] != len(COLUMNS[header.kind]):
        raise _syntax_error(
            path,
            "Expected %d values per row, got %d"
            % (len(COLUMNS[header.kind]), rows.shape[1]),
            first_data_line,
        )

    period = 1.0 / header.rate
    t = rows[:, 0]
    if not np.allclose(np.diff(t), period, rtol=1e-9, atol=0.0):
        raise _syntax_error(
            path, "Time column is not uniformly spaced at %r Hz" % header.rate
        )

    t_start = float(t[0] - period)
    batch = ImuBatch(
        t_start=t_start,
        t_span=float(t[-1] - t_start),
        gyro=rows[:, 1:4],
        accel=rows[:, 4:7],
        kind=header.kind,
    )
    logger.debug("read %d samples from %s", batch.n_samples, path)
    return header, batch
