import pathlib

import click

from ...dataset import write_dataset
from ...dto import TrajectoryParams
from ...imu import BatchKind
from ...trajgen import inject_errors, synth_stream
from ..exc import handle_exception
from ..options import flight_options, resolve_sensors, trajectory_payload

__all__ = ["export_dataset"]


@click.command("export-dataset")
@flight_options
@click.option(
    "--kind",
    type=click.Choice(["increments", "rates"]),
    default="increments",
    show_default=True,
    help="Export integrated increments or rates sampled at the sample ends.",
)
@click.option(
    "--block",
    type=click.IntRange(min=2),
    default=2,
    show_default=True,
    help="Shorten the stream to a whole number of blocks of this many samples.",
)
@click.option(
    "--out",
    type=click.Path(dir_okay=False, writable=True, path_type=pathlib.Path),
    required=True,
    help="Destination file.",
)
def export_dataset(
    trajectory: str,
    duration: float | None,
    rate: float | None,
    sensors: str,
    seed: int,
    kind: BatchKind,
    block: int,
    out: pathlib.Path,
) -> None:
    """
    Write the synthesized, error-injected sensor stream of a reference flight
    in the columnar dataset format.

    Examples:

    \b
      # Navigation-grade increments of a 4000 s coning flight
      $ inavfiter export-dataset --duration 4000 --sensors nav --seed 7 \\
          --out coning_nav.csv
    """
    try:
        params = TrajectoryParams.model_validate(
            trajectory_payload(trajectory, duration, rate)
        )
        spec, _ = resolve_sensors(sensors, seed)
        batch = inject_errors(synth_stream(params, block, kind=kind), spec)
        write_dataset(out, batch, params.sample_rate, params.mode)
    except Exception as ex:
        handle_exception(ex)

    click.echo("Wrote %d samples to %s" % (batch.n_samples, out))
