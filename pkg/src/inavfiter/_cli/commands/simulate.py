import asyncio
import pathlib
import signal
from contextlib import suppress
from dataclasses import dataclass, field
from typing import Any, Sequence, cast

import click
import pydantic
from rich.console import Console, Group, RenderableType
from rich.spinner import Spinner
from rich.table import Table
from rich.text import Text

from ... import _conf
from ...dto import ALGORITHMS, Algorithm, ExperimentConfig
from ...harness import event
from ...harness.experiment import ExperimentSummary, run_experiment
from ...harness.output import summary_table
from ...util.model import convert_errors, format_errors
from ..exc import EXIT_DIVERGED, CLIError, handle_exception
from ..manifest import load_manifest
from ..options import flight_options, resolve_sensors, trajectory_payload
from ..workflow import AbstractRenderer, LiveView, elapsed_text

__all__ = ["simulate"]

SHUTDOWN_SIGNALS = (signal.SIGINT, signal.SIGTERM)


@dataclass(slots=True)
class AlgorithmLine:
    algorithm: Algorithm
    intervals: int = 0
    done: int = 0
    t: float = 0.0
    outcome: str = ""
    style: str = ""


@dataclass(slots=True)
class ProgressRenderer(AbstractRenderer):
    _lines: dict[Algorithm, AlgorithmLine] = field(default_factory=dict)

    def line(self, algorithm: Algorithm) -> AlgorithmLine:
        return self._lines.setdefault(algorithm, AlgorithmLine(algorithm))

    def compose_renderable(self) -> RenderableType:
        return Group(*(self._compose_line(line) for line in self._lines.values()))

    def _compose_line(self, line: AlgorithmLine) -> RenderableType:
        text = "%-10s t=%.2f s (%d/%d intervals)" % (
            line.algorithm,
            line.t,
            line.done,
            line.intervals,
        )
        if line.outcome:
            return Text("=> %s %s" % (text, line.outcome), style=line.style)
        return Spinner("dots", text=Text(text, style="steel_blue3"))


def parse_algorithms(
    ctx: click.Context, param: click.Parameter, value: str
) -> tuple[Algorithm, ...]:
    names = tuple(name.strip() for name in value.split(",") if name.strip())
    unknown = [name for name in names if name not in ALGORITHMS]
    if unknown or not names:
        raise click.BadParameter(
            "Expected a comma-separated subset of %s, got %r"
            % (",".join(ALGORITHMS), value)
        )
    return cast(tuple[Algorithm, ...], names)


def build_config(
    settings: _conf.Settings,
    manifest: pathlib.Path | None,
    *,
    trajectory: str,
    duration: float | None,
    rate: float | None,
    sensors: str,
    seed: int,
    samples_per_update: int | None,
    algorithms: tuple[Algorithm, ...],
    damped: bool,
    out: pathlib.Path | None,
    emit_plots: bool,
    dense: bool,
    order: str | None,
    dataset: pathlib.Path | None,
) -> ExperimentConfig:
    """Experiment from command-line flags, overridden by the manifest if any."""
    spec, label = resolve_sensors(sensors, seed)

    if samples_per_update is None:
        iteration = settings.iteration.model_dump(by_alias=True, exclude_unset=True)
    else:
        # keep the settings that do not depend on the sample count
        iteration = settings.iteration.model_dump(
            by_alias=True, include={"m_g", "nodes", "max_iter", "tol", "order"}
        )
        iteration["nSamples"] = samples_per_update
    if order is not None:
        iteration["order"] = order

    payload: dict[str, Any] = {
        "trajectory": trajectory_payload(trajectory, duration, rate),
        "sensors": spec.model_dump(by_alias=True),
        "sensorLabel": label,
        "algorithms": algorithms,
        "iteration": iteration,
        "damped": damped,
        "outputDir": out if out is not None else settings.output_dir,
        "emitPlots": emit_plots,
        "dense": dense,
        "dataset": dataset,
    }
    if manifest is not None:
        return load_manifest(manifest, payload)
    try:
        return ExperimentConfig.model_validate(payload)
    except pydantic.ValidationError as ex:
        raise CLIError(
            "Invalid experiment.\n\n%s" % format_errors(convert_errors(ex))
        ) from ex


def print_summary(summary: ExperimentSummary) -> None:
    columns, rows = summary_table(summary)
    table = Table(*columns, title="Errors (max and final per channel)")
    for row in rows:
        style = "yellow" if row[columns.index("status")] == "diverged" else None
        table.add_row(*row, style=style)
    Console().print(table)


async def async_simulate(
    cfg: ExperimentConfig,
    settings: _conf.Settings,
    view: LiveView,
    renderer: ProgressRenderer,
) -> ExperimentSummary:
    observer = event.EventObserver[event.EventType]()

    async def on_started(ev: event.AlgorithmStarted) -> None:
        renderer.line(ev.algorithm).intervals = ev.intervals

    async def on_progressed(ev: event.AlgorithmProgressed) -> None:
        line = renderer.line(ev.algorithm)
        line.done, line.intervals, line.t = ev.interval, ev.intervals, ev.t

    async def on_finished(ev: event.AlgorithmFinished) -> None:
        line = renderer.line(ev.algorithm)
        line.outcome, line.style = "done in %s" % elapsed_text(ev.elapsed), ""

    async def on_diverged(ev: event.AlgorithmDiverged) -> None:
        line = renderer.line(ev.algorithm)
        line.outcome, line.style = "DIVERGED at t=%.2f s" % ev.t, "yellow"

    observer.register((event.AlgorithmStarted,), on_started)
    observer.register((event.AlgorithmProgressed,), on_progressed)
    observer.register((event.AlgorithmFinished,), on_finished)
    observer.register((event.AlgorithmDiverged,), on_diverged)

    for algorithm in cfg.algorithms:
        renderer.line(algorithm)
    view.start()

    return await run_experiment(
        cfg,
        observer=observer,
        max_workers=settings.max_workers,
        progress_interval=settings.progress_interval,
    )


@click.command()
@flight_options
@click.option(
    "--samples-per-update",
    type=click.IntRange(min=2),
    help="IMU samples per iNavFIter update interval (N) [default: 8].",
)
@click.option(
    "--algorithms",
    default=",".join(ALGORITHMS),
    show_default=True,
    callback=parse_algorithms,
    help="Comma-separated algorithms to compare.",
)
@click.option(
    "--damped", is_flag=True, help="Zero vertical velocity and height per interval."
)
@click.option(
    "--out",
    type=click.Path(file_okay=False, path_type=pathlib.Path),
    help="Output directory [default: outputDir setting].",
)
@click.option("--emit-plots", is_flag=True, help="Write a gnuplot script and SVG.")
@click.option(
    "--dense", is_flag=True, help="Also report iNavFIter errors at every sample."
)
@click.option(
    "--order",
    type=click.Choice(["standard", "swapped"]),
    help="Order of the velocity and position updates.",
)
@click.option(
    "--manifest",
    type=click.Path(dir_okay=False, exists=True, readable=True, path_type=pathlib.Path),
    help="YAML experiment manifest; its values override the flags.",
)
@click.option(
    "--dataset",
    type=click.Path(dir_okay=False, exists=True, readable=True, path_type=pathlib.Path),
    help="Replay a stored increment stream instead of synthesizing one.",
)
@click.pass_context
def simulate(
    ctx: click.Context,
    manifest: pathlib.Path | None,
    **flags: Any,
) -> None:
    """
    Navigate a reference flight with iNavFIter and the two-sample baselines and
    write the error time series and a summary.

    Examples:

    \b
      # Coning flight with perfect sensors, all algorithms
      $ inavfiter simulate --duration 100 --out out/coning
    \b
      # Navigation-grade sensors with vertical damping
      $ inavfiter simulate --sensors nav --damped --seed 7 --out out/nav
    \b
      # Level flight, baselines only, with plots
      $ inavfiter simulate --trajectory level --algorithms typical2,improved2 \\
          --emit-plots
    """
    if not (settings := ctx.find_object(_conf.Settings)):
        raise RuntimeError("Configuration not found")

    ev_loop = asyncio.new_event_loop()
    renderer = ProgressRenderer()
    view = LiveView("Running experiment", renderer)
    main_task: asyncio.Task[ExperimentSummary] | None = None

    def request_shutdown() -> None:
        click.secho("\nShutting down, please wait...", fg="yellow")
        if main_task is not None:
            main_task.cancel()

    for sig in SHUTDOWN_SIGNALS:
        with suppress(NotImplementedError, RuntimeError, ValueError):
            ev_loop.add_signal_handler(sig, request_shutdown)

    try:
        cfg = build_config(settings, manifest, **flags)
        main_task = ev_loop.create_task(async_simulate(cfg, settings, view, renderer))
        summary = ev_loop.run_until_complete(main_task)
    except asyncio.CancelledError:
        view.stop("aborted")
        raise click.Abort()
    except Exception as ex:
        view.stop("failed")
        handle_exception(ex)
    finally:
        for sig in SHUTDOWN_SIGNALS:
            with suppress(NotImplementedError, RuntimeError, ValueError):
                ev_loop.remove_signal_handler(sig)
        view.stop("finished")
        _shutdown(ev_loop)

    print_summary(summary)
    click.echo("Outputs written to %s" % cfg.output_dir)

    if summary.diverged:
        raise CLIError(
            "Diverged: %s"
            % ", ".join(r.algorithm for r in summary.results if r.status == "diverged"),
            exit_code=EXIT_DIVERGED,
        )


def _shutdown(ev_loop: asyncio.AbstractEventLoop) -> None:
    tasks: Sequence[asyncio.Task[Any]] = [
        task for task in asyncio.all_tasks(ev_loop) if not task.done()
    ]
    for task in tasks:
        task.cancel()
    with suppress(asyncio.CancelledError):
        ev_loop.run_until_complete(asyncio.gather(*tasks, return_exceptions=True))
    ev_loop.run_until_complete(ev_loop.shutdown_asyncgens())
    ev_loop.run_until_complete(ev_loop.shutdown_default_executor())
    ev_loop.close()
