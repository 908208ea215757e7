"""
Files written by an experiment:

* ``<algorithm>.csv``: errors at the reporting epochs, ``CSV_HEADER`` columns;
* ``inavfiter_dense.csv``: errors at every sample epoch (dense mode only);
* ``inavfiter_convergence.csv``: functional-iteration trace of the first
  interval;
* ``summary.txt``: one ``algo,flight,sensor,max_we_pos_err_m`` line per
  algorithm, a blank line, then a table of max and final errors per channel;
* ``panels.gp`` and, with matplotlib installed, ``panels.svg`` when plots are
  requested.
"""

import asyncio
import logging
import pathlib
from collections.abc import Sequence
from typing import TYPE_CHECKING

import jinja2
import numpy as np

from ..exc import OutputError
from .errors import CSV_HEADER, ErrorRecord, error_rows

if TYPE_CHECKING:
    from .experiment import AlgorithmResult, ExperimentSummary

__all__ = (
    "CHANNELS",
    "SUMMARY_FILE",
    "write_records",
    "write_convergence",
    "write_algorithm_outputs",
    "summary_lines",
    "summary_table",
    "format_summary",
    "render_plot_script",
    "render_svg",
    "emit_summary",
    "emit_outputs",
)

logger = logging.getLogger(__name__)

CHANNELS: tuple[str, ...] = tuple(CSV_HEADER.split(",")[1:])

SUMMARY_FILE = "summary.txt"
DENSE_FILE = "inavfiter_dense.csv"
CONVERGENCE_FILE = "inavfiter_convergence.csv"
CONVERGENCE_HEADER = "process,iteration,discrepancy"
PLOT_SCRIPT = "panels.gp"
PLOT_SVG = "panels.svg"

_env = jinja2.Environment(
    loader=jinja2.PackageLoader("inavfiter.harness"),
    enable_async=True,
    keep_trailing_newline=True,
)


def _output_error(path: pathlib.Path, ex: OSError) -> OutputError:
    return OutputError(str(ex), ctx=OutputError.Context(path=path))


def write_records(path: pathlib.Path, records: Sequence[ErrorRecord]) -> None:
    """Write ``records`` as CSV; an empty sequence yields the header only."""
    try:
        np.savetxt(
            path,
            error_rows(records),
            fmt="%.17g",
            delimiter=",",
            header=CSV_HEADER,
            comments="",
        )
    except OSError as ex:
        raise _output_error(path, ex) from ex


def write_convergence(
    path: pathlib.Path, trace: Sequence[tuple[str, int, float]]
) -> None:
    lines = [CONVERGENCE_HEADER]
    lines.extend("%s,%d,%.17g" % row for row in trace)
    try:
        path.write_text("\n".join(lines) + "\n")
    except OSError as ex:
        raise _output_error(path, ex) from ex


def write_algorithm_outputs(
    directory: pathlib.Path, result: "AlgorithmResult"
) -> list[pathlib.Path]:
    paths = [directory / ("%s.csv" % result.algorithm)]
    write_records(paths[0], result.records)
    if result.dense_records:
        paths.append(directory / DENSE_FILE)
        write_records(paths[-1], result.dense_records)
    if result.trace:
        paths.append(directory / CONVERGENCE_FILE)
        write_convergence(paths[-1], result.trace)
    logger.debug("wrote %s", ", ".join(p.name for p in paths))
    return paths


def summary_lines(summary: "ExperimentSummary") -> list[str]:
    """The ``algo,flight,sensor,max_we_pos_err_m`` contract lines."""
    cfg = summary.config
    return [
        "%s,%s,%s,%.6g"
        % (r.algorithm, cfg.trajectory.mode, cfg.sensor_label, r.max_we_pos_err)
        for r in summary.results
    ]


def summary_table(summary: "ExperimentSummary") -> tuple[list[str], list[list[str]]]:
    """Column names and rows of the error table, as strings."""
    columns = ["algo", "stat", *CHANNELS, "status", "intervals", "wall_s", "ratio"]
    ratio = summary.runtime_ratio()
    rows: list[list[str]] = []
    for r in summary.results:
        for stat, values in (("max", r.max_errors), ("final", r.final_errors)):
            rows.append(
                [
                    r.algorithm,
                    stat,
                    *("%.4e" % x for x in values),
                    r.status,
                    str(r.intervals),
                    "%.3f" % r.elapsed,
                    "%.2f" % ratio[r.algorithm],
                ]
            )
    return columns, rows


def format_summary(summary: "ExperimentSummary") -> str:
    columns, rows = summary_table(summary)
    widths = [
        max(len(c), *(len(row[i]) for row in rows)) if rows else len(c)
        for i, c in enumerate(columns)
    ]
    table = [
        "  ".join(cell.ljust(w) for cell, w in zip(line, widths)).rstrip()
        for line in (columns, *rows)
    ]
    return "\n".join([*summary_lines(summary), "", *table]) + "\n"


async def render_plot_script(
    summary: "ExperimentSummary", directory: pathlib.Path
) -> pathlib.Path:
    """Render the gnuplot script comparing all algorithms, one panel per channel."""
    cfg = summary.config
    text = await _env.get_template("panels.gp.j2").render_async(
        title="%s flight, %s sensors" % (cfg.trajectory.mode, cfg.sensor_label),
        output=PLOT_SVG,
        algorithms=[r.algorithm for r in summary.results],
        channels=[(name, col) for col, name in enumerate(CHANNELS, start=2)],
    )
    path = directory / PLOT_SCRIPT
    try:
        path.write_text(text)
    except OSError as ex:
        raise _output_error(path, ex) from ex
    return path


def render_svg(
    summary: "ExperimentSummary", directory: pathlib.Path
) -> pathlib.Path | None:
    """Draw the same panels with matplotlib; ``None`` when it is not installed."""
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        logger.warning("matplotlib is not installed, skipping %s", PLOT_SVG)
        return None

    fig, axes = plt.subplots(4, 2, figsize=(11, 12), sharex=True)
    for r in summary.results:
        rows = error_rows(r.records)
        for i, ax in enumerate(axes.flat):
            ax.plot(rows[:, 0], rows[:, i + 1], label=r.algorithm, linewidth=0.8)
    for ax, name in zip(axes.flat, CHANNELS):
        ax.set_title(name, fontsize="small")
        ax.grid(True, linewidth=0.3)
    for ax in axes[-1]:
        ax.set_xlabel("t, s")
    axes.flat[0].legend(fontsize="small")
    fig.tight_layout()

    path = directory / PLOT_SVG
    try:
        fig.savefig(path, format="svg")
    except OSError as ex:
        raise _output_error(path, ex) from ex
    finally:
        plt.close(fig)
    return path


async def emit_summary(
    summary: "ExperimentSummary", directory: pathlib.Path
) -> list[pathlib.Path]:
    """Write ``summary.txt`` and, when requested, the plot files."""
    path = directory / SUMMARY_FILE
    try:
        path.write_text(format_summary(summary))
    except OSError as ex:
        raise _output_error(path, ex) from ex
    paths = [path]

    if summary.config.emit_plots:
        paths.append(await render_plot_script(summary, directory))
        svg = await asyncio.to_thread(render_svg, summary, directory)
        if svg is not None:
            paths.append(svg)
    return paths


async def emit_outputs(
    summary: "ExperimentSummary", directory: pathlib.Path | None = None
) -> list[pathlib.Path]:
    """
    Write every output file of a finished experiment.

    Raises:
        OutputError: A file could not be written.
    """
    directory = directory or summary.config.output_dir
    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as ex:
        raise _output_error(directory, ex) from ex
    paths: list[pathlib.Path] = []
    for result in summary.results:
        paths.extend(write_algorithm_outputs(directory, result))
    paths.extend(await emit_summary(summary, directory))
    return paths
