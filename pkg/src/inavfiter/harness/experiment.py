"""
Experiment driver: one shared sensor stream, several navigation algorithms.

The stream is synthesized (or replayed from a dataset) and corrupted once,
then every selected algorithm chains its update intervals over it in a worker
thread. Errors against the analytic truth are reported at the epochs where
both the iNavFIter intervals and the two-sample baseline intervals end.
"""

import asyncio
import dataclasses
import logging
import math
import pathlib
import threading
import time
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Any, Literal

import numpy as np
import numpy.typing as npt
from ironfence import Mutex

from ..baselines import LlNavState, improved_2sample_step, typical_2sample_step
from ..dataset import read_dataset
from ..dto.experiment import Algorithm, ExperimentConfig
from ..earth import WGS84, EarthModel
from ..exc import (
    ArgumentError,
    DatasetError,
    Location,
    NumericalError,
    OutputError,
    SingularityError,
)
from ..imu import ImuBatch
from ..solver import NavSolution, NavState, update_interval
from ..trajgen import damp_vertical, inject_errors, synth_stream, truth_state
from ..util.coro import gather_limited
from . import event
from .errors import ErrorRecord, compute_errors, error_rows
from .output import emit_summary, write_algorithm_outputs

__all__ = (
    "AlgorithmResult",
    "ExperimentSummary",
    "TraceRow",
    "report_block",
    "build_stream",
    "run_experiment",
    "run_experiment_sync",
)

logger = logging.getLogger(__name__)

FloatArray = npt.NDArray[np.float64]

Status = Literal["ok", "diverged"]

TraceRow = tuple[str, int, float]

# samples per baseline update interval
BASELINE_SAMPLES = 2

_BASELINE_STEPS = {
    "typical2": typical_2sample_step,
    "improved2": improved_2sample_step,
}


@dataclass(slots=True, eq=False)
class AlgorithmResult:
    """
    Outcome of one algorithm over the whole flight.

    Attributes:
        records: Errors at the common reporting epochs, starting at the initial
            epoch. A diverged run keeps the records up to the divergence.
        intervals: Update intervals completed.
        elapsed: Wall-clock seconds spent navigating.
        dense_records: Errors at every sample epoch (iNavFIter dense mode).
        trace: ``(process, iteration, value)`` rows of the first interval's
            functional iterations (iNavFIter only).
    """

    algorithm: Algorithm
    status: Status
    records: list[ErrorRecord]
    intervals: int
    elapsed: float
    message: str = ""
    dense_records: list[ErrorRecord] = field(default_factory=list)
    trace: tuple[TraceRow, ...] = ()

    def _channels(self) -> FloatArray:
        return error_rows(self.records)[:, 1:]

    @property
    def max_errors(self) -> FloatArray:
        """Largest absolute error per channel, in ``CSV_HEADER`` order."""
        rows = self._channels()
        if not rows.size:
            return np.full(8, np.nan)
        return np.max(np.abs(rows), axis=0)

    @property
    def final_errors(self) -> FloatArray:
        rows = self._channels()
        if not rows.size:
            return np.full(8, np.nan)
        return rows[-1]

    @property
    def max_we_pos_err(self) -> float:
        return float(self.max_errors[-1])


@dataclass(slots=True, eq=False)
class ExperimentSummary:
    config: ExperimentConfig
    results: list[AlgorithmResult]

    @property
    def diverged(self) -> bool:
        return any(r.status == "diverged" for r in self.results)

    def runtime_ratio(self) -> dict[Algorithm, float]:
        """Wall-clock time of each algorithm relative to the fastest one."""
        fastest = min((r.elapsed for r in self.results), default=0.0)
        return {
            r.algorithm: r.elapsed / fastest if fastest > 0.0 else math.nan
            for r in self.results
        }

    def result(self, algorithm: Algorithm) -> AlgorithmResult:
        for r in self.results:
            if r.algorithm == algorithm:
                return r
        raise KeyError(algorithm)


def report_block(cfg: ExperimentConfig) -> int:
    """Samples between two reporting epochs."""
    return math.lcm(cfg.iteration.n_samples, BASELINE_SAMPLES)


def _dataset_ctx(path: pathlib.Path) -> DatasetError.Context:
    return DatasetError.Context(loc=Location(filename=path))


def _load_dataset(cfg: ExperimentConfig, block: int) -> ImuBatch:
    assert cfg.dataset is not None
    header, batch = read_dataset(cfg.dataset)
    params = cfg.trajectory
    if header.mode != params.mode or not math.isclose(
        header.rate, params.sample_rate, rel_tol=1e-12
    ):
        raise DatasetError(
            "Dataset %s holds a %s flight at %r Hz, the experiment expects a %s "
            "flight at %r Hz"
            % (cfg.dataset, header.mode, header.rate, params.mode, params.sample_rate),
            ctx=_dataset_ctx(cfg.dataset),
        )
    total = batch.n_samples - batch.n_samples % block
    if total < block:
        raise DatasetError(
            "Dataset %s is shorter than one block of %d samples" % (cfg.dataset, block),
            ctx=_dataset_ctx(cfg.dataset),
        )
    if total != batch.n_samples:
        logger.info(
            "Dataset shortened from %d to %d samples to fit %d-sample blocks",
            batch.n_samples,
            total,
            block,
        )
        batch = batch.split(total)[0]
    return batch


def build_stream(cfg: ExperimentConfig, earth: EarthModel = WGS84) -> ImuBatch:
    """
    The sensor stream shared by every algorithm of ``cfg``.

    A replayed dataset is used as stored; a synthesized stream receives the
    sensor errors of ``cfg.sensors``.

    Raises:
        DatasetError: The dataset does not describe the configured flight.
    """
    block = report_block(cfg)
    if cfg.dataset is not None:
        return _load_dataset(cfg, block)
    return inject_errors(synth_stream(cfg.trajectory, block, earth), cfg.sensors)


@dataclass(slots=True)
class _Runner:
    cfg: ExperimentConfig
    batch: ImuBatch
    earth: EarthModel
    loop: asyncio.AbstractEventLoop
    observer: event.EventObserver[event.EventType] | None
    progress_interval: int
    stop: threading.Event = field(default_factory=threading.Event)

    def publish(self, ev: event.EventType) -> None:
        if self.observer is not None:
            asyncio.run_coroutine_threadsafe(self.observer.trigger(ev), self.loop)

    def _truth(self, states: list[Any]) -> list[LlNavState]:
        if not states:
            return []
        t = np.array([s.t for s in states])
        return truth_state(self.cfg.trajectory, t, self.earth).ll_states()

    def _errors(self, states: list[Any]) -> list[ErrorRecord]:
        return compute_errors(self._truth(states), states, self.earth)

    def _progress(self, algorithm: Algorithm, k: int, count: int, t: float) -> None:
        if (k + 1) % self.progress_interval == 0 or k + 1 == count:
            self.publish(event.AlgorithmProgressed(algorithm, k + 1, count, t))

    def inavfiter(self) -> AlgorithmResult:
        cfg = self.cfg
        n = cfg.iteration.n_samples
        per_report = report_block(cfg) // n
        intervals = self.batch.split(n)
        self.publish(event.AlgorithmStarted("inavfiter", len(intervals)))

        state = truth_state(cfg.trajectory, self.batch.t_start, self.earth).to_nav()
        reported, dense = [state], [state]
        trace: list[TraceRow] = []
        done, message = 0, ""
        status: Status = "ok"
        started = time.perf_counter()
        try:
            for k, sub in enumerate(intervals):
                if self.stop.is_set():
                    break
                solution = update_interval(
                    state, sub, cfg.iteration, self.earth, trace=k == 0
                )
                if k == 0:
                    trace = _trace_rows(solution)
                if cfg.dense:
                    q, v, p = solution.sample(sub.t_start + sub.times)
                    epochs = sub.t_start + sub.times
                    dense.extend(
                        NavState(q=q[j], v=v[j], p=p[j], t=float(epochs[j]))
                        for j in range(sub.n_samples)
                    )
                state = solution.end_state
                if cfg.damped:
                    state = damp_vertical(state, self.earth)
                _check_finite(state)
                done = k + 1
                if done % per_report == 0:
                    reported.append(state)
                self._progress("inavfiter", k, len(intervals), state.t)
        except (NumericalError, SingularityError) as ex:
            status, message = "diverged", str(ex)
        elapsed = time.perf_counter() - started

        return AlgorithmResult(
            algorithm="inavfiter",
            status=status,
            records=self._errors(reported),
            intervals=done,
            elapsed=elapsed,
            message=message,
            dense_records=self._errors(dense) if cfg.dense else [],
            trace=tuple(trace),
        )

    def baseline(self, algorithm: Algorithm) -> AlgorithmResult:
        step = _BASELINE_STEPS[algorithm]
        per_report = report_block(self.cfg) // BASELINE_SAMPLES
        intervals = self.batch.split(BASELINE_SAMPLES)
        self.publish(event.AlgorithmStarted(algorithm, len(intervals)))

        state = truth_state(self.cfg.trajectory, self.batch.t_start, self.earth).to_ll()
        reported = [state]
        done, message = 0, ""
        status: Status = "ok"
        started = time.perf_counter()
        try:
            for k, sub in enumerate(intervals):
                if self.stop.is_set():
                    break
                state = step(
                    state,
                    sub.gyro[0],
                    sub.gyro[1],
                    sub.accel[0],
                    sub.accel[1],
                    sub.t_span,
                    self.earth,
                )
                # pin the epoch to the interval grid
                state = dataclasses.replace(state, t=sub.t_start + sub.t_span)
                if self.cfg.damped:
                    state = damp_vertical(state, self.earth)
                _check_finite(state)
                done = k + 1
                if done % per_report == 0:
                    reported.append(state)
                self._progress(algorithm, k, len(intervals), state.t)
        except (NumericalError, SingularityError) as ex:
            status, message = "diverged", str(ex)
        elapsed = time.perf_counter() - started

        return AlgorithmResult(
            algorithm=algorithm,
            status=status,
            records=self._errors(reported),
            intervals=done,
            elapsed=elapsed,
            message=message,
        )

    def target(self, algorithm: Algorithm) -> Callable[[], AlgorithmResult]:
        if algorithm == "inavfiter":
            return self.inavfiter
        return lambda: self.baseline(algorithm)


def _trace_rows(solution: NavSolution) -> list[TraceRow]:
    rows: list[TraceRow] = []
    for process, report in (
        ("attitude", solution.attitude),
        ("velpos", solution.velpos),
    ):
        rows.extend(
            (process, i, float(d)) for i, d in enumerate(report.discrepancies, 1)
        )
    rows.extend(
        ("gravity", i, float(e))
        for i, e in enumerate(solution.velpos.gravity_errors, 1)
    )
    return rows


def _check_finite(state: NavState | LlNavState) -> None:
    if not all(np.all(np.isfinite(x)) for x in (state.q, state.v, state.p)):
        raise NumericalError("Non-finite navigation state at t=%r" % state.t)


async def _run_algorithm(
    runner: _Runner, algorithm: Algorithm, directory: Mutex[Any]
) -> AlgorithmResult:
    logger.info("starting %s", algorithm)
    try:
        result = await asyncio.to_thread(runner.target(algorithm))
    except asyncio.CancelledError:
        runner.stop.set()
        raise

    if result.status == "diverged":
        logger.warning(
            "%s diverged after %d intervals: %s",
            algorithm,
            result.intervals,
            result.message,
        )
        if runner.observer is not None:
            await runner.observer.trigger(
                event.AlgorithmDiverged(algorithm, _last_epoch(result), result.message)
            )
    else:
        logger.info("%s finished in %.3f s", algorithm, result.elapsed)
        if runner.observer is not None:
            await runner.observer.trigger(
                event.AlgorithmFinished(algorithm, result.elapsed)
            )

    async with directory.lock() as path:
        await asyncio.to_thread(write_algorithm_outputs, path, result)
    return result


def _last_epoch(result: AlgorithmResult) -> float:
    return result.records[-1].t if result.records else 0.0


async def run_experiment(
    cfg: ExperimentConfig,
    observer: event.EventObserver[event.EventType] | None = None,
    max_workers: int = 0,
    progress_interval: int = 250,
    earth: EarthModel = WGS84,
) -> ExperimentSummary:
    """
    Navigate the configured flight with every selected algorithm and write
    the outputs to ``cfg.output_dir``.

    A diverging algorithm is reported with ``status="diverged"``; the others
    run to the end.

    Raises:
        ArgumentError: A two-sample baseline was asked to replay sampled rates.
        DatasetError: The replayed dataset does not fit the configuration.
        OutputError: An output file could not be written.
    """
    if progress_interval < 1:
        raise ArgumentError("Progress interval must be positive")

    batch = await asyncio.to_thread(build_stream, cfg, earth)
    if batch.kind != "increments" and any(
        a in _BASELINE_STEPS for a in cfg.algorithms
    ):
        raise ArgumentError("Two-sample algorithms need an increment stream")
    logger.info(
        "running %s over %d samples (%s flight, %s sensors)",
        ", ".join(cfg.algorithms),
        batch.n_samples,
        cfg.trajectory.mode,
        cfg.sensor_label,
    )

    try:
        cfg.output_dir.mkdir(parents=True, exist_ok=True)
    except OSError as ex:
        raise OutputError(str(ex), ctx=OutputError.Context(path=cfg.output_dir)) from ex
    directory = Mutex(cfg.output_dir)
    runner = _Runner(
        cfg=cfg,
        batch=batch,
        earth=earth,
        loop=asyncio.get_running_loop(),
        observer=observer,
        progress_interval=progress_interval,
    )

    results = await gather_limited(
        (_run_algorithm(runner, algorithm, directory) for algorithm in cfg.algorithms),
        max_workers,
    )
    summary = ExperimentSummary(config=cfg, results=results)
    async with directory.lock() as path:
        await emit_summary(summary, path)
    logger.info("experiment finished, outputs in %s", cfg.output_dir)
    return summary


def run_experiment_sync(cfg: ExperimentConfig, **kwargs: Any) -> ExperimentSummary:
    return asyncio.run(run_experiment(cfg, **kwargs))
