"""
Earth-frame navigation by Chebyshev fitting and functional iteration.

Over one update interval the gyro and accelerometer samples are fitted by
Chebyshev series, then the attitude quaternion ``q_e^b`` is obtained by Picard
iteration of ``2 qdot = q o omega_ib^b - omega_ie^e o q``. Only once the
attitude has converged are velocity and position iterated, using the integral
of the specific force rotated by the (unnormalized) attitude series.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt

from .chebyshev import (
    ChebSeries,
    coefficient_discrepancy,
    fit_from_increments,
    fit_from_samples,
    indefinite_integral,
    interp_at_cosine_nodes,
    multiply,
    series_eval,
    truncate,
)
from .dto.iteration import IterConfig
from .earth import WGS84, EarthModel, earth_rate_e, gravity_ecef
from .exc import (
    ArgumentError,
    DivergenceError,
    NumericalError,
    TimestampMismatchError,
)
from .geomath import (
    IDENTITY,
    Quat,
    Vec3,
    principal_angle,
    pure,
    quat_conj,
    quat_exp,
    quat_mul,
)
from .imu import ImuBatch

__all__ = (
    "NavState",
    "IterationReport",
    "NavSolution",
    "ReducedConfigComparison",
    "attitude_iterate",
    "transformed_force_integral",
    "gravity_approx",
    "velpos_iterate",
    "update_interval",
    "reduced_config_check",
)

logger = logging.getLogger(__name__)

FloatArray = npt.NDArray[np.float64]

# points used to measure the gravity approximation error in traces
GRAVITY_PROBES = 20

# allowed deviation of a state quaternion from unit norm
QUAT_NORM_TOL = 1e-9


@dataclass(frozen=True, slots=True, eq=False)
class NavState:
    """
    Earth-frame navigation state at epoch ``t``.

    Attributes:
        q: Attitude quaternion ``q_e^b`` (body to Earth frame), unit norm within
            ``QUAT_NORM_TOL`` when finite.
        v: Ground velocity in the Earth frame, m/s.
        p: ECEF position, m.
        t: Epoch, s.
    """

    q: Quat
    v: Vec3
    p: FloatArray
    t: float = 0.0

    def __post_init__(self) -> None:
        for name in ("q", "v", "p"):
            arr = np.array(getattr(self, name), dtype=np.float64)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        norm = float(np.linalg.norm(self.q))
        # non-finite states are left to the caller to report as divergence
        if math.isfinite(norm) and abs(norm - 1.0) > QUAT_NORM_TOL:
            raise ArgumentError(
                "Attitude quaternion must have unit norm, got |q|=%r" % norm
            )


@dataclass(frozen=True, slots=True)
class IterationReport:
    """
    Diagnostics of one functional iteration.

    Attributes:
        iterations: Number of iterates computed.
        converged: Whether the discrepancy dropped below the threshold before the
            iteration cap.
        discrepancies: Coefficient discrepancy after each iteration.
        gravity_errors: Max-norm error of the gravity series against direct
            evaluation, per iteration. Only filled when tracing is requested.
    """

    iterations: int
    converged: bool
    discrepancies: tuple[float, ...]
    gravity_errors: tuple[float, ...] = field(default=())


@dataclass(frozen=True, slots=True, eq=False)
class NavSolution:
    """Attitude, velocity and position over a whole update interval."""

    q_series: ChebSeries
    v_series: ChebSeries
    p_series: ChebSeries
    attitude: IterationReport
    velpos: IterationReport
    start: NavState
    end_state: NavState

    @property
    def iterations_used(self) -> dict[str, int]:
        return {
            "attitude": self.attitude.iterations,
            "velpos": self.velpos.iterations,
        }

    @property
    def converged(self) -> dict[str, bool]:
        return {"attitude": self.attitude.converged, "velpos": self.velpos.converged}

    def sample(self, t: npt.ArrayLike) -> tuple[FloatArray, FloatArray, FloatArray]:
        """
        Attitude, velocity and position at absolute epochs ``t`` inside the
        interval, each with one row per epoch.
        """
        span = self.q_series.t_span
        tau = 2.0 * (np.atleast_1d(np.asarray(t, dtype=np.float64)) - self.start.t)
        tau = tau / span - 1.0
        return (
            series_eval(self.q_series, tau),
            series_eval(self.v_series, tau),
            series_eval(self.p_series, tau),
        )


def _pure_series(s: ChebSeries) -> ChebSeries:
    return ChebSeries(pure(s.coeffs), s.t_span)


def _diverged(process: str, iteration: int, ex: Exception) -> DivergenceError:
    return DivergenceError(
        str(ex), ctx=DivergenceError.Context(process=process, iteration=iteration)
    )


def attitude_iterate(
    q0: npt.ArrayLike,
    omega_series: ChebSeries,
    omega_e: npt.ArrayLike,
    cfg: IterConfig,
    initial: ChebSeries | None = None,
) -> tuple[ChebSeries, IterationReport]:
    """
    Picard iteration of the Earth-frame quaternion kinematics.

    Args:
        q0: Attitude at the interval start; anchors every iterate.
        omega_series: Fitted body angular rate ``omega_ib^b``, rad/s.
        omega_e: Earth rotation vector in the Earth frame, rad/s.
        cfg: Truncation degree, iteration cap and threshold.
        initial: First iterate; the constant ``q0`` when omitted.
    """
    t_span = omega_series.t_span
    anchor = ChebSeries.constant(q0, t_span)
    omega_q = _pure_series(omega_series)
    earth_q = pure(np.asarray(omega_e, dtype=np.float64))
    current = initial if initial is not None else anchor
    discrepancies: list[float] = []

    for iteration in range(1, cfg.iteration_cap + 1):
        with np.errstate(over="ignore", invalid="ignore"):
            try:
                body = multiply(current, omega_q, quat_mul)
                frame = ChebSeries(quat_mul(earth_q, current.coeffs), t_span)
                increment = indefinite_integral(body - frame) * (0.25 * t_span)
                updated = truncate(anchor + increment, cfg.m_q)
            except ArgumentError as ex:
                raise _diverged("attitude", iteration, ex) from ex
        discrepancies.append(coefficient_discrepancy(updated, current))
        current = updated
        if discrepancies[-1] < cfg.tol:
            return current, IterationReport(iteration, True, tuple(discrepancies))

    return current, IterationReport(len(discrepancies), False, tuple(discrepancies))


def transformed_force_integral(
    q_series: ChebSeries, f_series: ChebSeries
) -> ChebSeries:
    """
    Series of ``int_{-1}^{tau} q o f o q* dtau'`` at full degree
    ``2 m_q + n_f + 1``. The attitude series is used as is, without
    normalization.
    """
    rotated = multiply(
        multiply(q_series, _pure_series(f_series), quat_mul),
        ChebSeries(quat_conj(q_series.coeffs), q_series.t_span),
        quat_mul,
    )
    integral = indefinite_integral(rotated)
    return ChebSeries(integral.coeffs[:, 1:], q_series.t_span)


def gravity_approx(
    p_series: ChebSeries, cfg: IterConfig, earth: EarthModel = WGS84
) -> ChebSeries:
    """Degree ``m_g`` series of the Earth-frame gravity along ``p_series``."""
    return interp_at_cosine_nodes(
        lambda tau: gravity_ecef(series_eval(p_series, tau), earth),
        cfg.m_g,
        cfg.nodes,
        p_series.t_span,
    )


def _gravity_error(
    gamma: ChebSeries, p_series: ChebSeries, earth: EarthModel
) -> float:
    probes = np.cos(np.linspace(0.0, math.pi, GRAVITY_PROBES))
    direct = gravity_ecef(series_eval(p_series, probes), earth)
    return float(np.max(np.abs(series_eval(gamma, probes) - direct)))


def velpos_iterate(
    v0: npt.ArrayLike,
    p0: npt.ArrayLike,
    i_f: ChebSeries,
    omega_e: npt.ArrayLike,
    cfg: IterConfig,
    earth: EarthModel = WGS84,
    initial: tuple[ChebSeries, ChebSeries] | None = None,
    trace_gravity: bool = False,
) -> tuple[ChebSeries, ChebSeries, IterationReport]:
    """
    Joint Picard iteration of Earth-frame velocity and ECEF position.

    The velocity update integrates the transformed specific force ``i_f``, the
    Coriolis term ``-2 omega_e x v`` and the gravity series; the position update
    integrates velocity. Convergence is judged on the combined coefficient
    discrepancy of both series.

    Args:
        initial: First iterates ``(v, p)``; constants ``v0``, ``p0`` when omitted.
        trace_gravity: Record the gravity approximation error per iteration.
    """
    t_span = i_f.t_span
    half = 0.5 * t_span
    omega = np.asarray(omega_e, dtype=np.float64)
    anchor_v = ChebSeries.constant(v0, t_span)
    anchor_p = ChebSeries.constant(p0, t_span)
    v_cur, p_cur = initial if initial is not None else (anchor_v, anchor_p)
    discrepancies: list[float] = []
    gravity_errors: list[float] = []

    def position(v: ChebSeries) -> ChebSeries:
        return truncate(anchor_p + indefinite_integral(v) * half, cfg.m_p)

    def velocity(v: ChebSeries, gamma: ChebSeries) -> ChebSeries:
        coriolis = ChebSeries(np.cross(omega, v.coeffs), t_span) * 2.0
        rate_integral = i_f - indefinite_integral(coriolis) + indefinite_integral(gamma)
        return truncate(anchor_v + rate_integral * half, cfg.m_v)

    for iteration in range(1, cfg.iteration_cap + 1):
        gamma_source = p_cur
        with np.errstate(over="ignore", invalid="ignore"):
            try:
                if cfg.order == "swapped":
                    p_new = position(v_cur)
                    gamma_source = p_new
                    gamma = gravity_approx(p_new, cfg, earth)
                    v_new = velocity(v_cur, gamma)
                else:
                    gamma = gravity_approx(p_cur, cfg, earth)
                    v_new = velocity(v_cur, gamma)
                    p_new = position(v_cur)
            except (ArgumentError, NumericalError) as ex:
                raise _diverged("velpos", iteration, ex) from ex

        if trace_gravity:
            gravity_errors.append(_gravity_error(gamma, gamma_source, earth))
        discrepancies.append(
            math.hypot(
                coefficient_discrepancy(v_new, v_cur),
                coefficient_discrepancy(p_new, p_cur),
            )
        )
        v_cur, p_cur = v_new, p_new
        if discrepancies[-1] < cfg.tol:
            return v_cur, p_cur, IterationReport(
                iteration, True, tuple(discrepancies), tuple(gravity_errors)
            )

    return v_cur, p_cur, IterationReport(
        len(discrepancies), False, tuple(discrepancies), tuple(gravity_errors)
    )


def update_interval(
    state: NavState,
    batch: ImuBatch,
    cfg: IterConfig,
    earth: EarthModel = WGS84,
    trace: bool = False,
) -> NavSolution:
    """
    Advance ``state`` over the interval covered by ``batch``.

    Non-convergence within the iteration cap is reported in the returned
    diagnostics and the last iterate is used.

    Raises:
        TimestampMismatchError: The batch does not start at ``state.t``.
        DivergenceError: An iteration overflowed, or the end attitude is no
            longer a unit quaternion.
    """
    if not math.isclose(batch.t_start, state.t, rel_tol=1e-12, abs_tol=1e-9):
        raise TimestampMismatchError(
            "The batch does not start at the state epoch",
            ctx=TimestampMismatchError.Context(expected=state.t, actual=batch.t_start),
        )

    fit = fit_from_increments if batch.kind == "increments" else fit_from_samples
    times = batch.times
    omega_series = fit(batch.gyro, times, cfg.n_omega)
    f_series = fit(batch.accel, times, cfg.n_f)
    omega_e = earth_rate_e(earth)

    q_series, attitude = attitude_iterate(state.q, omega_series, omega_e, cfg)
    i_f = transformed_force_integral(q_series, f_series)
    v_series, p_series, velpos = velpos_iterate(
        state.v, state.p, i_f, omega_e, cfg, earth, trace_gravity=trace
    )

    if not (attitude.converged and velpos.converged):
        logger.debug(
            "interval at t=%r not converged (attitude %r after %d, velpos %r after %d)",
            state.t,
            attitude.discrepancies[-1],
            attitude.iterations,
            velpos.discrepancies[-1],
            velpos.iterations,
        )

    try:
        end_state = NavState(
            q=series_eval(q_series, 1.0),
            v=series_eval(v_series, 1.0),
            p=series_eval(p_series, 1.0),
            t=batch.t_start + batch.t_span,
        )
    except ArgumentError as ex:
        raise _diverged("attitude", attitude.iterations, ex) from ex
    return NavSolution(
        q_series, v_series, p_series, attitude, velpos, state, end_state
    )


@dataclass(frozen=True, slots=True, eq=False)
class ReducedConfigComparison:
    """
    Two-sample attitude increment of the functional iteration against the
    classical coning-corrected rotation vector.

    Attributes:
        sigma_iterated: Twice the vector part of the second iterate at the
            interval end.
        sigma_table: ``dtheta1 + dtheta2 + 2/3 dtheta1 x dtheta2``.
        discrepancy: Norm of the difference of the two rotation vectors.
        angle_discrepancy: Principal angle between the normalized second
            iterate and the exponential of ``sigma_table``.
        increment_norm: ``|dtheta1| + |dtheta2|``.
    """

    sigma_iterated: Vec3
    sigma_table: Vec3
    discrepancy: float
    angle_discrepancy: float
    increment_norm: float


def reduced_config_check(batch: ImuBatch) -> ReducedConfigComparison:
    """
    Run two attitude iterations on a 2-sample batch with linear rate fit and
    compare against the 2-sample coning correction.

    The attitude degree is kept at 4 so that neither iterate is truncated.
    """
    if batch.n_samples != 2 or batch.kind != "increments":
        raise ArgumentError(
            "The reduced configuration needs a 2-sample increment batch"
        )

    cfg = IterConfig(
        n_samples=2,
        n_omega=1,
        n_f=1,
        m_q=4,
        m_v=1,
        m_p=1,
        m_g=0,
        nodes=1,
        max_iter=2,
        tol=np.finfo(np.float64).tiny,
    )
    omega_series = fit_from_increments(batch.gyro, batch.times, cfg.n_omega)
    q_series, _ = attitude_iterate(IDENTITY, omega_series, np.zeros(3), cfg)
    q_end = series_eval(q_series, 1.0)

    d1, d2 = batch.gyro
    sigma_table = d1 + d2 + 2.0 / 3.0 * np.cross(d1, d2)
    sigma_iterated = 2.0 * q_end[1:]
    return ReducedConfigComparison(
        sigma_iterated=sigma_iterated,
        sigma_table=sigma_table,
        discrepancy=float(np.linalg.norm(sigma_iterated - sigma_table)),
        angle_discrepancy=float(principal_angle(q_end, quat_exp(sigma_table))),
        increment_norm=float(np.linalg.norm(d1) + np.linalg.norm(d2)),
    )
