"""
Analytic reference flights and inertial sensor synthesis.

The vehicle flies east along the equator at zero height. The east speed is
``v0 + a (1 - cos(w t)) / w`` and the body attitude either performs a classical
coning motion or stays aligned with the North-Up-East frame. Sensor outputs
follow from inverting the local-level navigation equations; increments are
their integrals over each sample period, computed by adaptive quadrature.
"""

import functools
import logging
import math
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from .baselines import LlNavState
from .dto.sensor import SensorSpec
from .dto.trajectory import TrajectoryParams
from .earth import (
    WGS84,
    EarthModel,
    cne_from_geodetic,
    ecef2lla,
    lla2ecef,
    radii,
    somigliana_gravity,
)
from .exc import ArgumentError
from .geomath import (
    IDENTITY,
    Quat,
    dcm_to_quat,
    pure,
    quat_conj,
    quat_mul,
    quat_to_dcm,
)
from .imu import BatchKind, ImuBatch
from .quadrature import REL_TOL, gauss_kronrod
from .solver import NavState

__all__ = (
    "ImuBatch",
    "TruthState",
    "truth_state",
    "truth_rates",
    "synth_increments",
    "synth_rates",
    "synth_stream",
    "inject_errors",
    "damp_vertical",
)

logger = logging.getLogger(__name__)

FloatArray = npt.NDArray[np.float64]

# subintervals integrated per vectorized quadrature call
CHUNK_SAMPLES = 2048


@dataclass(frozen=True, slots=True, eq=False)
class TruthState:
    """
    Reference navigation state at epochs ``t``; every field carries the shape
    of ``t`` as leading axes.

    Attributes:
        q_nb: ``q_n^b``.
        v_n: NUE ground velocity, m/s.
        lla: ``[lon, lat, h]``.
        q_eb: ``q_e^b``.
        v_e: Earth-frame ground velocity, m/s.
        p_e: ECEF position, m.
    """

    t: FloatArray
    q_nb: FloatArray
    v_n: FloatArray
    lla: FloatArray
    q_eb: FloatArray
    v_e: FloatArray
    p_e: FloatArray

    def _scalar(self) -> float:
        if self.t.ndim != 0:
            raise ArgumentError("Expected the truth at a single epoch")
        return float(self.t)

    def to_ll(self) -> LlNavState:
        return LlNavState(q=self.q_nb, v=self.v_n, p=self.lla, t=self._scalar())

    def to_nav(self) -> NavState:
        return NavState(q=self.q_eb, v=self.v_e, p=self.p_e, t=self._scalar())

    def ll_states(self) -> list[LlNavState]:
        """One local-level state per epoch of a 1-D ``t``."""
        if self.t.ndim != 1:
            raise ArgumentError("Expected the truth along a 1-D time axis")
        return [
            LlNavState(
                q=self.q_nb[k], v=self.v_n[k], p=self.lla[k], t=float(self.t[k])
            )
            for k in range(self.t.size)
        ]


def _east_speed(params: TrajectoryParams, t: FloatArray) -> FloatArray:
    return params.v0 + params.a * (1.0 - np.cos(params.w * t)) / params.w


def _longitude(
    params: TrajectoryParams, t: FloatArray, earth: EarthModel
) -> FloatArray:
    _, r_e = radii(0.0, earth)
    a, w = params.a, params.w
    return (params.v0 * t - (a * np.sin(w * t) - a * w * t) / w**2) / r_e


def _attitude(params: TrajectoryParams, t: FloatArray) -> tuple[Quat, Quat]:
    if params.mode == "level":
        q = np.broadcast_to(IDENTITY, t.shape + (4,)).copy()
        return q, np.zeros_like(q)
    half = 0.5 * params.alpha
    zt = params.zeta * t
    zero = np.zeros_like(t)
    c, s = math.cos(half), math.sin(half)
    q = np.stack((np.full_like(t, c), zero, s * np.cos(zt), s * np.sin(zt)), axis=-1)
    q_dot = np.stack((zero, zero, -np.sin(zt), np.cos(zt)), axis=-1)
    q_dot *= params.zeta * s
    return q, q_dot


def _nue(north: npt.ArrayLike, up: npt.ArrayLike, east: npt.ArrayLike) -> FloatArray:
    return np.stack(np.broadcast_arrays(north, up, east), axis=-1).astype(np.float64)


def truth_state(
    params: TrajectoryParams, t: npt.ArrayLike, earth: EarthModel = WGS84
) -> TruthState:
    """Attitude, velocity and position of the reference flight at ``t``."""
    t = np.asarray(t, dtype=np.float64)
    zero = np.zeros_like(t)
    q_nb, _ = _attitude(params, t)
    lon = _longitude(params, t, earth)
    lla = np.stack((lon, zero, zero), axis=-1)
    v_n = _nue(zero, zero, _east_speed(params, t))

    c_ne = cne_from_geodetic(lon, zero)
    q_en = dcm_to_quat(c_ne)
    return TruthState(
        t=t,
        q_nb=q_nb,
        v_n=v_n,
        lla=lla,
        q_eb=quat_mul(q_en, q_nb),
        v_e=np.einsum("...ij,...j->...i", c_ne, v_n),
        p_e=lla2ecef(lla, earth),
    )


def truth_rates(
    params: TrajectoryParams, t: npt.ArrayLike, earth: EarthModel = WGS84
) -> tuple[FloatArray, FloatArray]:
    """
    Error-free gyro and accelerometer outputs ``(omega_ib^b, f^b)`` at ``t``.
    """
    t = np.asarray(t, dtype=np.float64)
    zero = np.zeros_like(t)
    q, q_dot = _attitude(params, t)
    v_east = _east_speed(params, t)
    _, r_e = radii(0.0, earth)

    # along the equator omega_ie^n and omega_en^n both point north
    omega_ie = _nue(np.full_like(t, earth.rotation_rate), zero, zero)
    omega_en = _nue(v_east / r_e, zero, zero)
    omega_in = omega_ie + omega_en
    omega = quat_mul(quat_conj(q), 2.0 * q_dot + quat_mul(pure(omega_in), q))
    omega = omega[..., 1:]

    v_n = _nue(zero, zero, v_east)
    v_dot = _nue(zero, zero, params.a * np.sin(params.w * t))
    gravity = _nue(zero, -float(somigliana_gravity(0.0, 0.0, earth)), zero)
    nav_force = v_dot + np.cross(2.0 * omega_ie + omega_en, v_n) - gravity
    force = np.einsum("...ji,...j->...i", quat_to_dcm(q), nav_force)
    return omega, force


def _edges(interval: tuple[float, float], n: int) -> FloatArray:
    t_a, t_b = interval
    if not t_b > t_a:
        raise ArgumentError("Interval must be increasing, got [%r, %r]" % (t_a, t_b))
    if n < 2:
        raise ArgumentError("A batch needs at least 2 samples, got %d" % n)
    return t_a + (t_b - t_a) * np.arange(n + 1) / n


def synth_increments(
    params: TrajectoryParams,
    interval: tuple[float, float],
    n: int,
    earth: EarthModel = WGS84,
    rel_tol: float = REL_TOL,
) -> ImuBatch:
    """
    Angular and velocity increments over ``n`` equal subintervals of
    ``interval``, integrated from :func:`truth_rates`.

    Raises:
        QuadratureError: The quadrature tolerance could not be met.
    """
    edges = _edges(interval, n)

    def integrand(t: FloatArray) -> FloatArray:
        return np.concatenate(truth_rates(params, t, earth), axis=-1)

    chunks = [
        gauss_kronrod(
            integrand,
            edges[start : min(start + CHUNK_SAMPLES, n)],
            edges[start + 1 : min(start + CHUNK_SAMPLES, n) + 1],
            rel_tol=rel_tol,
        )
        for start in range(0, n, CHUNK_SAMPLES)
    ]
    increments = np.concatenate(chunks)
    return ImuBatch(
        t_start=float(edges[0]),
        t_span=float(edges[-1] - edges[0]),
        gyro=increments[:, :3],
        accel=increments[:, 3:],
    )


def synth_rates(
    params: TrajectoryParams,
    interval: tuple[float, float],
    n: int,
    earth: EarthModel = WGS84,
) -> ImuBatch:
    """Gyro and accelerometer outputs sampled at the ``n`` subinterval ends."""
    edges = _edges(interval, n)
    omega, force = truth_rates(params, edges[1:], earth)
    return ImuBatch(
        t_start=float(edges[0]),
        t_span=float(edges[-1] - edges[0]),
        gyro=omega,
        accel=force,
        kind="rates",
    )


def synth_stream(
    params: TrajectoryParams,
    multiple: int,
    earth: EarthModel = WGS84,
    kind: BatchKind = "increments",
) -> ImuBatch:
    """
    Sensor outputs over the whole flight, shortened to a whole number of
    ``multiple``-sample blocks.
    """
    total = params.total_samples - params.total_samples % multiple
    if total < 2:
        raise ArgumentError(
            "The flight is shorter than one block of %d samples" % multiple
        )
    if total != params.total_samples:
        logger.info(
            "Horizon shortened from %d to %d samples to fit %d-sample blocks",
            params.total_samples,
            total,
            multiple,
        )
    interval = (0.0, total * params.sample_period)
    if kind == "rates":
        return synth_rates(params, interval, total, earth)
    return synth_increments(params, interval, total, earth)


def inject_errors(
    batch: ImuBatch, spec: SensorSpec, rng: np.random.Generator | None = None
) -> ImuBatch:
    """
    Add constant bias and white noise to every axis.

    Increments receive ``bias h`` plus noise of standard deviation
    ``random_walk sqrt(h)``; sampled rates receive ``bias`` plus noise of
    standard deviation ``random_walk / sqrt(h)``. Without ``rng`` the generator
    is seeded from ``spec.seed``.
    """
    if spec.is_perfect:
        return batch
    if rng is None:
        rng = np.random.default_rng(spec.seed)

    h = batch.sample_period
    if batch.kind == "increments":
        bias_scale, noise_scale = h, math.sqrt(h)
    else:
        bias_scale, noise_scale = 1.0, 1.0 / math.sqrt(h)

    shape = batch.gyro.shape
    gyro_noise = rng.standard_normal(shape)
    accel_noise = rng.standard_normal(shape)
    return ImuBatch(
        t_start=batch.t_start,
        t_span=batch.t_span,
        gyro=batch.gyro
        + spec.gyro_bias * bias_scale
        + spec.gyro_arw * noise_scale * gyro_noise,
        accel=batch.accel
        + spec.accel_bias * bias_scale
        + spec.accel_vrw * noise_scale * accel_noise,
        kind=batch.kind,
    )


@functools.singledispatch
def damp_vertical(state: object, earth: EarthModel = WGS84) -> object:
    """Zero the up velocity and the height of a navigation state."""
    raise ArgumentError("Cannot damp a %s" % type(state).__name__)


@damp_vertical.register
def _(state: LlNavState, earth: EarthModel = WGS84) -> LlNavState:
    v = np.array(state.v)
    p = np.array(state.p)
    v[1] = 0.0
    p[2] = 0.0
    return LlNavState(q=state.q, v=v, p=p, t=state.t)


@damp_vertical.register
def _(state: NavState, earth: EarthModel = WGS84) -> NavState:
    lla = ecef2lla(state.p, earth)
    c_ne = cne_from_geodetic(lla[0], lla[1])
    v_n = c_ne.T @ state.v
    v_n[1] = 0.0
    lla[2] = 0.0
    return NavState(q=state.q, v=c_ne @ v_n, p=lla2ecef(lla, earth), t=state.t)
