"""
Two-sample strapdown algorithms in the local-level (North-Up-East) frame.

Both variants share the attitude update: the coning-corrected body rotation
vector and the navigation-frame rotation ``T omega_in^n`` are turned into
quaternions with the exponential map. The typical variant integrates velocity
and position to first order with time-0 Coriolis and gravity terms; the
improved variant accounts for the rotation of the navigation frame over the
update interval.
"""

from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from .earth import (
    WGS84,
    EarthModel,
    curvature_matrix,
    earth_rate_n,
    somigliana_gravity,
    transport_rate,
)
from .geomath import Quat, Vec3, quat_conj, quat_exp, quat_mul, quat_to_dcm, skew

__all__ = (
    "LlNavState",
    "coning_rotation_vector",
    "typical_2sample_step",
    "improved_2sample_step",
)

FloatArray = npt.NDArray[np.float64]


@dataclass(frozen=True, slots=True, eq=False)
class LlNavState:
    """
    Local-level navigation state.

    Attributes:
        q: Attitude quaternion ``q_n^b``; ``quat_to_dcm(q)`` is ``C_b^n``.
        v: Ground velocity ``[v_N, v_U, v_E]``, m/s.
        p: Geodetic position ``[lon, lat, h]`` (rad, rad, m).
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


@dataclass(frozen=True, slots=True)
class _StartFrame:
    # time-0 quantities shared by both variants
    c_bn: FloatArray
    c_nn: FloatArray
    omega_ie: Vec3
    omega_en: Vec3
    omega_in: Vec3
    gravity: Vec3
    r_c: FloatArray


def _start_frame(state: LlNavState, period: float, earth: EarthModel) -> _StartFrame:
    _, lat, h = state.p
    r_c = curvature_matrix(state.p, earth)
    omega_ie = earth_rate_n(lat, earth)
    omega_en = transport_rate(state.v, state.p, earth)
    omega_in = omega_ie + omega_en
    return _StartFrame(
        c_bn=quat_to_dcm(state.q),
        c_nn=quat_to_dcm(quat_conj(quat_exp(period * omega_in))),
        omega_ie=omega_ie,
        omega_en=omega_en,
        omega_in=omega_in,
        gravity=np.array([0.0, -float(somigliana_gravity(lat, h, earth)), 0.0]),
        r_c=r_c,
    )


def coning_rotation_vector(dtheta1: npt.ArrayLike, dtheta2: npt.ArrayLike) -> Vec3:
    """``sigma_b = dtheta1 + dtheta2 + 2/3 dtheta1 x dtheta2``."""
    d1 = np.asarray(dtheta1, dtype=np.float64)
    d2 = np.asarray(dtheta2, dtype=np.float64)
    return d1 + d2 + 2.0 / 3.0 * np.cross(d1, d2)


def _sculling_velocity(
    frame: _StartFrame, d1: Vec3, d2: Vec3, dv1: Vec3, dv2: Vec3
) -> Vec3:
    body = (
        dv1
        + dv2
        + 0.5 * np.cross(d1 + d2, dv1 + dv2)
        + 2.0 / 3.0 * (np.cross(d1, dv2) + np.cross(dv1, d2))
    )
    return frame.c_bn @ body


def _attitude(state: LlNavState, frame_rotation: Vec3, sigma_b: Vec3) -> Quat:
    # C_b^n(t) = C_{n(0)}^{n(t)} C_b^n(0) C_{b(t)}^{b(0)}
    return quat_mul(
        quat_mul(quat_conj(quat_exp(frame_rotation)), state.q), quat_exp(sigma_b)
    )


def _as_vectors(*vectors: npt.ArrayLike) -> list[Vec3]:
    return [np.asarray(v, dtype=np.float64) for v in vectors]


def typical_2sample_step(
    state: LlNavState,
    dtheta1: npt.ArrayLike,
    dtheta2: npt.ArrayLike,
    dv1: npt.ArrayLike,
    dv2: npt.ArrayLike,
    period: float,
    earth: EarthModel = WGS84,
) -> LlNavState:
    """
    One update interval of length ``period`` of the typical two-sample
    algorithm: coning and sculling corrections, Coriolis and gravity taken at
    the interval start, trapezoidal position.

    Raises:
        SingularityError: The start position is too close to a pole.
    """
    d1, d2, v1, v2 = _as_vectors(dtheta1, dtheta2, dv1, dv2)
    frame = _start_frame(state, period, earth)
    u = _sculling_velocity(frame, d1, d2, v1, v2)

    v0 = state.v
    v = (
        v0
        + u
        - period * np.cross(2.0 * frame.omega_ie + frame.omega_en, v0)
        + period * frame.gravity
    )
    r = 0.5 * period * (v0 + v)
    return LlNavState(
        q=_attitude(state, period * frame.omega_in, coning_rotation_vector(d1, d2)),
        v=v,
        p=state.p + frame.r_c @ r,
        t=state.t + period,
    )


def improved_2sample_step(
    state: LlNavState,
    dtheta1: npt.ArrayLike,
    dtheta2: npt.ArrayLike,
    dv1: npt.ArrayLike,
    dv2: npt.ArrayLike,
    period: float,
    earth: EarthModel = WGS84,
) -> LlNavState:
    """
    One update interval of the two-sample algorithm corrected for the rotation
    of the navigation frame.

    The velocity and position updates are applied in two stages: the
    frame-rotation corrected integrals first, then the ``(T/2 I + T^2/3
    omega_in x)`` correction of the result. With zero Earth rate and zero
    transport rate the attitude and velocity updates coincide with
    :func:`typical_2sample_step`.

    Raises:
        SingularityError: The start position is too close to a pole.
    """
    d1, d2, v1, v2 = _as_vectors(dtheta1, dtheta2, dv1, dv2)
    t = period
    frame = _start_frame(state, t, earth)
    u = _sculling_velocity(frame, d1, d2, v1, v2)
    c_nn, w_ie, w_in, g0 = frame.c_nn, frame.omega_ie, frame.omega_in, frame.gravity
    eye = np.eye(3)
    w_in_x = skew(w_in)

    def weighted(a: float, b: float) -> FloatArray:
        return a * eye + b * w_in_x

    v0 = state.v
    v_rot = c_nn @ (
        v0
        + u
        - weighted(t, 0.5 * t * t) @ np.cross(w_ie, v0)
        + weighted(t, 0.5 * t * t) @ g0
    )
    v = v_rot - c_nn @ weighted(0.5 * t, t * t / 3.0) @ np.cross(w_ie, v_rot - v0)

    i_u = (
        t
        / 30.0
        * (
            frame.c_bn
            @ (
                25.0 * v1
                + 5.0 * v2
                + 12.0 * np.cross(d1, v1)
                + 8.0 * np.cross(d1, v2)
                + 2.0 * np.cross(v1, d2)
                + 2.0 * np.cross(d2, v2)
            )
        )
    )
    r_rot = c_nn @ (
        t * v0
        + i_u
        - weighted(t * t / 3.0, t**3 / 12.0) @ np.cross(w_ie, v0)
        - weighted(t * t / 6.0, t**3 / 12.0) @ np.cross(w_ie, v)
        + weighted(0.5 * t * t, t**3 / 6.0) @ g0
    )
    r = r_rot + c_nn @ weighted(0.5 * t, t * t / 3.0) @ np.cross(w_in, r_rot)

    return LlNavState(
        q=_attitude(state, t * w_in, coning_rotation_vector(d1, d2)),
        v=v,
        p=state.p + frame.r_c @ r,
        t=state.t + t,
    )
