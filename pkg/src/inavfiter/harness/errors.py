"""
Navigation errors in the local-level frame.

Earth-frame estimates are converted to geodetic position, NUE velocity and
``q_n^b`` before comparison, so any conversion error is charged to them.
"""

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from ..baselines import LlNavState
from ..earth import WGS84, EarthModel, cne_from_geodetic, ecef2lla, radii
from ..exc import ArgumentError, TimestampMismatchError
from ..geomath import dcm_to_quat, principal_angle, quat_conj, quat_mul
from ..solver import NavState

__all__ = ("ErrorRecord", "compute_errors", "error_rows", "CSV_HEADER")

FloatArray = npt.NDArray[np.float64]

CSV_HEADER = "t,att_err_rad,qnorm_err,verr_n,verr_u,verr_e,perr_n,perr_u,perr_e"

# allowed offset between truth and estimate epochs, s
EPOCH_TOLERANCE = 1e-9


@dataclass(frozen=True, slots=True, eq=False)
class ErrorRecord:
    """
    Estimate minus truth at epoch ``t``.

    Attributes:
        principal_angle: Rotation angle between estimated and true ``q_n^b``, rad.
        quat_norm_err: ``| |q| - 1 |`` of the estimated attitude quaternion.
        v_err: NUE velocity error, m/s.
        p_err: Position error as north, up and east distances, m.
    """

    t: float
    principal_angle: float
    quat_norm_err: float
    v_err: FloatArray
    p_err: FloatArray

    def as_row(self) -> FloatArray:
        return np.concatenate(
            ([self.t, self.principal_angle, self.quat_norm_err], self.v_err, self.p_err)
        )


def _stack(states: Sequence[NavState | LlNavState]) -> tuple[FloatArray, ...]:
    return (
        np.array([s.t for s in states], dtype=np.float64),
        np.array([s.q for s in states], dtype=np.float64),
        np.array([s.v for s in states], dtype=np.float64),
        np.array([s.p for s in states], dtype=np.float64),
    )


def _to_local_level(
    q_eb: FloatArray, v_e: FloatArray, p_e: FloatArray, earth: EarthModel
) -> tuple[FloatArray, FloatArray, FloatArray]:
    lla = ecef2lla(p_e, earth)
    c_ne = cne_from_geodetic(lla[:, 0], lla[:, 1])
    q_en = dcm_to_quat(c_ne)
    v_n = np.einsum("kji,kj->ki", c_ne, v_e)
    return quat_mul(quat_conj(q_en), q_eb), v_n, lla


def compute_errors(
    truth: Sequence[LlNavState],
    estimates: Sequence[NavState] | Sequence[LlNavState],
    earth: EarthModel = WGS84,
) -> list[ErrorRecord]:
    """
    Pair up truth and estimate records epoch by epoch.

    Raises:
        ArgumentError: The streams differ in length or mix state types.
        TimestampMismatchError: Some pair of records is not at the same epoch.
    """
    if len(truth) != len(estimates):
        raise ArgumentError(
            "Expected equally long streams, got %d truth and %d estimate records"
            % (len(truth), len(estimates))
        )
    if not estimates:
        return []

    t_true, q_true, v_true, p_true = _stack(truth)
    t_est, q_est, v_est, p_est = _stack(estimates)
    for expected, actual in zip(t_true, t_est):
        if abs(expected - actual) > EPOCH_TOLERANCE:
            raise TimestampMismatchError(
                "Truth and estimate streams are not aligned",
                ctx=TimestampMismatchError.Context(
                    expected=float(expected), actual=float(actual)
                ),
            )

    if all(isinstance(s, NavState) for s in estimates):
        q_nb, v_n, lla = _to_local_level(q_est, v_est, p_est, earth)
    elif all(isinstance(s, LlNavState) for s in estimates):
        q_nb, v_n, lla = q_est, v_est, p_est
    else:
        raise ArgumentError("Estimate stream mixes Earth-frame and local-level states")

    lat, h = p_true[:, 1], p_true[:, 2]
    r_n, r_e = radii(lat, earth)
    d_lon = lla[:, 0] - p_true[:, 0]
    d_lon = np.where(
        np.abs(d_lon) > np.pi, (d_lon + np.pi) % (2.0 * np.pi) - np.pi, d_lon
    )
    p_err = np.column_stack(
        (
            (lla[:, 1] - lat) * (r_n + h),
            lla[:, 2] - h,
            d_lon * (r_e + h) * np.cos(lat),
        )
    )
    angle = principal_angle(q_nb, q_true)
    norm_err = np.abs(np.linalg.norm(q_est, axis=-1) - 1.0)
    v_err = v_n - v_true

    return [
        ErrorRecord(
            t=float(t_true[k]),
            principal_angle=float(angle[k]),
            quat_norm_err=float(norm_err[k]),
            v_err=v_err[k],
            p_err=p_err[k],
        )
        for k in range(t_true.size)
    ]


def error_rows(records: Sequence[ErrorRecord]) -> FloatArray:
    """Records as a ``(K, 9)`` array in :data:`CSV_HEADER` column order."""
    if not records:
        return np.empty((0, 9))
    return np.stack([r.as_row() for r in records])
