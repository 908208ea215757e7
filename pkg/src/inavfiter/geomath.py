"""
Quaternion and rotation algebra.

Quaternions are stored scalar-first as ``[s, eta_x, eta_y, eta_z]``. Every
function broadcasts over leading axes, so a stack of quaternions of shape
``(..., 4)`` is handled in one call.
"""

import numpy as np
import numpy.typing as npt
from scipy.spatial.transform import Rotation

from .exc import ArgumentError

__all__ = (
    "Quat",
    "Vec3",
    "IDENTITY",
    "quat_mul",
    "mul_matrix_plus",
    "mul_matrix_minus",
    "quat_conj",
    "quat_to_dcm",
    "dcm_to_quat",
    "quat_sandwich",
    "quat_normalize",
    "quat_exp",
    "quat_to_rotvec",
    "pure",
    "principal_angle",
    "skew",
)

Quat = npt.NDArray[np.float64]
Vec3 = npt.NDArray[np.float64]

IDENTITY: Quat = np.array([1.0, 0.0, 0.0, 0.0])
IDENTITY.flags.writeable = False

# below this angle the exponential map switches to its Taylor series
SMALL_ANGLE = 1e-8


def pure(v: npt.ArrayLike) -> Quat:
    """Embed a 3-vector as the quaternion ``(0, v)``."""
    v = np.asarray(v, dtype=np.float64)
    return np.concatenate((np.zeros(v.shape[:-1] + (1,)), v), axis=-1)


def quat_mul(q1: npt.ArrayLike, q2: npt.ArrayLike) -> Quat:
    a = np.asarray(q1, dtype=np.float64)
    b = np.asarray(q2, dtype=np.float64)
    s1, v1 = a[..., :1], a[..., 1:]
    s2, v2 = b[..., :1], b[..., 1:]
    s = s1 * s2 - np.sum(v1 * v2, axis=-1, keepdims=True)
    v = s1 * v2 + s2 * v1 + np.cross(v1, v2)
    return np.concatenate((s, v), axis=-1)


def skew(a: npt.ArrayLike) -> npt.NDArray[np.float64]:
    """Cross-product matrix ``(a x)`` with ``(a x) b = a x b``."""
    a = np.asarray(a, dtype=np.float64)
    x, y, z = a[..., 0], a[..., 1], a[..., 2]
    o = np.zeros_like(x)
    return np.stack(
        (
            np.stack((o, -z, y), axis=-1),
            np.stack((z, o, -x), axis=-1),
            np.stack((-y, x, o), axis=-1),
        ),
        axis=-2,
    )


def _mul_matrix(q: npt.ArrayLike, sign: float) -> npt.NDArray[np.float64]:
    q = np.asarray(q, dtype=np.float64)
    s, eta = q[0], q[1:]
    out = np.empty((4, 4))
    out[0, 0] = s
    out[0, 1:] = -eta
    out[1:, 0] = eta
    out[1:, 1:] = s * np.eye(3) + sign * skew(eta)
    return out


def mul_matrix_plus(q: npt.ArrayLike) -> npt.NDArray[np.float64]:
    """Left multiplication matrix: ``q o p = [q]+ p``."""
    return _mul_matrix(q, 1.0)


def mul_matrix_minus(q: npt.ArrayLike) -> npt.NDArray[np.float64]:
    """Right multiplication matrix: ``p o q = [q]- p``."""
    return _mul_matrix(q, -1.0)


def quat_conj(q: npt.ArrayLike) -> Quat:
    q = np.asarray(q, dtype=np.float64)
    return q * np.array([1.0, -1.0, -1.0, -1.0])


def quat_to_dcm(q: npt.ArrayLike) -> npt.NDArray[np.float64]:
    """
    ``(s^2 - eta.eta) I + 2 eta eta^T + 2 s (eta x)``; orthonormal only for unit
    ``q``. For ``q = q_a^b`` this is ``C_b^a``.
    """
    q = np.asarray(q, dtype=np.float64)
    s, eta = q[..., 0], q[..., 1:]
    sq = s * s - np.sum(eta * eta, axis=-1)
    return (
        sq[..., np.newaxis, np.newaxis] * np.eye(3)
        + 2.0 * eta[..., :, np.newaxis] * eta[..., np.newaxis, :]
        + 2.0 * s[..., np.newaxis, np.newaxis] * skew(eta)
    )


def dcm_to_quat(dcm: npt.ArrayLike) -> Quat:
    """Unit quaternion, scalar part non-negative, inverting :func:`quat_to_dcm`."""
    xyzw = Rotation.from_matrix(np.asarray(dcm, dtype=np.float64)).as_quat()
    q = np.roll(xyzw, 1, axis=-1)
    return np.where(q[..., :1] < 0.0, -q, q)


def quat_sandwich(q: npt.ArrayLike, v: npt.ArrayLike) -> Vec3:
    """Vector part of ``q o (0, v) o q*``."""
    return quat_mul(quat_mul(q, pure(v)), quat_conj(q))[..., 1:]


def quat_normalize(q: npt.ArrayLike) -> Quat:
    q = np.asarray(q, dtype=np.float64)
    norm = np.linalg.norm(q, axis=-1, keepdims=True)
    if np.any(norm == 0.0):
        raise ArgumentError("Cannot normalize a zero quaternion")
    return q / norm


def _half_sinc(angle: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
    # sin(x/2)/x
    small = angle < SMALL_ANGLE
    safe = np.where(small, 1.0, angle)
    return np.where(small, 0.5 - angle * angle / 48.0, np.sin(0.5 * safe) / safe)


def quat_exp(rotvec: npt.ArrayLike) -> Quat:
    """Unit quaternion of the rotation vector ``rotvec``."""
    v = np.asarray(rotvec, dtype=np.float64)
    angle = np.linalg.norm(v, axis=-1)
    scalar = np.cos(0.5 * angle)[..., np.newaxis]
    return np.concatenate((scalar, _half_sinc(angle)[..., np.newaxis] * v), axis=-1)


def quat_to_rotvec(q: npt.ArrayLike) -> Vec3:
    """Rotation vector of a non-zero quaternion, normalized first."""
    u = quat_normalize(q)
    u = np.where(u[..., :1] < 0.0, -u, u)
    s, eta = u[..., 0], u[..., 1:]
    sin_half = np.linalg.norm(eta, axis=-1)
    angle = 2.0 * np.arctan2(sin_half, s)
    small = sin_half < SMALL_ANGLE
    factor = np.where(
        small, 2.0 / np.maximum(s, 0.5), angle / np.where(small, 1.0, sin_half)
    )
    return factor[..., np.newaxis] * eta


def principal_angle(
    q_est: npt.ArrayLike, q_true: npt.ArrayLike
) -> npt.NDArray[np.float64]:
    """
    Rotation angle of ``q_true* o q_est`` in ``[0, pi]``, after normalizing both.
    Sign flips of either argument do not change the result.
    """
    err = quat_mul(quat_conj(quat_normalize(q_true)), quat_normalize(q_est))
    return 2.0 * np.arctan2(
        np.linalg.norm(err[..., 1:], axis=-1), np.abs(err[..., 0])
    )
