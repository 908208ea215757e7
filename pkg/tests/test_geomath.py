"""
SciPy Rotation serves as the reference. ``quat_to_dcm`` follows the active
convention, so it matches ``Rotation.as_matrix`` once the scalar part is moved
to the end.
"""

import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from inavfiter.exc import ArgumentError
from inavfiter.geomath import (
    IDENTITY,
    dcm_to_quat,
    mul_matrix_minus,
    mul_matrix_plus,
    principal_angle,
    pure,
    quat_conj,
    quat_exp,
    quat_mul,
    quat_normalize,
    quat_sandwich,
    quat_to_dcm,
    quat_to_rotvec,
    skew,
)


@pytest.fixture
def quats() -> np.ndarray:
    return quat_normalize(np.random.default_rng(7).standard_normal((6, 4)))


def _scipy(q: np.ndarray) -> Rotation:
    return Rotation.from_quat(np.roll(q, -1, axis=-1))


def test_quat_mul_identity(quats):
    np.testing.assert_allclose(quat_mul(IDENTITY, quats), quats)
    np.testing.assert_allclose(quat_mul(quats, IDENTITY), quats)


def test_quat_mul_composes_rotations(quats):
    p, q = quats[0], quats[1]
    expect = (_scipy(p) * _scipy(q)).as_matrix()
    np.testing.assert_allclose(quat_to_dcm(quat_mul(p, q)), expect, atol=1e-14)


def test_quat_mul_is_associative(quats):
    a, b, c = quats[:3]
    np.testing.assert_allclose(
        quat_mul(quat_mul(a, b), c), quat_mul(a, quat_mul(b, c)), atol=1e-15
    )


def test_quat_mul_basis():
    i, j, k = pure([1, 0, 0]), pure([0, 1, 0]), pure([0, 0, 1])
    np.testing.assert_array_equal(quat_mul(i, j), k)
    np.testing.assert_array_equal(quat_mul(j, i), -k)
    np.testing.assert_array_equal(quat_mul(i, i), -IDENTITY)


def test_mul_matrices(quats):
    p, q = quats[2], quats[3]
    np.testing.assert_allclose(mul_matrix_plus(p) @ q, quat_mul(p, q), atol=1e-15)
    np.testing.assert_allclose(mul_matrix_minus(q) @ p, quat_mul(p, q), atol=1e-15)


def test_skew():
    a, b = np.array([1.0, -2.0, 0.5]), np.array([0.3, 0.1, -4.0])
    np.testing.assert_allclose(skew(a) @ b, np.cross(a, b))


def test_quat_to_dcm_matches_scipy(quats):
    np.testing.assert_allclose(
        quat_to_dcm(quats), _scipy(quats).as_matrix(), atol=1e-14
    )


def test_quat_to_dcm_of_sign_flipped_quat(quats):
    np.testing.assert_allclose(quat_to_dcm(-quats), quat_to_dcm(quats))


def test_dcm_to_quat_round_trip(quats):
    q = dcm_to_quat(quat_to_dcm(quats))
    assert np.all(q[:, 0] >= 0.0)
    np.testing.assert_allclose(
        q, np.where(quats[:, :1] < 0.0, -quats, quats), atol=1e-14
    )


def test_quat_sandwich(quats):
    v = np.array([0.2, -1.0, 3.0])
    np.testing.assert_allclose(
        quat_sandwich(quats[0], v), quat_to_dcm(quats[0]) @ v, atol=1e-14
    )


def test_quat_conj_inverts_unit_quat(quats):
    np.testing.assert_allclose(
        quat_mul(quats, quat_conj(quats)),
        np.broadcast_to(IDENTITY, quats.shape),
        atol=1e-15,
    )


def test_quat_normalize_zero():
    with pytest.raises(ArgumentError):
        quat_normalize(np.zeros(4))


@pytest.mark.parametrize(
    "rotvec",
    [
        [0.0, 0.0, 0.0],
        [1e-12, -2e-12, 0.0],
        [0.1, 0.2, -0.3],
        [2.0, 0.0, 1.0],
    ],
)
def test_quat_exp_matches_scipy(rotvec):
    q = quat_exp(rotvec)
    np.testing.assert_allclose(
        quat_to_dcm(q), Rotation.from_rotvec(rotvec).as_matrix(), atol=1e-15
    )
    assert np.linalg.norm(q) == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize(
    "rotvec", [[0.0, 0.0, 0.0], [3e-10, 0.0, -1e-10], [0.4, -0.2, 1.1]]
)
def test_quat_to_rotvec_inverts_exp(rotvec):
    np.testing.assert_allclose(quat_to_rotvec(quat_exp(rotvec)), rotvec, atol=1e-15)


def test_principal_angle(quats):
    rotvec = np.array([0.0, 0.3, 0.0])
    q_est = quat_mul(quats[0], quat_exp(rotvec))
    assert principal_angle(q_est, quats[0]) == pytest.approx(0.3, abs=1e-14)
    assert principal_angle(-q_est, quats[0]) == pytest.approx(0.3, abs=1e-14)
    assert principal_angle(2.0 * quats[0], quats[0]) == pytest.approx(0.0, abs=1e-7)
