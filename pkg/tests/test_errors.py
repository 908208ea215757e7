import dataclasses

import numpy as np
import pytest

from inavfiter.baselines import LlNavState
from inavfiter.earth import radii
from inavfiter.exc import ArgumentError, TimestampMismatchError
from inavfiter.geomath import quat_exp, quat_mul
from inavfiter.harness.errors import CSV_HEADER, compute_errors, error_rows
from inavfiter.solver import NavState
from inavfiter.trajgen import truth_state


@pytest.fixture
def truth(coning_params) -> list[LlNavState]:
    return truth_state(coning_params, np.array([0.0, 0.5, 1.0])).ll_states()


@pytest.fixture
def nav_truth(coning_params) -> list[NavState]:
    return [truth_state(coning_params, t).to_nav() for t in (0.0, 0.5, 1.0)]


def test_truth_against_itself(truth):
    records = compute_errors(truth, truth)
    assert len(records) == 3
    rows = error_rows(records)
    assert rows.shape == (3, len(CSV_HEADER.split(",")))
    np.testing.assert_array_equal(rows[:, 0], [0.0, 0.5, 1.0])
    np.testing.assert_allclose(rows[:, 1:], 0.0, atol=1e-15)


def test_earth_frame_truth(truth, nav_truth):
    records = compute_errors(truth, nav_truth)
    rows = error_rows(records)
    assert np.max(rows[:, 1]) < 1e-12
    np.testing.assert_allclose(rows[:, 3:6], 0.0, atol=1e-9)
    np.testing.assert_allclose(rows[:, 6:], 0.0, atol=1e-6)


def test_sign_flipped_quaternion(truth):
    flipped = [dataclasses.replace(s, q=-s.q) for s in truth]
    records = compute_errors(truth, flipped)
    assert all(r.principal_angle == pytest.approx(0.0, abs=1e-15) for r in records)


def test_channels(truth):
    s = truth[1]
    moved = LlNavState(
        q=quat_mul(s.q, quat_exp([0.0, 0.0, 1e-3])),
        v=s.v + [0.1, -0.2, 0.3],
        p=s.p + [1e-7, 0.0, 5.0],
        t=s.t,
    )
    (record,) = compute_errors([s], [moved])
    assert record.principal_angle == pytest.approx(1e-3, rel=1e-9)
    np.testing.assert_allclose(record.v_err, [0.1, -0.2, 0.3], rtol=1e-9)
    assert record.p_err[1] == pytest.approx(5.0)
    assert record.p_err[0] == pytest.approx(0.0, abs=1e-12)
    assert record.p_err[2] == pytest.approx(0.6378, rel=1e-3)


def test_north_offset_uses_meridian_radius(truth, earth):
    s = truth[1]
    moved = dataclasses.replace(s, p=s.p + [0.0, 2e-6, 0.0])
    (record,) = compute_errors([s], [moved], earth)
    r_n, _ = radii(s.p[1], earth)
    assert record.p_err[0] == pytest.approx(2e-6 * (r_n + s.p[2]), rel=1e-12)
    assert record.p_err[2] == pytest.approx(0.0, abs=1e-9)


def test_quaternion_norm_error(truth):
    scaled = [dataclasses.replace(s, q=1.001 * s.q) for s in truth]
    records = compute_errors(truth, scaled)
    assert records[0].quat_norm_err == pytest.approx(1e-3)
    assert records[0].principal_angle == pytest.approx(0.0, abs=1e-12)


def test_east_offset_in_earth_frame(nav_truth, truth, earth):
    s = nav_truth[0]
    # at the start the east axis is ECEF y
    shifted = NavState(q=s.q, v=s.v, p=s.p + [0.0, 1.0, 0.0], t=s.t)
    (record,) = compute_errors(truth[:1], [shifted])
    assert record.p_err[2] == pytest.approx(1.0, abs=1e-6)
    assert abs(record.p_err[0]) < 1e-6


def test_empty_streams():
    assert compute_errors([], []) == []
    assert error_rows([]).shape == (0, 9)


def test_length_mismatch(truth):
    with pytest.raises(ArgumentError):
        compute_errors(truth, truth[:2])


def test_epoch_mismatch(truth):
    late = [dataclasses.replace(s, t=s.t + 0.01) for s in truth]
    with pytest.raises(TimestampMismatchError):
        compute_errors(truth, late)


def test_mixed_states(truth, nav_truth):
    with pytest.raises(ArgumentError):
        compute_errors(truth[:2], [truth[0], nav_truth[1]])
