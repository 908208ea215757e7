import numpy as np
import pytest

from inavfiter.chebyshev import ChebSeries, fit_from_increments
from inavfiter.dto import IterConfig
from inavfiter.earth import (
    WGS84,
    ecef2lla,
    earth_rate_e,
    gravity_ecef,
    lla2ecef,
)
from inavfiter.exc import ArgumentError, DivergenceError, TimestampMismatchError
from inavfiter.geomath import (
    IDENTITY,
    principal_angle,
    quat_exp,
    quat_mul,
    quat_to_dcm,
)
from inavfiter.imu import ImuBatch
from inavfiter.solver import (
    NavState,
    attitude_iterate,
    gravity_approx,
    reduced_config_check,
    transformed_force_integral,
    update_interval,
    velpos_iterate,
)
from inavfiter.trajgen import synth_increments, synth_rates, truth_state

T_SPAN = 0.08


@pytest.fixture
def cfg() -> IterConfig:
    return IterConfig()


def _constant_batch(
    omega: np.ndarray, force: np.ndarray, n: int = 8, t_span: float = T_SPAN
) -> ImuBatch:
    h = t_span / n
    return ImuBatch(
        t_start=0.0,
        t_span=t_span,
        gyro=np.tile(omega * h, (n, 1)),
        accel=np.tile(force * h, (n, 1)),
    )


def _stationary_state(earth=WGS84) -> tuple[NavState, np.ndarray, np.ndarray]:
    """Body at rest on the rotating Earth and its constant sensor outputs."""
    p = lla2ecef([0.3, 0.6, 120.0], earth)
    q = quat_exp([0.2, -0.4, 1.0])
    c_eb = quat_to_dcm(q).T
    omega = c_eb @ earth_rate_e(earth)
    force = -(c_eb @ gravity_ecef(p, earth))
    return NavState(q=q, v=np.zeros(3), p=p), omega, force


class Test_attitude_iterate:
    def test_constant_rate_without_earth_rotation(self, cfg):
        omega = np.array([0.1, -0.05, 0.2])
        q0 = quat_exp([0.3, 0.0, -0.1])
        series = ChebSeries.constant(omega, T_SPAN)
        q_series, report = attitude_iterate(q0, series, np.zeros(3), cfg)
        expect = quat_mul(q0, quat_exp(omega * T_SPAN))
        np.testing.assert_allclose(q_series(1.0), expect, atol=1e-14)
        np.testing.assert_allclose(q_series(-1.0), q0, atol=1e-15)
        assert report.discrepancies[-1] < 1e-14

    def test_body_rotating_with_earth_keeps_attitude(self, cfg):
        state, omega, _ = _stationary_state()
        series = ChebSeries.constant(omega, T_SPAN)
        q_series, report = attitude_iterate(
            state.q, series, earth_rate_e(WGS84), cfg
        )
        np.testing.assert_allclose(q_series(1.0), state.q, atol=1e-15)
        assert report.converged
        assert report.iterations == 1

    def test_first_iterate_can_be_supplied(self, cfg):
        omega = ChebSeries.constant([0.0, 0.0, 0.5], T_SPAN)
        exact, _ = attitude_iterate(IDENTITY, omega, np.zeros(3), cfg)
        _, report = attitude_iterate(IDENTITY, omega, np.zeros(3), cfg, initial=exact)
        assert report.discrepancies[0] < 1e-14

    def test_iteration_cap(self):
        cfg = IterConfig(max_iter=2)
        omega = ChebSeries.constant([0.0, 0.0, 0.5], T_SPAN)
        _, report = attitude_iterate(IDENTITY, omega, np.zeros(3), cfg)
        assert report.iterations == 2
        assert not report.converged
        assert len(report.discrepancies) == 2
        assert report.discrepancies[1] < report.discrepancies[0]

    def test_overflow_is_reported_as_divergence(self, cfg):
        omega = ChebSeries.constant([1e300, 0.0, 0.0], T_SPAN)
        with pytest.raises(DivergenceError) as exc_info:
            attitude_iterate(IDENTITY, omega, np.zeros(3), cfg)
        assert exc_info.value.ctx["process"] == "attitude"
        assert exc_info.value.ctx["iteration"] == 2


class Test_transformed_force_integral:
    def test_identity_attitude(self):
        q = ChebSeries.constant(IDENTITY, T_SPAN)
        f = ChebSeries.constant([1.0, -2.0, 3.0], T_SPAN)
        i_f = transformed_force_integral(q, f)
        assert i_f.dim == 3
        np.testing.assert_allclose(i_f(1.0), [2.0, -4.0, 6.0], atol=1e-15)
        np.testing.assert_allclose(i_f(0.0), [1.0, -2.0, 3.0], atol=1e-15)

    def test_rotated_attitude(self):
        q = ChebSeries.constant(quat_exp([0.5 * np.pi, 0.0, 0.0]), T_SPAN)
        f = ChebSeries.constant([0.0, 2.0, 0.0], T_SPAN)
        np.testing.assert_allclose(
            transformed_force_integral(q, f)(1.0), [0.0, 0.0, 4.0], atol=1e-14
        )

    def test_full_degree(self):
        q = ChebSeries(np.zeros((4, 4)) + [1.0, 0.0, 0.0, 0.0], T_SPAN)
        f = ChebSeries(np.ones((3, 3)), T_SPAN)
        assert transformed_force_integral(q, f).max_degree == 2 * 3 + 2 + 1


def test_gravity_approx_at_fixed_position(cfg, earth):
    p = ChebSeries.constant([earth.semi_major_axis, 0.0, 0.0], T_SPAN)
    gamma = gravity_approx(p, cfg)
    assert gamma.max_degree == cfg.m_g
    np.testing.assert_allclose(gamma.coeffs[0], [-earth.gamma_e, 0.0, 0.0])
    np.testing.assert_allclose(gamma.coeffs[1:], 0.0, atol=1e-13)


class Test_velpos_iterate:
    def test_rest_on_rotating_earth(self, cfg, earth):
        state, _, force = _stationary_state()
        q = ChebSeries.constant(state.q, T_SPAN)
        f = ChebSeries.constant(force, T_SPAN)
        i_f = transformed_force_integral(q, f)
        v, p, report = velpos_iterate(
            state.v, state.p, i_f, earth_rate_e(earth), cfg, earth
        )
        np.testing.assert_allclose(v(1.0), 0.0, atol=1e-11)
        np.testing.assert_allclose(p(1.0), state.p, rtol=0.0, atol=1e-7)
        assert report.discrepancies[-1] < 1e-6

    def test_gravity_trace(self, cfg, earth):
        state, _, force = _stationary_state()
        i_f = transformed_force_integral(
            ChebSeries.constant(state.q, T_SPAN), ChebSeries.constant(force, T_SPAN)
        )
        _, _, report = velpos_iterate(
            state.v,
            state.p,
            i_f,
            earth_rate_e(earth),
            cfg,
            earth,
            trace_gravity=True,
        )
        assert len(report.gravity_errors) == report.iterations
        assert max(report.gravity_errors) < 1e-9

    def test_orders_agree(self, earth, coning_params):
        batch = synth_increments(coning_params, (0.0, T_SPAN), 8)
        start = truth_state(coning_params, 0.0).to_nav()
        standard = update_interval(start, batch, IterConfig())
        swapped = update_interval(start, batch, IterConfig(order="swapped"))
        assert all(standard.converged.values())
        assert all(swapped.converged.values())
        np.testing.assert_allclose(
            swapped.end_state.p, standard.end_state.p, rtol=0.0, atol=1e-7
        )
        np.testing.assert_allclose(
            swapped.end_state.v, standard.end_state.v, rtol=0.0, atol=1e-9
        )
        for name in ("v", "p"):
            ours = getattr(swapped.end_state, name)
            theirs = getattr(standard.end_state, name)
            assert np.linalg.norm(ours - theirs) <= 1e-12 * np.linalg.norm(theirs)


class Test_update_interval:
    def test_stationary(self, cfg):
        state, omega, force = _stationary_state()
        solution = update_interval(state, _constant_batch(omega, force), cfg)
        end = solution.end_state
        assert end.t == pytest.approx(T_SPAN)
        assert principal_angle(end.q, state.q) < 1e-12
        np.testing.assert_allclose(end.v, 0.0, atol=1e-11)
        np.testing.assert_allclose(end.p, state.p, rtol=0.0, atol=1e-7)

    def test_tracks_coning_truth(self, cfg, coning_params):
        batch = synth_increments(coning_params, (0.0, T_SPAN), 8)
        start = truth_state(coning_params, 0.0).to_nav()
        solution = update_interval(start, batch, cfg)
        truth = truth_state(coning_params, T_SPAN).to_nav()
        end = solution.end_state

        assert principal_angle(end.q, truth.q) < 1e-12
        np.testing.assert_allclose(end.v, truth.v, rtol=0.0, atol=1e-9)
        np.testing.assert_allclose(end.p, truth.p, rtol=0.0, atol=1e-7)
        assert solution.attitude.discrepancies[-1] < 1e-14
        assert solution.converged == {"attitude": True, "velpos": True}
        assert solution.velpos.discrepancies[-1] < cfg.tol
        assert set(solution.iterations_used) == {"attitude", "velpos"}
        assert solution.iterations_used["attitude"] <= cfg.iteration_cap

    def test_sample_inside_interval(self, cfg, coning_params):
        batch = synth_increments(coning_params, (0.0, T_SPAN), 8)
        start = truth_state(coning_params, 0.0).to_nav()
        solution = update_interval(start, batch, cfg)

        epochs = batch.times
        q, v, p = solution.sample(epochs)
        assert q.shape == (8, 4)
        truth = truth_state(coning_params, epochs)
        assert np.max(principal_angle(q, truth.q_eb)) < 1e-12
        np.testing.assert_allclose(v, truth.v_e, rtol=0.0, atol=1e-9)
        np.testing.assert_allclose(p, truth.p_e, rtol=0.0, atol=1e-7)

        q0, _, p0 = solution.sample(0.0)
        np.testing.assert_allclose(q0[0], start.q, atol=1e-15)
        np.testing.assert_allclose(p0[0], start.p, rtol=0.0, atol=1e-7)

    def test_sampled_rates(self, cfg, level_params):
        batch = synth_rates(level_params, (0.0, T_SPAN), 8)
        start = truth_state(level_params, 0.0).to_nav()
        end = update_interval(start, batch, cfg).end_state
        truth = truth_state(level_params, T_SPAN).to_nav()
        np.testing.assert_allclose(end.p, truth.p, rtol=0.0, atol=1e-6)

    def test_chained_intervals(self, cfg, coning_params):
        state = truth_state(coning_params, 0.0).to_nav()
        for k in range(3):
            batch = synth_increments(
                coning_params, (k * T_SPAN, (k + 1) * T_SPAN), 8
            )
            state = update_interval(state, batch, cfg).end_state
        truth = truth_state(coning_params, 3 * T_SPAN).to_nav()
        assert state.t == pytest.approx(3 * T_SPAN)
        np.testing.assert_allclose(state.p, truth.p, rtol=0.0, atol=1e-7)

    def test_epoch_mismatch(self, cfg):
        state, omega, force = _stationary_state()
        batch = _constant_batch(omega, force)
        shifted = NavState(q=state.q, v=state.v, p=state.p, t=1.0)
        with pytest.raises(TimestampMismatchError):
            update_interval(shifted, batch, cfg)

    def test_height_is_kept_at_rest(self, cfg):
        state, omega, force = _stationary_state()
        end = update_interval(state, _constant_batch(omega, force), cfg).end_state
        assert ecef2lla(end.p)[2] == pytest.approx(120.0, abs=1e-7)


class Test_coning_interval:
    @pytest.fixture
    def inputs(self, cfg, coning_params):
        batch = synth_increments(coning_params, (0.0, T_SPAN), 8)
        start = truth_state(coning_params, 0.0).to_nav()
        omega = fit_from_increments(batch.gyro, batch.times, cfg.n_omega)
        force = fit_from_increments(batch.accel, batch.times, cfg.n_f)
        return batch, start, omega, force

    def test_iteration_counts(self, cfg, inputs):
        batch, start, _, _ = inputs
        solution = update_interval(start, batch, cfg)
        assert solution.converged == {"attitude": True, "velpos": True}
        assert solution.iterations_used == {"attitude": 7, "velpos": 5}

    def test_discrepancy_decreases(self, cfg, inputs):
        batch, start, _, _ = inputs
        solution = update_interval(start, batch, cfg)
        # above the rounding floor of each process
        for report, floor in ((solution.attitude, 1e-13), (solution.velpos, 1e-6)):
            d = np.array(report.discrepancies)
            head = d[d > floor]
            assert head.size >= 2
            assert np.all(np.diff(head[1:]) < 0.0)

    def test_attitude_independent_of_first_iterate(self, inputs):
        _, start, omega, _ = inputs
        cfg = IterConfig(max_iter=40)
        omega_e = earth_rate_e(WGS84)
        exact, _ = attitude_iterate(start.q, omega, omega_e, cfg)
        tilted = quat_mul(start.q, quat_exp([0.05, -0.08, 0.03]))
        initial = ChebSeries(
            np.stack([tilted, np.full(4, 0.02), np.full(4, -0.01)]), T_SPAN
        )
        other, _ = attitude_iterate(start.q, omega, omega_e, cfg, initial=initial)
        tau = np.linspace(-1.0, 1.0, 9)
        np.testing.assert_allclose(other(tau), exact(tau), rtol=0.0, atol=1e-12)

    def test_velpos_independent_of_first_iterate(self, inputs, earth):
        _, start, omega, force = inputs
        cfg = IterConfig(max_iter=40)
        omega_e = earth_rate_e(earth)
        q_series, _ = attitude_iterate(start.q, omega, omega_e, cfg)
        i_f = transformed_force_integral(q_series, force)
        v_ref, p_ref, _ = velpos_iterate(start.v, start.p, i_f, omega_e, cfg, earth)
        initial = (
            ChebSeries.constant(start.v + 100.0, T_SPAN),
            ChebSeries.constant(start.p + 1e4, T_SPAN),
        )
        v_alt, p_alt, _ = velpos_iterate(
            start.v, start.p, i_f, omega_e, cfg, earth, initial=initial
        )
        tau = np.linspace(-1.0, 1.0, 9)
        np.testing.assert_allclose(v_alt(tau), v_ref(tau), rtol=1e-12, atol=1e-10)
        np.testing.assert_allclose(p_alt(tau), p_ref(tau), rtol=1e-12)

    def test_two_halves_match_whole(self, cfg, inputs, coning_params):
        batch, start, _, _ = inputs
        whole = update_interval(start, batch, cfg).end_state
        state = start
        for interval in ((0.0, 0.5 * T_SPAN), (0.5 * T_SPAN, T_SPAN)):
            half = synth_increments(coning_params, interval, 8)
            state = update_interval(state, half, cfg).end_state
        assert state.t == pytest.approx(whole.t)
        assert principal_angle(state.q, whole.q) < 1e-12
        np.testing.assert_allclose(state.v, whole.v, rtol=0.0, atol=1e-10)
        np.testing.assert_allclose(state.p, whole.p, rtol=0.0, atol=1e-9)


class Test_NavState:
    def test_rejects_non_unit_quaternion(self):
        with pytest.raises(ArgumentError):
            NavState(q=[2.0, 0.0, 0.0, 0.0], v=np.zeros(3), p=np.zeros(3))

    def test_accepts_rounding_level_drift(self):
        q = (1.0 + 1e-10) * quat_exp([0.1, 0.2, 0.3])
        state = NavState(q=q, v=np.zeros(3), p=np.zeros(3))
        assert not state.q.flags.writeable

    def test_non_finite_state_is_kept(self):
        state = NavState(q=[np.nan, 0.0, 0.0, 0.0], v=np.zeros(3), p=np.zeros(3))
        assert np.isnan(state.q[0])


class Test_reduced_config_check:
    @staticmethod
    def _batch(d1, d2, h=0.01) -> ImuBatch:
        return ImuBatch(
            t_start=0.0,
            t_span=2 * h,
            gyro=np.array([d1, d2], dtype=np.float64),
            accel=np.zeros((2, 3)),
        )

    def test_parallel_increments(self):
        out = reduced_config_check(self._batch([1e-3, 2e-3, 0.0], [2e-3, 4e-3, 0.0]))
        np.testing.assert_allclose(out.sigma_table, [3e-3, 6e-3, 0.0])
        assert out.discrepancy < 1e-15

    def test_zero_increments(self):
        out = reduced_config_check(self._batch([0.0] * 3, [0.0] * 3))
        assert out.discrepancy == 0.0
        assert out.angle_discrepancy == 0.0
        assert out.increment_norm == 0.0

    @pytest.mark.parametrize("scale", [1.0, 0.5, 0.25])
    def test_matches_coning_correction(self, scale):
        d1 = scale * np.array([4e-3, -1e-3, 2e-3])
        d2 = scale * np.array([1e-3, 3e-3, -2e-3])
        out = reduced_config_check(self._batch(d1, d2))
        assert out.increment_norm == pytest.approx(
            np.linalg.norm(d1) + np.linalg.norm(d2)
        )
        assert out.discrepancy <= 10.0 * out.increment_norm**4
        assert out.angle_discrepancy <= 10.0 * out.increment_norm**3

    def test_rejects_longer_batch(self):
        batch = _constant_batch(np.ones(3), np.ones(3), n=4)
        with pytest.raises(ArgumentError):
            reduced_config_check(batch)
