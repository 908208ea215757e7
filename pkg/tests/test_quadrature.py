import numpy as np
import pytest
from scipy.integrate import quad

from inavfiter.exc import ArgumentError, QuadratureError
from inavfiter.quadrature import GAUSS_WEIGHTS, KRONROD_WEIGHTS, NODES, gauss_kronrod


def _integrand(t: np.ndarray) -> np.ndarray:
    return np.column_stack((np.sin(3.0 * t), np.exp(-t), 1.0 / (1.0 + t * t)))


def test_rule_weights():
    assert NODES.size == 15
    assert KRONROD_WEIGHTS.sum() == pytest.approx(2.0, abs=1e-15)
    assert GAUSS_WEIGHTS.sum() == pytest.approx(2.0, abs=1e-15)
    np.testing.assert_allclose(NODES, -NODES[::-1])


def test_single_interval_against_scipy():
    out = gauss_kronrod(_integrand, 0.0, 2.0)
    assert out.shape == (3,)
    for d, fn in enumerate(
        (lambda t: np.sin(3.0 * t), lambda t: np.exp(-t), lambda t: 1 / (1 + t * t))
    ):
        expect, _ = quad(fn, 0.0, 2.0, epsabs=1e-15, epsrel=1e-15)
        assert out[d] == pytest.approx(expect, rel=1e-14)


def test_many_intervals_at_once():
    edges = np.linspace(-1.0, 3.0, 41)
    pieces = gauss_kronrod(_integrand, edges[:-1], edges[1:])
    assert pieces.shape == (40, 3)
    np.testing.assert_allclose(
        pieces.sum(axis=0), gauss_kronrod(_integrand, -1.0, 3.0), rtol=1e-14
    )


def test_polynomials_are_exact():
    out = gauss_kronrod(lambda t: t**9 - 2.0 * t**4, -0.5, 1.5)
    expect = (1.5**10 - 0.5**10) / 10.0 - 2.0 * (1.5**5 + 0.5**5) / 5.0
    assert float(np.squeeze(out)) == pytest.approx(expect, rel=1e-14)


def test_bisects_hard_integrands():
    out = gauss_kronrod(np.sqrt, 0.0, 1.0, rel_tol=1e-12)
    assert float(np.squeeze(out)) == pytest.approx(2.0 / 3.0, rel=1e-10)


def test_gives_up_after_max_depth():
    with pytest.raises(QuadratureError) as exc_info:
        gauss_kronrod(np.sqrt, 0.0, 1.0, rel_tol=1e-15, max_depth=0)
    assert "[0.0, 1.0]" in str(exc_info.value)


@pytest.mark.parametrize("lower, upper", [(1.0, 1.0), (2.0, 1.0)])
def test_rejects_empty_intervals(lower, upper):
    with pytest.raises(ArgumentError):
        gauss_kronrod(np.sin, lower, upper)
