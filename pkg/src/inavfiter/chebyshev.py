"""
Chebyshev series algebra on the normalized interval ``[-1, 1]``.

A physical update interval ``[0, t_N]`` is mapped onto ``[-1, 1]`` through
``t = t_N (1 + tau) / 2``. Every time function handled by the navigation core
(fitted rates, attitude, velocity, position, gravity) is a :class:`ChebSeries`
in ``tau``.
"""

import functools
from collections.abc import Callable
from dataclasses import dataclass
from typing import Self

import numpy as np
import numpy.typing as npt
from numpy.polynomial import chebyshev as npcheb
from typing_extensions import override

from .exc import ArgumentError, NumericalError

__all__ = (
    "ChebSeries",
    "cheb_eval_basis",
    "series_eval",
    "basis_product_indices",
    "integral_over_subinterval",
    "indefinite_integral",
    "fit_from_samples",
    "fit_from_increments",
    "interp_at_cosine_nodes",
    "truncate",
    "multiply",
    "coefficient_discrepancy",
)

FloatArray = npt.NDArray[np.float64]
BilinearOp = Callable[[FloatArray, FloatArray], FloatArray]

# roundoff allowance at the interval ends
TAU_SLACK = 1e-12


@dataclass(frozen=True, slots=True, eq=False)
class ChebSeries:
    """
    Truncated vector-valued Chebyshev series ``sum_i coeffs[i] * F_i(tau)``.

    Attributes:
        coeffs: Array of shape ``(max_degree + 1, dim)``. Row ``i`` multiplies
            ``F_i``. The array is copied and frozen at construction.
        t_span: Physical length of the interval mapped onto ``[-1, 1]``, seconds.
    """

    coeffs: FloatArray
    t_span: float = 0.0

    def __post_init__(self) -> None:
        coeffs = np.array(self.coeffs, dtype=np.float64)
        if coeffs.ndim == 1:
            coeffs = coeffs[:, np.newaxis]
        if coeffs.ndim != 2 or coeffs.shape[0] == 0:
            raise ArgumentError(
                "Coefficients must be a non-empty (degree + 1, dim) array, got "
                "shape %r" % (coeffs.shape,)
            )
        if not np.all(np.isfinite(coeffs)):
            raise ArgumentError("Coefficients must be finite")
        coeffs.flags.writeable = False
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def constant(cls, value: npt.ArrayLike, t_span: float, degree: int = 0) -> Self:
        """Series equal to ``value`` everywhere, padded with zeros up to ``degree``."""
        v = np.atleast_1d(np.asarray(value, dtype=np.float64))
        coeffs = np.zeros((degree + 1, v.size))
        coeffs[0] = v
        return cls(coeffs, t_span)

    @property
    def dim(self) -> int:
        return int(self.coeffs.shape[1])

    @property
    def max_degree(self) -> int:
        return int(self.coeffs.shape[0] - 1)

    def padded(self, degree: int) -> FloatArray:
        """Coefficient array zero-extended (never truncated) to ``degree``."""
        if degree <= self.max_degree:
            return np.array(self.coeffs)
        out = np.zeros((degree + 1, self.dim))
        out[: self.max_degree + 1] = self.coeffs
        return out

    def __call__(self, tau: npt.ArrayLike) -> FloatArray:
        return series_eval(self, tau)

    def __add__(self, other: "ChebSeries") -> "ChebSeries":
        n = max(self.max_degree, other.max_degree)
        return ChebSeries(self.padded(n) + other.padded(n), self.t_span)

    def __sub__(self, other: "ChebSeries") -> "ChebSeries":
        n = max(self.max_degree, other.max_degree)
        return ChebSeries(self.padded(n) - other.padded(n), self.t_span)

    def __neg__(self) -> "ChebSeries":
        return ChebSeries(-self.coeffs, self.t_span)

    def __mul__(self, factor: float) -> "ChebSeries":
        return ChebSeries(self.coeffs * factor, self.t_span)

    __rmul__ = __mul__

    @override
    def __repr__(self) -> str:
        return "ChebSeries(dim=%d, max_degree=%d, t_span=%r)" % (
            self.dim,
            self.max_degree,
            self.t_span,
        )


def _check_tau(tau: FloatArray) -> FloatArray:
    if np.any(tau < -1.0 - TAU_SLACK) or np.any(tau > 1.0 + TAU_SLACK):
        raise ArgumentError(
            "Normalized time must lie in [-1, 1], got %r" % (tau.tolist(),)
        )
    return np.clip(tau, -1.0, 1.0)


def cheb_eval_basis(i: int, tau: npt.ArrayLike) -> FloatArray:
    """
    Evaluate ``F_i(tau)`` by the three-term recurrence
    ``F_{i+1} = 2 tau F_i - F_{i-1}`` with ``F_0 = 1`` and ``F_1 = tau``.
    """
    if i < 0:
        raise ArgumentError("Polynomial degree must be non-negative, got %d" % i)
    t = np.asarray(tau, dtype=np.float64)
    prev, cur = np.ones_like(t), t
    if i == 0:
        return prev
    for _ in range(i - 1):
        prev, cur = cur, 2.0 * t * cur - prev
    return cur


def series_eval(s: ChebSeries, tau: npt.ArrayLike) -> FloatArray:
    """
    Evaluate ``s`` at ``tau`` by Clenshaw summation.

    A scalar ``tau`` yields shape ``(dim,)``; an array of shape ``(K,)`` yields
    ``(K, dim)``.
    """
    t = _check_tau(np.asarray(tau, dtype=np.float64))
    res = npcheb.chebval(t, s.coeffs)
    if t.ndim == 0:
        return np.asarray(res)
    return np.moveaxis(res, 0, -1)


ProductTerm = tuple[int, float]


def basis_product_indices(j: int, k: int) -> tuple[ProductTerm, ProductTerm]:
    """Linearization ``F_j F_k = (F_{j+k} + F_{|j-k|}) / 2``."""
    return (j + k, 0.5), (abs(j - k), 0.5)


def _antiderivative(i: int, tau: FloatArray) -> FloatArray:
    if i == 0:
        return tau
    if i == 1:
        return 0.5 * tau * tau
    return cheb_eval_basis(i + 1, tau) / (2.0 * (i + 1)) - cheb_eval_basis(
        i - 1, tau
    ) / (2.0 * (i - 1))


def integral_over_subinterval(
    i: int, tau_a: npt.ArrayLike, tau_b: npt.ArrayLike
) -> FloatArray:
    """Closed-form ``G_{i,[tau_a, tau_b]} = int_{tau_a}^{tau_b} F_i dtau``."""
    if i < 0:
        raise ArgumentError("Polynomial degree must be non-negative, got %d" % i)
    a = np.asarray(tau_a, dtype=np.float64)
    b = np.asarray(tau_b, dtype=np.float64)
    return _antiderivative(i, b) - _antiderivative(i, a)


def indefinite_integral(s: ChebSeries) -> ChebSeries:
    """
    Series of ``tau -> int_{-1}^{tau} s dtau'``. No ``t_N / 2`` scaling is
    applied; the result vanishes at ``tau = -1``.
    """
    return ChebSeries(npcheb.chebint(s.coeffs, m=1, lbnd=-1.0, axis=0), s.t_span)


def _check_fit_args(values: FloatArray, times: FloatArray, n: int) -> None:
    if values.ndim != 2 or values.shape[0] != times.shape[0]:
        raise ArgumentError(
            "Expected one sample per time stamp, got %d samples and %d times"
            % (values.shape[0], times.shape[0])
        )
    if n < 0 or n > times.shape[0] - 1:
        raise ArgumentError(
            "Fit degree must lie in [0, N-1] = [0, %d], got %d"
            % (times.shape[0] - 1, n)
        )
    if times[0] <= 0.0 or np.any(np.diff(times) <= 0.0):
        raise ArgumentError("Sample times must be positive and strictly increasing")


def _solve(matrix: FloatArray, rhs: FloatArray) -> FloatArray:
    if not np.all(np.isfinite(rhs)):
        raise NumericalError("Cannot fit non-finite samples")
    sol, _, rank, _ = np.linalg.lstsq(matrix, rhs, rcond=None)
    if rank < matrix.shape[1]:
        raise NumericalError(
            "Fit matrix is rank deficient (rank %d < %d)" % (rank, matrix.shape[1])
        )
    return np.asarray(sol)


def _as_samples(values: npt.ArrayLike) -> FloatArray:
    arr = np.asarray(values, dtype=np.float64)
    return arr[:, np.newaxis] if arr.ndim == 1 else arr


def fit_from_samples(
    samples: npt.ArrayLike, times: npt.ArrayLike, n: int
) -> ChebSeries:
    """
    Least-squares fit of point samples taken at ``times`` (``t_1 .. t_N``,
    relative to the interval start, ``t_N`` being the interval length).
    """
    values = _as_samples(samples)
    t = np.asarray(times, dtype=np.float64)
    _check_fit_args(values, t, n)
    t_span = float(t[-1])
    gamma = npcheb.chebvander(2.0 * t / t_span - 1.0, n)
    return ChebSeries(_solve(gamma, values), t_span)


def fit_from_increments(
    increments: npt.ArrayLike, times: npt.ArrayLike, n: int
) -> ChebSeries:
    """
    Least-squares fit of subinterval integrals over ``[t_{k-1}, t_k]`` with
    ``t_0 = 0`` and ``times = t_1 .. t_N``.
    """
    values = _as_samples(increments)
    t = np.asarray(times, dtype=np.float64)
    _check_fit_args(values, t, n)
    t_span = float(t[-1])
    tau = 2.0 * np.concatenate(([0.0], t)) / t_span - 1.0
    theta = np.empty((t.size, n + 1))
    for i in range(n + 1):
        theta[:, i] = 0.5 * t_span * integral_over_subinterval(i, tau[:-1], tau[1:])
    return ChebSeries(_solve(theta, values), t_span)


def interp_at_cosine_nodes(
    f: Callable[[FloatArray], npt.ArrayLike], m: int, p: int, t_span: float = 0.0
) -> ChebSeries:
    """
    Degree-``m`` series of ``f`` from its values at the ``p`` cosine nodes
    ``cos((k + 1/2) pi / p)``.

    ``f`` is called once with the array of nodes and must return one row per
    node.
    """
    if m < 0 or p < m:
        raise ArgumentError(
            "Node count must be at least the degree, got P=%d for m=%d" % (p, m)
        )
    angles = (np.arange(p) + 0.5) * np.pi / p
    values = _as_samples(f(np.cos(angles)))
    basis = np.cos(np.outer(np.arange(m + 1), angles))
    weights = np.full(m + 1, 2.0 / p)
    weights[0] = 1.0 / p
    return ChebSeries(weights[:, np.newaxis] * (basis @ values), t_span)


def truncate(s: ChebSeries, m: int) -> ChebSeries:
    if m < 0:
        raise ArgumentError("Truncation degree must be non-negative, got %d" % m)
    if m >= s.max_degree:
        return s
    return ChebSeries(s.coeffs[: m + 1], s.t_span)


@functools.lru_cache(maxsize=64)
def _linearization(na: int, nb: int) -> FloatArray:
    out = np.zeros((na + nb - 1, na, nb))
    for j in range(na):
        for k in range(nb):
            for degree, weight in basis_product_indices(j, k):
                out[degree, j, k] += weight
    out.flags.writeable = False
    return out


def _elementwise(a: FloatArray, b: FloatArray) -> FloatArray:
    return a * b


def multiply(a: ChebSeries, b: ChebSeries, op: BilinearOp = _elementwise) -> ChebSeries:
    """
    Product series of ``a`` and ``b`` at full degree
    ``a.max_degree + b.max_degree``.

    ``op`` combines coefficient pairs (elementwise product by default; the
    quaternion product or the cross product for the navigation kinematics) and
    must broadcast over leading axes.
    """
    pairs = op(a.coeffs[:, np.newaxis, :], b.coeffs[np.newaxis, :, :])
    table = _linearization(a.max_degree + 1, b.max_degree + 1)
    return ChebSeries(np.einsum("kij,ijd->kd", table, pairs), a.t_span)


def coefficient_discrepancy(a: ChebSeries, b: ChebSeries) -> float:
    """Root of the summed squared coefficient differences of two iterates."""
    n = max(a.max_degree, b.max_degree)
    return float(np.sqrt(np.sum((a.padded(n) - b.padded(n)) ** 2)))
