"""
Adaptive Gauss-Kronrod (7/15) quadrature of vector-valued integrands.

All intervals pending at one bisection level are evaluated in a single call of
the integrand, which therefore must accept a 1-D array of abscissae and return
one row per abscissa.
"""

from collections.abc import Callable

import numpy as np
import numpy.typing as npt

from .exc import ArgumentError, QuadratureError

__all__ = ("gauss_kronrod", "REL_TOL", "ABS_TOL", "MAX_DEPTH")

FloatArray = npt.NDArray[np.float64]
Integrand = Callable[[FloatArray], npt.ArrayLike]

REL_TOL = 1e-15
ABS_TOL = 1e-18
MAX_DEPTH = 40

_XK_HALF = np.array(
    [
        0.991455371120812639206854697526329,
        0.949107912342758524526189684047851,
        0.864864423359769072789712788640926,
        0.741531185599394439863864773280788,
        0.586087235467691130294144845693013,
        0.405845151377397166906606412076961,
        0.207784955007898467600689403773245,
        0.0,
    ]
)
_WK_HALF = np.array(
    [
        0.022935322010529224963732008058970,
        0.063092092629978553290700663189204,
        0.104790010322250183839876322541518,
        0.140653259715525918745189590510238,
        0.169004726639267902826583426598550,
        0.190350578064785409913256402421014,
        0.204432940075298892414161999234649,
        0.209482141084727828012999174891714,
    ]
)
# Gauss weights for the Kronrod nodes 1, 3, 5 and the centre
_WG_HALF = np.array(
    [
        0.0,
        0.129484966168869693270611432679082,
        0.0,
        0.279705391489276667901467771423780,
        0.0,
        0.381830050505118944950369775488975,
        0.0,
        0.417959183673469387755102040816327,
    ]
)

# full 15-point rule, symmetric about the centre
NODES = np.concatenate((-_XK_HALF[:-1], _XK_HALF[::-1]))
KRONROD_WEIGHTS = np.concatenate((_WK_HALF[:-1], _WK_HALF[::-1]))
GAUSS_WEIGHTS = np.concatenate((_WG_HALF[:-1], _WG_HALF[::-1]))


def gauss_kronrod(
    f: Integrand,
    lower: npt.ArrayLike,
    upper: npt.ArrayLike,
    rel_tol: float = REL_TOL,
    abs_tol: float = ABS_TOL,
    max_depth: int = MAX_DEPTH,
) -> FloatArray:
    """
    Integrate ``f`` over ``[lower, upper]``.

    ``lower`` and ``upper`` may be arrays of shape ``(M,)`` to integrate over
    ``M`` intervals at once; the result then has one row per interval. An
    interval piece is accepted once every component satisfies
    ``|K15 - G7| <= max(rel_tol |K15|, abs_tol)``; otherwise it is bisected.

    Raises:
        ArgumentError: Some ``upper <= lower``.
        QuadratureError: Some piece is still rejected after ``max_depth``
            bisections.
    """
    a = np.asarray(lower, dtype=np.float64)
    b = np.asarray(upper, dtype=np.float64)
    scalar = a.ndim == 0 and b.ndim == 0
    a, b = np.broadcast_arrays(np.atleast_1d(a), np.atleast_1d(b))
    if not np.all(b > a):
        raise ArgumentError("Integration bounds must be increasing")

    lo, hi = a.copy(), b.copy()
    owner = np.arange(a.size)
    result: FloatArray | None = None

    for _ in range(max_depth + 1):
        centre = 0.5 * (lo + hi)
        half = 0.5 * (hi - lo)
        abscissae = centre[:, np.newaxis] + half[:, np.newaxis] * NODES
        values = np.asarray(f(abscissae.ravel()), dtype=np.float64)
        values = values.reshape(lo.size, NODES.size, -1)
        if result is None:
            result = np.zeros((a.size, values.shape[-1]))

        kronrod = half[:, np.newaxis] * np.einsum("j,mjd->md", KRONROD_WEIGHTS, values)
        gauss = half[:, np.newaxis] * np.einsum("j,mjd->md", GAUSS_WEIGHTS, values)
        bound = np.maximum(rel_tol * np.abs(kronrod), abs_tol)
        done = np.all(np.abs(kronrod - gauss) <= bound, axis=1)
        np.add.at(result, owner[done], kronrod[done])

        if np.all(done):
            return result[0] if scalar else result

        lo, hi, centre, owner = lo[~done], hi[~done], centre[~done], owner[~done]
        lo, hi = np.concatenate((lo, centre)), np.concatenate((centre, hi))
        owner = np.concatenate((owner, owner))

    failed = int(owner[0])
    raise QuadratureError(
        "%d pieces still exceed the tolerance after %d bisections"
        % (lo.size, max_depth),
        ctx=QuadratureError.Context(lower=float(a[failed]), upper=float(b[failed])),
    )
