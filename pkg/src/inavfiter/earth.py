"""
WGS-84 Earth model: Somigliana gravity, geodetic/ECEF conversion and the
local-level (North-Up-East) frame quantities.

Geodetic positions are arrays ``[lon, lat, h]`` (rad, rad, m); ECEF positions
and Earth-frame vectors are arrays ``[x, y, z]`` (m). Local-level vectors are
ordered North, Up, East.
"""

import math
from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt

from .exc import ArgumentError, NumericalError, SingularityError

__all__ = (
    "EarthModel",
    "WGS84",
    "GeodeticPos",
    "EcefPos",
    "POLE_MARGIN",
    "somigliana_gravity",
    "gravity_ecef",
    "cne_from_geodetic",
    "lla2ecef",
    "ecef2lla",
    "radii",
    "curvature_matrix",
    "transport_rate",
    "earth_rate_n",
    "earth_rate_e",
    "check_latitude",
)

FloatArray = npt.NDArray[np.float64]
GeodeticPos = FloatArray
EcefPos = FloatArray

# latitude margin below which the local-level mechanization is rejected
POLE_MARGIN = 1e-6

ECEF2LLA_MAX_ITER = 10
ECEF2LLA_TOL = 1e-12


@dataclass(frozen=True, slots=True)
class EarthModel:
    """
    Reference ellipsoid and normal-gravity constants.

    Derived quantities (``semi_minor_axis``, ``e2``, ``k``, ``m``) are computed
    at construction and cross-checked against their defining identities.
    """

    semi_major_axis: float = 6378137.0
    flattening: float = 1.0 / 298.257223563
    rotation_rate: float = 7.292115e-5
    gm: float = 3.986004418e14
    gamma_e: float = 9.7803253359
    gamma_p: float = 9.8321849378

    semi_minor_axis: float = field(init=False)
    e2: float = field(init=False)
    k: float = field(init=False)
    m: float = field(init=False)

    def __post_init__(self) -> None:
        if self.semi_major_axis <= 0.0 or not 0.0 <= self.flattening < 1.0:
            raise ArgumentError(
                "Invalid ellipsoid (a=%r, f=%r)"
                % (self.semi_major_axis, self.flattening)
            )
        big_r, f = self.semi_major_axis, self.flattening
        r = big_r * (1.0 - f)
        derived = {
            "semi_minor_axis": r,
            "e2": f * (2.0 - f),
            "k": r * self.gamma_p / (big_r * self.gamma_e) - 1.0,
            "m": self.rotation_rate**2 * big_r**2 * r / self.gm,
        }
        for name, value in derived.items():
            object.__setattr__(self, name, value)

        identities = (
            (self.e2, 1.0 - (r / big_r) ** 2),
            (self.semi_minor_axis, big_r * math.sqrt(1.0 - self.e2)),
            ((1.0 + self.k) * big_r * self.gamma_e, r * self.gamma_p),
            (self.m * self.gm, self.rotation_rate**2 * big_r**2 * r),
        )
        for lhs, rhs in identities:
            if not math.isclose(lhs, rhs, rel_tol=1e-12):
                raise NumericalError(
                    "Earth model constants are inconsistent: %r != %r" % (lhs, rhs)
                )

    @property
    def eccentricity(self) -> float:
        return math.sqrt(self.e2)


WGS84 = EarthModel()


def somigliana_gravity(
    lat: npt.ArrayLike, h: npt.ArrayLike, earth: EarthModel = WGS84
) -> FloatArray:
    """Normal gravity magnitude with first- and second-order height terms."""
    sin2 = np.sin(np.asarray(lat, dtype=np.float64)) ** 2
    h = np.asarray(h, dtype=np.float64)
    big_r, f = earth.semi_major_axis, earth.flattening
    surface = earth.gamma_e * (1.0 + earth.k * sin2) / np.sqrt(1.0 - earth.e2 * sin2)
    return surface * (
        1.0
        - 2.0 * h / big_r * (1.0 + f + earth.m - 2.0 * f * sin2)
        + 3.0 * h * h / big_r**2
    )


def cne_from_geodetic(lon: npt.ArrayLike, lat: npt.ArrayLike) -> FloatArray:
    """``C_n^e``: columns are the North, Up and East axes expressed in ECEF."""
    lon, lat = np.broadcast_arrays(
        np.asarray(lon, dtype=np.float64), np.asarray(lat, dtype=np.float64)
    )
    sl, cl = np.sin(lat), np.cos(lat)
    so, co = np.sin(lon), np.cos(lon)
    rows = (
        (-sl * co, cl * co, -so),
        (-sl * so, cl * so, co),
        (cl, sl, np.zeros_like(sl)),
    )
    return np.stack([np.stack(row, axis=-1) for row in rows], axis=-2)


def lla2ecef(lla: npt.ArrayLike, earth: EarthModel = WGS84) -> EcefPos:
    p = np.asarray(lla, dtype=np.float64)
    lon, lat, h = p[..., 0], p[..., 1], p[..., 2]
    sl = np.sin(lat)
    n = earth.semi_major_axis / np.sqrt(1.0 - earth.e2 * sl * sl)
    return np.stack(
        (
            (n + h) * np.cos(lat) * np.cos(lon),
            (n + h) * np.cos(lat) * np.sin(lon),
            (n * (1.0 - earth.e2) + h) * sl,
        ),
        axis=-1,
    )


def ecef2lla(pos: npt.ArrayLike, earth: EarthModel = WGS84) -> GeodeticPos:
    """
    Geodetic coordinates by fixed-point iteration on latitude.

    Longitude is 0 on the polar axis. Raises :class:`NumericalError` when the
    latitude update has not dropped below ``ECEF2LLA_TOL`` after
    ``ECEF2LLA_MAX_ITER`` steps.
    """
    p = np.asarray(pos, dtype=np.float64)
    x, y, z = p[..., 0], p[..., 1], p[..., 2]
    rho = np.hypot(x, y)
    lon = np.arctan2(y, x)
    big_r, e2 = earth.semi_major_axis, earth.e2

    lat = np.arctan2(z, rho * (1.0 - e2))
    step = np.full_like(lat, np.inf)
    for _ in range(ECEF2LLA_MAX_ITER):
        sl = np.sin(lat)
        n = big_r / np.sqrt(1.0 - e2 * sl * sl)
        updated = np.arctan2(z + e2 * n * sl, rho)
        step = np.abs(updated - lat)
        lat = updated
        if np.all(step <= 1e-15):
            break

    if np.any(step > ECEF2LLA_TOL) or not np.all(np.isfinite(lat)):
        raise NumericalError(
            "ECEF to geodetic conversion did not converge (last step %r rad)"
            % float(np.max(step))
        )

    sl, cl = np.sin(lat), np.cos(lat)
    h = rho * cl + z * sl - big_r * np.sqrt(1.0 - e2 * sl * sl)
    return np.stack((lon, lat, h), axis=-1)


def gravity_ecef(pos: npt.ArrayLike, earth: EarthModel = WGS84) -> FloatArray:
    """Normal gravity ``C_n^e [0, -g, 0]`` expressed in the Earth frame."""
    lla = ecef2lla(pos, earth)
    lon, lat = lla[..., 0], lla[..., 1]
    g = somigliana_gravity(lat, lla[..., 2], earth)
    up = np.stack(
        (np.cos(lat) * np.cos(lon), np.cos(lat) * np.sin(lon), np.sin(lat)), axis=-1
    )
    return -g[..., np.newaxis] * up


def check_latitude(lat: float) -> None:
    if abs(lat) >= 0.5 * math.pi - POLE_MARGIN:
        raise SingularityError(
            "The local-level mechanization is singular at the poles",
            ctx=SingularityError.Context(latitude=float(lat)),
        )


def radii(
    lat: npt.ArrayLike, earth: EarthModel = WGS84
) -> tuple[FloatArray, FloatArray]:
    """
    Meridian and transverse radii of curvature ``(R_N, R_E)``, with the shape
    of ``lat``.
    """
    w2 = 1.0 - earth.e2 * np.sin(lat) ** 2
    r_e = earth.semi_major_axis / np.sqrt(w2)
    r_n = earth.semi_major_axis * (1.0 - earth.e2) / (w2 * np.sqrt(w2))
    return r_n, r_e


def curvature_matrix(lla: npt.ArrayLike, earth: EarthModel = WGS84) -> FloatArray:
    """``R_c`` mapping a NUE displacement onto ``[dlon, dlat, dh]``."""
    lon, lat, h = (float(c) for c in np.asarray(lla, dtype=np.float64))
    check_latitude(lat)
    r_n, r_e = radii(lat, earth)
    return np.array(
        [
            [0.0, 0.0, 1.0 / ((r_e + h) * math.cos(lat))],
            [1.0 / (r_n + h), 0.0, 0.0],
            [0.0, 1.0, 0.0],
        ]
    )


def transport_rate(
    v_n: npt.ArrayLike, lla: npt.ArrayLike, earth: EarthModel = WGS84
) -> FloatArray:
    """``omega_en^n`` for NUE velocity ``v_n`` at geodetic position ``lla``."""
    v_north, _, v_east = (float(c) for c in np.asarray(v_n, dtype=np.float64))
    _, lat, h = (float(c) for c in np.asarray(lla, dtype=np.float64))
    check_latitude(lat)
    r_n, r_e = radii(lat, earth)
    return np.array(
        [
            v_east / (r_e + h),
            v_east * math.tan(lat) / (r_e + h),
            -v_north / (r_n + h),
        ]
    )


def earth_rate_n(lat: float, earth: EarthModel = WGS84) -> FloatArray:
    """``omega_ie^n``; regular everywhere, including the poles."""
    return earth.rotation_rate * np.array([math.cos(lat), math.sin(lat), 0.0])


def earth_rate_e(earth: EarthModel = WGS84) -> FloatArray:
    """``omega_ie^e``."""
    return np.array([0.0, 0.0, earth.rotation_rate])
