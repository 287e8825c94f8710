"""Coordinate projection and angle geometry.

Branch bearings are measured on a planar UTM projection so that a wind
vector (given in east/north components) and a conductor axis live in the
same frame; their difference is the attack angle that drives convective
cooling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ProjectionError

# WGS-84 ellipsoid
_A = 6378137.0
_F = 1 / 298.257223563
_K0 = 0.9996
_FALSE_EASTING = 500_000.0

# Haversine sphere radius, km. The equatorial radius keeps equatorial
# geodesics exact; the <0.7% meridional overestimate is immaterial at the
# 100 km eligibility scale this feeds.
EARTH_RADIUS_KM = 6378.137


@dataclass(frozen=True)
class PlanarPoint:
    """UTM easting/northing in metres. Northing is signed from the equator
    (no 10,000 km false northing) so planar angle geometry stays continuous
    across the equator."""

    x: float
    y: float
    zone: int


def utm_zone(longitude: float) -> int:
    zone = int(math.floor((longitude + 180.0) / 6.0)) + 1
    return min(max(zone, 1), 60)


def to_utm(latitude: float, longitude: float, forced_zone: int | None = None) -> PlanarPoint:
    """Project WGS-84 coordinates to UTM.

    ``forced_zone`` projects into that zone's plane even off-zone, which is
    needed so both endpoints of a branch straddling a zone boundary share a
    plane. Uses the 6th-order Krueger series (millimetre accuracy within a
    zone, still well-conditioned a few degrees outside it).
    """
    if not abs(latitude) < 84.0:
        raise ProjectionError(f"latitude {latitude} outside UTM domain (|lat| < 84)")
    if not -180.0 <= longitude <= 180.0:
        raise ProjectionError(f"longitude {longitude} out of range")
    zone = forced_zone if forced_zone is not None else utm_zone(longitude)
    if not 1 <= zone <= 60:
        raise ProjectionError(f"UTM zone {zone} out of range 1..60")
    central_meridian = math.radians((zone - 1) * 6 - 180 + 3)

    lat = math.radians(latitude)
    lon = math.radians(longitude) - central_meridian

    ecc = math.sqrt(_F * (2 - _F))
    n = _F / (2 - _F)
    n2, n3 = n * n, n**3
    n4, n5, n6 = n**4, n**5, n**6

    tau = math.tan(lat)
    sigma = math.sinh(ecc * math.atanh(ecc * tau / math.sqrt(1 + tau * tau)))
    tau_p = tau * math.sqrt(1 + sigma * sigma) - sigma * math.sqrt(1 + tau * tau)

    xi_p = math.atan2(tau_p, math.cos(lon))
    eta_p = math.asinh(math.sin(lon) / math.hypot(tau_p, math.cos(lon)))

    rect_radius = _A / (1 + n) * (1 + n2 / 4 + n4 / 64 + n6 / 256)
    alpha = (
        n / 2 - 2 * n2 / 3 + 5 * n3 / 16 + 41 * n4 / 180 - 127 * n5 / 288 + 7891 * n6 / 37800,
        13 * n2 / 48 - 3 * n3 / 5 + 557 * n4 / 1440 + 281 * n5 / 630 - 1983433 * n6 / 1935360,
        61 * n3 / 240 - 103 * n4 / 140 + 15061 * n5 / 26880 + 167603 * n6 / 181440,
        49561 * n4 / 161280 - 179 * n5 / 168 + 6601661 * n6 / 7257600,
        34729 * n5 / 80640 - 3418889 * n6 / 1995840,
        212378941 * n6 / 319334400,
    )
    xi = xi_p
    eta = eta_p
    for j, a_j in enumerate(alpha, start=1):
        xi += a_j * math.sin(2 * j * xi_p) * math.cosh(2 * j * eta_p)
        eta += a_j * math.cos(2 * j * xi_p) * math.sinh(2 * j * eta_p)

    easting = _K0 * rect_radius * eta + _FALSE_EASTING
    northing = _K0 * rect_radius * xi
    return PlanarPoint(easting, northing, zone)


def conductor_angle(start: PlanarPoint, end: PlanarPoint) -> float:
    """Bearing of the conductor axis, four-quadrant, in (-pi, pi]."""
    if start.zone != end.zone:
        raise ValueError(f"endpoints in different UTM zones ({start.zone}, {end.zone})")
    dx = end.x - start.x
    dy = end.y - start.y
    if dx == 0.0 and dy == 0.0:
        raise ValueError("coincident endpoints have no bearing")
    angle = math.atan2(dy, dx)
    return math.pi if angle == -math.pi else angle


def wind_angle(v_x: float, v_y: float) -> tuple[float, float]:
    """Wind direction (four-quadrant, (-pi, pi]) and speed from east/north
    velocity components."""
    if v_x == 0.0 and v_y == 0.0:
        raise ValueError("zero wind vector has no direction; treat as calm")
    angle = math.atan2(v_y, v_x)
    if angle == -math.pi:
        angle = math.pi
    return angle, math.hypot(v_x, v_y)


def great_circle_km(lat1: float, lon1: float, lat2: float, lon2: float) -> float:
    """Haversine great-circle distance in km."""
    p1, p2 = math.radians(lat1), math.radians(lat2)
    dp = p2 - p1
    dl = math.radians(lon2 - lon1)
    h = math.sin(dp / 2) ** 2 + math.cos(p1) * math.cos(p2) * math.sin(dl / 2) ** 2
    return 2.0 * EARTH_RADIUS_KM * math.asin(min(1.0, math.sqrt(h)))
