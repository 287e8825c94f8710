"""Weather-dependent line ratings via the multiplicative heat-balance model.

The capacity multiplier factors into a temperature term and a wind term,

    eta = eta_T * eta_v
    eta_T = sqrt((T_C - T_A) / (T_C - T_A_SLR))
    eta_v = sqrt(K_angle / K_angle_SLR) * (v / v_SLR)^0.26
            * max{1, 0.566 * ((rho_f / mu_f) * D * v)^0.04}

measured against the fixed weather assumptions behind the static rating.
AAR applies eta_T alone (no floor: hot hours rate below static); DLR
applies eta_T * max{1, eta_v} so wind never rates a line below its AAR.
Multipliers apply only to lines shorter than the eligibility length;
transformers and long lines keep their static ratings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from datetime import datetime

import numpy as np

from .errors import GridlineError, RatingCollapseError
from .geo import conductor_angle, to_utm, wind_angle
from .network import Branch, Network
from .util import format_hour
from .weather import WeatherGrid, WeatherSample, nearest_cell, sample

SLR = "slr"
AAR = "aar"
DLR = "dlr"
RATED_REGIMES = (SLR, AAR, DLR)

KELVIN_OFFSET = 273.15


def k_angle(phi: float) -> float:
    """Convective wind-angle weighting, IEEE-738 empirical polynomial.

    0.388 for wind along the conductor (phi = 0), 1.0 for perpendicular
    wind (phi = pi/2), the ideal cooling condition.
    """
    return 1.194 - math.cos(phi) + 0.194 * math.cos(2 * phi) + 0.368 * math.sin(2 * phi)


def fold_attack_angle(phi: float) -> float:
    """Reduce a raw wind-minus-conductor angle into [0, pi/2].

    Wind along a line in either direction cools identically, so the angle
    is folded modulo pi and reflected about pi/2. k_angle is monotone on
    the reduced domain, which removes the sign/branch ambiguity of the
    arctangents upstream.
    """
    m = math.fmod(abs(phi), math.pi)
    return min(m, math.pi - m)


@dataclass(frozen=True)
class RatingParams:
    """Assumed-weather constants behind the static rating, plus air
    properties and policy knobs. Temperatures are degrees C, angles radians.

    The defaults are config-overridable operating assumptions in line with
    common utility practice, not authoritative values; any reported study
    should set them explicitly.
    """

    t_conductor: float = 100.0  # max allowable conductor temperature
    t_ambient_slr: float = 40.0  # ambient temperature assumed for the static rating
    v_slr: float = 0.61  # wind speed assumed for the static rating, m/s (2 ft/s)
    phi_slr: float = 0.0  # attack angle assumed for the static rating (worst case)
    air_density: float = 1.029  # rho_f, kg/m^3
    air_viscosity: float = 2.043e-5  # mu_f, kg/(m*s)
    contingency_ratio: float = 1.146  # contingency limit / normal limit
    eligibility_length_km: float = 100.0  # lines at or beyond this stay static
    calm_wind_threshold: float = 0.01  # m/s; below this the wind term is 1
    diameter_fit_a: float = 2.0e-5  # m per A, conductor diameter ~ ampacity fit
    diameter_fit_b: float = 0.006  # m, fit intercept

    def __post_init__(self):
        if self.t_conductor <= self.t_ambient_slr:
            raise ValueError("t_conductor must exceed t_ambient_slr")
        if self.v_slr <= 0:
            raise ValueError("v_slr must be positive")
        if self.contingency_ratio < 1:
            raise ValueError("contingency_ratio must be >= 1")

    @property
    def k_angle_slr(self) -> float:
        return k_angle(fold_attack_angle(self.phi_slr))


def eta_temperature(t_ambient_k: float, params: RatingParams) -> float:
    """Temperature-only capacity factor (the AAR multiplier).

    Exceeds 1 when ambient is below the static-rating assumption and drops
    below 1 when above it; no floor is applied.
    """
    t_c = params.t_conductor + KELVIN_OFFSET
    t_slr = params.t_ambient_slr + KELVIN_OFFSET
    if t_ambient_k >= t_c:
        raise RatingCollapseError(
            f"ambient {t_ambient_k:.1f} K at or above conductor limit {t_c:.1f} K")
    return math.sqrt((t_c - t_ambient_k) / (t_c - t_slr))


def eta_wind(speed: float, phi: float, diameter: float, params: RatingParams) -> float:
    """Wind-only capacity factor from speed and attack angle.

    Calm wind (below the calm threshold) evaluates to 1, the value under
    the static-rating wind assumptions, instead of letting the v^0.26 power
    law annihilate the rating.
    """
    if speed < 0:
        raise ValueError("wind speed must be nonnegative")
    if diameter <= 0:
        raise ValueError("conductor diameter must be positive")
    if speed < params.calm_wind_threshold:
        return 1.0
    angle_term = math.sqrt(k_angle(fold_attack_angle(phi)) / params.k_angle_slr)
    speed_term = (speed / params.v_slr) ** 0.26
    reynolds = (params.air_density / params.air_viscosity) * diameter * speed
    reynolds_term = max(1.0, 0.566 * reynolds**0.04)
    return angle_term * speed_term * reynolds_term


def estimate_diameter(branch: Branch, network: Network,
                      params: RatingParams = RatingParams()) -> float:
    """Conductor diameter, explicit when given, else from the linear
    ampacity-to-diameter fit with ampacity backed out of the MVA rating at
    the from-bus voltage."""
    if branch.diameter_m is not None:
        return branch.diameter_m
    kv = network.bus(branch.from_bus).base_voltage
    ampacity = branch.static_rating * 1e3 / (math.sqrt(3.0) * kv)
    if ampacity <= 0:
        raise GridlineError(f"branch {branch.id}: nonpositive ampacity {ampacity}")
    return params.diameter_fit_a * ampacity + params.diameter_fit_b


def branch_eligible(branch: Branch, params: RatingParams) -> bool:
    return branch.kind == "line" and branch.length_km < params.eligibility_length_km


def branch_multiplier(weather_sample: WeatherSample | None, branch: Branch,
                      regime: str, params: RatingParams, diameter: float,
                      axis_angle: float | None = None) -> float:
    """Capacity multiplier for one branch-hour under a rating regime.

    Ineligible branches and hours with no weather data stay at 1 (the
    static rating). ``axis_angle`` is the conductor bearing, required for
    DLR unless the wind is calm.
    """
    if regime not in RATED_REGIMES:
        raise ValueError(f"unknown regime {regime!r}")
    if regime == SLR or weather_sample is None or not branch_eligible(branch, params):
        return 1.0
    eta_t = eta_temperature(weather_sample.ambient_temp, params)
    if regime == AAR:
        return eta_t
    speed = math.hypot(weather_sample.wind_u, weather_sample.wind_v)
    if speed < params.calm_wind_threshold:
        return eta_t  # max{1, eta_v} with eta_v = 1
    if axis_angle is None:
        raise ValueError("axis_angle required for DLR with non-calm wind")
    theta_wind, speed = wind_angle(weather_sample.wind_u, weather_sample.wind_v)
    eta_v = eta_wind(speed, theta_wind - axis_angle, diameter, params)
    return eta_t * max(1.0, eta_v)


@dataclass(frozen=True)
class RatingSeries:
    """Per-branch, per-hour flow limits for one regime."""

    regime: str
    hours: tuple[datetime, ...]
    branch_ids: tuple[int, ...]
    multiplier: np.ndarray  # (H, L)
    normal_limit: np.ndarray  # (H, L), MVA
    contingency_limit: np.ndarray  # (H, L), MVA


@dataclass
class _BranchGeometry:
    diameter: float
    eligible: bool
    cell: int | None
    axis_angle: float | None


def _branch_geometry(network: Network, weather: WeatherGrid | None,
                     params: RatingParams) -> list[_BranchGeometry]:
    """Hour-invariant per-branch data: diameter, eligibility, nearest
    weather cell for the midpoint, and conductor bearing (computed in the
    from-bus UTM zone so both endpoints share a plane)."""
    out = []
    for branch in network.branches:
        eligible = branch_eligible(branch, params)
        diameter = estimate_diameter(branch, network, params)
        cell = axis = None
        if eligible and weather is not None:
            mid_lat, mid_lon = network.branch_midpoint(branch)
            cell = nearest_cell(weather, mid_lat, mid_lon)
            a = network.bus(branch.from_bus)
            b = network.bus(branch.to_bus)
            start = to_utm(a.latitude, a.longitude)
            end = to_utm(b.latitude, b.longitude, forced_zone=start.zone)
            axis = conductor_angle(start, end)
        out.append(_BranchGeometry(diameter, eligible, cell, axis))
    return out


def build_rating_series(network: Network, weather: WeatherGrid | None,
                        hours: list[datetime], regime: str,
                        params: RatingParams) -> RatingSeries:
    """Assemble normal and contingency limits for every branch and hour.

    SLR needs no weather. For AAR/DLR every requested hour must fall inside
    the weather range; hours flagged absent fall back to multiplier 1.
    """
    if regime not in RATED_REGIMES:
        raise ValueError(f"unknown regime {regime!r}")
    if regime != SLR and weather is None:
        raise GridlineError(f"regime {regime} requires weather data")
    n_hours, n_branches = len(hours), network.n_branches
    multiplier = np.ones((n_hours, n_branches))
    if regime != SLR:
        geometry = _branch_geometry(network, weather, params)
        for h, hour in enumerate(hours):
            pos = weather.hour_pos(hour)  # raises if outside range
            if not weather.present[pos]:
                continue  # static-rating fallback for the whole hour
            for l, branch in enumerate(network.branches):
                geo = geometry[l]
                if not geo.eligible:
                    continue
                s = WeatherSample(weather.temperature[pos, geo.cell],
                                  weather.wind_u[pos, geo.cell],
                                  weather.wind_v[pos, geo.cell], geo.cell)
                try:
                    multiplier[h, l] = branch_multiplier(
                        s, branch, regime, params, geo.diameter, geo.axis_angle)
                except RatingCollapseError as exc:
                    raise RatingCollapseError(
                        f"branch {branch.id} at {format_hour(hour)}: {exc}") from None
    normal = network.static_rating[None, :] * multiplier
    return RatingSeries(regime, tuple(hours), tuple(b.id for b in network.branches),
                        multiplier, normal, params.contingency_ratio * normal)


def sweep_parameters(network: Network, weather: WeatherGrid, hours: list[datetime],
                     t_conductor_values: list[float], phi_slr_values: list[float],
                     base: RatingParams = RatingParams()) -> list[tuple[float, float, float]]:
    """Mean DLR multiplier over eligible branches and present hours for each
    (conductor temperature, assumed SLR attack angle) pair.

    Returns (t_conductor, phi_slr, mean multiplier) rows in sweep order.
    """
    if not t_conductor_values or not phi_slr_values:
        raise ValueError("parameter sweep needs at least one value per axis")
    rows = []
    eligible = np.array([branch_eligible(b, base) for b in network.branches])
    for t_c in t_conductor_values:
        for phi in phi_slr_values:
            params = replace(base, t_conductor=t_c, phi_slr=phi)
            series = build_rating_series(network, weather, hours, DLR, params)
            present = np.array([weather.present[weather.hour_pos(h)] for h in hours])
            block = series.multiplier[np.ix_(present, eligible)]
            mean = float(block.mean()) if block.size else float("nan")
            rows.append((t_c, phi, mean))
    return rows
