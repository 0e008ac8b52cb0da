"""Sun position, clear-sky attenuation and harvested solar power."""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import datetime, timezone

from . import atmosphere as atm

UNIX_EPOCH_JD = 2440587.5


@dataclass(frozen=True)
class SolarContext:
    longitude: float  # deg east
    latitude: float  # deg north
    alpha_ext: float
    solar_constant: float = 1361.0

    def __post_init__(self):
        if not -90.0 <= self.latitude <= 90.0:
            raise ValueError(f"latitude {self.latitude} outside [-90, 90]")
        if not -180.0 <= self.longitude <= 180.0:
            raise ValueError(f"longitude {self.longitude} outside [-180, 180]")
        if self.alpha_ext <= 0 or self.solar_constant <= 0:
            raise ValueError("alpha_ext and solar_constant must be positive")


@dataclass(frozen=True)
class PanelConfig:
    efficiency: float = 0.20
    area: float = 95.0  # m^2, normal to the sun

    def __post_init__(self):
        if not 0 < self.efficiency <= 1:
            raise ValueError("panel efficiency must be in (0, 1]")
        if self.area <= 0:
            raise ValueError("panel area must be positive")


def _as_utc(when: datetime) -> datetime:
    if when.tzinfo is None:
        return when.replace(tzinfo=timezone.utc)
    return when.astimezone(timezone.utc)


def julian_day(when: datetime) -> float:
    """Continuous astronomical Julian day of a civil date-time (naive = UTC)."""
    return _as_utc(when).timestamp() / 86400.0 + UNIX_EPOCH_JD


def day_of_year(when: datetime) -> float:
    """Day of year starting at 1.0 on Jan 1 00:00 UTC, with fraction."""
    t = _as_utc(when)
    return t.timetuple().tm_yday + (t.hour + t.minute / 60 + t.second / 3600) / 24.0


def eccentricity_factor(day: float) -> float:
    return 1.0 + 0.034 * math.cos(2.0 * math.pi * day / 365.0)


def solar_elevation(context: SolarContext, when: datetime) -> float:
    """Geometric sun elevation in degrees (no refraction).

    Low-precision Meeus ephemeris in Julian centuries (as in the NOAA
    solar calculator): mean longitude/anomaly, equation of centre,
    apparent longitude, obliquity, then declination and equation of time.
    Good to roughly 0.01 deg for years 1800-2100.
    """
    jc = (julian_day(when) - 2451545.0) / 36525.0
    L0 = (280.46646 + jc * (36000.76983 + jc * 0.0003032)) % 360.0
    M = math.radians(357.52911 + jc * (35999.05029 - 0.0001537 * jc))
    e = 0.016708634 - jc * (0.000042037 + 0.0000001267 * jc)
    centre = (
        math.sin(M) * (1.914602 - jc * (0.004817 + 0.000014 * jc))
        + math.sin(2 * M) * (0.019993 - 0.000101 * jc)
        + math.sin(3 * M) * 0.000289
    )
    omega = math.radians(125.04 - 1934.136 * jc)
    app_long = math.radians(L0 + centre - 0.00569 - 0.00478 * math.sin(omega))
    eps0 = 23 + (26 + (21.448 - jc * (46.815 + jc * (0.00059 - jc * 0.001813))) / 60) / 60
    eps = math.radians(eps0 + 0.00256 * math.cos(omega))
    decl = math.asin(math.sin(eps) * math.sin(app_long))

    y = math.tan(eps / 2) ** 2
    L0r = math.radians(L0)
    eqtime = 4 * math.degrees(
        y * math.sin(2 * L0r)
        - 2 * e * math.sin(M)
        + 4 * e * y * math.sin(M) * math.cos(2 * L0r)
        - 0.5 * y * y * math.sin(4 * L0r)
        - 1.25 * e * e * math.sin(2 * M)
    )
    t = _as_utc(when)
    minutes = t.hour * 60 + t.minute + t.second / 60 + t.microsecond / 6e7
    true_solar_min = (minutes + eqtime + 4 * context.longitude) % 1440
    hour_angle = math.radians(true_solar_min / 4 - 180)
    lat = math.radians(context.latitude)
    cos_zen = math.sin(lat) * math.sin(decl) + math.cos(lat) * math.cos(decl) * math.cos(hour_angle)
    cos_zen = max(-1.0, min(1.0, cos_zen))
    return 90.0 - math.degrees(math.acos(cos_zen))


def relative_air_mass(zenith: float) -> float:
    """Kasten-Young air mass; ``inf`` when the sun is at or below the horizon."""
    if zenith >= 90.0:
        return math.inf
    z = max(zenith, 0.0)
    return 1.0 / (math.cos(math.radians(z)) + 0.50572 * (96.07995 - z) ** -1.6364)


def attenuation_factor(
    altitude: float,
    elevation: float,
    context: SolarContext,
    constants: atm.AtmosphereConstants = atm.ISA,
) -> float:
    if elevation <= 0.0:
        return 0.0
    p_rel = atm.pressure_at(altitude, constants) / constants.p0
    return math.exp(-p_rel * relative_air_mass(90.0 - elevation) * context.alpha_ext)


def irradiance_at(
    altitude: float,
    when: datetime,
    context: SolarContext,
    constants: atm.AtmosphereConstants = atm.ISA,
) -> float:
    elev = solar_elevation(context, when)
    f = attenuation_factor(altitude, elev, context, constants)
    if f == 0.0:
        return 0.0
    return context.solar_constant * eccentricity_factor(day_of_year(when)) * f


def harvested_power(
    altitude: float,
    when: datetime,
    context: SolarContext,
    panel: PanelConfig,
    constants: atm.AtmosphereConstants = atm.ISA,
) -> float:
    return panel.efficiency * panel.area * irradiance_at(altitude, when, context, constants)
