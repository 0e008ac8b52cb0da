"""Two-layer stratosphere model (ISA / 1976 USSA) and quadratic fits.

Altitudes are in metres throughout, except for the polynomial fits which
take kilometres (the variable the fits were made in).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

H_LOW = 11_000.0
H_HIGH = 32_000.0


@dataclass(frozen=True)
class AtmosphereConstants:
    p0: float = 101325.0
    p_b1: float = 22632.06
    p_b2: float = 5474.889
    H_b1: float = 11_000.0
    H_b2: float = 20_000.0
    T_b: float = 216.65
    L_b: float = 0.001  # K/m
    R: float = 8.31432
    R_sp: float = 287.052
    g: float = 9.8
    M_air: float = 0.0289644

    def __post_init__(self):
        for f in fields(self):
            if not getattr(self, f.name) > 0:
                raise ValueError(f"atmosphere constant {f.name} must be > 0")

    @property
    def gM(self) -> float:
        return self.g * self.M_air


ISA = AtmosphereConstants()


@dataclass(frozen=True)
class AtmosphereSample:
    altitude: float
    pressure: float
    relative_pressure: float
    temperature: float
    density: float


def _check_range(altitude: float) -> None:
    if not (H_LOW <= altitude <= H_HIGH):
        raise ValueError(
            f"altitude {altitude:.1f} m outside stratosphere model range "
            f"[{H_LOW:.0f}, {H_HIGH:.0f}] m"
        )


def pressure_branch1(altitude: float, c: AtmosphereConstants = ISA) -> float:
    """Isothermal layer pressure, evaluated without a range check."""
    return c.p_b1 * math.exp(-c.gM * (altitude - c.H_b1) / (c.R * c.T_b))


def pressure_branch2(altitude: float, c: AtmosphereConstants = ISA) -> float:
    """Inversion layer pressure, evaluated without a range check."""
    T = c.T_b + c.L_b * (altitude - c.H_b2)
    return c.p_b2 * (c.T_b / T) ** (c.gM / (c.R * c.L_b))


def pressure_at(altitude: float, c: AtmosphereConstants = ISA) -> float:
    _check_range(altitude)
    if altitude <= c.H_b2:
        return pressure_branch1(altitude, c)
    return pressure_branch2(altitude, c)


def temperature_at(altitude: float, c: AtmosphereConstants = ISA) -> float:
    _check_range(altitude)
    if altitude <= c.H_b2:
        return c.T_b
    return c.T_b + c.L_b * (altitude - c.H_b2)


def density_at(altitude: float, c: AtmosphereConstants = ISA) -> float:
    return pressure_at(altitude, c) / (c.R_sp * temperature_at(altitude, c))


def density_slope(altitude: float, c: AtmosphereConstants = ISA) -> float:
    """d(rho)/dH in kg/m^4 (one-sided from above at the 20 km seam)."""
    rho = density_at(altitude, c)
    if altitude < c.H_b2:
        return -rho * c.gM / (c.R * c.T_b)
    T = temperature_at(altitude, c)
    return -rho * (c.gM / (c.R * T) + c.L_b / T)


def sample(altitude: float, c: AtmosphereConstants = ISA) -> AtmosphereSample:
    p = pressure_at(altitude, c)
    T = temperature_at(altitude, c)
    return AtmosphereSample(
        altitude=altitude,
        pressure=p,
        relative_pressure=p / c.p0,
        temperature=T,
        density=p / (c.R_sp * T),
    )


def altitude_for_density(rho: float, c: AtmosphereConstants = ISA) -> float:
    """Invert density_at in closed form.

    Each layer is solved separately. A layer solution counts only if it
    lands inside that layer; when both do (only possible at the seam) the
    upper layer wins. The result may fall outside the model range, callers
    clamp it.
    """
    if rho <= 0:
        raise ValueError("target density must be positive")
    # rho * R_sp is the quantity the closed forms are written in
    w = rho * c.R_sp
    h1 = c.H_b1 - (c.R * c.T_b / c.gM) * math.log(w * c.T_b / c.p_b1)
    theta = c.R * c.L_b / (c.gM + c.R * c.L_b)
    k = c.gM / (c.R * c.L_b)
    T2 = (c.p_b2 * c.T_b**k / w) ** theta
    h2 = c.H_b2 - c.T_b / c.L_b + T2 / c.L_b
    if h2 >= c.H_b2:
        return h2
    return h1


# Quadratic fits over 18-24 km; h in km.

def density_poly(altitude_km: float) -> float:
    h = altitude_km
    return (0.95162 * h * h - 52.29356 * h + 753.39927) / 1000.0


def pressure_poly(altitude_km: float) -> float:
    h = altitude_km
    return 60.0 * h * h - 3276.7 * h + 47022.8


@dataclass(frozen=True)
class ExactDensity:
    """Density source backed by the piecewise ISA model."""

    constants: AtmosphereConstants = ISA

    def density(self, altitude: float) -> float:
        return density_at(altitude, self.constants)

    def slope(self, altitude: float) -> float:
        return density_slope(altitude, self.constants)

    def altitude_for(self, rho: float) -> float:
        return altitude_for_density(rho, self.constants)


@dataclass(frozen=True)
class PolyDensity:
    """Density source backed by the 18-24 km quadratic fit."""

    def density(self, altitude: float) -> float:
        return density_poly(altitude / 1000.0)

    def slope(self, altitude: float) -> float:
        h = altitude / 1000.0
        return (2 * 0.95162 * h - 52.29356) / 1000.0 / 1000.0

    def altitude_for(self, rho: float) -> float:
        # decreasing root of the quadratic; its vertex sits near 27.5 km
        a, b, cc = 0.95162, -52.29356, 753.39927 - 1000.0 * rho
        disc = b * b - 4 * a * cc
        if disc < 0:
            return math.inf
        return 1000.0 * (-b - math.sqrt(disc)) / (2 * a)
