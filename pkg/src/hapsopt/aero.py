"""Steady level-flight power model and the closed-form speed/altitude optima."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .atmosphere import ExactDensity, PolyDensity

DensityModel = ExactDensity | PolyDensity
EXACT = ExactDensity()


@dataclass(frozen=True)
class Aircraft:
    mass: float = 640.0
    wing_area: float = 190.0
    cd0: float = 0.015
    oswald: float = 0.6385
    aspect_ratio: float = 30.0
    cl_max: float = 1.2
    prop_eff: float = 0.85
    engine_eff: float = 0.90
    accessory_power: float = 200.0
    g: float = 9.8

    def __post_init__(self):
        for name in ("mass", "wing_area", "cd0", "oswald", "aspect_ratio", "cl_max", "g"):
            if not getattr(self, name) > 0:
                raise ValueError(f"aircraft.{name} must be positive")
        for name in ("prop_eff", "engine_eff"):
            if not 0 < getattr(self, name) <= 1:
                raise ValueError(f"aircraft.{name} must be in (0, 1]")
        if self.accessory_power < 0:
            raise ValueError("aircraft.accessory_power must be non-negative")

    @property
    def weight(self) -> float:
        """Weight force in newtons."""
        return self.mass * self.g

    @property
    def k_induced(self) -> float:
        return 1.0 / (math.pi * self.oswald * self.aspect_ratio)

    @property
    def eta(self) -> float:
        return self.prop_eff * self.engine_eff


@dataclass(frozen=True)
class FlightState:
    altitude: float
    airspeed: float
    thrust: float
    propulsion_power: float
    required_power: float


def _thrust_rho(ac: Aircraft, rho: float, v: float) -> float:
    W, S = ac.weight, ac.wing_area
    return 0.5 * rho * v * v * S * ac.cd0 + ac.k_induced * 2 * W * W / (rho * S * v * v)


def thrust(ac: Aircraft, altitude: float, airspeed: float, atm: DensityModel = EXACT) -> float:
    if airspeed <= 0:
        raise ValueError(f"airspeed must be positive, got {airspeed}")
    return _thrust_rho(ac, atm.density(altitude), airspeed)


def propulsion_power(ac: Aircraft, altitude: float, airspeed: float, atm: DensityModel = EXACT) -> float:
    return thrust(ac, altitude, airspeed, atm) * airspeed / ac.eta


def required_power(ac: Aircraft, altitude: float, airspeed: float, atm: DensityModel = EXACT) -> float:
    return ac.accessory_power + propulsion_power(ac, altitude, airspeed, atm)


def flight_state(ac: Aircraft, altitude: float, airspeed: float, atm: DensityModel = EXACT) -> FlightState:
    T = thrust(ac, altitude, airspeed, atm)
    p = T * airspeed / ac.eta
    return FlightState(altitude, airspeed, T, p, p + ac.accessory_power)


def stall_speed(ac: Aircraft, altitude: float, atm: DensityModel = EXACT) -> float:
    return math.sqrt(2 * ac.weight / (atm.density(altitude) * ac.wing_area * ac.cl_max))


def stall_altitude(ac: Aircraft, airspeed: float, atm: DensityModel = EXACT) -> float:
    """Highest altitude at which ``airspeed`` is still at or above stall."""
    rho = 2 * ac.weight / (ac.wing_area * ac.cl_max * airspeed * airspeed)
    return atm.altitude_for(rho)


def power_gradient(
    ac: Aircraft, altitude: float, airspeed: float, atm: DensityModel = EXACT
) -> tuple[float, float]:
    """Analytic (dP/dH, dP/dV) of the propulsion power."""
    rho = atm.density(altitude)
    drho = atm.slope(altitude)
    W, S, V = ac.weight, ac.wing_area, airspeed
    k = ac.k_induced
    dH = (0.5 * drho * V**3 * S * ac.cd0 - k * 2 * W * W * drho / (rho * rho * S * V)) / ac.eta
    dV = (1.5 * rho * V * V * S * ac.cd0 - k * 2 * W * W / (rho * S * V * V)) / ac.eta
    return dH, dV


def min_power_speed(ac: Aircraft, altitude: float, atm: DensityModel = EXACT) -> float:
    """Unconstrained stationary point of P_pro in V (V_m)."""
    rho = atm.density(altitude)
    return math.sqrt(2 * ac.weight / (rho * ac.wing_area) * math.sqrt(ac.k_induced / (3 * ac.cd0)))


def optimal_speed(
    ac: Aircraft, altitude: float, v_max: float = 60.0, atm: DensityModel = EXACT
) -> float:
    """V_m clamped to the feasible speed band [V_s(H), v_max]."""
    vm = min_power_speed(ac, altitude, atm)
    vs = stall_speed(ac, altitude, atm)
    if vm < vs:
        return vs
    if vm > v_max:
        return v_max
    return vm


def stationary_density(ac: Aircraft, airspeed: float) -> float:
    """Density at which dP_pro/dH vanishes for a fixed airspeed."""
    if airspeed <= 0:
        raise ValueError(f"airspeed must be positive, got {airspeed}")
    return 2 * ac.weight / (ac.wing_area * airspeed**2) * math.sqrt(ac.k_induced / ac.cd0)


def min_power_altitude(ac: Aircraft, airspeed: float, atm: DensityModel = EXACT) -> float:
    """Unconstrained stationary altitude H_m (may lie outside any bounds)."""
    return atm.altitude_for(stationary_density(ac, airspeed))


def optimal_altitude(
    ac: Aircraft,
    airspeed: float,
    h_min: float = 18_000.0,
    h_max: float = 24_000.0,
    atm: DensityModel = EXACT,
    rule: str = "project",
) -> float:
    """Minimiser of P_pro over altitude at fixed airspeed.

    ``rule="project"`` projects H_m onto the feasible interval
    ``[h_min, min(h_max, stall_altitude)]``; P_pro is unimodal in H so the
    nearest bound is optimal when H_m falls outside. ``rule="unconstrained"``
    keeps H_m when inside ``[h_min, h_max]`` and returns ``h_max``
    otherwise, with no stall coupling.
    """
    hm = min_power_altitude(ac, airspeed, atm)
    if rule == "unconstrained":
        return hm if h_min <= hm <= h_max else h_max
    if rule != "project":
        raise ValueError(f"unknown altitude rule {rule!r}")
    upper = min(h_max, stall_altitude(ac, airspeed, atm))
    if upper < h_min:
        # too slow to fly anywhere in range; densest admissible air
        return h_min
    return min(max(hm, h_min), upper)
