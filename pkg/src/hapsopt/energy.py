"""Battery bookkeeping: net power, state recursion and the night budget."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field


@dataclass(frozen=True)
class BatteryParams:
    charge_eff: float = 0.93
    discharge_eff: float = 0.97
    capacity: float = 120 * 3.6e6  # J (120 kWh)
    charge_threshold: float = 0.0  # W

    def __post_init__(self):
        for name in ("charge_eff", "discharge_eff"):
            if not 0 < getattr(self, name) <= 1:
                raise ValueError(f"battery.{name} must be in (0, 1]")
        if self.capacity <= 0:
            raise ValueError("battery.capacity must be positive")


@dataclass
class LedgerRow:
    hour: int
    energy: float  # J, at the end of the interval
    p_net: float
    p_avail: float
    p_req: float
    p_tx: float
    flags: list[str] = field(default_factory=list)


@dataclass
class EnergyLedger:
    start_energy: float
    params: BatteryParams
    rows: list[LedgerRow] = field(default_factory=list)

    @property
    def end_energy(self) -> float:
        return self.rows[-1].energy if self.rows else self.start_energy

    @property
    def deficits(self) -> int:
        return sum("deficit" in r.flags for r in self.rows)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["hour", "E_b_J", "P_net_W", "P_a_W", "P_req_W", "P_T_W", "flags"])
            for r in self.rows:
                w.writerow([r.hour, repr(r.energy), repr(r.p_net), repr(r.p_avail),
                            repr(r.p_req), repr(r.p_tx), ";".join(r.flags)])


def net_power(p_avail: float, p_req: float, p_tx: float) -> float:
    return p_avail - p_req - p_tx


def battery_efficiency(p_net: float, params: BatteryParams) -> float:
    return params.charge_eff if p_net >= params.charge_threshold else params.discharge_eff


def step_battery(e_prev: float, p_net: float, dt: float, params: BatteryParams) -> tuple[float, list[str]]:
    """One step of E <- E + eta_b * P_net * dt, clamped to [0, capacity].

    Returns the new energy and any of the flags ``"saturated"`` (charge
    clipped at capacity) or ``"deficit"`` (demand exceeded stored energy).
    """
    if not 0 <= e_prev <= params.capacity:
        raise ValueError(f"battery energy {e_prev} outside [0, {params.capacity}]")
    e = e_prev + battery_efficiency(p_net, params) * p_net * dt
    if e > params.capacity:
        return params.capacity, ["saturated"]
    if e < 0:
        return 0.0, ["deficit"]
    return e, []


def night_budget(e_dusk: float, night_hours: float, p_pro: float, p_acc: float, params: BatteryParams) -> float:
    """Constant transmit power the stored energy can fund through the night."""
    if night_hours <= 0:
        raise ValueError("night_hours must be positive")
    return max(0.0, params.discharge_eff * e_dusk / (night_hours * 3600.0) - p_pro - p_acc)


def storage_requirement(
    night_hours: float,
    p_pro: float,
    p_acc: float,
    p_tx_night: float,
    params: BatteryParams,
    remaining_daylight_hours: float,
    stored_energy: float = 0.0,
) -> float:
    """Per-daylight-hour charging set-aside (W) that fills the night need.

    ``stored_energy`` (J) already in the battery is credited against the
    need; with the default of zero this is the plain set-aside.
    """
    if remaining_daylight_hours <= 0:
        raise ValueError("remaining_daylight_hours must be positive")
    need_wh = night_hours * (p_pro + p_acc + p_tx_night) / params.discharge_eff
    short_wh = max(0.0, need_wh - stored_energy / 3600.0)
    return short_wh / (params.charge_eff * remaining_daylight_hours)


def night_target(night_hours: float, p_pro: float, p_acc: float, params: BatteryParams) -> float:
    """Night transmit power a full battery would fund."""
    return night_budget(params.capacity, night_hours, p_pro, p_acc, params)
