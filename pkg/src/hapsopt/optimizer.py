"""Day (rate) and night (propulsion) alternating optimisation, and the 24 h loop."""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone

import numpy as np

from . import aero, channel, energy, noma, solar
from .atmosphere import ExactDensity, PolyDensity
from .config import DateScenario, ScenarioConfig

ALTITUDE_STEP = 10.0  # m, grid for the storage-feasibility scan


@dataclass
class DayDecision:
    hour: float
    altitude: float
    airspeed: float
    p_avail: float
    p_req: float
    p_st: float
    p_tx: float
    allocations: list[noma.PowerAllocation]
    links: list[list[channel.UserLink]]
    sum_rate: float  # bit/s
    iterations: int
    converged: bool
    trace: list[float] = field(default_factory=list)  # R per iteration, bit/s
    flags: list[str] = field(default_factory=list)

    @property
    def p_tx_cell(self) -> float:
        return self.p_tx / len(self.allocations) if self.allocations else 0.0


@dataclass
class NightDecision:
    hour: float
    altitude: float
    airspeed: float
    p_pro: float
    iterations: int
    converged: bool
    trace: list[tuple[float, float, float]] = field(default_factory=list)  # (H, V, P_pro)


@dataclass
class HourRecord:
    hour: float
    is_day: bool
    altitude: float
    airspeed: float
    p_avail: float
    p_req: float
    p_st: float
    p_tx: float
    p_cell: float  # radiated per-cell power Upsilon*P_T/M
    sum_rate: float  # bit/s
    qos_users: int
    users: int
    iterations: int
    converged: bool
    flags: list[str]


@dataclass
class DayTrace:
    scenario: DateScenario
    omega_bps: float
    baseline: bool
    hours: list[HourRecord]
    ledger: energy.EnergyLedger
    night: NightDecision
    passes: int
    day_decisions: list[DayDecision]

    @property
    def daylight_hours(self) -> float:
        dt = self.hours[1].hour - self.hours[0].hour if len(self.hours) > 1 else 24.0
        return sum(h.is_day for h in self.hours) * dt


def density_model(cfg: ScenarioConfig):
    return PolyDensity() if cfg.polynomial_atmosphere else ExactDensity(cfg.atmosphere)


def solar_context(cfg: ScenarioConfig, scenario: DateScenario) -> solar.SolarContext:
    return solar.SolarContext(cfg.longitude, cfg.latitude, scenario.alpha_ext, cfg.solar_constant)


def instant_utc(cfg: ScenarioConfig, scenario: DateScenario, step: int) -> datetime:
    """UTC time of the midpoint of local step ``step`` on the scenario date."""
    local_mid = (step + 0.5) * cfg.dt_hours
    midnight = datetime(scenario.date.year, scenario.date.month, scenario.date.day, tzinfo=timezone.utc)
    return midnight + timedelta(hours=local_mid - cfg.utc_offset_hours)


class SunAt:
    """Harvested power as a function of altitude at one fixed instant."""

    def __init__(self, cfg: ScenarioConfig, scenario: DateScenario, when: datetime):
        self.ctx = solar_context(cfg, scenario)
        self.elevation = solar.solar_elevation(self.ctx, when)
        self.scale = cfg.panel.efficiency * cfg.panel.area * cfg.solar_constant
        self.scale *= solar.eccentricity_factor(solar.day_of_year(when))
        self.constants = cfg.atmosphere

    @property
    def is_day(self) -> bool:
        return self.elevation > 0.0

    def power(self, altitude: float) -> float:
        return self.scale * solar.attenuation_factor(altitude, self.elevation, self.ctx, self.constants)


def _links(cfg: ScenarioConfig, draws, altitude: float, p_tx: float):
    M = cfg.topology.num_cells
    pm = cfg.upsilon * p_tx / M
    return channel.build_links(cfg.topology, cfg.pattern, cfg.link, altitude, np.full(M, pm), draws=draws)


def solve_p1a(
    cells, omega_bps: float, bandwidth: float, partial_rule: str = "threshold"
) -> tuple[list[noma.PowerAllocation], float]:
    """Per-cell QoS-constrained allocation; returns allocations and sum rate (bit/s)."""
    omega = omega_bps / bandwidth
    allocs = []
    for m, links in enumerate(cells):
        A = np.array([x.composite for x in links])
        a = noma.allocate(A, omega, partial_rule)
        a.cell = m
        allocs.append(a)
    total = bandwidth * sum(a.rate for a in allocs)
    return allocs, total


def solve_p1b(margin, h_min: float, h_max: float, step: float = ALTITUDE_STEP) -> tuple[float, bool]:
    """Lowest altitude whose storage margin is non-negative.

    ``margin(H)`` is the power left after flight and the storage set-aside.
    Returns ``(H, ok)``; if no altitude qualifies, the altitude with the
    largest margin is returned with ``ok=False``.
    """
    if margin(h_min) >= 0.0:
        return h_min, True
    n = int(round((h_max - h_min) / step))
    grid = np.linspace(h_min, h_max, n + 1)
    vals = np.array([margin(h) for h in grid])
    ok = np.nonzero(vals >= 0.0)[0]
    if len(ok):
        return float(grid[ok[0]]), True
    return float(grid[int(np.argmax(vals))]), False


def solve_p1c(cfg: ScenarioConfig, altitude: float, atm=None) -> float:
    return aero.optimal_speed(cfg.aircraft, altitude, cfg.bounds.v_max, atm or density_model(cfg))


def _zero_allocs(cfg):
    K = cfg.topology.users_per_cell
    return [noma.PowerAllocation(np.zeros(K), "off", K, 0.0, m) for m in range(cfg.topology.num_cells)]


def run_algorithm1(
    cfg: ScenarioConfig,
    sun: SunAt,
    omega_bps: float,
    p_st: float,
    draws,
    hour: float = 0.0,
) -> DayDecision:
    """Alternate allocation, altitude and airspeed until the sum rate settles."""
    ac, b = cfg.aircraft, cfg.bounds
    atm = density_model(cfg)
    B = cfg.link.bandwidth

    def p_tx_at(h, v):
        return sun.power(h) - aero.required_power(ac, h, v, atm) - p_st

    def margin(h):
        return sun.power(h) - aero.required_power(ac, h, solve_p1c(cfg, h, atm), atm) - p_st

    H = 0.5 * (b.h_min + b.h_max)
    V = 1.1 * aero.stall_speed(ac, H, atm)
    P_T = p_tx_at(H, V)
    trace: list[float] = []
    flags: list[str] = []
    r_prev = None
    converged = False
    allocs = _zero_allocs(cfg)
    i = 0
    for i in range(1, cfg.max_iter + 1):
        if P_T > 0:
            allocs, _ = solve_p1a(_links(cfg, draws, H, P_T), omega_bps, B, cfg.partial_rule)
        else:
            allocs = _zero_allocs(cfg)
        H, ok = solve_p1b(margin, b.h_min, b.h_max)
        if not ok and "storage-shortfall" not in flags:
            flags.append("storage-shortfall")
        V = solve_p1c(cfg, H, atm)
        P_T = p_tx_at(H, V)
        if P_T > 0:
            cells = _links(cfg, draws, H, P_T)
            R = noma.evaluate_network(cells, allocs, B).total
        else:
            R = 0.0
        trace.append(R)
        if r_prev is not None and abs(R - r_prev) < cfg.delta:
            converged = True
            break
        r_prev = R

    p_req = aero.required_power(ac, H, V, atm)
    if P_T <= 0:
        flags.append("insufficient-solar")
        return DayDecision(hour, H, V, sun.power(H), p_req, p_st, 0.0, _zero_allocs(cfg), [],
                           0.0, i, converged, trace, flags)
    cells = _links(cfg, draws, H, P_T)
    R = noma.evaluate_network(cells, allocs, B).total
    if not converged:
        flags.append("not-converged")
    return DayDecision(hour, H, V, sun.power(H), p_req, p_st, P_T, allocs, cells, R, i, converged, trace, flags)


def run_algorithm2(cfg: ScenarioConfig, hour: float = 0.0, rule: str = "project", h0: float | None = None) -> NightDecision:
    """Alternate closed-form speed and altitude steps to minimise propulsion power."""
    ac, b = cfg.aircraft, cfg.bounds
    atm = density_model(cfg)
    H = 0.5 * (b.h_min + b.h_max) if h0 is None else h0
    p_prev = None
    trace = []
    converged = False
    i = 0
    for i in range(1, cfg.max_iter + 1):
        V = aero.optimal_speed(ac, H, b.v_max, atm)
        H = aero.optimal_altitude(ac, V, b.h_min, b.h_max, atm, rule=rule)
        P = aero.propulsion_power(ac, H, V, atm)
        trace.append((H, V, P))
        if p_prev is not None and abs(P - p_prev) < cfg.delta:
            converged = True
            break
        p_prev = P
    # final speed step so the emitted pair is feasible at the emitted altitude
    V = aero.optimal_speed(ac, H, b.v_max, atm)
    P = aero.propulsion_power(ac, H, V, atm)
    return NightDecision(hour, H, V, P, i, converged, trace)


def baseline_flight(cfg: ScenarioConfig) -> tuple[float, float]:
    H = cfg.baseline_altitude
    return H, cfg.baseline_speed_factor * aero.stall_speed(cfg.aircraft, H, density_model(cfg))


def _baseline_day(cfg, sun, p_st, draws, hour) -> DayDecision:
    H, V = baseline_flight(cfg)
    p_req = aero.required_power(cfg.aircraft, H, V, density_model(cfg))
    P_a = sun.power(H)
    P_T = P_a - p_req - p_st
    if P_T <= 0:
        return DayDecision(hour, H, V, P_a, p_req, p_st, 0.0, _zero_allocs(cfg), [], 0.0, 0, True,
                           [], ["insufficient-solar"])
    cells = _links(cfg, draws, H, P_T)
    allocs = [noma.equal_power(len(c)) for c in cells]
    R = noma.evaluate_network(cells, allocs, cfg.link.bandwidth).total
    return DayDecision(hour, H, V, P_a, p_req, p_st, P_T, allocs, cells, R, 0, True, [R], [])


def _night_rates(cfg, draws, H, P_T, omega_bps, baseline):
    if P_T <= 0:
        return _zero_allocs(cfg), 0.0
    cells = _links(cfg, draws, H, P_T)
    if baseline:
        allocs = [noma.equal_power(len(c)) for c in cells]
    else:
        allocs, _ = solve_p1a(cells, omega_bps, cfg.link.bandwidth, cfg.partial_rule)
    return allocs, noma.evaluate_network(cells, allocs, cfg.link.bandwidth).total


def hour_draws(cfg: ScenarioConfig, step: int):
    """Fading/geometry realisation for a step; shared by every date and mode."""
    rng = np.random.default_rng([cfg.seed, step])
    return channel.draw_users(cfg.topology, cfg.link.rician_k, rng)


def _qos_users(allocs, cells, omega_bps, B):
    if not cells:
        return 0
    rep = noma.evaluate_network(cells, allocs, B, omega_bps)
    return int(sum(int(np.sum(f)) for f in rep.qos_met))


def simulate_day(
    cfg: ScenarioConfig,
    scenario: DateScenario,
    omega_bps: float,
    baseline: bool | None = None,
    max_passes: int = 20,
) -> DayTrace:
    """Hourly day/night loop with a battery ledger, iterated to a periodic state.

    Each pass starts from the previous pass's end-of-day energy; pre-dawn
    hours use the transmit power set at the previous dusk.
    """
    baseline = cfg.baseline if baseline is None else baseline
    ac, bat = cfg.aircraft, cfg.battery
    atm = density_model(cfg)
    steps = int(round(24.0 / cfg.dt_hours))
    dt_s = cfg.dt_hours * 3600.0
    suns = [SunAt(cfg, scenario, instant_utc(cfg, scenario, k)) for k in range(steps)]
    draws = [hour_draws(cfg, k) for k in range(steps)]
    day = [s.is_day for s in suns]
    night_hours = (steps - sum(day)) * cfg.dt_hours

    if baseline:
        Hn, Vn = baseline_flight(cfg)
        night = NightDecision(0.0, Hn, Vn, aero.propulsion_power(ac, Hn, Vn, atm), 0, True, [])
        H_fore, V_fore = Hn, Vn
    else:
        night = run_algorithm2(cfg)
        H_fore = cfg.bounds.h_min
        V_fore = solve_p1c(cfg, H_fore, atm)
    p_acc = ac.accessory_power
    p_req_fore = aero.required_power(ac, H_fore, V_fore, atm)
    surplus = np.array([max(s.power(H_fore) - p_req_fore, 0.0) if s.is_day else 0.0 for s in suns])
    tail = np.cumsum(surplus[::-1])[::-1]

    if night_hours > 0:
        target = cfg.night_tx_w if cfg.night_tx_w is not None else energy.night_target(night_hours, night.p_pro, p_acc, bat)
    else:
        target = 0.0

    # day decisions do not depend on the battery state beyond P_st; cache by (step, P_st)
    cache: dict[tuple[int, float], DayDecision] = {}
    e_start = 0.0
    night_tx_prev = target
    passes = 0
    for passes in range(1, max_passes + 1):
        ledger = energy.EnergyLedger(e_start, bat)
        records: list[HourRecord] = []
        decisions: list[DayDecision] = []
        E = e_start
        night_tx = night_tx_prev
        seen_day = False
        dusk_set = False
        for k in range(steps):
            hour = k * cfg.dt_hours
            flags: list[str] = []
            if day[k]:
                seen_day = True
                if surplus[k] > 0 and night_hours > 0:
                    weighted = tail[k] / surplus[k] * cfg.dt_hours
                    p_st = energy.storage_requirement(night_hours, night.p_pro, p_acc, target, bat, weighted, E)
                else:
                    p_st = 0.0
                key = (k, p_st)
                if key not in cache:
                    if baseline:
                        cache[key] = _baseline_day(cfg, suns[k], p_st, draws[k], hour)
                    else:
                        cache[key] = run_algorithm1(cfg, suns[k], omega_bps, p_st, draws[k], hour)
                d = cache[key]
                decisions.append(d)
                flags += d.flags
                H, V, P_a, P_req, P_T = d.altitude, d.airspeed, d.p_avail, d.p_req, d.p_tx
                R = d.sum_rate
                qos = _qos_users(d.allocations, d.links, omega_bps, cfg.link.bandwidth)
                iters, conv = d.iterations, d.converged
            else:
                if seen_day and not dusk_set and night_hours > 0:
                    night_tx = energy.night_budget(E, night_hours, night.p_pro, p_acc, bat)
                    if cfg.night_tx_w is not None:
                        night_tx = min(night_tx, cfg.night_tx_w)
                    dusk_set = True
                H, V = night.altitude, night.airspeed
                P_a, P_req, P_T, p_st = 0.0, night.p_pro + p_acc, night_tx, 0.0
                allocs, R = _night_rates(cfg, draws[k], H, P_T, omega_bps, baseline)
                cells = _links(cfg, draws[k], H, P_T) if P_T > 0 else []
                qos = _qos_users(allocs, cells, omega_bps, cfg.link.bandwidth)
                iters, conv = night.iterations, night.converged
                if P_T <= 0:
                    flags.append("no-night-transmit")
            p_net = energy.net_power(P_a, P_req, P_T)
            E, bflags = energy.step_battery(E, p_net, dt_s, bat)
            flags += bflags
            ledger.rows.append(energy.LedgerRow(k, E, p_net, P_a, P_req, P_T, flags))
            M = cfg.topology.num_cells
            users = M * cfg.topology.users_per_cell
            rflags = flags + (["qos-unmet"] if qos < users else [])
            records.append(HourRecord(hour, day[k], H, V, P_a, P_req, p_st, P_T, cfg.upsilon * P_T / M,
                                      R, qos, users, iters, conv, rflags))
        if dusk_set:
            night_tx_prev = night_tx
        settled = ledger.end_energy >= e_start and passes > 1
        if settled or abs(ledger.end_energy - e_start) <= 1e-6 * bat.capacity and passes > 1:
            break
        e_start = ledger.end_energy

    return DayTrace(scenario, omega_bps, baseline, records, ledger, night, passes, decisions)
