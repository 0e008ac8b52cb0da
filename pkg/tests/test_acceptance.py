"""Acceptance criteria 1-12, each at its stated tolerance and time limit.

Every test records a one-line PASS/FAIL verdict that is printed in the
"acceptance criteria" section of the pytest terminal summary.
"""

import time

import numpy as np
import pytest

from conftest import record
from hapsopt import aero, atmosphere as atm, channel, noma
from hapsopt import optimizer as opt
from hapsopt.config import SUMMER, WINTER, ScenarioConfig
from hapsopt.oracles import (allocation_grid, argmin_1d, flight_grid, max_servable, qos_lp_feasible,
                             random_instance)
from hapsopt.scenario import MBPS, compare_baseline, run_sweep

CFG = ScenarioConfig()
AC = CFG.aircraft
_SWEEP: dict = {}


def sweep():
    """Default WS+SS sweep over every QoS value, computed once and timed."""
    if not _SWEEP:
        t0 = time.perf_counter()
        _SWEEP["traces"] = run_sweep(CFG).traces
        _SWEEP["seconds"] = time.perf_counter() - t0
    return _SWEEP["traces"], _SWEEP["seconds"]


def verdict(n, ok, detail, seconds, limit):
    ok = bool(ok) and seconds < limit
    record(n, ok, f"{detail}; limit {limit:g} s", seconds)
    return ok


def test_criterion_01_pressure_branch_continuity():
    t0 = time.perf_counter()
    p1, p2 = atm.pressure_branch1(20_000), atm.pressure_branch2(20_000)
    rel = abs(p1 - p2) / p2
    dt = time.perf_counter() - t0
    assert verdict(1, rel < 1e-3, f"branches at 20 km: {p1:.2f} vs {p2:.3f} Pa, rel {rel:.2e} (< 1e-3)", dt, 1)


def test_criterion_02_gradient_check():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2)
    worst = 0.0
    for _ in range(100):
        h = rng.uniform(CFG.bounds.h_min, CFG.bounds.h_max)
        v = rng.uniform(aero.stall_speed(AC, h), CFG.bounds.v_max)
        dH, dV = aero.power_gradient(AC, h, v)
        eh = min(1.0, 0.5 * abs(h - 20_000.0))  # keep the stencil inside one layer
        ev = 1e-4 * v
        fh = (aero.propulsion_power(AC, h + eh, v) - aero.propulsion_power(AC, h - eh, v)) / (2 * eh)
        fv = (aero.propulsion_power(AC, h, v + ev) - aero.propulsion_power(AC, h, v - ev)) / (2 * ev)
        worst = max(worst, abs(dH - fh) / abs(fh), abs(dV - fv) / abs(fv))
    dt = time.perf_counter() - t0
    assert verdict(2, worst < 1e-4, f"100 feasible (H, V): worst relative error {worst:.2e} (< 1e-4)", dt, 1)


def test_criterion_03_closed_forms_vs_brute_force():
    t0 = time.perf_counter()
    speed_steps, alt_steps = [], []
    for h in (18_000.0, 21_000.0, 24_000.0):
        vm = aero.min_power_speed(AC, h)
        x, step = argmin_1d(lambda v: aero.propulsion_power(AC, h, v), 0.5 * vm, 2.0 * vm)
        speed_steps.append(abs(vm - x) / step)
    for v in (20.0, 30.0, 40.0):
        hm = aero.min_power_altitude(AC, v)
        x, step = argmin_1d(lambda z: aero.propulsion_power(AC, z, v), max(11_000, hm - 3000), min(32_000, hm + 3000))
        alt_steps.append(abs(hm - x) / step)
    night = opt.run_algorithm2(CFG)
    g = flight_grid(CFG, 200)
    cells = (abs(night.altitude - g.altitude) / g.h_step, abs(night.airspeed - g.airspeed) / g.v_step)
    dt = time.perf_counter() - t0
    ok = max(speed_steps) <= 1 and max(alt_steps) <= 1 and max(cells) <= 1
    detail = (f"V_m off by <= {max(speed_steps):.2f} steps, H_m by <= {max(alt_steps):.2f} steps, "
              f"night optimum off the 200x200 grid by ({cells[0]:.2f}, {cells[1]:.2f}) cells")
    assert verdict(3, ok, detail, dt, 10)


def test_criterion_04_reported_altitudes():
    t0 = time.perf_counter()
    night = opt.run_algorithm2(CFG)
    t_night = time.perf_counter() - t0
    day_alts = []
    t_day = 0.0
    for sc in (WINTER, SUMMER):
        t1 = time.perf_counter()
        sun = opt.SunAt(CFG, sc, opt.instant_utc(CFG, sc, 12))
        d = opt.run_algorithm1(CFG, sun, 1 * MBPS, 5000.0, opt.hour_draws(CFG, 12))
        t_day = max(t_day, time.perf_counter() - t1)
        day_alts.append(d.altitude)
    dt = max(t_night, t_day)
    day_ok = all(h == 18_000 for h in day_alts)
    night_ok = night.altitude == 24_000
    detail = (f"day H* = {day_alts[0] / 1e3:g}/{day_alts[1] / 1e3:g} km (want 18, {'ok' if day_ok else 'no'}); "
              f"night H* = {night.altitude / 1e3:g} km at V = {night.airspeed:.2f} m/s, "
              f"P_pro = {night.p_pro:.0f} W (want 24 km, {'ok' if night_ok else 'no'}; "
              f"P_pro at 24 km and its stall speed is "
              f"{aero.propulsion_power(AC, 24_000, aero.stall_speed(AC, 24_000)):.0f} W)")
    record(4, day_ok and night_ok and dt < 10, detail + "; limit 10 s per instant", dt)
    assert day_ok, detail
    assert night_ok, detail


def test_criterion_05_allocation_vs_grid_oracle():
    t0 = time.perf_counter()
    rng = np.random.default_rng(5)
    shortfall, mismatches, feasible = -np.inf, 0, 0
    for _ in range(200):
        A, om = random_instance(rng, 3)
        alloc = noma.allocate(A, om)
        flags = noma.evaluate_network([A], [alloc], 1.0, om).qos_met[0]
        lp = qos_lp_feasible(A, om)
        if lp:
            feasible += 1
            best, _ = allocation_grid(A, om, 1e-3)
            if np.isfinite(best):
                shortfall = max(shortfall, best - alloc.rate)
            mismatches += int(not flags.all())
        else:
            mismatches += int(flags.all()) + int(int(flags.sum()) != max_servable(A, om))
    dt = time.perf_counter() - t0
    ok = shortfall <= 1e-9 and mismatches == 0
    detail = (f"200 instances (K <= 3, {feasible} feasible): grid max minus closed form <= {shortfall:.1e} "
              f"bit/s/Hz, {mismatches} QoS-flag mismatches")
    assert verdict(5, ok, detail, dt, 60)


def test_criterion_06_qos_property_suite():
    t0 = time.perf_counter()
    rng = np.random.default_rng(6)
    B = CFG.link.bandwidth
    n, worst_rate, worst_sum = 0, np.inf, 0.0
    while n < 1000:
        K = int(rng.integers(1, 9))
        A = np.sort(10.0 ** rng.uniform(-2, 0.5, K))[::-1]
        om = float(rng.uniform(0.0, 1.0))
        if not noma.is_feasible(A, om):
            continue
        n += 1
        a = noma.allocate_feasible(A, om)
        r = noma.rate(noma.sinr(a.fractions, A), B)
        worst_rate = min(worst_rate, float(np.min(r / (om * B)))) if om > 0 else worst_rate
        worst_sum = max(worst_sum, abs(a.fractions.sum() - 1.0))
    dt = time.perf_counter() - t0
    ok = worst_rate >= 1 - noma.QOS_RTOL and worst_sum <= 1e-9
    detail = (f"1000 feasible cells: min rate/(Omega B) = {worst_rate:.12f} (float tolerance 1e-9), "
              f"max |sum(alpha) - 1| = {worst_sum:.1e}")
    assert verdict(6, ok, detail, dt, 30)


def test_criterion_07_alternating_optimisation_converges():
    traces, seconds = sweep()
    worst_iter, bad = 0, 0
    for (name, q), t in traces.items():
        for d in t.day_decisions:
            worst_iter = max(worst_iter, d.iterations)
            if not d.converged or abs(d.trace[-1] - d.trace[-2]) >= CFG.delta:
                bad += 1
            cells = opt._links(CFG, opt.hour_draws(CFG, int(d.hour)), d.altitude, d.p_tx)
            if noma.evaluate_network(cells, d.allocations, CFG.link.bandwidth).total != d.sum_rate:
                bad += 1
    n = sum(len(t.day_decisions) for t in traces.values())
    detail = f"{n} daylight decisions: max {worst_iter} iterations, {bad} not converged or not reproducible"
    assert verdict(7, bad == 0 and worst_iter <= 100, detail, seconds, 60)


def _unimodal(xs):
    k = int(np.argmax(xs))
    return all(a <= b for a, b in zip(xs[:k], xs[1:k + 1])) and all(a >= b for a, b in zip(xs[k:], xs[k + 1:]))


def test_criterion_08_transmit_power_shape():
    traces, seconds = sweep()
    q = CFG.qos_mbps[0]
    peaks, shapes, hours = {}, {}, {}
    for sc in ("ws", "ss"):
        day = [h for h in traces[(sc, q)].hours if h.is_day]
        p = [h.p_tx for h in day]
        shapes[sc] = _unimodal(p)
        peaks[sc] = int(day[int(np.argmax(p))].hour)
        hours[sc] = sum(1 for h in day if h.p_tx > 0)
    ok = all(shapes.values()) and all(v in (11, 12) for v in peaks.values()) and hours["ss"] > hours["ws"]
    detail = (f"unimodal WS/SS {shapes['ws']}/{shapes['ss']}, peak hour {peaks['ws']}/{peaks['ss']} "
              f"(noon-adjacent 11 or 12), transmitting daylight hours {hours['ws']}/{hours['ss']}")
    assert verdict(8, ok, detail, seconds, 300)


def test_criterion_09_sum_rate_ordering():
    traces, seconds = sweep()
    season_bad, qos_bad = [], []
    for q in CFG.qos_mbps:
        for k, (hw, hs) in enumerate(zip(traces[("ws", q)].hours, traces[("ss", q)].hours)):
            if hs.sum_rate < hw.sum_rate:
                season_bad.append((q, k))
    for sc in ("ws", "ss"):
        for lo, hi in zip(CFG.qos_mbps, CFG.qos_mbps[1:]):
            for k, (a, b) in enumerate(zip(traces[(sc, lo)].hours, traces[(sc, hi)].hours)):
                if b.sum_rate > a.sum_rate:
                    qos_bad.append((sc, hi, k))
    detail = (f"SS < WS at {len(season_bad)} (QoS, hour) pairs; higher QoS gave a higher rate at "
              f"{len(qos_bad)} (date, QoS, hour) points")
    assert verdict(9, not season_bad and not qos_bad, detail, seconds, 300)


def test_criterion_10_gain_over_baseline():
    t0 = time.perf_counter()
    rows = compare_baseline(CFG)
    dt = time.perf_counter() - t0
    pooled = [r for r in rows if r.scenario == "all"]
    gains = [r.gain_pct for r in pooled]
    ok = all(g > 0 for g in gains) and all(a >= b for a, b in zip(gains, gains[1:]))
    per_date = ", ".join(f"{r.scenario}@{r.qos_mbps:g}: {r.gain_pct:+.1f}%" for r in rows if r.scenario != "all")
    detail = (f"pooled gain at " + ", ".join(f"{r.qos_mbps:g} Mbps {r.gain_pct:+.2f}%" for r in pooled)
              + f" [per date {per_date}]")
    assert verdict(10, ok, detail, dt, 300)


def test_criterion_11_rician_normalisation():
    t0 = time.perf_counter()
    g = channel.sample_rician_power(4.5, np.random.default_rng(11), 100_000)
    k_hat = channel.estimate_k_factor(g)
    mean = float(g.mean())
    dt = time.perf_counter() - t0
    ok = abs(k_hat - 4.5) / 4.5 <= 0.05 and abs(mean - 1) <= 0.02
    assert verdict(11, ok, f"1e5 draws: K estimate {k_hat:.3f} (4.5 +- 5%), E|g|^2 = {mean:.4f} (1 +- 2%)", dt, 10)


def test_criterion_12_energy_self_sustainability():
    traces, seconds = sweep()
    worst_margin, deficits = np.inf, 0
    for t in traces.values():
        worst_margin = min(worst_margin, t.ledger.end_energy - t.ledger.start_energy)
        deficits += t.ledger.deficits
    detail = f"min E_end - E_start = {worst_margin:.3g} J over {len(traces)} runs, {deficits} deficit flags"
    assert verdict(12, worst_margin >= 0 and deficits == 0, detail, seconds, 300)
