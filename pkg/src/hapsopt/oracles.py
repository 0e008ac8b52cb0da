"""Brute-force references for the closed-form optima and allocations.

These are deliberately naive: dense sweeps, exhaustive grids and a linear
program. They are used by the test suite and the ``oracle`` CLI command.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from . import aero, noma
from .config import ScenarioConfig
from .optimizer import density_model, run_algorithm2


def argmin_1d(f, lo: float, hi: float, n: int = 10_000) -> tuple[float, float]:
    """Grid argmin of ``f`` on ``n`` points; returns (x*, grid step)."""
    xs = np.linspace(lo, hi, n)
    vals = np.array([f(x) for x in xs])
    return float(xs[int(np.argmin(vals))]), float(xs[1] - xs[0])


@dataclass
class GridResult:
    altitude: float
    airspeed: float
    power: float
    h_step: float
    v_step: float


def flight_grid(cfg: ScenarioConfig, n: int = 200) -> GridResult:
    """Exhaustive P_pro over the (H, V) box, masking speeds below stall."""
    ac, b = cfg.aircraft, cfg.bounds
    atm = density_model(cfg)
    H = np.linspace(b.h_min, b.h_max, n)
    v_lo = aero.stall_speed(ac, b.h_min, atm)
    V = np.linspace(v_lo, b.v_max, n)
    best = (np.inf, 0.0, 0.0)
    for h in H:
        vs = aero.stall_speed(ac, h, atm)
        for v in V[V >= vs]:
            p = aero.propulsion_power(ac, h, v, atm)
            if p < best[0]:
                best = (p, h, v)
    return GridResult(best[1], best[2], best[0], float(H[1] - H[0]), float(V[1] - V[0]))


def qos_lp_feasible(A, omega: float, served=None) -> bool:
    """LP test: can every user in ``served`` reach ``omega`` with a unit budget?

    SINR_l >= 2^omega - 1 is linear in alpha once the denominator is
    multiplied out, so feasibility is an LP with a zero objective.
    Unserved users are held at zero power.
    """
    A = np.asarray(A, float)
    K = len(A)
    served = list(range(K)) if served is None else list(served)
    c = 2.0**omega - 1.0
    rows, rhs = [], []
    for l in served:
        row = np.zeros(K)
        row[l] = -1.0
        row[l + 1:] = c
        rows.append(row)
        rhs.append(-c * A[l])
    rows.append(np.ones(K))
    rhs.append(1.0)
    bounds = [(0, None) if k in served else (0, 0) for k in range(K)]
    res = linprog(np.zeros(K), A_ub=np.array(rows), b_ub=np.array(rhs), bounds=bounds, method="highs")
    return res.status == 0


def max_servable(A, omega: float) -> int:
    """Largest number of users that can all meet ``omega`` (any subset)."""
    K = len(A)
    for n in range(K, 0, -1):
        for subset in itertools.combinations(range(K), n):
            if qos_lp_feasible(A, omega, subset):
                return n
    return 0


def simplex_grid(K: int, step: float = 1e-3) -> np.ndarray:
    """All allocations on the unit simplex with coordinates on a ``step`` lattice."""
    n = int(round(1.0 / step))
    if K == 1:
        return np.ones((1, 1))
    if K == 2:
        a = np.arange(n + 1) / n
        return np.stack([a, 1 - a], axis=1)
    if K == 3:
        i, j = np.meshgrid(np.arange(n + 1), np.arange(n + 1), indexing="ij")
        keep = i + j <= n
        i, j = i[keep], j[keep]
        return np.stack([i / n, j / n, (n - i - j) / n], axis=1)
    raise ValueError("grid oracle supports K <= 3")


def allocation_grid(A, omega: float, step: float = 1e-3) -> tuple[float, np.ndarray | None]:
    """Best sum rate over QoS-satisfying grid allocations (bit/s/Hz).

    Returns ``(-inf, None)`` if no grid point meets every threshold.
    """
    A = np.asarray(A, float)
    G = simplex_grid(len(A), step)
    tail = np.cumsum(G[:, ::-1], axis=1)[:, ::-1]
    interf = np.concatenate([tail[:, 1:], np.zeros((len(G), 1))], axis=1)
    r = np.log2(1.0 + G / (interf + A))
    ok = np.all(r >= omega, axis=1)
    if not np.any(ok):
        return -np.inf, None
    tot = r.sum(axis=1)
    tot[~ok] = -np.inf
    k = int(np.argmax(tot))
    return float(tot[k]), G[k]


def random_instance(rng: np.random.Generator, k_max: int = 3):
    K = int(rng.integers(1, k_max + 1))
    A = np.sort(10.0 ** rng.uniform(-2, 1, K))[::-1]
    omega = float(rng.uniform(0.02, 1.5))
    return A, omega


@dataclass
class OracleReport:
    speed_error: float  # |V_m - grid argmin| / grid step
    altitude_error: float
    grid_cells_h: float  # |H* - grid H| / cell
    grid_cells_v: float
    night: tuple[float, float, float]
    allocation_instances: int
    allocation_shortfall: float  # max(grid - closed form), bit/s/Hz
    verdict_mismatches: int

    def lines(self) -> list[str]:
        return [
            f"V_m vs 1-D sweep: {self.speed_error:.3f} grid steps",
            f"H_m vs 1-D sweep: {self.altitude_error:.3f} grid steps",
            f"night optimum H={self.night[0]:.1f} m V={self.night[1]:.3f} m/s P_pro={self.night[2]:.1f} W",
            f"night optimum vs 200x200 grid: {self.grid_cells_h:.3f} H cells, {self.grid_cells_v:.3f} V cells",
            f"allocation: {self.allocation_instances} instances, max grid excess "
            f"{self.allocation_shortfall:.2e} bit/s/Hz, {self.verdict_mismatches} verdict mismatches",
        ]


def run_all(cfg: ScenarioConfig, seed: int = 0, instances: int = 200) -> OracleReport:
    ac = cfg.aircraft
    atm = density_model(cfg)
    h = 0.5 * (cfg.bounds.h_min + cfg.bounds.h_max)
    vm = aero.min_power_speed(ac, h, atm)
    v_grid, v_step = argmin_1d(lambda v: aero.propulsion_power(ac, h, v, atm), 0.5 * vm, 2.0 * vm)
    v_probe = 20.0
    hm = aero.min_power_altitude(ac, v_probe, atm)
    lo, hi = max(11_000.0, hm - 3000.0), min(32_000.0, hm + 3000.0)
    h_grid, h_step = argmin_1d(lambda x: aero.propulsion_power(ac, x, v_probe, atm), lo, hi)

    night = run_algorithm2(cfg)
    g = flight_grid(cfg)

    rng = np.random.default_rng(seed)
    worst, mismatches = -np.inf, 0
    for _ in range(instances):
        A, om = random_instance(rng)
        alloc = noma.allocate(A, om)
        best, _ = allocation_grid(A, om)
        if np.isfinite(best):
            worst = max(worst, best - alloc.rate)
        if noma.is_feasible(A, om) != qos_lp_feasible(A, om):
            mismatches += 1
        if alloc.qos_users != max_servable(A, om):
            mismatches += 1
    return OracleReport(
        abs(vm - v_grid) / v_step,
        abs(hm - h_grid) / h_step,
        abs(night.altitude - g.altitude) / g.h_step,
        abs(night.airspeed - g.airspeed) / g.v_step,
        (night.altitude, night.airspeed, night.p_pro),
        instances,
        float(worst),
        mismatches,
    )
