"""Solstice sweeps, baseline comparison and result files."""

from __future__ import annotations

import csv
import hashlib
import json
import logging
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .config import DateScenario, ScenarioConfig
from .optimizer import DayTrace, simulate_day

log = logging.getLogger(__name__)

MBPS = 1e6


def _fmt(x) -> str:
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _write_csv(path: Path, header: list[str], rows) -> None:
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for r in rows:
                w.writerow([_fmt(v) for v in r])
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


@dataclass
class SweepResult:
    traces: dict[tuple[str, float], DayTrace]  # (scenario name, qos Mbps)
    files: dict[str, list[Path]]


def run_date(cfg: ScenarioConfig, scenario: DateScenario, baseline: bool | None = None) -> dict[float, DayTrace]:
    return {q: simulate_day(cfg, scenario, q * MBPS, baseline) for q in cfg.qos_mbps}


def write_date(cfg: ScenarioConfig, scenario: DateScenario, traces: dict[float, DayTrace], out: Path) -> list[Path]:
    """Write the transmit-power, sum-rate, flight, ledger and manifest files."""
    out.mkdir(parents=True, exist_ok=True)
    tag = scenario.name + ("_baseline" if cfg.baseline else "")
    first = traces[cfg.qos_mbps[0]]

    p_tx = out / f"{tag}_transmit_power.csv"
    _write_csv(p_tx, ["hour_local_h", "is_day", "P_T_W", "P_cell_W", "P_a_W", "P_st_W"],
               [(h.hour, h.is_day, h.p_tx, h.p_cell, h.p_avail, h.p_st) for h in first.hours])

    rate = out / f"{tag}_sum_rate.csv"
    header = ["hour_local_h", "is_day"] + [f"sum_rate_Mbps_qos_{q:g}Mbps" for q in cfg.qos_mbps]
    header += [f"qos_users_qos_{q:g}Mbps" for q in cfg.qos_mbps]
    rows = []
    for k, h in enumerate(first.hours):
        rows.append([h.hour, h.is_day]
                    + [traces[q].hours[k].sum_rate / MBPS for q in cfg.qos_mbps]
                    + [traces[q].hours[k].qos_users for q in cfg.qos_mbps])
    _write_csv(rate, header, rows)

    flight = out / f"{tag}_flight.csv"
    _write_csv(flight, ["hour_local_h", "is_day", "altitude_m", "airspeed_m_s", "P_req_W", "iterations", "converged"],
               [(h.hour, h.is_day, h.altitude, h.airspeed, h.p_req, h.iterations, h.converged) for h in first.hours])

    ledger = out / f"{tag}_energy_ledger.csv"
    _write_csv(ledger, ["hour_local_h", "E_b_J", "P_net_W", "P_a_W", "P_req_W", "P_T_W", "flags"],
               [(r.hour * cfg.dt_hours, r.energy, r.p_net, r.p_avail, r.p_req, r.p_tx, ";".join(r.flags))
                for r in first.ledger.rows])

    files = [p_tx, rate, flight, ledger]
    manifest = out / f"{tag}_manifest.json"
    doc = {
        "software": "hapsopt",
        "version": __version__,
        "seed": cfg.seed,
        "config_sha256": cfg.digest(),
        "scenario": {"name": scenario.name, "date": scenario.date.isoformat(), "alpha_ext": scenario.alpha_ext},
        "qos_mbps": list(cfg.qos_mbps),
        "baseline": cfg.baseline,
        "periodic_passes": first.passes,
        "ledger_start_J": first.ledger.start_energy,
        "ledger_end_J": first.ledger.end_energy,
        "files": {p.name: _sha256(p) for p in files},
        "config": cfg.to_dict(),
    }
    try:
        manifest.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write {manifest}: {exc}") from exc
    return files + [manifest]


def run_sweep(cfg: ScenarioConfig, out: Path | str | None = None) -> SweepResult:
    traces, files = {}, {}
    for sc in cfg.scenarios:
        per = run_date(cfg, sc)
        for q, t in per.items():
            traces[(sc.name, q)] = t
        if out is not None:
            files[sc.name] = write_date(cfg, sc, per, Path(out))
            log.info("wrote %d files for %s", len(files[sc.name]), sc.name)
    return SweepResult(traces, files)


@dataclass
class GainRow:
    scenario: str
    qos_mbps: float
    optimized_mbps: float  # mean hourly sum rate
    baseline_mbps: float
    gain_pct: float
    baseline_flagged_hours: int


def compare_baseline(cfg: ScenarioConfig, out: Path | str | None = None) -> list[GainRow]:
    """Sum-rate gain of the optimised system over the fixed baseline.

    One row per (date, QoS) plus, per QoS, a row with scenario ``"all"``
    pooling the hourly rates of every configured date. Gains compare
    mean hourly sum rates. Baseline hours carrying any flag (energy
    shortfall or users below the QoS threshold) are counted.
    """
    rows = []
    pooled: dict[float, list[float]] = {q: [0.0, 0.0, 0, 0] for q in cfg.qos_mbps}
    for sc in cfg.scenarios:
        for q in cfg.qos_mbps:
            opt = simulate_day(cfg, sc, q * MBPS, baseline=False)
            base = simulate_day(cfg, sc, q * MBPS, baseline=True)
            s_opt = sum(h.sum_rate for h in opt.hours) / MBPS
            s_base = sum(h.sum_rate for h in base.hours) / MBPS
            flagged = sum(1 for h in base.hours if h.flags)
            n = len(opt.hours)
            rows.append(_gain_row(sc.name, q, s_opt / n, s_base / n, flagged))
            acc = pooled[q]
            acc[0] += s_opt
            acc[1] += s_base
            acc[2] += n
            acc[3] += flagged
    for q, (s_opt, s_base, n, flagged) in pooled.items():
        rows.append(_gain_row("all", q, s_opt / n, s_base / n, flagged))
    if out is not None:
        out = Path(out)
        out.mkdir(parents=True, exist_ok=True)
        _write_csv(out / "baseline_gain.csv",
                   ["scenario", "qos_Mbps", "optimized_mean_Mbps", "baseline_mean_Mbps", "gain_pct",
                    "baseline_flagged_hours"],
                   [(r.scenario, r.qos_mbps, r.optimized_mbps, r.baseline_mbps, r.gain_pct,
                     r.baseline_flagged_hours) for r in rows])
    return rows


def _gain_row(name, q, r_opt, r_base, flagged) -> GainRow:
    gain = 100.0 * (r_opt - r_base) / r_base if r_base > 0 else float("inf")
    return GainRow(name, q, r_opt, r_base, gain, flagged)
