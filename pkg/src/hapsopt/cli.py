"""Command-line entry point: sweep, compare, validate-config, oracle."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from datetime import date
from pathlib import Path

from .config import SUMMER, WINTER, ConfigError, DateScenario, ScenarioConfig, load_config, with_overrides
from .scenario import compare_baseline, run_sweep

log = logging.getLogger("hapsopt")


def parse_date(text: str) -> DateScenario:
    """``ws``, ``ss`` or an ISO date; ISO dates borrow the nearer solstice's extinction."""
    key = text.lower()
    if key == "ws":
        return WINTER
    if key == "ss":
        return SUMMER
    try:
        d = date.fromisoformat(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"--date expects ws, ss or YYYY-MM-DD, got {text!r}") from exc
    alpha = SUMMER.alpha_ext if 4 <= d.month <= 9 else WINTER.alpha_ext
    return DateScenario(d.isoformat(), d, alpha)


def build_config(args) -> ScenarioConfig:
    cfg = load_config(args.config) if args.config else ScenarioConfig()
    changes = {}
    if getattr(args, "seed", None) is not None:
        changes["seed"] = args.seed
    if getattr(args, "date", None):
        changes["scenarios"] = tuple(args.date)
    if getattr(args, "qos", None):
        changes["qos_mbps"] = tuple(args.qos)
    if getattr(args, "baseline", False):
        changes["baseline"] = True
    for k, v in changes.items():
        log.info("command-line override %s = %r", k, v)
    return with_overrides(cfg, **changes) if changes else cfg


def _common(p: argparse.ArgumentParser, run: bool = True) -> None:
    p.add_argument("--config", type=Path, help="YAML/JSON scenario file (defaults if omitted)")
    if run:
        p.add_argument("--out", type=Path, default=Path("results"), help="output directory")
        p.add_argument("--seed", type=int, help="RNG seed for user placement and fading")
        p.add_argument("--date", type=parse_date, action="append", help="ws, ss or YYYY-MM-DD (repeatable)")
        p.add_argument("--qos", type=float, action="append", help="QoS threshold in Mbps (repeatable)")


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hapsopt", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="hourly 24 h simulation per date; writes 5 files per date")
    _common(p)
    p.add_argument("--baseline", action="store_true", help="fixed altitude/speed, equal power split")

    p = sub.add_parser("compare", help="sum-rate gain over the fixed baseline")
    _common(p)

    p = sub.add_parser("validate-config", help="load, validate and echo a config with its hash")
    _common(p, run=False)

    p = sub.add_parser("oracle", help="run the brute-force reference checks against a config")
    _common(p, run=False)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--instances", type=int, default=200)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = build_config(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    if args.command == "validate-config":
        print(json.dumps({"config_sha256": cfg.digest(), "config": cfg.to_dict()}, indent=2, sort_keys=True))
        return 0

    if args.command == "oracle":
        from .oracles import run_all

        for line in run_all(cfg, args.seed, args.instances).lines():
            print(line)
        return 0

    if args.command == "sweep":
        res = run_sweep(cfg, args.out)
        for name, files in res.files.items():
            for f in files:
                print(f)
        return 0

    rows = compare_baseline(cfg, args.out)
    print(f"{'date':>6} {'QoS Mbps':>9} {'opt Mbps':>10} {'base Mbps':>10} {'gain %':>8} {'flagged':>8}")
    for r in rows:
        print(f"{r.scenario:>6} {r.qos_mbps:9g} {r.optimized_mbps:10.2f} {r.baseline_mbps:10.2f} "
              f"{r.gain_pct:8.2f} {r.baseline_flagged_hours:8d}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
