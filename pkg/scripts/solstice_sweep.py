"""Run the default winter/summer solstice sweep and print an hourly summary."""

import argparse
from pathlib import Path

from hapsopt.config import load_config
from hapsopt.scenario import run_sweep

ap = argparse.ArgumentParser(description=__doc__)
ap.add_argument("--config", type=Path)
ap.add_argument("--out", type=Path, default=Path("results/sweep"))
args = ap.parse_args()

cfg = load_config(args.config)
res = run_sweep(cfg, args.out)
q = cfg.qos_mbps
print(f"{'hour':>4} | " + " | ".join(f"{s.name:>2} P_T kW  H km  " + " ".join(f"R@{x:g}" for x in q)
                                      for s in cfg.scenarios))
for k in range(len(res.traces[(cfg.scenarios[0].name, q[0])].hours)):
    cols = []
    for s in cfg.scenarios:
        h = res.traces[(s.name, q[0])].hours[k]
        rates = " ".join(f"{res.traces[(s.name, x)].hours[k].sum_rate / 1e6:5.0f}" for x in q)
        cols.append(f"{'D' if h.is_day else 'N'} {h.p_tx / 1e3:6.2f} {h.altitude / 1e3:5.1f}  {rates}")
    print(f"{k:4d} | " + " | ".join(cols))
for name, files in res.files.items():
    print(name, "->", ", ".join(f.name for f in files))
