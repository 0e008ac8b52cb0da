"""Sum-rate gain of the optimised system over the fixed-flight equal-split baseline."""

from pathlib import Path

from hapsopt.config import ScenarioConfig
from hapsopt.scenario import compare_baseline

rows = compare_baseline(ScenarioConfig(), Path("results/compare"))
for r in rows:
    print(f"{r.scenario:>3} {r.qos_mbps:3g} Mbps  optimised {r.optimized_mbps:7.2f}  baseline "
          f"{r.baseline_mbps:7.2f}  gain {r.gain_pct:+6.2f}%  flagged baseline hours {r.baseline_flagged_hours}")
