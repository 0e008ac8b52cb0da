"""Battery capacity vs. energy closure and seasonal rate ordering.

For each capacity, runs both solstices and reports deficits, the periodic
energy balance and whether summer rates dominate winter rates hour by hour.
"""

import dataclasses

from hapsopt.config import ScenarioConfig, with_overrides
from hapsopt.energy import BatteryParams
from hapsopt.optimizer import simulate_day

base = ScenarioConfig()
print("kWh   deficits  E_end-E_start kWh (ws/ss)  SS>=WS hours  night P_T W (ws/ss)")
for kwh in (50, 70, 90, 100, 110, 120, 130, 150, 180):
    cfg = with_overrides(base, battery=dataclasses.replace(BatteryParams(), capacity=kwh * 3.6e6))
    t = {s.name: simulate_day(cfg, s, 1e6) for s in cfg.scenarios}
    deficits = sum(x.ledger.deficits for x in t.values())
    bal = [(x.ledger.end_energy - x.ledger.start_energy) / 3.6e6 for x in t.values()]
    good = sum(s.sum_rate >= w.sum_rate for w, s in zip(t["ws"].hours, t["ss"].hours))
    night = [next(h.p_tx for h in x.hours if not h.is_day) for x in t.values()]
    print(f"{kwh:4d}  {deficits:8d}  {bal[0]:+8.2f} / {bal[1]:+8.2f}            {good:2d}/24       "
          f"{night[0]:7.0f} / {night[1]:7.0f}")
