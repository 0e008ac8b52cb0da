"""Night-time flight: where propulsion power is lowest inside the feasible box.

Prints P_pro along the stall line V = V_s(H), the traces of the projected
and the unconstrained altitude step, and the brute-force grid optimum.
"""

from hapsopt import aero
from hapsopt.config import ScenarioConfig, with_overrides
from hapsopt.oracles import flight_grid
from hapsopt.optimizer import run_algorithm2

cfg = ScenarioConfig()
ac = cfg.aircraft
print("H km   V_s m/s   V_m m/s   P_pro(V_s) W")
for h in range(18_000, 24_001, 1000):
    vs = aero.stall_speed(ac, h)
    print(f"{h / 1e3:4.0f}  {vs:8.3f}  {aero.min_power_speed(ac, h):8.3f}  {aero.propulsion_power(ac, h, vs):10.1f}")

for rule in ("project", "unconstrained"):
    n = run_algorithm2(with_overrides(cfg, max_iter=12), rule=rule)
    print(f"\nrule={rule}: converged={n.converged} after {n.iterations} iterations")
    for h, v, p in n.trace:
        flag = "" if v >= aero.stall_speed(ac, h) - 1e-9 else "  below stall"
        print(f"  H={h:8.1f} m  V={v:6.2f} m/s  P_pro={p:7.1f} W{flag}")

g = flight_grid(cfg)
print(f"\n200x200 grid optimum: H={g.altitude:.0f} m V={g.airspeed:.3f} m/s P_pro={g.power:.1f} W")
