"""Kinetic BGK solver tour: moments, conservation, stiff limit, accuracy.

The collision update never iterates: moments of the multistep update are
collision-free, so the new Maxwellian is known before the new distribution,
and the distribution follows by one division.
"""

import numpy as np

from stiffrelax.bgk import (
    KineticField,
    VelocityGrid,
    chapman_init,
    conserved_totals,
    default_moment_profile,
    integrate_bgk,
    maxwellian,
    moments,
)
from stiffrelax.sweeps import default_bgk_config, estimate_order, run_sweep

vg = VelocityGrid.uniform(60, 10.0)
period = 2.0

mv = default_moment_profile(50, period)
f0 = chapman_init(mv, 1e-2, vg, period, order=2)
print("initial fluid fields: rho in [%.3f, %.3f], u = 1, T in [%.3f, %.3f]"
      % (mv.rho.min(), mv.rho.max(), mv.temperature.min(), mv.temperature.max()))

f1 = integrate_bgk(f0, 2, (period / 50) / 30.0, 1e-2, vg, 0.1, substeps=100)
before, after = conserved_totals(f0, vg), conserved_totals(f1, vg)
print("conservation over a T = 0.1 run (mass, momentum, energy):")
for name, x, y in zip(("mass", "momentum", "energy"), before, after):
    print(f"  {name:9s} {x:+.12e} -> {y:+.12e} (drift {abs(x - y):.1e})")

f_stiff = integrate_bgk(chapman_init(mv, 0.0, vg, period, order=2),
                        2, 1e-4, 1e-12, vg, 2e-4, substeps=20)
m_stiff = maxwellian(moments(f_stiff, vg), vg)
gap = np.sqrt(np.sum((f_stiff.values - m_stiff) ** 2) / np.sum(f_stiff.values**2))
print(f"\nvanishing Knudsen number: relative distance to the local Maxwellian {gap:.1e}")

print("\nself-refinement accuracy (reduced grid; full study in the acceptance suite):")
cfg = default_bgk_config(2, nx=(20, 40), nv=32, vmax=8.0, eps=(1e-4, 1e-1, 1.0))
est = estimate_order(run_sweep(cfg))
print(f"  q=2 errors {[f'{e:.2e}' for e in est.max_errors]} -> slope {est.slope:.3f}")
