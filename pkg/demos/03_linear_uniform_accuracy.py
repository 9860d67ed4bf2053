"""Uniform-in-eps accuracy study for the constant-coefficient system.

Runs a reduced version of the flagship convergence experiment: smooth data
on [0, 1), 40 modes, starting time 1, final time 2, relaxation scales from
1e-7 to 1.  For each step size the worst error over all eps is taken; the
fitted slope matches the scheme order even though eps spans seven decades.
The full grid lives in demos/manifests/linear_accuracy.toml and runs via
``stiff-relax sweep``.
"""

from pathlib import Path

from stiffrelax import emit_csv, estimate_order, run_sweep
from stiffrelax.sweeps import default_linear_config

out = Path("results")
out.mkdir(exist_ok=True)
for q in (2, 3):
    cfg = default_linear_config(q, dt=tuple(1.0 / 640.0 / 2**j for j in range(3)),
                                eps=(1e-7, 1e-4, 1e-1, 1.0))
    records = run_sweep(cfg)
    est = estimate_order(records)
    print(f"order-{q} scheme:")
    for eps in cfg.eps:
        row = [r for r in records if r.eps == eps]
        errs = ", ".join(f"{r.error:.2e}" for r in sorted(row, key=lambda r: -r.dt))
        print(f"  eps = {eps:7.0e}: errors per dt = {errs}")
    print(f"  worst-over-eps errors: {[f'{e:.2e}' for e in est.max_errors]}")
    print(f"  fitted slope: {est.slope:.3f} (target {q})\n")
    emit_csv(records, out / f"linear_q{q}_records.csv")
    emit_csv(est, out / f"linear_q{q}_orders.csv")
    print(f"  wrote {out}/linear_q{q}_records.csv and {out}/linear_q{q}_orders.csv\n")
