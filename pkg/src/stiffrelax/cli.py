"""Command line front end: ``stiff-relax <subcommand>``.

Exit codes: 0 on success, 1 when any sweep case failed, 2 on invalid
configuration or arguments.
"""

import argparse
import csv
import sys
from pathlib import Path

from .multipliers import (
    multiplier_set,
    quadratic_form_extrema,
    solve_zstar,
    verify_identity_g,
    verify_identity_a,
)
from .sweeps import (
    InvalidConfigError,
    SweepConfig,
    emit_csv,
    estimate_order,
    load_configs,
    run_case,
    run_sweep,
)
from .tableaux import bdf_tableau


def _cmd_verify_multipliers(args):
    orders = [args.q] if args.q else [1, 2, 3, 4]
    zstar = solve_zstar()
    print(f"z* = {zstar:.17g}")
    rows = []
    print(f"{'q':>2} {'res(I)':>12} {'res(II)':>12} {'lam_min(G)':>14} "
          f"{'lam_max(G)':>14} {'lam_min(A)':>14} {'lam_max(A)':>14}")
    for q in orders:
        ms = multiplier_set(q)
        tab = bdf_tableau(q)
        res_g = verify_identity_g(ms, tab, samples=args.samples, seed=args.seed)
        res_a = verify_identity_a(ms, samples=args.samples, seed=args.seed)
        gmin, gmax = quadratic_form_extrema(ms.g)
        amin, amax = quadratic_form_extrema(ms.a)
        rows.append((q, res_g, res_a, gmin, gmax, amin, amax))
        print(f"{q:>2} {res_g:>12.3e} {res_a:>12.3e} {gmin:>14.8e} "
              f"{gmax:>14.8e} {amin:>14.8e} {amax:>14.8e}")
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(("q", "zstar", "res_identity_g", "res_identity_a",
                             "lam_min_g", "lam_max_g", "lam_min_a", "lam_max_a"))
            for q, res_g, res_a, gmin, gmax, amin, amax in rows:
                writer.writerow((q, repr(zstar), repr(res_g), repr(res_a),
                                 repr(gmin), repr(gmax), repr(amin), repr(amax)))
        print(f"wrote {args.csv}")
    return 0


def _summarize(name, records):
    n_fail = sum(not r.ok for r in records)
    print(f"[{name}] {len(records)} cases, {n_fail} failed")
    if n_fail == 0 and len({r.dt for r in records}) >= 2:
        est = estimate_order(records)
        pairs = ", ".join(f"{p:.2f}" for p in est.pair_orders)
        print(f"[{name}] fitted order {est.slope:.3f} (pairwise: {pairs})")
    return n_fail


def _cmd_sweep(args):
    try:
        configs = load_configs(args.config)
    except (OSError, InvalidConfigError) as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return 2
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    any_failed = False
    for cfg in configs:
        records = run_sweep(cfg, jobs=args.jobs)
        path = out_dir / f"{cfg.name}.csv"
        emit_csv(records, path)
        print(f"wrote {path}")
        any_failed |= _summarize(cfg.name, records) > 0
    return 1 if any_failed else 0


def _cmd_run(args):
    kwargs = dict(problem=args.problem, q=args.q, eps=(args.eps,),
                  error_mode=args.error_mode, b=args.b, t0=args.t0,
                  t_end=args.t_end, n_modes=args.n_modes, nv=args.nv,
                  vmax=args.vmax, substeps=args.substeps,
                  record_timings=args.timings, name="run")
    try:
        if args.problem in ("linear", "varcoef"):
            if args.dt is None:
                raise InvalidConfigError("--dt is required for spectral problems")
            cfg = SweepConfig(dt=(args.dt,), **kwargs)
            level = args.dt
        else:
            if args.nx is None:
                raise InvalidConfigError("--nx is required for cell-based problems")
            ratio = args.dt_over_dx
            if ratio is None:
                ratio = (0.25 if args.q <= 2 else 1 / 3) if args.problem == "nonlinear" \
                    else 1.0 / (3.0 * args.vmax)
            cfg = SweepConfig(nx=(args.nx,), dt_over_dx=ratio, **kwargs)
            level = args.nx
    except InvalidConfigError as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return 2
    rec = run_case(cfg, args.eps, level)
    print(",".join(str(v) for v in (rec.problem, rec.q, rec.eps, rec.dt, rec.nx,
                                    rec.nv, rec.error, rec.seconds, rec.status)))
    return 0 if rec.ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stiff-relax",
        description="IMEX-BDF solvers for stiff relaxation systems: "
                    "stability certificates and convergence sweeps.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_ver = sub.add_parser("verify-multipliers",
                           help="check the stability-certificate identities and spectra")
    p_ver.add_argument("--q", type=int, choices=(1, 2, 3, 4), default=None)
    p_ver.add_argument("--samples", type=int, default=100)
    p_ver.add_argument("--seed", type=int, default=0)
    p_ver.add_argument("--csv", type=str, default=None)
    p_ver.set_defaults(func=_cmd_verify_multipliers)

    p_sweep = sub.add_parser("sweep", help="run the sweeps defined in a TOML manifest")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--out", default=".")
    p_sweep.add_argument("--jobs", type=int, default=1)
    p_sweep.set_defaults(func=_cmd_sweep)

    p_run = sub.add_parser("run", help="run a single (eps, resolution) case")
    p_run.add_argument("--problem", required=True, choices=("linear", "varcoef", "nonlinear", "bgk"))
    p_run.add_argument("--q", type=int, required=True, choices=(1, 2, 3, 4))
    p_run.add_argument("--eps", type=float, required=True)
    p_run.add_argument("--dt", type=float, default=None)
    p_run.add_argument("--nx", type=int, default=None)
    p_run.add_argument("--dt-over-dx", dest="dt_over_dx", type=float, default=None)
    p_run.add_argument("--n-modes", dest="n_modes", type=int, default=40)
    p_run.add_argument("--nv", type=int, default=60)
    p_run.add_argument("--vmax", type=float, default=10.0)
    p_run.add_argument("--b", type=float, default=0.6)
    p_run.add_argument("--t0", type=float, default=0.0)
    p_run.add_argument("--t-end", dest="t_end", type=float, default=1.0)
    p_run.add_argument("--error-mode", dest="error_mode", default="self-refinement",
                       choices=("exact-oracle", "self-refinement"))
    p_run.add_argument("--substeps", type=int, default=500)
    p_run.add_argument("--timings", action="store_true")
    p_run.set_defaults(func=_cmd_run)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
