"""Configuration-driven (eps, dt) sweeps, error records and order estimates.

A sweep runs one solver over the Cartesian product of a relaxation-scale
list and a resolution list, records one error per case, and reduces the
records to an observed convergence order by fitting the worst-over-eps
error against the step size.  Errors come either from the exact per-mode
solution (linear problem) or from a run at half the resolution
(self-refinement, used where no closed-form reference exists).

Records serialize to CSV with the fixed header

    problem,q,eps,dt,nx,nv,error,seconds,status

using shortest round-trip float formatting and LF line endings.  Reruns of
the same configuration produce byte-identical files; wall-clock timings are
therefore opt-in (``record_timings``) and stored as 0.0 by default.
"""

import csv
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from . import bgk as bgk_mod
from . import weno as weno_mod
from .spectral import (
    LinearParams,
    exact_solution,
    integrate_linear,
    l2_error,
    project,
)
from .varcoef import VarCoefEuler, VarCoefParams

__all__ = [
    "InvalidConfigError",
    "SweepConfig",
    "ErrorRecord",
    "OrderEstimate",
    "load_configs",
    "default_linear_config",
    "default_varcoef_config",
    "default_nonlinear_config",
    "default_bgk_config",
    "run_case",
    "run_sweep",
    "estimate_order",
    "emit_csv",
    "load_records",
]

PROBLEMS = ("linear", "varcoef", "nonlinear", "bgk")
ERROR_MODES = ("exact-oracle", "self-refinement")

CSV_HEADER = ("problem", "q", "eps", "dt", "nx", "nv", "error", "seconds", "status")


class InvalidConfigError(ValueError):
    """Sweep configuration that fails validation (CLI exit code 2)."""


@dataclass(frozen=True)
class SweepConfig:
    problem: str
    q: int
    eps: tuple = ()
    dt: tuple = ()            # spectral problems: explicit step sizes
    nx: tuple = ()            # cell problems: grid sizes, dt = dt_over_dx * dx
    dt_over_dx: float = 0.0
    n_modes: int = 40
    nv: int = 60
    vmax: float = 10.0
    b: float = 0.6
    t0: float = 0.0
    t_end: float = 1.0
    error_mode: str = "exact-oracle"
    substeps: int = 500
    name: str = "sweep"
    seed: int = 0
    record_timings: bool = False
    cfl: float = 0.0          # optional: require dt <= cfl / n_modes**2

    def __post_init__(self):
        object.__setattr__(self, "eps", tuple(float(e) for e in self.eps))
        object.__setattr__(self, "dt", tuple(float(d) for d in self.dt))
        object.__setattr__(self, "nx", tuple(int(n) for n in self.nx))
        self.validate()

    def validate(self):
        if self.problem not in PROBLEMS:
            raise InvalidConfigError(f"unknown problem {self.problem!r}; expected one of {PROBLEMS}")
        if self.q not in (1, 2, 3, 4):
            raise InvalidConfigError("q must be in 1..4")
        if not self.eps or any(e <= 0 for e in self.eps):
            raise InvalidConfigError("eps must be a nonempty list of positive values")
        if self.error_mode not in ERROR_MODES:
            raise InvalidConfigError(f"error_mode must be one of {ERROR_MODES}")
        if self.problem in ("linear", "varcoef"):
            if not self.dt:
                raise InvalidConfigError(f"{self.problem} sweeps need a dt list")
            if any(d <= 0 for d in self.dt) or list(self.dt) != sorted(self.dt, reverse=True):
                raise InvalidConfigError("dt must be positive and sorted descending")
            if self.cfl > 0 and any(d > self.cfl / self.n_modes**2 for d in self.dt):
                raise InvalidConfigError("dt list violates the configured CFL bound")
        else:
            if not self.nx or any(n < 10 or n % 2 for n in self.nx):
                raise InvalidConfigError("cell sweeps need even grid sizes nx >= 10")
            if list(self.nx) != sorted(self.nx):
                raise InvalidConfigError("nx must be sorted ascending")
            if self.dt_over_dx <= 0:
                raise InvalidConfigError("cell sweeps need dt_over_dx > 0")
        if self.problem == "varcoef" and self.error_mode != "self-refinement":
            raise InvalidConfigError("varcoef has no exact oracle; use self-refinement")
        if self.problem in ("nonlinear", "bgk") and self.error_mode != "self-refinement":
            raise InvalidConfigError(f"{self.problem} has no exact oracle; use self-refinement")
        if self.q == 1 and self.problem in ("nonlinear", "bgk"):
            pass  # allowed; initial data recipe falls back to the equilibrium one


@dataclass(frozen=True)
class ErrorRecord:
    problem: str
    q: int
    eps: float
    dt: float
    nx: int
    nv: int
    error: float
    seconds: float
    status: str

    @property
    def ok(self) -> bool:
        return self.status == "ok"


@dataclass(frozen=True)
class OrderEstimate:
    """Worst-over-eps errors per step size and the fitted convergence slope."""

    dts: tuple
    max_errors: tuple
    pair_orders: tuple
    slope: float


def load_configs(path) -> list:
    """Parse a TOML manifest with one [[sweep]] table per sweep."""
    with open(path, "rb") as fh:
        try:
            data = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise InvalidConfigError(f"malformed TOML: {exc}") from exc
    tables = data.get("sweep")
    if not tables:
        raise InvalidConfigError("manifest defines no [[sweep]] tables")
    configs = []
    for i, table in enumerate(tables):
        table = dict(table)
        table.setdefault("name", f"sweep{i}")
        unknown = set(table) - {f.name for f in SweepConfig.__dataclass_fields__.values()}
        unknown -= {"name"}
        if unknown:
            raise InvalidConfigError(f"unknown keys in [[sweep]] {table['name']}: {sorted(unknown)}")
        if table.get("problem") == "bgk" and "dt_over_dx" not in table:
            table["dt_over_dx"] = 1.0 / (3.0 * table.get("vmax", 10.0))
        try:
            cfg = SweepConfig(**table)
        except TypeError as exc:
            raise InvalidConfigError(str(exc)) from exc
        configs.append(cfg)
    return configs


# Canonical study setups -----------------------------------------------------

EPS_DECADES = tuple(10.0 ** (-k) for k in range(7, -1, -1))


def default_linear_config(q, dt=None, eps=EPS_DECADES) -> SweepConfig:
    """Smooth-data accuracy study on [0, 1]: b = 0.6, N = 40, T0 = 1, T = 2."""
    if dt is None:
        dt = tuple(1.0 / 640.0 / 2**j for j in range(4))
    return SweepConfig(problem="linear", q=q, eps=tuple(eps), dt=tuple(dt),
                       n_modes=40, b=0.6, t0=1.0, t_end=2.0,
                       error_mode="exact-oracle", name=f"linear-q{q}")


def default_varcoef_config(dt=None, eps=EPS_DECADES) -> SweepConfig:
    if dt is None:
        dt = tuple(0.002 / 2**j for j in range(3))
    return SweepConfig(problem="varcoef", q=1, eps=tuple(eps), dt=tuple(dt),
                       n_modes=24, t_end=0.5, error_mode="self-refinement",
                       name="varcoef-q1")


def default_nonlinear_config(q, nx=(50, 100, 200), eps=EPS_DECADES) -> SweepConfig:
    """Smooth-regime study of the quadratic relaxation system, b = 0.2, T = 0.2."""
    ratio = 0.25 if q <= 2 else 1.0 / 3.0
    return SweepConfig(problem="nonlinear", q=q, eps=tuple(eps), nx=tuple(nx),
                       dt_over_dx=ratio, b=0.2, t_end=0.2,
                       error_mode="self-refinement", name=f"nonlinear-q{q}")


def default_bgk_config(q, nx=(50, 100), eps=(1e-7, 1e-4, 1e-1, 1.0),
                       nv=60, vmax=10.0) -> SweepConfig:
    """Desk-scale kinetic study; paper-scale runs pass nv=150, vmax=15, nx up to 400."""
    return SweepConfig(problem="bgk", q=q, eps=tuple(eps), nx=tuple(nx),
                       dt_over_dx=1.0 / (3.0 * vmax), nv=nv, vmax=vmax,
                       t_end=0.1, error_mode="self-refinement", name=f"bgk-q{q}")


# Problem drivers ------------------------------------------------------------


def _linear_initial(cfg):
    period = 1.0
    u0 = project(lambda x: np.exp(np.sin(2.0 * np.pi * x)), cfg.n_modes, period)
    v0 = project(lambda x: cfg.b * np.exp(np.sin(2.0 * np.pi * x)), cfg.n_modes, period)
    return u0, v0


def _case_linear(cfg, eps, dt):
    p = LinearParams(b=cfg.b, eps=eps)
    u0, v0 = _linear_initial(cfg)
    u_num, v_num = integrate_linear(u0, v0, cfg.q, dt, p, cfg.t0, cfg.t_end)
    if cfg.error_mode == "exact-oracle":
        u_ref, v_ref = exact_solution(u0, v0, cfg.t_end, p)
    else:
        u_ref, v_ref = integrate_linear(u0, v0, cfg.q, dt / 2.0, p, cfg.t0, cfg.t_end)
    return l2_error(u_num, u_ref) + l2_error(v_num, v_ref)


_VARCOEF_CACHE = {}


def _varcoef_setup(n_modes):
    if n_modes not in _VARCOEF_CACHE:
        params = VarCoefParams.from_functions(
            lambda x: 0.3 + 0.2 * np.sin(x), lambda x: 1.0 + 0.5 * np.cos(x), n_modes
        )
        u0 = project(
            lambda x: np.sqrt(1.0 - (0.3 + 0.2 * np.sin(x)) ** 2) * np.exp(np.sin(x)), n_modes
        )
        w0 = project(lambda x: np.zeros_like(x), n_modes)
        _VARCOEF_CACHE[n_modes] = (params, u0, w0)
    return _VARCOEF_CACHE[n_modes]


def _varcoef_run(params, state, dt, eps, n_steps):
    stepper = VarCoefEuler(params, dt, eps)
    for _ in range(n_steps):
        state = stepper.step(state)
    return state


def _case_varcoef(cfg, eps, dt):
    params, u0, w0 = _varcoef_setup(cfg.n_modes)
    n_steps = int(round(cfg.t_end / dt))
    if abs(n_steps * dt - cfg.t_end) > 1e-8 * max(cfg.t_end, dt):
        raise InvalidConfigError("t_end must be a whole number of steps")
    u1, w1 = _varcoef_run(params, (u0, w0), dt, eps, n_steps)
    u2, w2 = _varcoef_run(params, (u0, w0), dt / 2.0, eps, 2 * n_steps)
    return l2_error(u1, u2) + l2_error(w1, w2)


def _nonlinear_initial(cfg, nx, eps):
    u0_fn = lambda x: 0.5 * np.exp(np.sin(2.0 * np.pi * x))
    du0_fn = lambda x: np.pi * np.cos(2.0 * np.pi * x) * np.exp(np.sin(2.0 * np.pi * x))
    order = 2 if cfg.q <= 2 else 3
    v0_fn = weno_mod.nonlinear_v0(u0_fn, du0_fn, cfg.b, eps, order)
    return (
        weno_mod.cell_average_field(u0_fn, nx, 1.0),
        weno_mod.cell_average_field(v0_fn, nx, 1.0),
    )


def _case_nonlinear(cfg, eps, nx):
    p = weno_mod.NonlinearParams(b=cfg.b, eps=eps)

    def solve(n):
        u0, v0 = _nonlinear_initial(cfg, n, eps)
        dt = cfg.dt_over_dx / n
        return weno_mod.integrate_nonlinear(u0, v0, cfg.q, dt, p, cfg.t_end, cfg.substeps)

    u_c, v_c = solve(nx)
    u_f, v_f = solve(2 * nx)
    return (
        weno_mod.cell_l2_diff(u_c, weno_mod.coarsen(u_f))
        + weno_mod.cell_l2_diff(v_c, weno_mod.coarsen(v_f))
    )


def _case_bgk(cfg, eps, nx):
    vg = bgk_mod.VelocityGrid.uniform(cfg.nv, cfg.vmax)
    period = 2.0
    order = 2 if cfg.q <= 2 else 3

    def solve(n):
        mv = bgk_mod.default_moment_profile(n, period)
        f0 = bgk_mod.chapman_init(mv, eps, vg, period, order)
        dt = cfg.dt_over_dx * (period / n)
        return bgk_mod.integrate_bgk(f0, cfg.q, dt, eps, vg, cfg.t_end, cfg.substeps)

    f_c = solve(nx)
    f_f = solve(2 * nx)
    return bgk_mod.kinetic_l2_diff(f_c, bgk_mod.coarsen_x(f_f), vg)


def run_case(cfg: SweepConfig, eps: float, level) -> ErrorRecord:
    """Run one (eps, resolution) case; failures yield a failed record.

    ``level`` is a step size dt for spectral problems and a grid size nx for
    cell-based problems.
    """
    if cfg.problem in ("linear", "varcoef"):
        dt, nx, nv = float(level), cfg.n_modes, 0
    elif cfg.problem == "nonlinear":
        nx = int(level)
        dt, nv = cfg.dt_over_dx / nx, 0
    else:
        nx = int(level)
        dt, nv = cfg.dt_over_dx * (2.0 / nx), cfg.nv
    start = time.perf_counter()
    status = "ok"
    try:
        if cfg.problem == "linear":
            error = _case_linear(cfg, eps, dt)
        elif cfg.problem == "varcoef":
            error = _case_varcoef(cfg, eps, dt)
        elif cfg.problem == "nonlinear":
            error = _case_nonlinear(cfg, eps, nx)
        else:
            error = _case_bgk(cfg, eps, nx)
        if not (math.isfinite(error) and error >= 0.0):
            error = math.inf
            status = "failed:NonFiniteError"
    except (ValueError, FloatingPointError, np.linalg.LinAlgError) as exc:
        error = math.inf
        status = f"failed:{type(exc).__name__}"
    seconds = time.perf_counter() - start if cfg.record_timings else 0.0
    return ErrorRecord(problem=cfg.problem, q=cfg.q, eps=eps, dt=dt, nx=nx, nv=nv,
                       error=error, seconds=seconds, status=status)


def _case_worker(args):
    cfg, eps, level = args
    return run_case(cfg, eps, level)


def _record_sort_key(rec: ErrorRecord):
    return (rec.eps, -rec.dt, rec.nx)


def run_sweep(cfg: SweepConfig, jobs: int = 1) -> list:
    """All eps x resolution cases, canonically ordered (eps asc, dt desc)."""
    levels = cfg.dt if cfg.problem in ("linear", "varcoef") else cfg.nx
    cases = [(cfg, eps, lvl) for eps in cfg.eps for lvl in levels]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_case_worker, cases))
    else:
        records = [_case_worker(c) for c in cases]
    return sorted(records, key=_record_sort_key)


def estimate_order(records) -> OrderEstimate:
    """Fit the slope of log(worst-over-eps error) against log(dt).

    Requires at least two step sizes with every eps present and successful
    at each of them; anything else raises ValueError.
    """
    records = list(records)
    if any(not r.ok for r in records):
        raise ValueError("failed cases in the record set; no order estimate")
    eps_set = sorted({r.eps for r in records})
    dt_set = sorted({r.dt for r in records}, reverse=True)
    if len(dt_set) < 2:
        raise ValueError("need at least two step sizes")
    table = {(r.eps, r.dt): r.error for r in records}
    if len(table) != len(records) or len(records) != len(eps_set) * len(dt_set):
        raise ValueError("records do not form a complete eps x dt grid")
    max_err = [max(table[(e, d)] for e in eps_set) for d in dt_set]
    pair = tuple(
        math.log(max_err[i] / max_err[i + 1]) / math.log(dt_set[i] / dt_set[i + 1])
        for i in range(len(dt_set) - 1)
    )
    slope = float(np.polyfit(np.log(dt_set), np.log(max_err), 1)[0])
    return OrderEstimate(dts=tuple(dt_set), max_errors=tuple(max_err),
                         pair_orders=pair, slope=slope)


def _fmt(value) -> str:
    return repr(float(value)) if isinstance(value, float) else str(value)


def emit_csv(payload, path):
    """Write records (or an order estimate) as UTF-8, LF-terminated CSV."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if isinstance(payload, OrderEstimate):
            writer.writerow(("dt", "max_error", "pairwise_order", "fitted_slope"))
            for i, (dt, err) in enumerate(zip(payload.dts, payload.max_errors)):
                pair = _fmt(payload.pair_orders[i]) if i < len(payload.pair_orders) else ""
                slope = _fmt(payload.slope) if i == 0 else ""
                writer.writerow((_fmt(dt), _fmt(err), pair, slope))
            return
        writer.writerow(CSV_HEADER)
        for rec in payload:
            writer.writerow((
                rec.problem, rec.q, _fmt(rec.eps), _fmt(rec.dt), rec.nx, rec.nv,
                _fmt(rec.error), _fmt(rec.seconds), rec.status,
            ))


def load_records(path) -> list:
    """Parse a record CSV written by ``emit_csv`` back into ErrorRecords."""
    out = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header != CSV_HEADER:
            raise ValueError(f"unexpected CSV header {header!r}")
        for row in reader:
            out.append(ErrorRecord(
                problem=row[0], q=int(row[1]), eps=float(row[2]), dt=float(row[3]),
                nx=int(row[4]), nv=int(row[5]), error=float(row[6]),
                seconds=float(row[7]), status=row[8],
            ))
    return out
