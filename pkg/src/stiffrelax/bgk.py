"""Kinetic BGK solver, 1D in space and 1D in velocity.

    f_t + v f_x = (M[f] - f) / eps,

where M[f] is the local Maxwellian sharing the density, bulk velocity and
temperature of f.  Space is periodic with fifth-order upwind WENO transport
per velocity node; velocity is truncated to [-vmax, vmax] with uniform
midpoint nodes, on which moments of a Gaussian are accurate to the
(exponentially small) truncation tail.

The multistep relaxation solve looks nonlinearly implicit because the new
Maxwellian depends on the new f, but taking moments of the update removes
the collision term entirely: the moment vector U advances explicitly, which
determines M at the new level, after which f follows from one division.
The moment fluxes are the velocity-weighted sums of the very same WENO
fluxes used for f, so the moment update and the f update stay consistent to
round-off.
"""

from collections import deque
from dataclasses import dataclass

import numpy as np

from .tableaux import BdfTableau, bdf_tableau, imex_rk_step
from .weno import _weno5_left, _weno5_right

__all__ = [
    "VelocityGrid",
    "KineticField",
    "MomentVector",
    "RealizabilityError",
    "moments",
    "maxwellian",
    "transport_rhs",
    "BgkHistory",
    "step_bdf_bgk",
    "chapman_init",
    "bootstrap_bgk",
    "integrate_bgk",
    "conserved_totals",
    "central_dx6",
    "coarsen_x",
    "kinetic_l2_diff",
    "default_moment_profile",
]


class RealizabilityError(ValueError):
    """Moments with nonpositive density or temperature."""


@dataclass(frozen=True)
class VelocityGrid:
    """Uniform midpoint nodes on [-vmax, vmax], exactly symmetric about 0."""

    nv: int
    vmax: float
    nodes: np.ndarray
    dv: float

    @classmethod
    def uniform(cls, nv: int, vmax: float) -> "VelocityGrid":
        if nv < 2 or vmax <= 0:
            raise ValueError("need nv >= 2 and vmax > 0")
        dv = 2.0 * vmax / nv
        nodes = (np.arange(nv) - (nv - 1) / 2.0) * dv
        grid = cls(nv=nv, vmax=vmax, nodes=nodes, dv=dv)
        assert np.all(nodes + nodes[::-1] == 0.0), "velocity nodes lost symmetry"
        return grid


@dataclass(frozen=True)
class KineticField:
    """Distribution values f(x_i, v_j) on a periodic-in-x tensor grid."""

    values: np.ndarray  # (nx, nv)
    period: float = 2.0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", v)
        if v.ndim != 2:
            raise ValueError("kinetic field must be a 2-D (x, v) array")
        if not np.all(np.isfinite(v)):
            raise ValueError("non-finite distribution values")

    @property
    def nx(self) -> int:
        return self.values.shape[0]

    @property
    def dx(self) -> float:
        return self.period / self.nx

    def centers(self) -> np.ndarray:
        return (np.arange(self.nx) + 0.5) * self.dx

    def negative_fraction(self) -> float:
        """Fraction of grid points with f < 0 (flagged, never silently fixed)."""
        return float(np.mean(self.values < 0.0))


@dataclass(frozen=True)
class MomentVector:
    """Per-cell density, momentum and energy (rho, rho*u, rho*u^2 + rho*T)."""

    rho: np.ndarray
    momentum: np.ndarray
    energy: np.ndarray

    def __post_init__(self):
        for name in ("rho", "momentum", "energy"):
            object.__setattr__(self, name, np.atleast_1d(np.asarray(getattr(self, name), dtype=float)))
        if not (np.all(np.isfinite(self.rho)) and np.all(np.isfinite(self.momentum))
                and np.all(np.isfinite(self.energy))):
            raise RealizabilityError("non-finite moments")
        if np.any(self.rho <= 0.0):
            raise RealizabilityError("nonpositive density")
        if np.any(self.temperature <= 0.0):
            raise RealizabilityError("nonpositive temperature")

    @property
    def u(self) -> np.ndarray:
        return self.momentum / self.rho

    @property
    def temperature(self) -> np.ndarray:
        return self.energy / self.rho - (self.momentum / self.rho) ** 2

    @classmethod
    def from_primitive(cls, rho, u, temperature) -> "MomentVector":
        rho = np.atleast_1d(np.asarray(rho, dtype=float))
        u = np.atleast_1d(np.asarray(u, dtype=float)) * np.ones_like(rho)
        t = np.atleast_1d(np.asarray(temperature, dtype=float)) * np.ones_like(rho)
        return cls(rho=rho, momentum=rho * u, energy=rho * u**2 + rho * t)


def moments(f: KineticField, vg: VelocityGrid) -> MomentVector:
    """Quadrature moments sum_j f(., v_j) (1, v_j, v_j^2) dv per cell.

    Raises RealizabilityError when the resulting density or temperature is
    not positive.
    """
    vals = f.values
    rho = vals.sum(axis=1) * vg.dv
    mom = vals @ vg.nodes * vg.dv
    en = vals @ vg.nodes**2 * vg.dv
    return MomentVector(rho=rho, momentum=mom, energy=en)


def maxwellian(m: MomentVector, vg: VelocityGrid) -> np.ndarray:
    """Gaussian equilibrium rho/sqrt(2 pi T) exp(-(v-u)^2 / 2T) on the grid."""
    rho = m.rho[:, None]
    u = m.u[:, None]
    t = m.temperature[:, None]
    v = vg.nodes[None, :]
    return rho / np.sqrt(2.0 * np.pi * t) * np.exp(-((v - u) ** 2) / (2.0 * t))


def _transport_values(values, nodes, dx):
    # upwind flux v*f per velocity column; wind direction = sign(v_j)
    left = _weno5_left(values)
    right = _weno5_right(values)
    fhat = np.where(nodes[None, :] >= 0.0, left, right) * nodes[None, :]
    return -(fhat - np.roll(fhat, 1, axis=0)) / dx


def transport_rhs(f: KineticField, vg: VelocityGrid) -> KineticField:
    """Conservative approximation of -v * f_x."""
    if f.nx < 5:
        raise ValueError("transport needs at least 5 cells")
    if f.values.shape[1] != vg.nv:
        raise ValueError("velocity grid size mismatch")
    return KineticField(_transport_values(f.values, vg.nodes, f.dx), f.period)


def _moment_weights(vg: VelocityGrid) -> np.ndarray:
    return np.stack([np.ones(vg.nv), vg.nodes, vg.nodes**2]) * vg.dv  # (3, nv)


class BgkHistory:
    """Last q distribution levels with cached transport terms and moments."""

    def __init__(self, q: int, vg: VelocityGrid):
        self.q = q
        self.vg = vg
        self.levels: deque = deque(maxlen=q)
        self._phi = _moment_weights(vg)

    @property
    def full(self) -> bool:
        return len(self.levels) == self.q

    def push(self, f: KineticField):
        transport = _transport_values(f.values, self.vg.nodes, f.dx)
        u_mom = f.values @ self._phi.T * 1.0  # (nx, 3)
        t_mom = transport @ self._phi.T
        self.levels.append((f, transport, u_mom, t_mom))


def step_bdf_bgk(hist: BgkHistory, tab: BdfTableau, eps: float, dt: float,
                 vg: VelocityGrid) -> KineticField:
    """One IMEX-BDF level via the moment update.

    (i) advance the moment vector with the velocity-summed WENO fluxes,
    (ii) build the Maxwellian of the new moments, (iii) solve the now-linear
    relaxation update for the new distribution.
    """
    if not hist.full:
        raise ValueError("history is not full")
    if tab.q != hist.q:
        raise ValueError("tableau order differs from history depth")
    f0 = hist.levels[0][0]
    u_new = np.zeros((f0.nx, 3))
    f_acc = np.zeros_like(f0.values)
    for i, (f, transport, u_mom, t_mom) in enumerate(hist.levels):
        u_new += -tab.alpha[i] * u_mom + dt * tab.gamma[i] * t_mom
        f_acc += -tab.alpha[i] * f.values + dt * tab.gamma[i] * transport
    rho = u_new[:, 0]
    if np.any(~np.isfinite(rho)) or np.any(rho <= 0):
        raise RealizabilityError("moment update produced nonpositive density")
    mv = MomentVector(rho=rho, momentum=u_new[:, 1], energy=u_new[:, 2])
    r = tab.beta * dt / eps
    f_new = (f_acc + r * maxwellian(mv, vg)) / (1.0 + r)
    out = KineticField(f_new, f0.period)
    hist.push(out)
    return out


def central_dx6(arr, dx):
    """Sixth-order periodic central difference."""
    a = np.asarray(arr, dtype=float)
    return (
        3.0 / 4.0 * (np.roll(a, -1) - np.roll(a, 1))
        - 3.0 / 20.0 * (np.roll(a, -2) - np.roll(a, 2))
        + 1.0 / 60.0 * (np.roll(a, -3) - np.roll(a, 3))
    ) / dx


def chapman_init(mv: MomentVector, eps: float, vg: VelocityGrid, period: float,
                 order: int = 2, dTdx=None) -> KineticField:
    """Initial distribution consistent with the fluid fields.

    order 2 evaluates the plain Maxwellian (O(1)-consistent data); order 3
    multiplies in the first temperature-gradient correction

        1 - eps * ((v-u)^2/(2T) - 3/2) * (v-u) * T_x / T,

    making the data O(eps)-consistent.  ``dTdx`` overrides the default
    sixth-order central difference of the temperature field.
    """
    m = maxwellian(mv, vg)
    if order == 2:
        return KineticField(m, period)
    if order != 3:
        raise ValueError("order must be 2 or 3")
    t = mv.temperature
    if dTdx is None:
        dTdx = central_dx6(t, period / len(t))
    vu = vg.nodes[None, :] - mv.u[:, None]
    tcol = t[:, None]
    corr = 1.0 - eps * (vu**2 / (2.0 * tcol) - 1.5) * vu * (np.asarray(dTdx)[:, None] / tcol)
    return KineticField(m * corr, period)


class _BgkImexSystem:
    """State is the raw (nx, nv) array; transport explicit, collision via moments."""

    def __init__(self, eps: float, vg: VelocityGrid, dx: float):
        self.eps = eps
        self.vg = vg
        self.dx = dx

    def explicit_rhs(self, y):
        return _transport_values(y, self.vg.nodes, self.dx)

    def solve_implicit(self, rhs, mu):
        vg = self.vg
        rho = rhs.sum(axis=1) * vg.dv
        if np.any(~np.isfinite(rho)) or np.any(rho <= 0):
            raise RealizabilityError("stage update produced nonpositive density")
        mv = MomentVector(rho=rho, momentum=rhs @ vg.nodes * vg.dv,
                          energy=rhs @ vg.nodes**2 * vg.dv)
        r = mu / self.eps
        return (rhs + r * maxwellian(mv, vg)) / (1.0 + r)


def bootstrap_bgk(f0: KineticField, q: int, dt: float, eps: float,
                  vg: VelocityGrid, substeps: int = 500) -> BgkHistory:
    """Starting history built by Runge-Kutta substepping with dt/substeps."""
    hist = BgkHistory(q, vg)
    hist.push(f0)
    system = _BgkImexSystem(eps, vg, f0.dx)
    y = f0.values
    sub_dt = dt / substeps
    for _ in range(q - 1):
        for _ in range(substeps):
            y = imex_rk_step(system, y, sub_dt)
        hist.push(KineticField(y, f0.period))
    return hist


def integrate_bgk(f0: KineticField, q: int, dt: float, eps: float, vg: VelocityGrid,
                  t_end: float, substeps: int = 500) -> KineticField:
    """Bootstrap at t=0 and march to t_end."""
    n_total = int(round(t_end / dt))
    if n_total < q - 1 or abs(n_total * dt - t_end) > 1e-8 * max(t_end, dt):
        raise ValueError("t_end must be a whole number of steps covering the startup")
    hist = bootstrap_bgk(f0, q, dt, eps, vg, substeps)
    tab = bdf_tableau(q)
    f = hist.levels[-1][0]
    for _ in range(n_total - (q - 1)):
        f = step_bdf_bgk(hist, tab, eps, dt, vg)
    return f


def conserved_totals(f: KineticField, vg: VelocityGrid):
    """Domain totals of mass, momentum and energy."""
    mv_w = _moment_weights(vg)  # (3, nv)
    tot = f.values @ mv_w.T  # (nx, 3)
    return tuple(float(s) for s in tot.sum(axis=0) * f.dx)


def coarsen_x(f: KineticField) -> KineticField:
    """Restrict to half the x-cells by averaging adjacent pairs."""
    if f.nx % 2:
        raise ValueError("need an even number of cells")
    v = f.values
    return KineticField(0.5 * (v[0::2] + v[1::2]), f.period)


def kinetic_l2_diff(a: KineticField, b: KineticField, vg: VelocityGrid) -> float:
    """Discrete L2 distance over the (x, v) grid."""
    if a.values.shape != b.values.shape or a.period != b.period:
        raise ValueError("grids differ")
    return float(np.sqrt(np.sum((a.values - b.values) ** 2) * a.dx * vg.dv))


def default_moment_profile(nx: int, period: float = 2.0) -> MomentVector:
    """Smooth reference fluid fields: rho = 1 + 0.2 sin(2 pi x / L), u = 1, T = 1/rho."""
    x = (np.arange(nx) + 0.5) * (period / nx)
    rho = 1.0 + 0.2 * np.sin(2.0 * np.pi * x / period)
    return MomentVector.from_primitive(rho, 1.0, 1.0 / rho)
