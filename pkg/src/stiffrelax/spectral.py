"""Fourier-Galerkin solver for the periodic linear hyperbolic relaxation system.

The model problem in primitive variables (u, v) is

    u_t + v_x = 0,
    v_t + u_x = (b*u - v) / eps,        |b| < 1, eps > 0,

on a periodic interval of length L.  In the micro-macro variables
(u, w = v - b*u) it becomes

    u_t + (b*u + w)_x = 0,
    w_t + ((1 - b^2)*u - b*w)_x = -w / eps,

which is the form actually stepped: the convective terms are extrapolated
from the last q levels and the relaxation term -w/eps is implicit, so each
Fourier mode advances by one division.  Because the system has constant
coefficients, every mode also solves a 2x2 linear ODE exactly, which
provides the reference solutions used in convergence studies.

Spectral fields store complex coefficients for modes k = -N..N with respect
to exp(2*pi*i*k*x/L); norms are root-mean-square over one period, i.e.
``sqrt(sum |c_k|^2)`` by Parseval.
"""

from collections import deque
from dataclasses import dataclass

import numpy as np

from .tableaux import BdfTableau

__all__ = [
    "SpectralField",
    "LinearParams",
    "BdfHistory",
    "project",
    "l2_error",
    "step_bdf_linear",
    "step_bdf_limit",
    "exact_solution",
    "bootstrap_linear",
    "integrate_linear",
    "v_from_uw",
    "w_from_uv",
]


@dataclass(frozen=True)
class SpectralField:
    """Trigonometric polynomial of degree <= n_modes on [0, period)."""

    n_modes: int
    coeffs: np.ndarray  # modes -N..N, ascending
    period: float = 2.0 * np.pi

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        object.__setattr__(self, "coeffs", c)
        if c.shape != (2 * self.n_modes + 1,):
            raise ValueError("expected 2*n_modes+1 coefficients")
        if not np.all(np.isfinite(c)):
            raise ValueError("non-finite spectral coefficients")

    @property
    def modes(self):
        return np.arange(-self.n_modes, self.n_modes + 1)

    def evaluate(self, x):
        """Pointwise values sum_k c_k exp(2*pi*i*k*x/period)."""
        x = np.asarray(x, dtype=float)
        phase = np.exp(2j * np.pi / self.period * np.outer(x, self.modes))
        return phase @ self.coeffs

    def norm(self) -> float:
        """Root-mean-square over one period (Parseval)."""
        return float(np.sqrt(np.sum(np.abs(self.coeffs) ** 2)))

    def real_symmetry_defect(self) -> float:
        """Max |c_{-k} - conj(c_k)|; zero iff the field is real-valued."""
        return float(np.max(np.abs(self.coeffs[::-1] - self.coeffs.conj())))


@dataclass(frozen=True)
class LinearParams:
    """Constant coefficients of the relaxation system."""

    b: float
    eps: float

    def __post_init__(self):
        if not abs(self.b) < 1.0:
            raise ValueError("|b| < 1 is required")
        if not self.eps > 0.0:
            raise ValueError("eps must be positive")


def wavenumbers(n_modes: int, period: float) -> np.ndarray:
    """Derivative symbols i*2*pi*k/period for modes k = -N..N."""
    return 2j * np.pi / period * np.arange(-n_modes, n_modes + 1)


def modes_to_grid(coeffs, n_modes, m):
    """Values of the field on m >= 2N+1 equispaced points of one period."""
    spread = np.zeros(m, dtype=complex)
    spread[np.arange(-n_modes, n_modes + 1) % m] = coeffs
    return np.fft.ifft(spread) * m


def grid_to_modes(values, n_modes):
    """First 2N+1 discrete Fourier coefficients of equispaced samples."""
    m = len(values)
    if m < 2 * n_modes + 1:
        raise ValueError("need at least 2*n_modes+1 samples")
    fh = np.fft.fft(values) / m
    return fh[np.arange(-n_modes, n_modes + 1) % m]


def project(f, n_modes: int, period: float = 2.0 * np.pi) -> SpectralField:
    """Galerkin projection onto modes |k| <= n_modes.

    ``f`` is either a callable evaluated on 4*n_modes+4 equispaced points
    (near-exact quadrature for smooth inputs) or an array of equispaced
    samples over one period.
    """
    if callable(f):
        m = 4 * n_modes + 4
        x = np.arange(m) * (period / m)
        samples = np.asarray(f(x))
    else:
        samples = np.asarray(f)
    if not np.all(np.isfinite(samples)):
        raise ValueError("non-finite samples")
    return SpectralField(n_modes=n_modes, coeffs=grid_to_modes(samples, n_modes), period=period)


def l2_error(a: SpectralField, b: SpectralField) -> float:
    """Root-mean-square norm of the difference of two fields."""
    if a.n_modes != b.n_modes or a.period != b.period:
        raise ValueError("fields live on different spaces")
    with np.errstate(over="ignore"):  # huge-but-finite diverged runs yield inf
        return float(np.sqrt(np.sum(np.abs(a.coeffs - b.coeffs) ** 2)))


def v_from_uw(u: SpectralField, w: SpectralField, b: float) -> SpectralField:
    return SpectralField(u.n_modes, w.coeffs + b * u.coeffs, u.period)


def w_from_uv(u: SpectralField, v: SpectralField, b: float) -> SpectralField:
    return SpectralField(u.n_modes, v.coeffs - b * u.coeffs, u.period)


class BdfHistory:
    """Ring buffer of the last q (U, W) spectral levels with time stamps."""

    def __init__(self, q: int):
        if q < 1:
            raise ValueError("q must be >= 1")
        self.q = q
        self.u_levels: deque = deque(maxlen=q)
        self.w_levels: deque = deque(maxlen=q)
        self.times: deque = deque(maxlen=q)

    @property
    def full(self) -> bool:
        return len(self.times) == self.q

    @property
    def dt(self) -> float:
        if len(self.times) < 2:
            raise ValueError("spacing undefined with fewer than two levels")
        return self.times[1] - self.times[0]

    def push(self, u: SpectralField, w: SpectralField, t: float):
        if u.n_modes != w.n_modes or u.period != w.period:
            raise ValueError("component fields live on different spaces")
        if self.u_levels and u.n_modes != self.u_levels[0].n_modes:
            raise ValueError("mode count differs from existing levels")
        if len(self.times) >= 2:
            dt = self.dt
            if abs((t - self.times[-1]) - dt) > 1e-9 * max(abs(dt), 1e-300):
                raise ValueError("levels must be uniformly spaced in time")
        self.u_levels.append(u)
        self.w_levels.append(w)
        self.times.append(t)


def step_bdf_linear(hist: BdfHistory, tab: BdfTableau, p: LinearParams, dt: float):
    """Advance the fully discrete scheme by one step of size dt.

    Per mode k with kappa = i*2*pi*k/L:

      U+ = -sum_{i<q} [alpha_i U_i + dt*gamma_i*kappa*(b*U_i + W_i)]
      W+ = -sum_{i<q} [alpha_i W_i + dt*gamma_i*kappa*((1-b^2)*U_i - b*W_i)]
           / (1 + beta*dt/eps)

    The history is rotated in place and the new (U, W) pair returned.
    """
    if not hist.full:
        raise ValueError(f"history holds {len(hist.times)} levels; q={hist.q} required")
    if tab.q != hist.q:
        raise ValueError("tableau order differs from history depth")
    if dt <= 0:
        raise ValueError("dt must be positive")
    field = hist.u_levels[0]
    kap = wavenumbers(field.n_modes, field.period)
    b = p.b
    unew = np.zeros_like(field.coeffs)
    wnew = np.zeros_like(field.coeffs)
    for i in range(hist.q):
        ui = hist.u_levels[i].coeffs
        wi = hist.w_levels[i].coeffs
        unew -= tab.alpha[i] * ui + dt * tab.gamma[i] * kap * (b * ui + wi)
        wnew -= tab.alpha[i] * wi + dt * tab.gamma[i] * kap * ((1.0 - b * b) * ui - b * wi)
    wnew /= 1.0 + tab.beta * dt / p.eps
    u = SpectralField(field.n_modes, unew, field.period)
    w = SpectralField(field.n_modes, wnew, field.period)
    hist.push(u, w, hist.times[-1] + dt)
    return u, w


def step_bdf_limit(u_levels, tab: BdfTableau, b: float, dt: float) -> SpectralField:
    """One step of the explicit multistep advection scheme u_t + (b*u)_x = 0.

    This is the eps -> 0 limit of ``step_bdf_linear`` for well-prepared data
    (w identically zero).  ``u_levels`` holds the last q fields, oldest
    first; the new field is returned and the input is left untouched.
    """
    if len(u_levels) != tab.q:
        raise ValueError("need exactly q previous levels")
    field = u_levels[0]
    kap = wavenumbers(field.n_modes, field.period)
    unew = np.zeros_like(field.coeffs)
    for i in range(tab.q):
        ui = u_levels[i].coeffs
        unew -= tab.alpha[i] * ui + dt * tab.gamma[i] * kap * b * ui
    return SpectralField(field.n_modes, unew, field.period)


def _expm2x2_series(m00, m01, m10, m11):
    # scaling and squaring with a plain Taylor series; used only near
    # eigenvalue collision where the eigenvector basis degenerates
    mat = np.array([[m00, m01], [m10, m11]], dtype=complex)
    nrm = np.max(np.sum(np.abs(mat), axis=1))
    s = max(0, int(np.ceil(np.log2(nrm))) + 1) if nrm > 1e-300 else 0
    a = mat / 2**s
    out = np.eye(2, dtype=complex)
    term = np.eye(2, dtype=complex)
    for k in range(1, 30):
        term = term @ a / k
        out = out + term
        if np.max(np.abs(term)) < 1e-20 * np.max(np.abs(out)):
            break
    for _ in range(s):
        out = out @ out
    return out


def _expm_mode(kap, b, eps, t):
    """exp(t*M) for M = [[0, -kappa], [b/eps - kappa, -1/eps]]."""
    c = b / eps - kap
    d = -1.0 / eps
    mu = 0.5 * d
    det = kap * c
    delta = np.sqrt(mu * mu - det + 0j)
    if delta.real < 0 or (delta.real == 0 and delta.imag < 0):
        delta = -delta
    lam2 = mu - delta  # root with the most negative real part
    lam1 = det / lam2 if lam2 != 0 else mu + delta
    scale = max(abs(lam1), abs(lam2))
    if abs(lam1 - lam2) < 1e-8 * max(scale, 1e-300):
        return _expm2x2_series(0.0, -kap * t, c * t, d * t)
    v_cols = []
    for lam in (lam1, lam2):
        va = np.array([d - lam, -c])
        vb = np.array([kap, -lam])
        v = va if np.abs(va).sum() >= np.abs(vb).sum() else vb
        top = np.abs(v).max()
        if top < 1e-300:  # M is a multiple of the identity
            e = np.exp(lam * t)
            return np.array([[e, 0.0], [0.0, e]], dtype=complex)
        v_cols.append(v / top)
    vmat = np.column_stack(v_cols).astype(complex)
    detv = vmat[0, 0] * vmat[1, 1] - vmat[0, 1] * vmat[1, 0]
    if abs(detv) < 1e-10:
        return _expm2x2_series(0.0, -kap * t, c * t, d * t)
    vinv = np.array([[vmat[1, 1], -vmat[0, 1]], [-vmat[1, 0], vmat[0, 0]]]) / detv
    return (vmat * np.array([np.exp(lam1 * t), np.exp(lam2 * t)])) @ vinv


def exact_solution(u0: SpectralField, v0: SpectralField, t: float, p: LinearParams):
    """Exact flow of the (u, v) system after time t, mode by mode.

    Each coefficient pair solves d/dt (u_k, v_k) = M_k (u_k, v_k) with
    M_k = [[0, -kappa], [b/eps - kappa, -1/eps]], kappa = i*2*pi*k/L; the
    2x2 exponential is evaluated by eigendecomposition with a series
    fallback near eigenvalue collision.  Returns the (u, v) pair.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    if u0.n_modes != v0.n_modes or u0.period != v0.period:
        raise ValueError("component fields live on different spaces")
    kap = wavenumbers(u0.n_modes, u0.period)
    uc = np.empty_like(u0.coeffs)
    vc = np.empty_like(v0.coeffs)
    for i, k in enumerate(kap):
        e = _expm_mode(k, p.b, p.eps, t)
        uc[i] = e[0, 0] * u0.coeffs[i] + e[0, 1] * v0.coeffs[i]
        vc[i] = e[1, 0] * u0.coeffs[i] + e[1, 1] * v0.coeffs[i]
    return (
        SpectralField(u0.n_modes, uc, u0.period),
        SpectralField(u0.n_modes, vc, u0.period),
    )


def bootstrap_linear(u0: SpectralField, v0: SpectralField, q: int, dt: float,
                     p: LinearParams, t0: float = 0.0) -> BdfHistory:
    """Starting history whose levels sample the exact flow at t0 + i*dt.

    Level i is the projected exact solution at t0 + i*dt, i = 0..q-1,
    converted to the (u, w) variables used by the stepper.
    """
    hist = BdfHistory(q)
    for i in range(q):
        u, v = exact_solution(u0, v0, t0 + i * dt, p)
        hist.push(u, w_from_uv(u, v, p.b), t0 + i * dt)
    return hist


def integrate_linear(u0: SpectralField, v0: SpectralField, q: int, dt: float,
                     p: LinearParams, t0: float, t_end: float, monitor=None):
    """March the scheme from exact starting values at t0 to t_end.

    Returns the final (u, v) pair.  ``monitor(step_index, u, w)`` is invoked
    after every step when given.  (t_end - t0) must be an integer number of
    steps.
    """
    span = t_end - t0
    n_total = int(round(span / dt))
    if n_total < q - 1 or abs(n_total * dt - span) > 1e-8 * max(span, dt):
        raise ValueError("(t_end - t0) must be a whole number of steps covering the startup")
    hist = bootstrap_linear(u0, v0, q, dt, p, t0)
    u, w = hist.u_levels[-1], hist.w_levels[-1]
    for n in range(n_total - (q - 1)):
        u, w = step_bdf_linear(hist, bdf_tableau_cached(q), p, dt)
        if monitor is not None:
            monitor(n, u, w)
    return u, v_from_uw(u, w, p.b)


_TAB_CACHE: dict[int, BdfTableau] = {}


def bdf_tableau_cached(q: int) -> BdfTableau:
    if q not in _TAB_CACHE:
        from .tableaux import bdf_tableau

        _TAB_CACHE[q] = bdf_tableau(q)
    return _TAB_CACHE[q]
