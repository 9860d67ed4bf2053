"""Multiplier certificates behind the uniform stability of IMEX-BDF stepping.

For each order q = 1..4 there is a set of real coefficients
(g_ij, a_ij, eta_i, c_i, d1, d2) such that, for arbitrary complex
u_0, ..., u_q, testing the backward-difference operator against the
multiplier u_q - sum_i eta_i u_i telescopes into quadratic forms:

  Re[(conj(u_q) - sum eta_j conj(u_j)) sum_i alpha_i u_i]
      = G(u_1..u_q) - G(u_0..u_{q-1})
        + d1 |u_q - sum eta_i u_i - d2 sum gamma_i u_i|^2,        (I)

  Re[(conj(u_q) - sum eta_i conj(u_i)) u_q]
      = A(u_2..u_q) - A(u_1..u_{q-1}) + |sum c_i u_i|^2,          (II)

with G positive definite and A positive semidefinite.  Summed over Fourier
modes, (I) handles the convective terms and (II) the implicit relaxation
term, which yields a discrete Lyapunov functional

  E^n = (1 - b^2) * G_U^n + G_W^n + (beta*dt/eps) * A_W^n

that grows at most like (1 + K*dt) per step, uniformly in the relaxation
scale eps.  This module constructs the coefficient sets, verifies both
identities numerically, and evaluates E^n along solver runs.

The q=1,2 sets are rational.  The q=3 set is irrational (closed forms in
sqrt(30) and the root z* of an even degree-8 polynomial) and is evaluated
in 60-digit arithmetic before rounding to floats, since the printed
big-integer forms suffer catastrophic cancellation in double precision.
The q=4 set is a 26-constant numeric certificate that satisfies (I)/(II)
to ~1e-31, far below double-precision resolution.
"""

from dataclasses import dataclass

import mpmath as mp
import numpy as np
from scipy.optimize import brentq

from .tableaux import BdfTableau, bdf_tableau

__all__ = [
    "MultiplierSet",
    "EnergyDiagnostic",
    "multiplier_set",
    "solve_zstar",
    "ZSTAR_BRACKET",
    "verify_identity_g",
    "verify_identity_a",
    "quadratic_form_extrema",
    "energy_functional",
]

ZSTAR_BRACKET = (0.106, 0.107)


@dataclass(frozen=True)
class MultiplierSet:
    """One admissible multiplier certificate for the q-step scheme."""

    q: int
    g: np.ndarray      # (q, q) symmetric positive definite
    a: np.ndarray      # (q-1, q-1) symmetric positive semidefinite
    eta: np.ndarray    # (q-1,)
    c: np.ndarray      # (q,)
    d1: float
    d2: float

    def __post_init__(self):
        for name in ("g", "a", "eta", "c"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        q = self.q
        if self.g.shape != (q, q) or self.a.shape != (q - 1, q - 1):
            raise ValueError("matrix shapes inconsistent with order q")
        if len(self.eta) != q - 1 or len(self.c) != q:
            raise ValueError("vector lengths inconsistent with order q")
        if self.d1 <= 0:
            raise ValueError("d1 must be positive")


@dataclass(frozen=True)
class EnergyDiagnostic:
    """Value of the discrete Lyapunov functional and its three parts."""

    gU: float
    gW: float
    aW: float
    E: float


def _zstar_polynomial_terms(sqrt30):
    # coefficients of z^8, z^6, z^4, z^2, 1 as p + r*sqrt(30)
    return [
        -49444432 + 8018016 * sqrt30,
        9118528 - 864688 * sqrt30,
        -10632888 + 2085424 * sqrt30,
        1279488 - 225012 * sqrt30,
        -1534797 + 280098 * sqrt30,
    ]


def _eval_zstar_polynomial(z, coeffs):
    z2 = z * z
    acc = coeffs[0]
    for ck in coeffs[1:]:
        acc = acc * z2 + ck
    return acc


def _phi_float_coeffs():
    # the raw integer pairs p + r*sqrt(30) cancel to ~1e-10 of their parts;
    # combine them in extended precision so the float coefficients are
    # correctly rounded
    with mp.workdps(60):
        return tuple(float(c) for c in _zstar_polynomial_terms(mp.sqrt(30)))


def solve_zstar() -> float:
    """Root in (0.106, 0.107) of the degree-8 polynomial defining the q=3 set.

    The root is unique in the bracket; failure to bracket signals a
    transcription error in the polynomial coefficients.
    """
    coeffs = _phi_float_coeffs()
    lo, hi = ZSTAR_BRACKET
    flo = _eval_zstar_polynomial(lo, coeffs)
    fhi = _eval_zstar_polynomial(hi, coeffs)
    if not np.isfinite(flo) or not np.isfinite(fhi) or flo * fhi >= 0:
        raise RuntimeError("root bracket (0.106, 0.107) lost; coefficient transcription error")
    return brentq(
        lambda z: _eval_zstar_polynomial(z, coeffs), lo, hi, xtol=1e-17, rtol=8.9e-16
    )


def _zstar_mp():
    coeffs = _zstar_polynomial_terms(mp.sqrt(30))
    return mp.findroot(lambda z: _eval_zstar_polynomial(z, coeffs), mp.mpf("0.1062"))


def _set_q3():
    with mp.workdps(60):
        s30 = mp.sqrt(30)
        z = _zstar_mp()
        g = mp.matrix(3)
        g[0, 0] = s30 / 187 + mp.mpf(8) / 187
        g[1, 1] = s30 / 34 + mp.mpf(95) / 187
        g[2, 2] = s30 / 22 + mp.mpf(7) / 11
        g[0, 1] = -3 * s30 / 187 - mp.mpf(24) / 187
        g[0, 2] = 3 * s30 / 187 + mp.mpf(24) / 187
        g[1, 2] = -6 * s30 / 187 - mp.mpf(9) / 17
        eta = [s30 / 17 - mp.mpf(9) / 17, -2 * s30 / 17 + mp.mpf(18) / 17]
        d1 = -s30 / 22 + mp.mpf(4) / 11
        d2 = 11 * s30 / 102 + mp.mpf(44) / 51
        a11 = (
            (5576634533850159812 - 1018149509409713088 * s30) * z**6
            + (-827564175794699168 + 151091855378090876 * s30) * z**4
            + (1317402834013463958 - 240523749880736072 * s30) * z**2
            + (-150042582540986748 + 27393902345391585 * s30)
        ) / (-1011078865344820767 + 184596900652059714 * s30)
        a12 = -(
            (20162952 - 3576664 * s30) * z**6
            + (-11669820 + 2036872 * s30) * z**4
            + (9540978 - 1747158 * s30) * z**2
            + (-4604391 + 840294 * s30)
        ) / (-7213644 + 1314780 * s30)
        a22 = 1 - z**2
        c1 = (
            (1454248 - 235824 * s30) * z**7
            + (-268192 + 25432 * s30) * z**5
            + (312732 - 61336 * s30) * z**3
            + (-37632 + 6618 * s30) * z
        ) / (-106083 + 19335 * s30)
        c2 = (
            -39304 * z**7
            + (28900 + 1156 * s30) * z**5
            + (-8466 + 1904 * s30) * z**3
            + (4617 - 819 * s30) * z
        ) / (-3078 + 546 * s30)
        gf = np.array([[float(g[min(i, j), max(i, j)]) for j in range(3)] for i in range(3)])
        return MultiplierSet(
            q=3,
            g=gf,
            a=np.array([[float(a11), float(a12)], [float(a12), float(a22)]]),
            eta=np.array([float(v) for v in eta]),
            c=np.array([float(c1), float(c2), float(z)]),
            d1=float(d1),
            d2=float(d2),
        )


def _set_q4():
    g = np.zeros((4, 4))
    g[0, 0] = 0.0039752881793877403062594960990749
    g[1, 1] = 0.064911795951738806179916997308306
    g[2, 2] = 0.15895411498724386738087416173813
    g[3, 3] = 0.094405276410813782029324113702474
    g[0, 1] = g[1, 0] = -0.015901152717550961225037984396299
    g[0, 2] = g[2, 0] = 0.023851729076326441837556976594449
    g[0, 3] = g[3, 0] = -0.015901152717550961225037984396299
    g[1, 2] = g[2, 1] = -0.099845362848676151804359071547141
    g[1, 3] = g[3, 1] = 0.068060968391835181509937875064459
    g[2, 3] = g[3, 2] = -0.11343769059020016642872820354501
    a = np.zeros((3, 3))
    a[0, 0] = 0.33641496341408589312936763149214
    a[1, 1] = 0.76333671636580335303312323666967
    a[2, 2] = 0.98143988982596163900489424649966
    a[0, 1] = a[1, 0] = -0.37897607563001842534574230771888
    a[0, 2] = a[2, 0] = 0.27087482555618781445745449601102
    a[1, 2] = a[2, 1] = -0.68412028602560052688774821729113
    return MultiplierSet(
        q=4,
        g=g,
        a=a,
        eta=np.array([
            0.15803668922323725486664131361509,
            -0.71978015153831346379435821236894,
            1.4954886593252805371567252971026,
        ]),
        c=np.array([
            0.58001289935145915953659169454951,
            -0.65339249532858690456475648019655,
            0.46701517476433063541910705624076,
            -0.13623549527945483633692800818261,
        ]),
        d1=0.90559472358918621797067588629753,
        d2=0.13803083956207431618956583677343,
    )


_CACHE: dict[int, MultiplierSet] = {}


def multiplier_set(q: int) -> MultiplierSet:
    """Return the multiplier certificate for order q in 1..4."""
    if q not in (1, 2, 3, 4):
        raise ValueError(f"unsupported order q={q!r}; multiplier sets exist for q=1..4")
    if q not in _CACHE:
        if q == 1:
            ms = MultiplierSet(
                q=1, g=np.array([[0.5]]), a=np.zeros((0, 0)), eta=np.zeros(0),
                c=np.array([1.0]), d1=0.5, d2=1.0,
            )
        elif q == 2:
            ms = MultiplierSet(
                q=2,
                g=np.array([[1 / 6, -1 / 3], [-1 / 3, 5 / 6]]),
                a=np.zeros((1, 1)),
                eta=np.zeros(1),
                c=np.array([0.0, 1.0]),
                d1=1 / 6,
                d2=1.5,
            )
        elif q == 3:
            ms = _set_q3()
        else:
            ms = _set_q4()
        _CACHE[q] = ms
    return _CACHE[q]


def _sym_outer(v, w):
    return 0.5 * (np.outer(v, w) + np.outer(w, v))


def _multiplier_vector(ms):
    m = np.zeros(ms.q + 1)
    m[ms.q] = 1.0
    m[1:ms.q] -= ms.eta
    return m


def _random_tuples(n, samples, seed):
    rng = np.random.default_rng(seed)
    return rng.uniform(-1.0, 1.0, (samples, n)) + 1j * rng.uniform(-1.0, 1.0, (samples, n))


def verify_identity_g(ms: MultiplierSet, tab: BdfTableau, samples: int = 100, seed: int = 0) -> float:
    """Max residual of identity (I) for this certificate and tableau.

    Both sides are compared coefficient-by-coefficient as symmetric forms in
    (u_0..u_q) (sample-free, exact up to round-off) and pointwise on random
    complex tuples with unit-bounded entries; the larger residual is returned.
    """
    if ms.q != tab.q:
        raise ValueError("multiplier set and tableau orders differ")
    q = ms.q
    m = _multiplier_vector(ms)
    lhs = _sym_outer(m, tab.alpha)
    rhs = np.zeros((q + 1, q + 1))
    rhs[1:, 1:] += ms.g
    rhs[:q, :q] -= ms.g
    r = m.copy()
    r[:q] -= ms.d2 * tab.gamma
    rhs += ms.d1 * _sym_outer(r, r)
    res = np.max(np.abs(lhs - rhs))
    for u in _random_tuples(q + 1, samples, seed):
        left = ((u[q] - ms.eta @ u[1:q]).conjugate() * (tab.alpha @ u)).real
        right = (
            (u[1:] @ ms.g @ u[1:].conjugate()).real
            - (u[:q] @ ms.g @ u[:q].conjugate()).real
            + ms.d1 * abs(u[q] - ms.eta @ u[1:q] - ms.d2 * (tab.gamma @ u[:q])) ** 2
        )
        res = max(res, abs(left - right))
    return res


def verify_identity_a(ms: MultiplierSet, samples: int = 100, seed: int = 0) -> float:
    """Max residual of identity (II), checked like ``verify_identity_g``."""
    q = ms.q
    m = np.zeros(q)
    m[q - 1] = 1.0
    m[: q - 1] -= ms.eta
    e = np.zeros(q)
    e[q - 1] = 1.0
    lhs = _sym_outer(m, e)
    rhs = np.zeros((q, q))
    if q >= 2:
        rhs[1:, 1:] += ms.a
        rhs[: q - 1, : q - 1] -= ms.a
    rhs += _sym_outer(ms.c, ms.c)
    res = np.max(np.abs(lhs - rhs))
    for u in _random_tuples(q, samples, seed):
        left = ((u[q - 1] - ms.eta @ u[: q - 1]).conjugate() * u[q - 1]).real
        right = abs(ms.c @ u) ** 2
        if q >= 2:
            right += (u[1:] @ ms.a @ u[1:].conjugate()).real
            right -= (u[: q - 1] @ ms.a @ u[: q - 1].conjugate()).real
        res = max(res, abs(left - right))
    return res


def quadratic_form_extrema(m) -> tuple[float, float]:
    """(smallest, largest) eigenvalue of a small real symmetric matrix.

    The empty matrix (the zero form on no variables) yields (0.0, 0.0).
    """
    m = np.asarray(m, dtype=float)
    if m.size == 0:
        return 0.0, 0.0
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("expected a square matrix")
    scale = np.max(np.abs(m))
    if np.max(np.abs(m - m.T)) > 1e-13 * max(scale, 1.0):
        raise ValueError("matrix is not symmetric")
    w = np.linalg.eigvalsh(m)
    return float(w[0]), float(w[-1])


def _plain_l2_inner(f, g):
    # integral over one period of f * conj(g); coefficients are with respect
    # to the orthonormal-in-mean convention, hence the factor of the period
    return f.period * np.vdot(g.coeffs, f.coeffs)


def energy_functional(u_hist, w_hist, ms: MultiplierSet, b: float, dt: float,
                      eps: float, beta: float) -> EnergyDiagnostic:
    """Evaluate the discrete Lyapunov functional on q consecutive levels.

    ``u_hist`` and ``w_hist`` are the last q spectral fields of each
    component, oldest first.  The quadratic forms use the plain integral
    inner product over one period, so a unit k=0 mode on a 2*pi torus has
    squared norm 2*pi.
    """
    q = ms.q
    if len(u_hist) != q or len(w_hist) != q:
        raise ValueError(f"histories must hold exactly q={q} levels")
    fields = list(u_hist) + list(w_hist)
    n = fields[0].n_modes
    if any(f.n_modes != n for f in fields):
        raise ValueError("mode counts differ across history levels")
    gU = gW = aW = 0.0
    for i in range(q):
        for j in range(q):
            gU += ms.g[i, j] * _plain_l2_inner(u_hist[i], u_hist[j]).real
            gW += ms.g[i, j] * _plain_l2_inner(w_hist[i], w_hist[j]).real
    for i in range(q - 1):
        for j in range(q - 1):
            aW += ms.a[i, j] * _plain_l2_inner(w_hist[i + 1], w_hist[j + 1]).real
    E = (1.0 - b * b) * gU + gW + beta * dt / eps * aW
    return EnergyDiagnostic(gU=gU, gW=gW, aW=aW, E=E)
