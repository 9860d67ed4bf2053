"""Coefficient tables for implicit-explicit multistep and Runge-Kutta stepping.

The q-step IMEX-BDF scheme advances a split system y' = F(y) + R(y)/eps by

    sum_{i=0..q} alpha_i y^{n+i} = dt * sum_{i=0..q-1} gamma_i F(y^{n+i})
                                   + beta * dt * R(y^{n+q}) / eps,

i.e. the non-stiff part F is extrapolated from the last q levels while the
stiff part R is taken implicitly at the new level only.  Orders 1 through 4
are provided.  Coefficients are built in exact rational arithmetic and
converted to floats once, so the tabulated and generated constructors agree
bit for bit.

A diagonally-implicit IMEX Runge-Kutta scheme (the 4-stage, 3rd-order member
of the Ascher/Ruuth/Spiteri family) is included for generating the starting
levels that multistep runs need.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np

__all__ = [
    "MAX_ORDER",
    "BdfTableau",
    "bdf_tableau",
    "bdf_from_polynomials",
    "ImexRkTableau",
    "ars443",
    "imex_rk_step",
]

MAX_ORDER = 4

# Tabulated exact coefficients, one row per order q:
#   alpha_0..alpha_q, gamma_0..gamma_{q-1}, beta
_BDF_TABLE = {
    1: (("-1", "1"), ("1",), "1"),
    2: (("1/3", "-4/3", "1"), ("-2/3", "4/3"), "2/3"),
    3: (("-2/11", "9/11", "-18/11", "1"), ("6/11", "-18/11", "18/11"), "6/11"),
    4: (
        ("3/25", "-16/25", "36/25", "-48/25", "1"),
        ("-12/25", "48/25", "-72/25", "48/25"),
        "12/25",
    ),
}


@dataclass(frozen=True)
class BdfTableau:
    """Coefficients (alpha, gamma, beta) of the q-step IMEX-BDF scheme."""

    q: int
    alpha: np.ndarray
    gamma: np.ndarray
    beta: float

    def __post_init__(self):
        object.__setattr__(self, "alpha", np.asarray(self.alpha, dtype=float))
        object.__setattr__(self, "gamma", np.asarray(self.gamma, dtype=float))
        if len(self.alpha) != self.q + 1 or len(self.gamma) != self.q:
            raise ValueError("coefficient lengths inconsistent with order q")
        if self.alpha[-1] != 1.0:
            raise ValueError("leading coefficient alpha_q must be 1")


def _check_order(q):
    if q not in _BDF_TABLE:
        raise ValueError(f"unsupported IMEX-BDF order q={q!r}; supported: 1..{MAX_ORDER}")


def bdf_tableau(q: int) -> BdfTableau:
    """Return the tabulated q-th order IMEX-BDF coefficients, q in 1..4."""
    _check_order(q)
    alpha, gamma, beta = _BDF_TABLE[q]
    return BdfTableau(
        q=q,
        alpha=np.array([float(Fraction(a)) for a in alpha]),
        gamma=np.array([float(Fraction(g)) for g in gamma]),
        beta=float(Fraction(beta)),
    )


def _poly_mul(p, s):
    out = [Fraction(0)] * (len(p) + len(s) - 1)
    for i, pi in enumerate(p):
        for j, sj in enumerate(s):
            out[i + j] += pi * sj
    return out


def bdf_from_polynomials(q: int) -> BdfTableau:
    """Build the q-th order tableau from its generating polynomials.

    beta = 1 / sum_{j=1..q} 1/j, alpha(z) = beta * sum_j (1/j) z^{q-j} (z-1)^j
    and gamma(z) = beta * (z^q - (z-1)^q), expanded in exact rationals.
    Agrees exactly with ``bdf_tableau``.
    """
    _check_order(q)
    beta = 1 / sum(Fraction(1, j) for j in range(1, q + 1))
    # (z-1)^j in ascending powers
    zm1 = [[Fraction(comb(j, i) * (-1) ** (j - i)) for i in range(j + 1)] for j in range(q + 1)]
    alpha = [Fraction(0)] * (q + 1)
    for j in range(1, q + 1):
        term = _poly_mul([Fraction(0)] * (q - j) + [Fraction(1)], zm1[j])
        for i, ci in enumerate(term):
            alpha[i] += beta * Fraction(1, j) * ci
    gamma = [-beta * c for c in zm1[q][:q]]  # z^q terms cancel
    return BdfTableau(
        q=q,
        alpha=np.array([float(a) for a in alpha]),
        gamma=np.array([float(g) for g in gamma]),
        beta=float(beta),
    )


@dataclass(frozen=True)
class ImexRkTableau:
    """Butcher coefficients of a diagonally-implicit IMEX Runge-Kutta scheme.

    Stage 0 is purely explicit; the implicit table is lower triangular with a
    nonzero diagonal from stage 1 on, and its first column is zero so each
    stage solve only couples to itself.
    """

    a_ex: np.ndarray
    b_ex: np.ndarray
    a_im: np.ndarray
    b_im: np.ndarray

    def __post_init__(self):
        for name in ("a_ex", "b_ex", "a_im", "b_im"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        s = self.stages
        if self.a_ex.shape != (s, s) or self.a_im.shape != (s, s) or len(self.b_im) != s:
            raise ValueError("inconsistent tableau shapes")
        if abs(self.b_ex.sum() - 1.0) > 1e-14 or abs(self.b_im.sum() - 1.0) > 1e-14:
            raise ValueError("stage weights must sum to 1")
        if np.any(np.triu(self.a_ex) != 0.0) or np.any(np.triu(self.a_im, 1) != 0.0):
            raise ValueError("tableaux must be lower triangular")
        if np.any(np.diag(self.a_im)[1:] == 0.0) or np.any(self.a_im[:, 0] != 0.0):
            raise ValueError("implicit part must be diagonally solvable past stage 0")

    @property
    def stages(self) -> int:
        return len(self.b_ex)


def ars443() -> ImexRkTableau:
    """Third-order, 4-implicit-stage IMEX-RK scheme of Ascher, Ruuth & Spiteri."""
    a_ex = np.zeros((5, 5))
    a_ex[1, 0] = 1 / 2
    a_ex[2, :2] = (11 / 18, 1 / 18)
    a_ex[3, :3] = (5 / 6, -5 / 6, 1 / 2)
    a_ex[4, :4] = (1 / 4, 7 / 4, 3 / 4, -7 / 4)
    b_ex = np.array([1 / 4, 7 / 4, 3 / 4, -7 / 4, 0.0])
    a_im = np.zeros((5, 5))
    a_im[1, 1] = 1 / 2
    a_im[2, 1:3] = (1 / 6, 1 / 2)
    a_im[3, 1:4] = (-1 / 2, 1 / 2, 1 / 2)
    a_im[4, 1:5] = (3 / 2, -3 / 2, 1 / 2, 1 / 2)
    b_im = np.array([0.0, 3 / 2, -3 / 2, 1 / 2, 1 / 2])
    return ImexRkTableau(a_ex=a_ex, b_ex=b_ex, a_im=a_im, b_im=b_im)


_ARS443 = None


def imex_rk_step(system, y, dt, tableau: ImexRkTableau | None = None):
    """Advance ``y`` by one IMEX Runge-Kutta step of size ``dt``.

    ``system`` must provide two callables:

    - ``explicit_rhs(y)``: the non-stiff right-hand side,
    - ``solve_implicit(rhs, mu)``: the solution of ``y = rhs + mu * R(y)``
      where R is the stiff right-hand side (closed form for all systems in
      this package).

    The stiff stage derivatives are recovered algebraically from the stage
    solves, so no separate stiff evaluation is required.
    """
    global _ARS443
    if tableau is None:
        if _ARS443 is None:
            _ARS443 = ars443()
        tableau = _ARS443
    s = tableau.stages
    f_ex = [system.explicit_rhs(y)]
    f_im = [None]
    stages = [y]
    for i in range(1, s):
        rhs = y + dt * tableau.a_ex[i, 0] * f_ex[0]
        for j in range(1, i):
            if tableau.a_ex[i, j] != 0.0:
                rhs = rhs + dt * tableau.a_ex[i, j] * f_ex[j]
            if tableau.a_im[i, j] != 0.0:
                rhs = rhs + dt * tableau.a_im[i, j] * f_im[j]
        mu = dt * tableau.a_im[i, i]
        yi = system.solve_implicit(rhs, mu)
        stages.append(yi)
        f_ex.append(system.explicit_rhs(yi))
        f_im.append((yi - rhs) / mu)
    out = y
    for j in range(s):
        if tableau.b_ex[j] != 0.0:
            out = out + dt * tableau.b_ex[j] * f_ex[j]
        if tableau.b_im[j] != 0.0:
            out = out + dt * tableau.b_im[j] * f_im[j]
    return out
