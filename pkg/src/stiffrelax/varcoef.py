"""First-order scheme for the relaxation system with space-dependent coefficients.

The system

    u_t + v_x = 0,
    v_t + u_x = sigma(x) * (b(x)*u - v) / eps,      |b(x)| <= b1 < 1,
                                                    0 < sigma0 <= sigma(x),

is integrated in the rescaled micro-macro variables (m, w) with
m = sqrt(1 - b^2) * u and w = v - b*u, in which the natural Lyapunov
functional is the plain L2 norm of the pair:

    m_t + (b*m)_x + (b^2 b'/(1-b^2)) m + sqrt(1-b^2) w_x = 0,
    w_t + (sqrt(1-b^2) m)_x + (b b'/sqrt(1-b^2)) m - b w_x = -(sigma/eps) w.

One step treats every term explicitly except the relaxation, which requires
inverting I + (dt/eps) * P_N sigma P_N on Fourier coefficients; that dense
(2N+1)^2 operator is LU-factored once per (dt, eps) and reused.  Products
with the coefficient fields are evaluated pseudo-spectrally on a grid of
4N+4 points, which leaves quadratic products alias-free; coefficient
functions rougher than the grid resolves incur a quadrature error of the
usual aliasing type.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import lu_factor, lu_solve, toeplitz

from .spectral import SpectralField, grid_to_modes, modes_to_grid, wavenumbers

__all__ = ["VarCoefParams", "VarCoefEuler"]


def _dealiased_grid_size(n_modes):
    return 4 * n_modes + 4


@dataclass(frozen=True)
class VarCoefParams:
    """Sampled coefficient fields b(x), sigma(x) and their bounds."""

    n_modes: int
    period: float
    grid: np.ndarray
    b_samples: np.ndarray
    sigma_samples: np.ndarray

    def __post_init__(self):
        for name in ("grid", "b_samples", "sigma_samples"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        m = _dealiased_grid_size(self.n_modes)
        if self.grid.shape != (m,) or self.b_samples.shape != (m,) or self.sigma_samples.shape != (m,):
            raise ValueError("samples must live on the dealiased grid of 4*n_modes+4 points")
        if self.b1 >= 1.0:
            raise ValueError("max |b(x)| must stay below 1")
        if self.sigma0 <= 0.0:
            raise ValueError("sigma(x) must be positive")

    @classmethod
    def from_functions(cls, b, sigma, n_modes, period=2.0 * np.pi):
        m = _dealiased_grid_size(n_modes)
        x = np.arange(m) * (period / m)
        return cls(n_modes=n_modes, period=period, grid=x,
                   b_samples=np.asarray(b(x), dtype=float) * np.ones(m),
                   sigma_samples=np.asarray(sigma(x), dtype=float) * np.ones(m))

    @property
    def b1(self) -> float:
        return float(np.max(np.abs(self.b_samples)))

    @property
    def sigma0(self) -> float:
        return float(np.min(self.sigma_samples))

    @property
    def sigma1(self) -> float:
        return float(np.max(self.sigma_samples))


class VarCoefEuler:
    """Forward-backward Euler stepper for the variable-coefficient system.

    Owns the precomputed coefficient grids and the LU factorization of the
    implicit relaxation operator; make a new instance when (dt, eps) or the
    coefficient fields change.
    """

    def __init__(self, params: VarCoefParams, dt: float, eps: float):
        if dt <= 0 or eps <= 0:
            raise ValueError("dt and eps must be positive")
        self.params = params
        self.dt = dt
        self.eps = eps
        n = params.n_modes
        m = len(params.grid)
        b = params.b_samples
        # spectral derivative of b on its own grid
        freqs = 2j * np.pi / params.period * np.fft.fftfreq(m, d=1.0 / m)
        db = np.fft.ifft(freqs * np.fft.fft(b)).real
        one_m_b2 = 1.0 - b * b
        self._b = b
        self._sqrt1mb2 = np.sqrt(one_m_b2)
        self._u_zeroth = b * b * db / one_m_b2
        self._w_zeroth = b * db / self._sqrt1mb2
        self._kap = wavenumbers(n, params.period)
        # I + (dt/eps) * P_N sigma P_N as a Toeplitz matrix of sigma modes
        sig_hat = np.fft.fft(params.sigma_samples) / m
        col = sig_hat[np.arange(0, 2 * n + 1) % m]
        row = sig_hat[(-np.arange(0, 2 * n + 1)) % m]
        op = np.eye(2 * n + 1, dtype=complex) + (dt / eps) * toeplitz(col, row)
        self._lu = lu_factor(op)
        self._m = m

    @property
    def grid(self) -> np.ndarray:
        return self.params.grid

    def step(self, state, forcing=None):
        """Advance one step; ``state`` is the (m, w) pair of spectral fields.

        ``forcing``, when given, is a pair of physical-space arrays on
        ``self.grid`` added to the right-hand sides (explicitly, at the old
        time level), which is what manufactured-solution tests need.
        """
        uf, wf = state
        n = self.params.n_modes
        if uf.n_modes != n or wf.n_modes != n:
            raise ValueError("state resolution differs from the configured mode count")
        m = self._m
        kap = self._kap
        ug = modes_to_grid(uf.coeffs, n, m)
        dwg = modes_to_grid(kap * wf.coeffs, n, m)
        u_rhs = (
            kap * grid_to_modes(self._b * ug, n)
            + grid_to_modes(self._u_zeroth * ug, n)
            + grid_to_modes(self._sqrt1mb2 * dwg, n)
        )
        w_rhs = (
            kap * grid_to_modes(self._sqrt1mb2 * ug, n)
            + grid_to_modes(self._w_zeroth * ug, n)
            - grid_to_modes(self._b * dwg, n)
        )
        u_new = uf.coeffs - self.dt * u_rhs
        w_new = wf.coeffs - self.dt * w_rhs
        if forcing is not None:
            fu, fw = forcing
            u_new = u_new + self.dt * grid_to_modes(np.asarray(fu), n)
            w_new = w_new + self.dt * grid_to_modes(np.asarray(fw), n)
        w_new = lu_solve(self._lu, w_new)
        return (
            SpectralField(n, u_new, self.params.period),
            SpectralField(n, w_new, self.params.period),
        )
