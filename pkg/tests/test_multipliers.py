import numpy as np
import pytest

from stiffrelax.multipliers import (
    ZSTAR_BRACKET,
    _eval_zstar_polynomial,
    _phi_float_coeffs,
    energy_functional,
    multiplier_set,
    quadratic_form_extrema,
    solve_zstar,
    verify_identity_a,
    verify_identity_g,
)
from stiffrelax.spectral import SpectralField
from stiffrelax.tableaux import bdf_tableau

# printed reference eigenvalues of the certificate forms
LAMBDA_REFS = {
    (3, "g"): 1.064408628491745819e-3,
    (3, "a"): 0.78260015292507185414401336030175,
    (4, "g"): 5.0314827031121361651672184255414e-6,
    (4, "a"): 0.076485547272566738154682052748733,
}


def test_first_order_set_values():
    ms = multiplier_set(1)
    assert ms.g.tolist() == [[0.5]]
    assert ms.d1 == 0.5 and ms.d2 == 1.0
    assert ms.c.tolist() == [1.0]
    assert ms.a.size == 0 and ms.eta.size == 0


def test_second_order_set_values():
    ms = multiplier_set(2)
    np.testing.assert_allclose(ms.g, [[1 / 6, -1 / 3], [-1 / 3, 5 / 6]], rtol=0, atol=0)
    assert ms.d1 == 1 / 6 and ms.d2 == 1.5
    assert ms.eta.tolist() == [0.0]
    assert ms.c.tolist() == [0.0, 1.0]
    assert ms.a.tolist() == [[0.0]]


def test_fourth_order_set_spot_values():
    ms = multiplier_set(4)
    assert abs(ms.d1 - 0.90559472358918621797) <= 1e-15
    assert abs(ms.eta[2] - 1.4954886593252805) <= 1e-14


def test_zstar_matches_reference():
    z = solve_zstar()
    assert ZSTAR_BRACKET[0] < z < ZSTAR_BRACKET[1]
    assert abs(z - 0.10618875349491630709) <= 1e-12


def test_zstar_residual_small_relative_to_scale():
    z = solve_zstar()
    coeffs = _phi_float_coeffs()
    scale = sum(abs(c) * z ** (2 * (len(coeffs) - 1 - i)) for i, c in enumerate(coeffs))
    assert abs(_eval_zstar_polynomial(z, coeffs)) <= 1e-14 * scale


def test_zstar_agrees_with_bisection_oracle():
    coeffs = _phi_float_coeffs()
    lo, hi = ZSTAR_BRACKET
    flo = _eval_zstar_polynomial(lo, coeffs)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        fm = _eval_zstar_polynomial(mid, coeffs)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    assert abs(0.5 * (lo + hi) - solve_zstar()) <= 1e-15


@pytest.mark.parametrize("q", [1, 2, 3, 4])
def test_identity_residuals(q):
    ms = multiplier_set(q)
    tab = bdf_tableau(q)
    assert verify_identity_g(ms, tab, samples=100) <= 1e-12
    assert verify_identity_a(ms, samples=100) <= 1e-12


def test_identity_g_on_unit_tuple_by_hand():
    # u = (1, 0, 0): left side vanishes, right side is g11 cancellation
    ms = multiplier_set(2)
    tab = bdf_tableau(2)
    u = np.array([1.0, 0.0, 0.0])
    left = (u[2] - ms.eta[0] * u[1]) * (tab.alpha @ u)
    right = (
        u[1:] @ ms.g @ u[1:]
        - u[:2] @ ms.g @ u[:2]
        + ms.d1 * (u[2] - ms.eta[0] * u[1] - ms.d2 * (tab.gamma @ u[:2])) ** 2
    )
    assert abs(left - right) <= 1e-14


def test_identity_a_is_trivial_for_first_order():
    # |u1|^2 == |c1*u1|^2 with c1 = 1, up to one rounding of |.|^2
    assert verify_identity_a(multiplier_set(1), samples=10) <= 1e-15


@pytest.mark.parametrize("q,which", list(LAMBDA_REFS))
def test_eigenvalue_extrema_match_references(q, which):
    ms = multiplier_set(q)
    lam_min, _ = quadratic_form_extrema(getattr(ms, which))
    ref = LAMBDA_REFS[(q, which)]
    assert abs(lam_min - ref) <= 1e-6 * ref


@pytest.mark.parametrize("q", [1, 2, 3, 4])
def test_definiteness(q):
    ms = multiplier_set(q)
    gmin, _ = quadratic_form_extrema(ms.g)
    assert gmin > 0.0
    amin, _ = quadratic_form_extrema(ms.a)
    assert amin >= 0.0
    assert ms.d1 > 0.0


def _charpoly_eigen_oracle(m):
    """Independent eigenvalue solve: bisect the characteristic polynomial."""
    m = np.asarray(m, dtype=float)
    n = m.shape[0]
    coeffs = np.poly(m)  # characteristic polynomial coefficients

    def chi(lam):
        return np.polyval(coeffs, lam)

    bound = np.max(np.sum(np.abs(m), axis=1)) + 1.0
    grid = np.linspace(-bound, bound, 20001)
    vals = chi(grid)
    roots = []
    for i in range(len(grid) - 1):
        a, b = grid[i], grid[i + 1]
        fa, fb = vals[i], vals[i + 1]
        if fa == 0.0:
            roots.append(a)
            continue
        if fa * fb < 0:
            for _ in range(200):
                mid = 0.5 * (a + b)
                fm = chi(mid)
                if (fm > 0) == (fa > 0):
                    a, fa = mid, fm
                else:
                    b = mid
            roots.append(0.5 * (a + b))
    return min(roots), max(roots)


@pytest.mark.parametrize("q", [2, 3, 4])
def test_extrema_against_characteristic_polynomial_oracle(q):
    for mat in (multiplier_set(q).g, multiplier_set(q).a):
        if mat.size == 0:
            continue
        lo, hi = quadratic_form_extrema(mat)
        olo, ohi = _charpoly_eigen_oracle(mat)
        scale = max(abs(olo), abs(ohi), 1e-30)
        assert abs(lo - olo) <= 1e-9 * scale
        assert abs(hi - ohi) <= 1e-9 * scale


def test_extrema_rejects_asymmetric_input():
    with pytest.raises(ValueError, match="symmetric"):
        quadratic_form_extrema(np.array([[0.0, 1.0], [0.0, 0.0]]))


def _field(coeffs, n, period=2 * np.pi):
    return SpectralField(n_modes=n, coeffs=np.asarray(coeffs, dtype=complex), period=period)


def test_energy_single_mode_hand_value():
    # q=1, b=0: E = g11 * integral(|1|^2) over [0, 2*pi) = 0.5 * 2*pi = pi
    ms = multiplier_set(1)
    u = _field([0.0, 1.0, 0.0], 1)
    w = _field([0.0, 0.0, 0.0], 1)
    diag = energy_functional([u], [w], ms, b=0.0, dt=0.1, eps=1.0, beta=1.0)
    assert abs(diag.E - np.pi) <= 1e-14
    assert diag.gW == 0.0 and diag.aW == 0.0


def test_energy_zero_fields_and_quadratic_scaling():
    ms = multiplier_set(3)
    rng = np.random.default_rng(5)
    n = 4
    us = [_field(rng.normal(size=2 * n + 1) + 1j * rng.normal(size=2 * n + 1), n) for _ in range(3)]
    ws = [_field(rng.normal(size=2 * n + 1) + 1j * rng.normal(size=2 * n + 1), n) for _ in range(3)]
    zeros = [_field(np.zeros(2 * n + 1), n) for _ in range(3)]
    assert energy_functional(zeros, zeros, ms, 0.5, 0.1, 1e-3, 6 / 11).E == 0.0
    e1 = energy_functional(us, ws, ms, 0.5, 0.1, 1e-3, 6 / 11)
    scaled_u = [_field(3.0 * f.coeffs, n) for f in us]
    scaled_w = [_field(3.0 * f.coeffs, n) for f in ws]
    e9 = energy_functional(scaled_u, scaled_w, ms, 0.5, 0.1, 1e-3, 6 / 11)
    assert abs(e9.E - 9.0 * e1.E) <= 1e-10 * max(abs(e9.E), 1.0)


def test_energy_rejects_bad_history():
    ms = multiplier_set(2)
    u = _field([0.0, 1.0, 0.0], 1)
    with pytest.raises(ValueError, match="exactly q"):
        energy_functional([u], [u], ms, 0.0, 0.1, 1.0, 2 / 3)
    other = _field(np.zeros(5), 2)
    with pytest.raises(ValueError, match="mode counts"):
        energy_functional([u, other], [u, u], ms, 0.0, 0.1, 1.0, 2 / 3)


def test_unsupported_order():
    with pytest.raises(ValueError, match="unsupported"):
        multiplier_set(5)


@pytest.mark.parametrize("q", [1, 2, 3, 4])
def test_energy_grows_at_most_linearly_per_step_along_solver_runs(q):
    # E^{n+1} <= (1 + K dt) E^n with a finite run constant K; measured
    # K <= 5e-4 here, asserted with a wide margin
    from stiffrelax.spectral import LinearParams, bootstrap_linear, project, step_bdf_linear
    from stiffrelax.tableaux import bdf_tableau

    n = 16
    dt = 1.0 / n**2
    tab = bdf_tableau(q)
    ms = multiplier_set(q)
    for eps in (1e-6, 1e-2, 1.0):
        p = LinearParams(b=0.6, eps=eps)
        u0 = project(lambda x: np.exp(np.sin(x)), n)
        v0 = project(lambda x: 0.6 * np.exp(np.sin(x)) + 0.2 * np.sin(x), n)
        hist = bootstrap_linear(u0, v0, q, dt, p, 0.0)

        def energy():
            return energy_functional(
                list(hist.u_levels), list(hist.w_levels), ms, p.b, dt, eps, tab.beta
            ).E

        e_prev = energy()
        k_run = -np.inf
        for _ in range(256 - (q - 1)):
            step_bdf_linear(hist, tab, p, dt)
            e_now = energy()
            assert np.isfinite(e_now) and e_now >= 0.0
            k_run = max(k_run, (e_now / e_prev - 1.0) / dt)
            e_prev = e_now
        assert k_run <= 1.0
