import numpy as np
import pytest

from stiffrelax.bgk import (
    BgkHistory,
    KineticField,
    MomentVector,
    RealizabilityError,
    VelocityGrid,
    bootstrap_bgk,
    central_dx6,
    chapman_init,
    coarsen_x,
    conserved_totals,
    default_moment_profile,
    kinetic_l2_diff,
    maxwellian,
    moments,
    step_bdf_bgk,
    transport_rhs,
)
from stiffrelax.tableaux import bdf_tableau


VG = VelocityGrid.uniform(60, 10.0)


def test_velocity_grid_is_exactly_symmetric():
    for nv in (8, 59, 150):
        vg = VelocityGrid.uniform(nv, 15.0)
        assert np.all(vg.nodes + vg.nodes[::-1] == 0.0)
        assert abs(vg.dv * nv - 30.0) <= 1e-12


def test_moments_of_standard_maxwellian_round_trip():
    mv = MomentVector.from_primitive(np.ones(4), 0.0, 1.0)
    f = KineticField(maxwellian(mv, VG), 2.0)
    out = moments(f, VG)
    np.testing.assert_allclose(out.rho, 1.0, atol=1e-12)
    np.testing.assert_allclose(out.u, 0.0, atol=1e-12)
    np.testing.assert_allclose(out.temperature, 1.0, atol=1e-12)


def test_zero_distribution_is_not_realizable():
    f = KineticField(np.zeros((6, VG.nv)), 2.0)
    with pytest.raises(RealizabilityError):
        moments(f, VG)


def test_velocity_shift_translates_bulk_velocity():
    mv = MomentVector.from_primitive(np.full(3, 1.3), 0.0, 0.9)
    f = maxwellian(mv, VG)
    shifted = np.roll(f, 3, axis=1)  # shift by 3 nodes = 3*dv, tails are ~0
    out = moments(KineticField(shifted, 2.0), VG)
    np.testing.assert_allclose(out.u, 3 * VG.dv, atol=1e-12)
    np.testing.assert_allclose(out.rho, 1.3, atol=1e-12)
    np.testing.assert_allclose(out.temperature, 0.9, atol=1e-11)


def test_maxwellian_peak_value_and_density_scaling():
    vg = VelocityGrid.uniform(21, 10.0)  # odd count puts a node at v = 0
    mv = MomentVector.from_primitive(np.ones(1), 0.0, 1.0)
    m = maxwellian(mv, vg)
    mid = vg.nv // 2
    assert vg.nodes[mid] == 0.0
    assert abs(m[0, mid] - 1.0 / np.sqrt(2 * np.pi)) <= 1e-14
    mv3 = MomentVector.from_primitive(3.0 * np.ones(1), 0.0, 1.0)
    np.testing.assert_allclose(maxwellian(mv3, vg), 3.0 * m, rtol=1e-15)


def test_maxwellian_moments_round_trip_over_parameter_box():
    rng = np.random.default_rng(4)
    rho = rng.uniform(0.5, 2.0, 8)
    u = rng.uniform(-2.0, 2.0, 8)
    t = rng.uniform(0.5, 2.0, 8)
    vg = VelocityGrid.uniform(150, 15.0)
    mv = MomentVector.from_primitive(rho, u, t)
    out = moments(KineticField(maxwellian(mv, vg), 2.0), vg)
    np.testing.assert_allclose(out.rho, rho, rtol=1e-12)
    np.testing.assert_allclose(out.u, u, atol=1e-12)
    np.testing.assert_allclose(out.temperature, t, rtol=1e-11)


def test_non_realizable_primitive_fields_rejected():
    with pytest.raises(RealizabilityError):
        MomentVector.from_primitive(np.array([-1.0]), 0.0, 1.0)
    with pytest.raises(RealizabilityError):
        MomentVector.from_primitive(np.array([1.0]), 0.0, -0.1)


# ---------------------------------------------------------------- transport


def test_transport_of_x_uniform_field_vanishes():
    mv = MomentVector.from_primitive(np.ones(12), 0.3, 1.1)
    f = KineticField(maxwellian(mv, VG), 2.0)
    out = transport_rhs(f, VG)
    assert np.max(np.abs(out.values)) <= 1e-14


def test_transport_smooth_profile_fifth_order():
    period = 2.0
    g = np.exp(-VG.nodes**2 / 2.0)
    errs = []
    for nx in (20, 40, 80):
        dx = period / nx
        xi = np.arange(nx) * dx
        k = 2 * np.pi / period
        avg = (np.cos(k * xi) - np.cos(k * (xi + dx))) / (k * dx)
        f = KineticField(np.outer(avg, g) + 1.0, period)  # +1 keeps it positive
        out = transport_rhs(f, VG)
        exact = np.outer(-(np.sin(k * (xi + dx)) - np.sin(k * xi)) / dx, VG.nodes * g)
        errs.append(np.max(np.abs(out.values - exact)))
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(orders >= 4.5)


def test_transport_column_sums_telescope():
    rng = np.random.default_rng(9)
    f = KineticField(rng.uniform(0.1, 1.0, (32, VG.nv)), 2.0)
    out = transport_rhs(f, VG)
    col_sums = np.abs(out.values.sum(axis=0))
    assert np.max(col_sums) <= 1e-11 * np.max(np.abs(f.values)) * VG.vmax


# ---------------------------------------------------------------- stepping


def _history_of(f, q, vg):
    hist = BgkHistory(q, vg)
    for _ in range(q):
        hist.push(f)
    return hist


def test_global_maxwellian_is_stationary():
    mv = MomentVector.from_primitive(np.ones(16), 0.0, 1.0)
    f = KineticField(maxwellian(mv, VG), 2.0)
    hist = _history_of(f, 2, VG)
    out = step_bdf_bgk(hist, bdf_tableau(2), eps=1e-3, dt=1e-3, vg=VG)
    assert np.max(np.abs(out.values - f.values)) <= 1e-13 * np.max(f.values)


def test_vanishing_knudsen_projects_onto_maxwellian():
    mv = default_moment_profile(20)
    base = maxwellian(mv, VG)
    f = KineticField(base * (1.0 + 0.05 * np.tanh(VG.nodes)[None, :]), 2.0)
    hist = _history_of(f, 2, VG)
    out = step_bdf_bgk(hist, bdf_tableau(2), eps=1e-14, dt=1e-3, vg=VG)
    m_out = maxwellian(moments(out, VG), VG)
    gap = np.sqrt(np.sum((out.values - m_out) ** 2))
    assert gap <= 1e-8 * np.sqrt(np.sum(out.values**2))


def test_mass_momentum_energy_conserved_per_step():
    mv = default_moment_profile(24)
    f = KineticField(maxwellian(mv, VG), 2.0)
    hist = _history_of(f, 2, VG)
    before = conserved_totals(f, VG)
    out = f
    for _ in range(10):
        out = step_bdf_bgk(hist, bdf_tableau(2), eps=1e-2, dt=1e-3, vg=VG)
    after = conserved_totals(out, VG)
    for x, y in zip(before, after):
        assert abs(x - y) <= 1e-10 * max(abs(x), 1.0)


def test_step_raises_on_nonrealizable_moment_update():
    f = KineticField(np.full((8, VG.nv), 1e-30), 2.0)
    hist = _history_of(f, 1, VG)
    # history with negative mass pushes the moment update negative
    bad = KineticField(-f.values, 2.0)
    hist_bad = _history_of(bad, 1, VG)
    with pytest.raises(RealizabilityError):
        step_bdf_bgk(hist_bad, bdf_tableau(1), eps=1.0, dt=1e-3, vg=VG)


# ------------------------------------------------------------ initialization


def test_chapman_orders_agree_when_eps_vanishes():
    mv = default_moment_profile(16)
    second = chapman_init(mv, 0.0, VG, 2.0, order=2)
    third = chapman_init(mv, 0.0, VG, 2.0, order=3)
    np.testing.assert_array_equal(second.values, third.values)


def test_chapman_correction_vanishes_for_flat_temperature():
    mv = MomentVector.from_primitive(1.0 + 0.2 * np.sin(np.linspace(0, 2 * np.pi, 16, endpoint=False)), 1.0, 1.0)
    second = chapman_init(mv, 0.1, VG, 2.0, order=2)
    third = chapman_init(mv, 0.1, VG, 2.0, order=3)
    np.testing.assert_allclose(third.values, second.values, atol=1e-14)


def test_default_profile_reference_points():
    mv = default_moment_profile(25)  # puts a cell center exactly at x = 1
    x = (np.arange(25) + 0.5) * (2.0 / 25)
    idx = np.argmin(np.abs(x - 1.0))
    assert x[idx] == 1.0
    assert abs(mv.rho[idx] - 1.0) <= 1e-14
    assert abs(mv.temperature[idx] - 1.0) <= 1e-14
    np.testing.assert_allclose(mv.u, 1.0, atol=0)


def test_central_difference_is_sixth_order():
    errs = []
    for n in (16, 32, 64):
        x = np.arange(n) * (2 * np.pi / n)
        d = central_dx6(np.sin(x), 2 * np.pi / n)
        errs.append(np.max(np.abs(d - np.cos(x))))
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(orders >= 5.5)


# ------------------------------------------------------------------ bootstrap


def test_bootstrap_preserves_global_equilibrium():
    vg = VelocityGrid.uniform(40, 8.0)
    mv = MomentVector.from_primitive(np.ones(12), 0.0, 1.0)
    f0 = KineticField(maxwellian(mv, vg), 2.0)
    hist = bootstrap_bgk(f0, 3, 1e-3, 1e-5, vg, substeps=20)
    # round-off accumulates over 40 substeps; stay within 1e-11 of the peak
    for f, *_ in hist.levels:
        assert np.max(np.abs(f.values - f0.values)) <= 1e-11 * np.max(f0.values)


def test_bootstrap_refines_at_runge_kutta_order():
    vg = VelocityGrid.uniform(24, 8.0)
    mv = default_moment_profile(20)
    f0 = chapman_init(mv, 0.5, vg, 2.0, order=2)
    dt = 5e-3

    def level1(substeps):
        return bootstrap_bgk(f0, 2, dt, 0.5, vg, substeps=substeps).levels[-1][0]

    ref = level1(160)
    e10 = kinetic_l2_diff(level1(10), ref, vg)
    e20 = kinetic_l2_diff(level1(20), ref, vg)
    assert np.log2(e10 / e20) >= 2.5


def test_coarsen_and_l2_diff_shapes():
    f = KineticField(np.arange(8.0)[:, None] * np.ones((8, 4)), 2.0)
    c = coarsen_x(f)
    assert c.values.shape == (4, 4)
    np.testing.assert_array_equal(c.values[:, 0], [0.5, 2.5, 4.5, 6.5])
    vg = VelocityGrid.uniform(4, 2.0)
    assert kinetic_l2_diff(f, f, vg) == 0.0
    with pytest.raises(ValueError, match="grids differ"):
        kinetic_l2_diff(f, c, vg)
