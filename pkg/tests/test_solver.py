"""Unit tests for the 1D finite-volume solver."""

import numpy as np
import pytest
from scipy.integrate import quad

from wenonet import solver as sv
from wenonet.reconstruct import IdealWeights3, Quick, Weno3JS, Weno3Z, Weno5JS


def test_grid_and_problem_validation():
    with pytest.raises(ValueError):
        sv.GridSpec(4)
    with pytest.raises(ValueError):
        sv.GridSpec(64, bc="neumann")
    with pytest.raises(ValueError):
        sv.GridSpec(64, bc="dirichlet")
    with pytest.raises(ValueError):
        sv.Problem("advection", "riemann")
    with pytest.raises(ValueError):
        sv.Problem("heat", "cosine")
    with pytest.raises(ValueError):
        sv.advection_cosine(cfl=1.5)


def test_initial_averages_cosine():
    grid = sv.GridSpec(8)
    avg = sv.initial_averages(sv.advection_cosine(), grid)
    # mean over [0, 1/4] (the first two cells together) has the closed form 2/pi
    assert 0.5 * (avg[0] + avg[1]) == pytest.approx(2.0 / np.pi, abs=1e-14)


def test_initial_averages_riemann_straddle():
    prob = sv.burgers_riemann(1.0, 0.0)
    grid = sv.GridSpec(8, (-6.0, 6.0), "dirichlet", (1.0, 0.0))
    avg = sv.initial_averages(prob, grid)
    # cells are 1.5 wide; the eight cells split 4/4 around x=0
    assert np.allclose(avg, [1, 1, 1, 1, 0, 0, 0, 0], atol=1e-15)
    odd = sv.GridSpec(9, (-6.0, 6.0), "dirichlet", (1.0, 0.0))
    avg = sv.initial_averages(prob, odd)
    assert avg[4] == pytest.approx(0.5)  # middle cell straddles the jump


def test_initial_averages_sigmoid_against_quadrature():
    prob = sv.advection_sigmoid()
    grid = sv.GridSpec(64)
    avg = sv.initial_averages(prob, grid)

    def f(x):
        return 1.0 / (1.0 + np.exp(-100.0 * (x - 0.05))) + 1.0 / (
            1.0 + np.exp(100.0 * (x - 0.2))
        )

    for i in (0, 3, 12, 40):
        lo, hi = grid.edges[i], grid.edges[i + 1]
        ref = quad(f, lo, hi, epsabs=1e-13, epsrel=1e-13)[0] / grid.dx
        assert avg[i] == pytest.approx(ref, abs=1e-10)


def test_face_states_constant_and_linear():
    grid = sv.GridSpec(16)
    const = np.full(16, 2.5)
    for scheme in (Weno3JS(), Weno5JS(), Quick(), IdealWeights3()):
        um, up = sv.face_states(const, grid, scheme)
        assert um.shape == (17,) and up.shape == (17,)
        assert np.allclose(um, 2.5, atol=1e-14)
        assert np.allclose(up, 2.5, atol=1e-14)


def test_face_states_periodic_sawtooth_linear_segments():
    # periodic tooth: linear in index away from the two corners
    grid = sv.GridSpec(16)
    u = np.concatenate([np.arange(8.0), np.arange(8.0)[::-1]])
    um, _ = sv.face_states(u, grid, IdealWeights3())
    # face between cells 2 and 3 lies on a linear segment: exact midpoint
    assert um[3] == pytest.approx(2.5, abs=1e-13)


def test_face_states_dirichlet_far_field():
    prob = sv.burgers_riemann(1.0, 0.0)
    grid = sv.default_grid(prob, 64)
    u = sv.initial_averages(prob, grid)
    um, up = sv.face_states(u, grid, Weno3JS())
    assert um[0] == pytest.approx(1.0, abs=1e-12)
    assert up[-1] == pytest.approx(0.0, abs=1e-12)


def test_face_states_rejects_wide_stencil_on_small_grid():
    class Wide:
        name = "wide"
        width = 9
        halo = 5

        def face_value(self, windows):
            return np.asarray(windows)[..., 4]

    with pytest.raises(ValueError, match="too small"):
        sv.face_states(np.ones(8), sv.GridSpec(8), Wide())


def test_numerical_flux_examples():
    assert sv.numerical_flux(3.0, -7.0, "advection") == 3.0
    assert sv.numerical_flux(0.6, 0.6, "burgers") == pytest.approx(0.18)
    assert sv.numerical_flux(1.0, 0.0, "burgers") == pytest.approx(0.75)


def test_rhs_constant_zero_and_conservation():
    grid = sv.GridSpec(64)
    rng = np.random.default_rng(0)
    state = rng.normal(size=64)
    for scheme in (Weno3JS(), Weno3Z(), Weno5JS(), Quick()):
        assert np.allclose(sv.rhs(np.ones(64), grid, scheme, "advection"), 0.0, atol=1e-14)
        total = np.sum(sv.rhs(state, grid, scheme, "burgers"))
        assert abs(total) < 1e-12 / grid.dx


def test_rhs_advection_derivative_converges():
    # d/dx of cos(2 pi x) under the advection operator, refined in nx
    errs = []
    nxs = (32, 64, 128, 256)
    for nx in nxs:
        grid = sv.GridSpec(nx)
        state = sv.initial_averages(sv.advection_cosine(), grid)
        got = sv.rhs(state, grid, Weno3JS(), "advection")
        exact = 2.0 * np.pi * np.sin(2.0 * np.pi * grid.centers)
        errs.append(np.mean(np.abs(got - exact)))
    slope = np.polyfit(np.log(1.0 / np.asarray(nxs, float)), np.log(errs), 1)[0]
    assert slope >= 1.9


def test_ssp_rk3_identity_and_decay_factor():
    u = np.array([1.0, -0.5])
    assert np.array_equal(sv.ssp_rk3_step(u, 0.1, lambda s: 0.0 * s), u)
    decay = sv.ssp_rk3_step(np.array([1.0]), 0.1, lambda s: -s)
    assert decay[0] == pytest.approx(1 - 0.1 + 0.005 - 0.1**3 / 6, abs=1e-15)


def test_ssp_rk3_temporal_order_three():
    errs = []
    dts = [0.2 / 2**k for k in range(6)]
    for dt in dts:
        u = np.array([1.0])
        steps = round(1.0 / dt)
        for _ in range(steps):
            u = sv.ssp_rk3_step(u, dt, lambda s: -s)
        errs.append(abs(u[0] - np.exp(-1.0)))
    slope = np.polyfit(np.log(dts), np.log(errs), 1)[0]
    assert abs(slope - 3.0) < 0.1


def test_exact_solution_examples():
    adv = sv.advection_cosine()
    assert sv.exact_solution(adv, 0.3, 1.0) == pytest.approx(np.cos(0.6 * np.pi))
    shock = sv.burgers_riemann(1.0, 0.0)
    assert sv.exact_solution(shock, 1.9, 4.0) == 1.0
    assert sv.exact_solution(shock, 2.1, 4.0) == 0.0
    fan = sv.burgers_riemann(0.0, 1.0)
    assert sv.exact_solution(fan, 2.5, 5.0) == pytest.approx(0.5)
    trans = sv.burgers_riemann(-1.0, 1.0)
    assert sv.exact_solution(trans, -10.0, 5.0) == -1.0
    assert sv.exact_solution(trans, 0.0, 5.0) == 0.0


def test_exact_cell_averages_match_quadrature_rarefaction():
    prob = sv.burgers_riemann(-1.0, 1.0)
    grid = sv.default_grid(prob, 32)
    t = 3.0
    avg = sv.exact_cell_averages(prob, grid, t)
    for i in (0, 10, 15, 16, 20, 31):
        ref = quad(
            lambda x: sv.exact_solution(prob, x, t),
            grid.edges[i],
            grid.edges[i + 1],
            epsabs=1e-12,
        )[0] / grid.dx
        assert avg[i] == pytest.approx(ref, abs=1e-9)


def test_exact_cell_averages_advection_periodic_translation():
    prob = sv.advection_sigmoid()
    grid = sv.GridSpec(64)
    avg0 = sv.exact_cell_averages(prob, grid, 0.0)
    assert np.allclose(avg0, sv.initial_averages(prob, grid), atol=1e-14)
    # one full period returns the initial field
    avg1 = sv.exact_cell_averages(prob, grid, 1.0)
    assert np.allclose(avg1, avg0, atol=1e-12)


def test_l1_error_examples():
    assert sv.l1_error(np.ones(4), np.ones(4), 0.25) == 0.0
    assert sv.l1_error(np.ones(4) + 0.2, np.ones(4), 0.25) == pytest.approx(0.2)
    e = np.zeros(4)
    e[2] = 0.8
    assert sv.l1_error(e, np.zeros(4), 0.25) == pytest.approx(0.2)
    with pytest.raises(ValueError):
        sv.l1_error(np.ones(3), np.ones(4), 0.1)


def test_run_advection_one_period_round_trip():
    prob = sv.advection_cosine(T=1.0)
    grid = sv.default_grid(prob, 64)
    report = sv.run(prob, grid, Weno3JS())
    norm = sv.l1_error(np.zeros(64), sv.initial_averages(prob, grid), grid.dx)
    assert report.final_error < 0.5 * norm
    assert report.times[-1] == pytest.approx(1.0, abs=1e-12)
    assert report.l1_errors[0] == 0.0


def test_run_burgers_shock_position():
    prob = sv.burgers_riemann(1.0, 0.0, T=5.0)
    grid = sv.default_grid(prob, 128)
    report = sv.run(prob, grid, Weno3JS())
    u = report.final_state
    # shock sits at x = 2.5: find the cell where u crosses 0.5
    cross = grid.centers[np.argmin(np.abs(u - 0.5))]
    assert abs(cross - 2.5) <= 2.0 * grid.dx


def test_run_transonic_matches_fan():
    prob = sv.burgers_riemann(-1.0, 1.0, T=5.0)
    grid = sv.default_grid(prob, 256)
    report = sv.run(prob, grid, Weno3JS())
    assert report.final_error < 0.05


def test_run_constant_data_is_fixed_point():
    prob = sv.burgers_riemann(0.7, 0.7, T=0.5)
    grid = sv.default_grid(prob, 32)
    assert np.allclose(sv.initial_averages(prob, grid), 0.7, atol=1e-15)
    for scheme in (Weno3JS(), Weno3Z(), Weno5JS(), Quick(), IdealWeights3()):
        report = sv.run(prob, grid, scheme)
        assert np.allclose(report.final_state, 0.7, atol=1e-12)
        assert report.final_error <= 1e-12


def test_periodic_conservation_over_full_run():
    prob = sv.advection_cosine(T=5.0)
    grid = sv.default_grid(prob, 128)
    initial = sv.initial_averages(prob, grid)
    for scheme in (Weno3JS(), Weno3Z(), Weno5JS(), Quick(), IdealWeights3()):
        report = sv.run(prob, grid, scheme)
        drift = abs(np.sum(report.final_state) - np.sum(initial)) * grid.dx
        assert drift <= 1e-10


def test_monotone_shock_capture_weno_family():
    prob = sv.burgers_riemann(1.0, 0.0, T=5.0)
    grid = sv.default_grid(prob, 128)
    init_tv = sv.total_variation(sv.initial_averages(prob, grid))
    for scheme in (Weno3JS(), Weno3Z(), Weno5JS()):
        u = sv.run(prob, grid, scheme).final_state
        assert u.max() <= 1.0 + 1e-3
        assert u.min() >= -1e-3
        assert sv.total_variation(u) <= init_tv + 1e-2


def test_cfl_robustness_spatial_error_dominates():
    grid_nx = 256
    base = sv.run(
        sv.advection_cosine(T=5.0, cfl=0.4),
        sv.GridSpec(grid_nx),
        Weno3JS(),
    ).final_error
    halved = sv.run(
        sv.advection_cosine(T=5.0, cfl=0.2),
        sv.GridSpec(grid_nx),
        Weno3JS(),
    ).final_error
    assert abs(halved - base) / base < 0.10


def test_run_reports_nan_abort():
    class Explode:
        name = "explode"
        width = 3
        halo = 2

        def face_value(self, windows):
            out = np.asarray(windows[..., 1], dtype=float) * 1e155
            return out * out  # overflows to inf immediately

    prob = sv.advection_cosine(T=1.0)
    with pytest.raises(RuntimeError, match="step 1"):
        sv.run(prob, sv.default_grid(prob, 16), Explode())
