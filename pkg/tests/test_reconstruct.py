"""Unit tests for the classical face-reconstruction kernels."""

from fractions import Fraction

import numpy as np
import pytest

from wenonet import reconstruct as rc

rng = np.random.default_rng(1234)


def dyadic_stencils(n, width=3):
    """Random stencils whose entries and shifts stay exact in binary floating point."""
    return rng.integers(-64, 64, size=(n, width)) / 16.0


def test_interpolants_examples():
    assert rc.interpolants3(1.0, 1.0, 1.0) == (1.0, 1.0)
    assert rc.interpolants3(0.0, 1.0, 2.0) == (1.5, 1.5)
    assert rc.interpolants3(0.0, 1.0, 3.0) == (1.5, 2.0)


def test_weno3_js_weights_examples():
    for c in (0.0, 2.5, -7.0):
        w0, w1 = rc.weno3_js_weights(c, c, c)
        assert w0 == pytest.approx(1.0 / 3.0, abs=1e-15)
        assert w1 == pytest.approx(2.0 / 3.0, abs=1e-15)
    w0, w1 = rc.weno3_js_weights(0.0, 1.0, 2.0)
    assert w0 == pytest.approx(1.0 / 3.0, abs=1e-12)
    # hand evaluation with beta = (1, 4), eps = 1e-6
    a0 = (1.0 / 3.0) / (1.0 + 1e-6) ** 2
    a1 = (2.0 / 3.0) / (4.0 + 1e-6) ** 2
    w0, w1 = rc.weno3_js_weights(0.0, 1.0, 3.0, eps=1e-6)
    assert w0 == pytest.approx(a0 / (a0 + a1), abs=1e-15)
    assert w0 == pytest.approx(0.88889, abs=1e-5)
    assert w1 == pytest.approx(0.11111, abs=1e-5)


def test_weno3_z_weights_examples():
    for stencil in [(1.0, 1.0, 1.0), (0.0, 1.0, 2.0)]:
        w0, w1 = rc.weno3_z_weights(*stencil)
        assert w0 == pytest.approx(1.0 / 3.0, abs=1e-12)
        assert w1 == pytest.approx(2.0 / 3.0, abs=1e-12)
    w0, w1 = rc.weno3_z_weights(0.0, 1.0, 3.0, eps=1e-6)
    a0 = (1.0 / 3.0) * (1.0 + 3.0 / (1.0 + 1e-6))
    a1 = (2.0 / 3.0) * (1.0 + 3.0 / (4.0 + 1e-6))
    assert w0 == pytest.approx(a0 / (a0 + a1), abs=1e-15)
    assert w0 == pytest.approx(0.53333, abs=1e-5)
    assert w1 == pytest.approx(0.46667, abs=1e-5)


def test_reconstruct_minus_examples():
    assert rc.reconstruct_minus(0.0, 1.0, 2.0, *rc.IDEAL_WEIGHTS3) == pytest.approx(
        1.5, abs=1e-15
    )
    um1, u0, up1 = 0.3, -0.2, 0.9
    i0, _ = rc.interpolants3(um1, u0, up1)
    assert rc.reconstruct_minus(um1, u0, up1, 1.0, 0.0) == i0


def quadratic_cell_average(coeffs, lo: Fraction, hi: Fraction) -> Fraction:
    c0, c1, c2 = coeffs
    anti = lambda x: c2 * x**3 / 3 + c1 * x**2 / 2 + c0 * x
    return (anti(hi) - anti(lo)) / (hi - lo)


def test_ideal_weights_exact_for_quadratics_symbolic_oracle():
    # exact-rational oracle: cell averages of a quadratic on three uniform
    # cells, combined with the ideal weights, reproduce the face value
    rational = np.random.default_rng(7)
    for _ in range(20):
        coeffs = [Fraction(int(v), 8) for v in rational.integers(-40, 40, 3)]
        w = Fraction(1, 3)  # cell width
        x0 = Fraction(int(rational.integers(-16, 16)), 4)
        cells = [
            (x0 - 3 * w / 2, x0 - w / 2),
            (x0 - w / 2, x0 + w / 2),
            (x0 + w / 2, x0 + 3 * w / 2),
        ]
        um1, u0, up1 = (quadratic_cell_average(coeffs, lo, hi) for lo, hi in cells)
        face = x0 + w / 2
        exact = coeffs[0] + coeffs[1] * face + coeffs[2] * face**2
        assert (-um1 + 5 * u0 + 2 * up1) / 6 == exact  # symbolic identity
        got = rc.reconstruct_minus(
            float(um1), float(u0), float(up1), *rc.IDEAL_WEIGHTS3
        )
        assert got == pytest.approx(float(exact), abs=1e-12)


def test_spec_quadratic_example_unit_cells():
    um1, u0, up1 = 13.0 / 12.0, 1.0 / 12.0, 13.0 / 12.0
    got = rc.reconstruct_minus(um1, u0, up1, *rc.IDEAL_WEIGHTS3)
    assert got == pytest.approx(0.25, abs=1e-15)


def test_reconstruct_plus_is_mirror():
    assert rc.reconstruct_plus(5.0, 5.0, 5.0) == 5.0
    assert rc.reconstruct_plus(0.0, 1.0, 2.0) == pytest.approx(0.5, abs=1e-15)
    s = rng.normal(size=(1000, 3))
    for rule in (rc.weno3_js_weights, rc.weno3_z_weights):
        plus = rc.reconstruct_plus(s[:, 0], s[:, 1], s[:, 2], weight_rule=rule)
        w0, w1 = rule(s[:, 2], s[:, 1], s[:, 0])
        minus = rc.reconstruct_minus(s[:, 2], s[:, 1], s[:, 0], w0, w1)
        assert np.array_equal(plus, minus)


def test_quick_examples():
    assert rc.quick(1.0, 1.0, 1.0) == 1.0
    assert rc.quick(0.0, 1.0, 2.0) == 1.5
    assert rc.quick(0.0, 1.0, 3.0) == 1.875


def test_weno5_examples():
    assert rc.weno5_js(3.0, 3.0, 3.0, 3.0, 3.0) == pytest.approx(3.0, abs=1e-14)
    assert rc.weno5_js(-2.0, -1.0, 0.0, 1.0, 2.0) == pytest.approx(0.5, abs=1e-14)


def test_weno5_fifth_order_on_quartic():
    # oracle: exact cell averages of x^4 from its antiderivative; the face
    # value error must shrink like dx^5
    errs = []
    dxs = 0.5 ** np.arange(2, 7)
    for dx in dxs:
        edges = 1.0 + dx * np.arange(-2, 4)  # five cells around x = 1
        avg = np.diff(edges**5 / 5.0) / dx
        face = edges[3]
        errs.append(abs(rc.weno5_js(*avg) - face**4))
    slope = np.polyfit(np.log(dxs), np.log(errs), 1)[0]
    assert slope >= 4.5


@pytest.mark.parametrize("rule", [rc.weno3_js_weights, rc.weno3_z_weights])
def test_weight_convexity_across_eps(rule):
    s = rng.normal(scale=3.0, size=(500, 3))
    for eps in (1e-12, 1e-9, 1e-6, 1e-2):
        w0, w1 = rule(s[:, 0], s[:, 1], s[:, 2], eps=eps)
        assert np.all(w0 >= 0.0) and np.all(w1 >= 0.0)
        assert np.max(np.abs(w0 + w1 - 1.0)) < 1e-12


@pytest.mark.parametrize("rule", [rc.weno3_js_weights, rc.weno3_z_weights])
def test_shift_invariance_of_weights_and_values(rule):
    s = dyadic_stencils(300)
    for c in (1.0, -2.5, 8.0):
        w = rule(s[:, 0], s[:, 1], s[:, 2])
        ws = rule(s[:, 0] + c, s[:, 1] + c, s[:, 2] + c)
        assert np.array_equal(w[0], ws[0]) and np.array_equal(w[1], ws[1])
        v = rc.reconstruct_minus(s[:, 0], s[:, 1], s[:, 2], *w)
        vs = rc.reconstruct_minus(s[:, 0] + c, s[:, 1] + c, s[:, 2] + c, *ws)
        assert np.allclose(vs, v + c, rtol=0, atol=1e-12)


def test_quick_shift_invariance():
    s = dyadic_stencils(300)
    v = rc.quick(s[:, 0], s[:, 1], s[:, 2])
    vs = rc.quick(s[:, 0] + 2.0, s[:, 1] + 2.0, s[:, 2] + 2.0)
    assert np.allclose(vs, v + 2.0, rtol=0, atol=1e-12)


def test_linear_exactness_all_schemes():
    base, slope = -0.7, 0.45
    um2, um1, u0, up1, up2 = (base + slope * k for k in range(-2, 3))
    exact = base + slope * 0.5
    for scheme in (rc.Weno3JS(), rc.Weno3Z(), rc.IdealWeights3(), rc.Quick()):
        got = scheme.face_value(np.array([um1, u0, up1]))
        assert got == pytest.approx(exact, abs=1e-12)
    got = rc.Weno5JS().face_value(np.array([um2, um1, u0, up1, up2]))
    assert got == pytest.approx(exact, abs=1e-12)


def test_eno_behavior_at_step():
    for eps in (1e-6, 1e-8, 1e-12):
        w0, _ = rc.weno3_js_weights(0.0, 0.0, 1.0, eps=eps)
        assert w0 >= 0.99


def test_scheme_objects_halo_and_vectorization():
    assert rc.Weno3JS().halo == 2
    assert rc.Quick().halo == 2
    assert rc.Weno5JS().halo == 3
    windows = rng.normal(size=(10, 3))
    vals = rc.Weno3JS().face_value(windows)
    assert vals.shape == (10,)
    with pytest.raises(ValueError):
        rc.Weno3JS(eps=0.0)
