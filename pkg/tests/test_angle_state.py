import numpy as np
import pytest
from hypothesis import given, strategies as st

from sonicpatch.angle_state import (AngleState, DegenerateDenominator, FlowState, SubsonicState,
                                    commutator_residual, decomposition_residuals, directional_derivative,
                                    eigenvalues, from_angle_vars, quadratic_residual, to_angle_vars)
from sonicpatch.gas_vdw import GasParams, bernoulli_potential, sound_speed, tau_from_sound_speed, default_window

IDEAL = GasParams(1.0, 0.5)


def tau_for_c(c, gas=IDEAL):
    return tau_from_sound_speed(c, gas, default_window(gas, (0.01, 1e4)))


def test_to_angle_vars_examples():
    tau = tau_for_c(1.0)
    a = to_angle_vars(FlowState(0.0, 0.0, 2.0, 0.0, tau), IDEAL)
    assert (a.c, a.theta, a.wbar) == pytest.approx((1.0, 0.0, 0.5), abs=1e-13)
    a = to_angle_vars(FlowState(0.0, 0.0, 0.0, -2.0, tau), IDEAL)
    assert a.theta == pytest.approx(-np.pi / 2) and a.wbar == pytest.approx(0.5)
    a = to_angle_vars(FlowState(0.0, 0.0, 0.6, 0.8, tau), IDEAL)
    assert a.wbar == 1.0


def test_subsonic_rejected():
    with pytest.raises(SubsonicState):
        to_angle_vars(FlowState(0.0, 0.0, 0.5, 0.0, tau_for_c(1.0)), IDEAL)


def test_from_angle_vars_examples():
    assert from_angle_vars(0.0, 0.0, AngleState(1.0, 0.0, 0.5)) == pytest.approx((2.0, 0.0))
    s = np.sqrt(2) / 2
    assert from_angle_vars(0.0, 0.0, AngleState(1.0, np.pi / 4, 1.0)) == pytest.approx((s, s))


@given(xi=st.floats(-2, 2), eta=st.floats(-2, 2), theta=st.floats(-3.1, 3.1), wbar=st.floats(0.05, 1.0),
       c=st.floats(0.3, 3.0))
def test_angle_roundtrip(xi, eta, theta, wbar, c):
    u, v = from_angle_vars(xi, eta, AngleState(c, theta, wbar))
    a = to_angle_vars(FlowState(xi, eta, u, v, tau_for_c(c)), IDEAL)
    assert a.c == pytest.approx(c, rel=1e-12)
    assert a.wbar == pytest.approx(wbar, rel=1e-12)
    assert np.angle(np.exp(1j * (a.theta - theta))) == pytest.approx(0.0, abs=1e-12)


def test_eigenvalue_examples():
    lam = eigenvalues(2.0, 0.0, 1.0)
    assert (lam.lambda_plus, lam.lambda_minus) == pytest.approx((np.sqrt(3) / 3, -np.sqrt(3) / 3), rel=1e-15)
    U, V = 0.6, 0.8   # sonic, c = 1
    lam = eigenvalues(U, V, 1.0)
    assert lam.lambda_plus == pytest.approx(U * V / (U**2 - 1), rel=1e-12)
    assert lam.lambda_minus == pytest.approx(lam.lambda_plus, rel=1e-12)


def test_eigen_degenerate():
    with pytest.raises(DegenerateDenominator):
        eigenvalues(1.0, 3.0, 1.0)


@given(q=st.floats(0.5, 5), ratio=st.floats(0.05, 0.99), theta=st.floats(-3.1, 3.1))
def test_eigen_quadratic_and_tan(q, ratio, theta):
    c = ratio * q
    U, V = q * np.cos(theta), q * np.sin(theta)
    if abs(U**2 - c**2) < 1e-3 * c**2:
        return
    lam = eigenvalues(U, V, c)
    for l in (lam.lambda_plus, lam.lambda_minus):
        scale = abs(c**2 - U**2) * l**2 + 2 * abs(U * V * l) + abs(c**2 - V**2)
        assert abs(quadratic_residual(U, V, c, l)) <= 1e-10 * scale
    om = np.arcsin(ratio)
    got = sorted([lam.lambda_plus, lam.lambda_minus])
    want = sorted([np.tan(theta + om), np.tan(theta - om)])
    assert got == pytest.approx(want, rel=1e-9, abs=1e-9)


def _grid(n=41):
    h = 1.0 / (n - 1)
    X, Y = np.meshgrid(np.linspace(0, 1, n), np.linspace(0, 1, n), indexing="ij")
    return X, Y, h


def test_directional_derivative_examples():
    X, Y, h = _grid()
    zero = AngleState(np.ones_like(X), np.zeros_like(X), np.full_like(X, 0.5))
    assert np.allclose(directional_derivative(X, "zero", zero, h), 1.0, atol=1e-12)
    assert np.allclose(directional_derivative(np.full_like(X, 3.0), "plus", zero, h), 0.0, atol=1e-15)
    errs = []
    for n in (21, 41, 81):
        X, Y, h = _grid(n)
        ang = AngleState(np.ones_like(X), np.full_like(X, np.pi / 4), np.full_like(X, 0.5))
        d = directional_derivative(X**2 + Y**2, "zero", ang, h)
        errs.append(np.abs(d - np.sqrt(2) * (X + Y))[1:-1, 1:-1].max())
    assert errs[-1] < 1e-12 or errs[0] / errs[1] > 3.5


def test_directional_derivative_grid_mismatch():
    X, Y, h = _grid(11)
    ang = AngleState(np.ones((5, 5)), np.zeros((5, 5)), np.ones((5, 5)) * 0.5)
    with pytest.raises(ValueError):
        directional_derivative(X, "plus", ang, h)


def test_uniform_flow_residuals_vanish():
    """A uniform (u, v, tau) state solves the pseudo-steady equations exactly."""
    tau, u, v = 1.0, 10.0, 3.0
    c = sound_speed(tau, IDEAL)
    xi, eta = np.meshgrid(np.linspace(-1, 1, 21), np.linspace(-1, 1, 21), indexing="ij")
    U, V = u - xi, v - eta
    q = np.hypot(U, V)
    wb = c / q
    z = np.zeros_like(xi)
    grads = {"c": (z, z), "theta": (V / q**2, -U / q**2), "wbar": (c * U / q**3, c * V / q**3), "phi": (U, V)}
    cw = np.sqrt(1 - wb**2)
    grads["omega"] = (grads["wbar"][0] / cw, grads["wbar"][1] / cw)
    phi = -(U**2 + V**2) / 2 - bernoulli_potential(tau, IDEAL)
    res = decomposition_residuals(np.full_like(xi, c), np.arctan2(V, U), wb, np.full_like(xi, tau), phi,
                                  IDEAL, grads=grads)
    scale = {"phi0": q.max(), "phi+": q.max(), "phi-": q.max()}
    for name, (mx, _) in res.items():
        assert mx <= 1e-12 * scale.get(name, 1.0), name


def test_commutator_converges():
    errs = []
    for n in (41, 81, 161):
        X, Y, h = _grid(n)
        al = 0.8 + 0.2 * np.sin(X + 2 * Y)
        be = -0.5 + 0.1 * np.cos(2 * X - Y)
        errs.append(np.abs(commutator_residual(X * Y, al, be, h))[3:-3, 3:-3].max())
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert orders.min() >= 0.9
