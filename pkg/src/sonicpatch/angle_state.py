"""Angle variables (c, theta, wbar) of the pseudo-steady flow and identity checks.

theta is the pseudo-flow angle, wbar = sin(omega) = c/|(U, V)| and the
characteristic inclinations are alpha = theta + omega, beta = theta - omega.
Derivatives along the three directions are

    d+ = cos(alpha) d_xi + sin(alpha) d_eta
    d- = cos(beta)  d_xi + sin(beta)  d_eta
    d0 = cos(theta) d_xi + sin(theta) d_eta
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gas_vdw import GasParams, kappa, sound_speed


class SubsonicState(ValueError):
    pass


class DegenerateDenominator(ZeroDivisionError):
    pass


@dataclass
class FlowState:
    xi: np.ndarray
    eta: np.ndarray
    u: np.ndarray
    v: np.ndarray
    tau: np.ndarray

    @property
    def U(self):
        return np.asarray(self.u) - self.xi

    @property
    def V(self):
        return np.asarray(self.v) - self.eta


@dataclass
class AngleState:
    c: np.ndarray
    theta: np.ndarray
    wbar: np.ndarray

    @property
    def omega(self):
        return np.arcsin(np.clip(self.wbar, -1.0, 1.0))

    @property
    def alpha(self):
        return self.theta + self.omega

    @property
    def beta(self):
        return self.theta - self.omega


@dataclass
class CharSlopes:
    lambda_plus: np.ndarray
    lambda_minus: np.ndarray


def to_angle_vars(state: FlowState, gas: GasParams, rtol: float = 1e-12) -> AngleState:
    U, V = state.U, state.V
    q = np.hypot(U, V)
    if np.any(q <= 0):
        raise ValueError("zero pseudo-velocity")
    c = np.asarray(sound_speed(state.tau, gas))
    if np.any(c > q * (1 + rtol)):
        raise SubsonicState("c exceeds the pseudo-velocity magnitude")
    return AngleState(c=c, theta=np.arctan2(V, U), wbar=np.minimum(c / q, 1.0))


def from_angle_vars(xi, eta, angle: AngleState):
    q = np.asarray(angle.c) / angle.wbar
    return xi + q * np.cos(angle.theta), eta + q * np.sin(angle.theta)


def eigenvalues(U, V, c, tol: float = 1e-12, check: bool = True) -> CharSlopes:
    U, V, c = (np.asarray(x, dtype=float) for x in (U, V, c))
    den = U**2 - c**2
    if check and np.any(np.abs(den) <= tol * np.maximum(c**2, 1e-300)):
        raise DegenerateDenominator("U^2 - c^2 vanishes; rotate the frame")
    root = c * np.sqrt(np.clip(U**2 + V**2 - c**2, 0.0, None))
    return CharSlopes((U * V + root) / den, (U * V - root) / den)


def quadratic_residual(U, V, c, lam):
    return (c**2 - U**2) * lam**2 + 2 * U * V * lam + (c**2 - V**2)


# -- derivatives on structured grids ---------------------------------------

def grid_gradient(F, h):
    """(F_xi, F_eta) by second-order differences; arrays indexed [i_xi, j_eta]."""
    hx, hy = (h, h) if np.isscalar(h) else h
    return np.gradient(F, hx, axis=0), np.gradient(F, hy, axis=1)


def directional_derivative(F, direction: str, angles: AngleState, h=None, grad=None):
    """d+, d- or d0 of F.  grad = (F_xi, F_eta) overrides the grid stencil."""
    Fx, Fy = grad if grad is not None else grid_gradient(F, h)
    ang = {"plus": angles.alpha, "minus": angles.beta, "zero": angles.theta}[direction]
    if np.shape(Fx) != np.shape(ang) and np.size(ang) != 1:
        raise ValueError("grid mismatch between field and angles")
    return np.cos(ang) * Fx + np.sin(ang) * Fy


def decomposition_residuals(c, theta, wbar, tau, phi, gas: GasParams, h=None, grads=None,
                            mask=None) -> dict:
    """Pointwise residuals of the angle-variable identities.

    grads maps 'c', 'theta', 'wbar', 'omega', 'phi' to (F_xi, F_eta) when the
    fields do not live on a uniform (xi, eta) grid; otherwise h is the grid
    spacing.  Keys: 'system+', 'system-' (first-order system), 'phi0',
    'phi+', 'phi-' (potential along the three directions), 'omega+',
    'omega-', 'c0', 'theta+', 'theta-', 'wbar_xi', 'wbar_eta', 'jacobian'.
    Returns {name: (max, l2)} over the masked nodes.
    """
    ang = AngleState(c, theta, wbar)
    omega = ang.omega
    fields = {"c": c, "theta": theta, "wbar": wbar, "omega": omega, "phi": phi}
    G = {k: (grads[k] if grads is not None else grid_gradient(v, h)) for k, v in fields.items()}
    D = lambda name, d: directional_derivative(None, d, ang, grad=G[name])
    k = kappa(tau, gas)
    t = np.sqrt(np.clip(1 - wbar**2, 0.0, None))
    e = 1 + k * wbar**2
    X = D("c", "plus") / c
    Y = D("c", "minus") / c
    r = {}
    r["system+"] = D("theta", "plus") + k * t / e * D("wbar", "plus") - wbar**2 / c * (k - 1 - 2 * k * wbar**2) / e
    r["system-"] = D("theta", "minus") - k * t / e * D("wbar", "minus") - wbar**2 / c * (1 - k + 2 * k * wbar**2) / e
    q = c / wbar
    r["phi0"] = D("phi", "zero") - q
    r["phi+"] = D("phi", "plus") - q * t
    r["phi-"] = D("phi", "minus") - q * t
    with np.errstate(divide="ignore", invalid="ignore"):
        tan_w = wbar / t
        r["omega+"] = D("omega", "plus") - (tan_w * e * X + wbar**2 / c)
        r["omega-"] = D("omega", "minus") - (tan_w * e * Y + wbar**2 / c)
    r["c0"] = D("c", "zero") - (c * D("wbar", "zero") - wbar**2) / (wbar * e)
    r["theta+"] = D("theta", "plus") + k * t * wbar * X + wbar**2 / c
    r["theta-"] = D("theta", "minus") - k * t * wbar * Y - wbar**2 / c
    ds = wbar * e * (X + Y) / 2 + t * wbar**2 / c   # t * d0 wbar, regular at t = 0
    dn = e * (X - Y) / 2
    wx, wy = G["wbar"]
    r["wbar_xi"] = t * wx - (np.cos(theta) * ds - t * np.sin(theta) * dn)
    r["wbar_eta"] = t * wy - (np.sin(theta) * ds + t * np.cos(theta) * dn)
    px, py = G["phi"]
    r["jacobian"] = px * wy - py * wx - q * dn
    return {name: residual_stats(val, mask) for name, val in r.items()}


def residual_stats(v, mask=None):
    v = np.asarray(v)
    if mask is not None:
        v = v[mask]
    v = v[np.isfinite(v)]
    if v.size == 0:
        return (0.0, 0.0)
    return (float(np.abs(v).max()), float(np.sqrt(np.mean(v**2))))


def commutator_residual(F, alpha, beta, h):
    """(d-d+ - d+d-)F minus the right side of the commutator identity, on a grid."""
    def dd(G, ang):
        gx, gy = grid_gradient(G, h)
        return np.cos(ang) * gx + np.sin(ang) * gy

    dpF, dmF = dd(F, alpha), dd(F, beta)
    lhs = dd(dpF, beta) - dd(dmF, alpha)
    two_w = alpha - beta
    rhs = ((np.cos(two_w) * dd(alpha, beta) - dd(beta, alpha)) * dpF
           + (np.cos(two_w) * dd(beta, alpha) - dd(alpha, beta)) * dmF) / np.sin(two_w)
    return lhs - rhs
