"""Compatible boundary data along the pseudo-streamline and its hodograph image.

The streamline is eta = psi(xi) with psi quadratic and the trace of
wbar = sin(omega) affine in xi, reaching the sonic value 1 at xi2.  The sound
speed along the streamline is not free: it solves a first-order ODE that
makes the data consistent with the irrotational system.

Sign conventions used throughout the package:
  * phi is the pseudo-potential with grad(phi) = (U, V), so that
    (U^2+V^2)/2 + E(tau) + phi = 0;
  * X = d+c/c > 0 and Y = d-c/c < 0 near the sonic point for this family of
    streamlines (psi'' < 0), hence a_hat > 0 > b_hat;
  * z = phi - phi(M) <= 0 on the streamline and decreases away from M.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicHermiteSpline, PchipInterpolator

from .gas_vdw import (GasParams, TauWindow, bernoulli_potential, kappa, sound_speed,
                      sound_speed_derivative)


class EmptyPositivityWindow(RuntimeError):
    pass


class BoundaryError(RuntimeError):
    pass


@dataclass(frozen=True)
class StreamlineSpec:
    xi1: float = -0.5
    xi2: float = 0.0
    eta_M: float = 0.0
    s1: float = -0.8
    s2: float = -0.6
    r: float = 0.9
    tau_M: float = 0.11

    def __post_init__(self):
        if not self.tau_M > 0:
            raise ValueError("tau_M must be positive")
        if not self.xi1 < self.xi2:
            raise ValueError("need xi1 < xi2")
        if not (self.s1 < 0 and self.s2 < 0 and self.r > 0):
            raise ValueError("streamline family needs s1 < 0, s2 < 0, r > 0")
        if self.wbar(self.xi1) <= 0:
            raise ValueError("wbar_hat must stay positive on [xi1, xi2]")
        if self.dpsi(self.xi1) >= 0:
            raise ValueError("psi' must stay negative on [xi1, xi2]")

    def psi(self, xi):
        d = np.asarray(xi) - self.xi2
        return self.eta_M + self.s1 * d + 0.5 * self.s2 * d**2

    def dpsi(self, xi):
        return self.s1 + self.s2 * (np.asarray(xi) - self.xi2)

    def d2psi(self, xi):
        return self.s2 + 0.0 * np.asarray(xi)

    def wbar(self, xi):
        return 1.0 - self.r * (self.xi2 - np.asarray(xi))

    def dwbar(self, xi):
        return self.r + 0.0 * np.asarray(xi)

    def xi_of_t(self, t):
        """Streamline parameter at which sqrt(1 - wbar^2) equals t."""
        return self.xi2 - (1.0 - np.sqrt(1.0 - np.asarray(t) ** 2)) / self.r

    def t_of_xi(self, xi):
        return np.sqrt(np.clip(1.0 - self.wbar(xi) ** 2, 0.0, None))

    def bounds(self):
        """(psi0, psi1): uniform lower/upper bounds of |psi'|, |psi''|, wbar'."""
        xs = np.array([self.xi1, self.xi2])
        vals = np.concatenate([np.abs(self.dpsi(xs)), np.abs(self.d2psi(xs)), self.dwbar(xs)])
        return float(vals.min()), float(vals.max())


def _compat_rhs(xi, c, tau, spec, gas):
    w = spec.wbar(xi)
    cos_th = 1.0 / np.sqrt(1.0 + spec.dpsi(xi) ** 2)
    k = kappa(tau, gas)
    return (c * spec.dwbar(xi) - w**2 / cos_th) / (w * (1.0 + k * w**2))


def _tau_rhs(xi, tau, spec, gas, window):
    if not window.tau_min <= tau <= window.tau_max:
        raise BoundaryError(f"tau_hat={tau:.6g} leaves the window near xi={xi:.6g}")
    return _compat_rhs(xi, sound_speed(tau, gas), tau, spec, gas) / sound_speed_derivative(tau, gas)


def solve_compatibility(spec: StreamlineSpec, gas: GasParams, window: TauWindow, xi_nodes):
    """RK4 for c_hat along the streamline, from xi2 backwards over xi_nodes.

    The ODE is carried in tau (c is an explicit decreasing function of tau),
    which avoids inverting the equation of state inside the stages.
    xi_nodes must be increasing and end at xi2.  Returns (c_hat, tau_hat,
    dc_hat) on the nodes, where dc_hat is the ODE right side (used for
    Hermite dense output).
    """
    xi_nodes = np.asarray(xi_nodes, dtype=float)
    if abs(xi_nodes[-1] - spec.xi2) > 1e-15:
        raise ValueError("xi_nodes must end at xi2")
    if not window.contains(spec.tau_M):
        raise BoundaryError("tau_M outside the tau window")
    n = xi_nodes.size
    tau = np.empty(n)
    tau[-1] = spec.tau_M
    f = lambda x, v: _tau_rhs(x, v, spec, gas, window)
    for i in range(n - 1, 0, -1):
        x, h, v = xi_nodes[i], xi_nodes[i - 1] - xi_nodes[i], tau[i]
        k1 = f(x, v)
        k2 = f(x + h / 2, v + h / 2 * k1)
        k3 = f(x + h / 2, v + h / 2 * k2)
        k4 = f(x + h, v + h * k3)
        tau[i - 1] = v + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    f(xi_nodes[0], tau[0])
    c = np.asarray(sound_speed(tau, gas))
    dc = _compat_rhs(xi_nodes, c, tau, spec, gas)
    return c, tau, dc


def boundary_traces(xi, c, tau, spec: StreamlineSpec, gas: GasParams):
    """Angle data and X, Y, W traces from (xi, c_hat, tau_hat).

    Returns a dict with theta, wbar, t, phi (up to the choice phi(M)),
    a_hat = X, b_hat = Y and d_hat = W.
    """
    xi = np.asarray(xi, dtype=float)
    dpsi = spec.dpsi(xi)
    theta = np.arctan(dpsi)
    cos_th = np.cos(theta)
    w = spec.wbar(xi)
    t = spec.t_of_xi(xi)
    k = kappa(tau, gas)
    ds_theta = cos_th * spec.d2psi(xi) / (1 + dpsi**2)
    ds_wbar = cos_th * spec.dwbar(xi)
    d_hat = (c * ds_wbar - w**2) / (c * w * (1 + k * w**2))
    half_diff = ds_theta / (k * w)
    a_hat = t * d_hat - half_diff
    b_hat = t * d_hat + half_diff
    phi = -(c / w) ** 2 / 2 - bernoulli_potential(tau, gas)
    return dict(theta=theta, wbar=w, t=t, phi=phi, a_hat=a_hat, b_hat=b_hat, d_hat=d_hat,
                ds_theta=ds_theta, ds_wbar=ds_wbar)


@dataclass
class BoundaryData:
    spec: StreamlineSpec
    gas: GasParams
    window: TauWindow
    xi_nodes: np.ndarray
    theta_hat: np.ndarray
    wbar_hat: np.ndarray
    c_hat: np.ndarray
    tau_hat: np.ndarray
    phi_hat: np.ndarray
    a_hat: np.ndarray
    b_hat: np.ndarray
    d_hat: np.ndarray
    z_of_xi: np.ndarray
    t_of_xi: np.ndarray
    xi0: float
    xiQ: float
    dc_hat: np.ndarray = field(repr=False)

    @property
    def phi_M(self) -> float:
        return float(self.phi_hat[-1])

    @property
    def t0(self) -> float:
        return float(self.t_of_xi[0])

    @property
    def m0(self) -> float:
        return float(min(self.a_hat.min(), (-self.b_hat).min(), self.d_hat.min()))

    @property
    def M0(self) -> float:
        return float(max(self.a_hat.max(), (-self.b_hat).max(), self.d_hat.max()))

    def closure_defect(self):
        return self.a_hat + self.b_hat - 2 * np.sqrt(1 - self.wbar_hat**2) * self.d_hat

    def to_csv(self, path):
        cols = [self.xi_nodes, self.theta_hat, self.wbar_hat, self.c_hat, self.tau_hat, self.phi_hat,
                self.a_hat, self.b_hat, self.d_hat, self.z_of_xi, self.t_of_xi]
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["xi", "theta_hat", "wbar_hat", "c_hat", "tau_hat", "phi_hat",
                         "a_hat", "b_hat", "d_hat", "z", "t"])
            for row in zip(*cols):
                wr.writerow([repr(float(v)) for v in row])


def _t_nodes(t_top, n):
    # uniform in t, so that the sonic end is resolved as finely as the rest
    return np.linspace(t_top, 0.0, n)


def _tau_spline(xi, tau, dc, gas):
    """Hermite interpolant of tau_hat with slopes dc_hat / c'(tau_hat)."""
    return CubicHermiteSpline(xi, tau, dc / np.asarray(sound_speed_derivative(tau, gas)))


def _positivity_margin(xi, spec, gas, tau_interp):
    tau = float(tau_interp(xi))
    c = sound_speed(tau, gas)
    tr = boundary_traces(np.atleast_1d(xi), np.atleast_1d(c), np.atleast_1d(tau), spec, gas)
    return float(min(tr["a_hat"][0], -tr["b_hat"][0], tr["d_hat"][0]))


def build_boundary(spec: StreamlineSpec, gas: GasParams, window: TauWindow, n_nodes: int = 256,
                   positivity_fraction: float = 0.5, xi_tol: float = 1e-10) -> BoundaryData:
    """Boundary data on [xiQ, xi2].

    xi0 is where min(a, -b, d) first reaches zero walking left from xi2
    (xi1 if it never does).  The working window stops earlier, at xiQ, where
    that minimum falls to positivity_fraction of its value at the sonic
    point, so the lower bound m0 used by the domain construction is positive.
    """
    t1 = float(spec.t_of_xi(spec.xi1))
    coarse_t = _t_nodes(t1, max(4 * n_nodes, 512))
    coarse_xi = spec.xi_of_t(coarse_t)
    coarse_xi[-1] = spec.xi2
    coarse_xi[0] = spec.xi1
    c, tau, dc = solve_compatibility(spec, gas, window, coarse_xi)
    xs = coarse_xi
    tr = boundary_traces(xs, c, tau, spec, gas)
    if not (tr["a_hat"][-2] > 0 and tr["b_hat"][-2] < 0):
        raise EmptyPositivityWindow("a_hat > 0 > b_hat fails next to the sonic point")
    tau_interp = _tau_spline(xs, tau, dc, gas)
    margin = np.minimum(np.minimum(tr["a_hat"], -tr["b_hat"]), tr["d_hat"])
    m_sonic = margin[-1]

    def locate(level):
        below = np.nonzero(margin <= level)[0]
        if below.size == 0:
            return spec.xi1
        lo, hi = xs[below[-1]], xs[below[-1] + 1]
        while hi - lo > xi_tol:
            mid = 0.5 * (lo + hi)
            if _positivity_margin(mid, spec, gas, tau_interp) > level:
                hi = mid
            else:
                lo = mid
        return hi

    if m_sonic <= 0:
        raise EmptyPositivityWindow("d_hat <= 0 at the sonic point; pick a smaller tau_M")
    xi0 = locate(0.0)
    xiQ = locate(positivity_fraction * m_sonic)
    tQ = float(spec.t_of_xi(xiQ))
    tn = _t_nodes(tQ, n_nodes)
    xi_nodes = spec.xi_of_t(tn)
    xi_nodes[0], xi_nodes[-1] = xiQ, spec.xi2
    c, tau, dc = solve_compatibility(spec, gas, window, xi_nodes)
    tr = boundary_traces(xi_nodes, c, tau, spec, gas)
    z = tr["phi"] - tr["phi"][-1]
    return BoundaryData(spec=spec, gas=gas, window=window, xi_nodes=xi_nodes, theta_hat=tr["theta"],
                        wbar_hat=tr["wbar"], c_hat=c, tau_hat=tau, phi_hat=tr["phi"],
                        a_hat=tr["a_hat"], b_hat=tr["b_hat"], d_hat=tr["d_hat"], z_of_xi=z,
                        t_of_xi=tr["t"], xi0=float(xi0), xiQ=float(xiQ), dc_hat=dc)


class BoundaryCurve:
    """Dense evaluation of the boundary image as functions of t.

    tau_hat is Hermite-interpolated in xi (values and ODE slopes), everything
    else is recomputed from it, so the traces are consistent to round-off.
    """

    def __init__(self, bd: BoundaryData):
        self.bd = bd
        self._tau = _tau_spline(bd.xi_nodes, bd.tau_hat, bd.dc_hat, bd.gas)

    def at_t(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        spec, gas = self.bd.spec, self.bd.gas
        xi = spec.xi_of_t(t)
        tau = np.atleast_1d(self._tau(xi))
        c = np.atleast_1d(sound_speed(tau, gas))
        tr = boundary_traces(xi, c, tau, spec, gas)
        z = tr["phi"] - self.bd.phi_M
        a, b, d = tr["a_hat"], tr["b_hat"], tr["d_hat"]
        return dict(xi=xi, eta=spec.psi(xi), theta=tr["theta"], z=z, c=c, tau=tau,
                    X=1.0 / a, Y=-1.0 / b, W=d / (a * b), a=a, b=b, d=d)

    def z_tilde(self, t):
        return self.at_t(t)["z"]


def hodograph_boundary_inverse(bd: BoundaryData):
    """xi_hat(z) by monotone cubic interpolation, plus the X, Y, W traces in z."""
    z = bd.z_of_xi
    if not np.all(np.diff(z) > 0):
        raise BoundaryError("z_of_xi is not strictly monotone")
    xi_of_z = PchipInterpolator(z, bd.xi_nodes)
    Xz = PchipInterpolator(z, bd.a_hat)
    Yz = PchipInterpolator(z, bd.b_hat)
    Wz = PchipInterpolator(z, bd.d_hat)
    return xi_of_z, Xz, Yz, Wz
