"""Polytropic van der Waals thermodynamics.

Pressure law p = K/(tau-b)^(gamma+1) - a/tau^2 together with the derived
sound speed, the nonlinearity functions kappa and mu^2, the enthalpy-like
potential E used in Bernoulli's law, and the implicit closure tau(z, t).

Every function is pure and accepts scalars or numpy arrays.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class GasDomainError(ValueError):
    """Raised when a specific volume lies outside the admissible range."""


class NoBracket(RuntimeError):
    pass


class NonMonotone(RuntimeError):
    pass


@dataclass(frozen=True)
class GasParams:
    K: float = 1.0
    gamma: float = 0.5
    a: float = 0.0
    b: float = 0.0

    def __post_init__(self):
        if not self.K > 0:
            raise GasDomainError(f"K must be positive, got {self.K}")
        if not 0 < self.gamma < 1:
            raise GasDomainError(f"gamma must lie in (0, 1), got {self.gamma}")
        if self.a < 0 or self.b < 0:
            raise GasDomainError("a and b must be non-negative")

    @property
    def is_ideal(self) -> bool:
        return self.a == 0 and self.b == 0


@dataclass(frozen=True)
class IdealGasClosedForm(GasParams):
    """Polytropic ideal gas evaluated through explicit formulas only.

    kappa = 2/gamma is constant, E = c^2/gamma, and tau(z, t) solves a
    linear equation in c^2.  Passing an instance wherever GasParams is
    expected routes the pipeline through this path instead of the general
    van der Waals one.
    """

    def __post_init__(self):
        super().__post_init__()
        if not self.is_ideal:
            raise GasDomainError("the closed-form path requires a = b = 0")

    def c2(self, tau):
        return self.K * (self.gamma + 1) * tau ** (-self.gamma)

    def tau_of_c2(self, c2):
        return (self.K * (self.gamma + 1) / c2) ** (1 / self.gamma)


def _closed(gas):
    return isinstance(gas, IdealGasClosedForm)


def _check_tau(tau, gas):
    tau = np.asarray(tau, dtype=float)
    if np.any(tau <= gas.b) or np.any(tau <= 0):
        raise GasDomainError(f"specific volume must exceed covolume b={gas.b}")
    return tau


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def pressure(tau, gas: GasParams):
    tau = _check_tau(tau, gas)
    return _out(gas.K / (tau - gas.b) ** (gas.gamma + 1) - gas.a / tau**2)


def pressure_derivs(tau, gas: GasParams):
    """Return (p', p'')."""
    tau = _check_tau(tau, gas)
    K, g, a, b = gas.K, gas.gamma, gas.a, gas.b
    d = tau - b
    p1 = -K * (g + 1) / d ** (g + 2) + 2 * a / tau**3
    p2 = K * (g + 1) * (g + 2) / d ** (g + 3) - 6 * a / tau**4
    return _out(p1), _out(p2)


def pressure_third(tau, gas: GasParams):
    tau = _check_tau(tau, gas)
    K, g, a, b = gas.K, gas.gamma, gas.a, gas.b
    return _out(-K * (g + 1) * (g + 2) * (g + 3) / (tau - b) ** (g + 4) + 24 * a / tau**5)


def sound_speed(tau, gas: GasParams):
    if _closed(gas):
        return _out(np.sqrt(gas.c2(_check_tau(tau, gas))))
    p1, _ = pressure_derivs(tau, gas)
    c2 = -np.asarray(tau, dtype=float) ** 2 * np.asarray(p1)
    if np.any(c2 <= 0):
        raise GasDomainError("-tau^2 p'(tau) <= 0: no real sound speed")
    return _out(np.sqrt(c2))


def sound_speed_derivative(tau, gas: GasParams):
    """dc/dtau, from 2c c' = -2 tau p' - tau^2 p''."""
    tau = _check_tau(tau, gas)
    c = np.asarray(sound_speed(tau, gas))
    if _closed(gas):
        return _out(-gas.gamma * c / (2 * tau))
    p1, p2 = pressure_derivs(tau, gas)
    return _out(-tau * (2 * p1 + tau * p2) / (2 * c))


def sound_speed_explicit(tau, gas: GasParams):
    """Same quantity written as K(g+1)tau^2/(tau-b)^(g+2) - 2a/tau."""
    tau = _check_tau(tau, gas)
    K, g, a, b = gas.K, gas.gamma, gas.a, gas.b
    return _out(np.sqrt(K * (g + 1) * tau**2 / (tau - b) ** (g + 2) - 2 * a / tau))


def _kappa_parts(tau, gas):
    # kappa = n/d after dividing -2p' and 2p' + tau p'' by K(g+1) tau/(tau-b)^(g+3)
    K, g, a, b = gas.K, gas.gamma, gas.a, gas.b
    s = (tau - b) ** (g + 3) / (K * (g + 1) * tau**4)
    ds = s * ((g + 3) / (tau - b) - 4 / tau)
    n = 2 - 2 * b / tau - 4 * a * s
    d = g + 2 * b / tau - 2 * a * s
    dn = 2 * b / tau**2 - 4 * a * ds
    dd = -2 * b / tau**2 - 2 * a * ds
    return n, d, dn, dd


def kappa(tau, gas: GasParams):
    tau = _check_tau(tau, gas)
    if _closed(gas):
        return _out(np.full_like(tau, 2 / gas.gamma))
    n, d, _, _ = _kappa_parts(tau, gas)
    if np.any(np.abs(d) < 1e-300):
        raise GasDomainError("2p' + tau p'' vanishes")
    return _out(n / d)


def kappa_prime(tau, gas: GasParams):
    tau = _check_tau(tau, gas)
    if _closed(gas):
        return _out(np.zeros_like(tau))
    n, d, dn, dd = _kappa_parts(tau, gas)
    return _out((dn * d - n * dd) / d**2)


def mu_squared(tau, gas: GasParams):
    return _out(1.0 / (1.0 + np.asarray(kappa(tau, gas))))


def bernoulli_potential(tau, gas: GasParams):
    """E(tau); the flow satisfies (U^2+V^2)/2 + E(tau) = -phi."""
    tau = _check_tau(tau, gas)
    if _closed(gas):
        return _out(gas.c2(tau) / gas.gamma)
    K, g, a, b = gas.K, gas.gamma, gas.a, gas.b
    d = tau - b
    return _out(K / d**g * ((g + 1) / g + b / d) - 2 * a / tau)


def potential_from_state(U, V, tau, gas: GasParams):
    return _out(-(np.asarray(U) ** 2 + np.asarray(V) ** 2) / 2 - np.asarray(bernoulli_potential(tau, gas)))


# -- admissibility ---------------------------------------------------------

def _admissible_mask(tau, gas):
    p1, p2 = pressure_derivs(tau, gas)
    return (p1 < 0) & (p2 > 0) & (kappa(tau, gas) > 0) & (kappa_prime(tau, gas) >= 0 if gas.is_ideal
                                                           else kappa_prime(tau, gas) > 0)


def admissible_tau_threshold(gas: GasParams, search_window, n_scan: int = 4096) -> float:
    """Smallest tau_1 such that every sampled tau above it is admissible.

    A log-spaced sign scan locates the last failing sample; bisection then
    pins the transition between that sample and its admissible neighbour.
    """
    lo, hi = map(float, search_window)
    if not hi > lo or hi <= gas.b:
        raise GasDomainError("search window empty or below covolume")
    lo = max(lo, gas.b * (1 + 1e-12), 1e-300) if lo <= gas.b else lo
    taus = np.geomspace(lo, hi, n_scan)
    ok = _admissible_mask(taus, gas)
    if not ok[-1]:
        raise GasDomainError("no admissible specific volume in the search window")
    if ok.all():
        return lo
    last_bad = np.nonzero(~ok)[0][-1]
    bad, good = taus[last_bad], taus[last_bad + 1]
    for _ in range(200):
        mid = 0.5 * (bad + good)
        if mid in (bad, good):
            break
        if _admissible_mask(np.array([mid]), gas)[0]:
            good = mid
        else:
            bad = mid
    return float(good)


@dataclass(frozen=True)
class TauWindow:
    tau_min: float
    tau_max: float
    tau_threshold: float

    def validate(self, gas: GasParams, n_check: int = 1000):
        if not (self.tau_min > self.tau_threshold >= gas.b and self.tau_max > self.tau_min):
            raise GasDomainError("window must satisfy tau_max > tau_min > tau_threshold >= b")
        taus = np.geomspace(self.tau_min, self.tau_max, n_check)
        if not _admissible_mask(taus, gas).all():
            raise GasDomainError("window contains inadmissible specific volumes")
        return self

    def contains(self, tau) -> bool:
        tau = np.asarray(tau)
        return bool(np.all((tau >= self.tau_min) & (tau <= self.tau_max)))


def default_window(gas: GasParams, search_window, margin: float = 0.1) -> TauWindow:
    """Window [tau_1(1 + margin/2), tau_max(1 - margin/2)] inside the search range.

    The lower edge keeps half the margin so that a sonic state placed at
    tau_1(1 + margin) still has room for the lower specific volumes met
    along the sonic line.
    """
    tau1 = admissible_tau_threshold(gas, search_window)
    w = TauWindow(tau1 * (1 + margin / 2), float(search_window[1]) * (1 - margin / 2), tau1)
    return w.validate(gas)


# -- tau(z, t) closure -----------------------------------------------------

def bernoulli_residual(tau, z, t, phi_M, gas: GasParams):
    """G(tau) = c_EOS^2 - 2(1-t^2)(-z - phi_M - E(tau)); strictly decreasing in tau."""
    tau = np.asarray(tau, dtype=float)
    p1, _ = pressure_derivs(tau, gas)
    return -tau**2 * p1 - 2 * (1 - np.asarray(t) ** 2) * (-np.asarray(z) - phi_M - bernoulli_potential(tau, gas))


def _bernoulli_residual_deriv(tau, t, gas):
    p1, p2 = pressure_derivs(tau, gas)
    return -tau * (2 * np.asarray(t) ** 2 * p1 + tau * p2)


def solve_tau_array(z, t, phi_M, gas: GasParams, window: TauWindow, tau0=None,
                    rtol: float = 1e-13, max_iter: int = 200):
    """Vectorised safeguarded Newton for tau(z, t).

    Converged entries are frozen, so each result depends only on its own
    inputs (and warm start) and never on the batch it was solved in.
    """
    z, t = np.broadcast_arrays(np.asarray(z, dtype=float), np.asarray(t, dtype=float))
    shape = z.shape
    if _closed(gas):
        return _closed_tau(z, t, phi_M, gas, window)
    z, t = z.ravel(), t.ravel()
    lo = np.full(z.shape, window.tau_min)
    hi = np.full(z.shape, window.tau_max)
    glo = bernoulli_residual(lo, z, t, phi_M, gas)
    ghi = bernoulli_residual(hi, z, t, phi_M, gas)
    if np.any(glo < 0) or np.any(ghi > 0):
        raise NoBracket("Bernoulli residual does not change sign on the tau window")
    if tau0 is None:
        tau = 0.5 * (lo + hi)
    else:
        tau = np.clip(np.broadcast_to(np.asarray(tau0, dtype=float), shape).ravel().copy(), lo, hi)
    active = np.ones(z.shape, dtype=bool)
    for _ in range(max_iter):
        idx = np.nonzero(active)[0]
        if idx.size == 0:
            break
        ta, za, tt = tau[idx], z[idx], t[idx]
        G = bernoulli_residual(ta, za, tt, phi_M, gas)
        scale = -ta**2 * pressure_derivs(ta, gas)[0]
        pos = G > 0
        lo[idx] = np.where(pos, ta, lo[idx])
        hi[idx] = np.where(pos, hi[idx], ta)
        dG = _bernoulli_residual_deriv(ta, tt, gas)
        step = np.where(dG != 0, G / np.where(dG != 0, dG, 1.0), 0.0)
        new = ta - step
        bad = ~((new > lo[idx]) & (new < hi[idx])) | (dG >= 0)
        new = np.where(bad, 0.5 * (lo[idx] + hi[idx]), new)
        done = (np.abs(G) <= rtol * scale) | (np.abs(new - ta) <= rtol * ta)
        tau[idx] = np.where(done & ~bad, new, np.where(done, ta, new))
        active[idx[done]] = False
    if active.any():
        raise NonMonotone("tau iteration failed to converge")
    return tau.reshape(shape)


def _closed_tau(z, t, phi_M, gas, window):
    # c^2 = 2(1-t^2)(-z - phi_M - c^2/gamma), linear in c^2
    w = 2 * (1 - t**2)
    c2 = w * (-z - phi_M) * gas.gamma / (gas.gamma + w)
    if np.any(c2 <= 0):
        raise NoBracket("Bernoulli closure has no positive sound speed")
    tau = gas.tau_of_c2(c2)
    if np.any(tau < window.tau_min) or np.any(tau > window.tau_max):
        raise NoBracket("closed-form tau lies outside the window")
    return tau


def solve_tau(z: float, t: float, phi_M: float, gas: GasParams, window: TauWindow,
              bracket=None, n_scan: int = 64, rtol: float = 1e-13) -> float:
    """Scalar tau(z, t) with an explicit uniqueness scan of the bracket."""
    if not 0 <= t < 1:
        raise ValueError("t must lie in [0, 1)")
    lo, hi = bracket if bracket is not None else (window.tau_min, window.tau_max)
    taus = np.geomspace(lo, hi, n_scan)
    G = bernoulli_residual(taus, z, t, phi_M, gas)
    signs = np.sign(G)
    changes = np.count_nonzero(signs[1:] != signs[:-1])
    if changes == 0 and not np.any(G == 0):
        raise NoBracket(f"no sign change of the Bernoulli residual on [{lo}, {hi}]")
    if changes > 1:
        raise NonMonotone("multiple roots of the Bernoulli residual in the bracket")
    w = TauWindow(lo, hi, window.tau_threshold)
    return float(solve_tau_array(z, t, phi_M, gas, w, rtol=rtol)[()])


def tau_from_sound_speed(c, gas: GasParams, window: TauWindow, tau0=None, rtol: float = 1e-14):
    """Invert the strictly decreasing map tau -> c(tau) on the window."""
    c = np.atleast_1d(np.asarray(c, dtype=float))
    if _closed(gas):
        tau = gas.tau_of_c2(c**2)
        if np.any(tau < window.tau_min) or np.any(tau > window.tau_max):
            raise NoBracket("sound speed outside the range covered by the tau window")
        return tau if tau.size > 1 else float(tau[0])
    lo = np.full(c.shape, window.tau_min)
    hi = np.full(c.shape, window.tau_max)
    if np.any(sound_speed(lo, gas) < c) or np.any(sound_speed(hi, gas) > c):
        raise NoBracket("sound speed outside the range covered by the tau window")
    tau = 0.5 * (lo + hi) if tau0 is None else np.clip(np.asarray(tau0, float) * np.ones_like(c), lo, hi)
    for _ in range(200):
        cc = sound_speed(tau, gas)
        r = cc**2 - c**2
        lo = np.where(r > 0, tau, lo)
        hi = np.where(r > 0, hi, tau)
        p1, p2 = pressure_derivs(tau, gas)
        dr = -2 * tau * p1 - tau**2 * p2
        new = tau - r / dr
        bad = ~((new > lo) & (new < hi))
        new = np.where(bad, 0.5 * (lo + hi), new)
        conv = np.all(np.abs(new - tau) <= rtol * tau)
        tau = new
        if conv:
            break
    return tau if tau.size > 1 else float(tau[0])
