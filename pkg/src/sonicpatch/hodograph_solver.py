"""Degenerate characteristic system in the partial hodograph plane (z, t).

Unknowns are Xt = 1/X and Yt = -1/Y (both positive on the patch) and the
regular quotient Wt = (Xt - Yt)/(2t).  With D_X = d/dt + Lx d/dz and
D_Y = d/dt + Ly d/dz,

    D_X Xt = Wt + 2t H11 Wt + t H12
    D_Y Yt = -Wt + 2t H21 Wt + t H22
    D_X Wt = (H11 - H21) Wt + (H12 - H22)/2 - (Lx - Ly) Yt_z / (2t)

Lx = c f t^2 Yt/(1 + t g Yt) > 0 and Ly = -c f t^2 Xt/(1 - t g Xt) < 0.
The boundary curve z_tilde(t) <= 0 is the right edge of the domain and the
sonic line t = 0 the bottom edge.  Levels are marched downward in t.
"""
from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .boundary import BoundaryCurve, BoundaryData
from .gas_vdw import GasParams, kappa, kappa_prime, solve_tau_array, sound_speed


class MonitorViolation(RuntimeError):
    def __init__(self, name, detail):
        super().__init__(f"{name}: {detail}")
        self.name = name
        self.detail = detail


class DenominatorLoss(MonitorViolation):
    def __init__(self, detail):
        super().__init__("denominator", detail)


@dataclass
class Coefficients:
    f: np.ndarray
    g: np.ndarray
    mu2: np.ndarray
    kappa: np.ndarray
    kappa_prime: np.ndarray
    H11: np.ndarray = None
    H12: np.ndarray = None
    H21: np.ndarray = None
    H22: np.ndarray = None


def coefficients(t, tau, c, gas: GasParams, Xt=None, Yt=None, Wt=None) -> Coefficients:
    """f, g, mu^2, kappa, kappa' and, given the state, the H_ij of the split system.

    When Wt is omitted the difference Xt - Yt is used directly.
    """
    t = np.asarray(t, dtype=float)
    k = np.asarray(kappa(tau, gas))
    kp = np.asarray(kappa_prime(tau, gas))
    s2 = 1.0 - t**2
    wb = np.sqrt(s2)
    e = 1.0 + k * s2
    f = 1.0 / (e * s2 * wb)
    g = -s2**2 * f / c
    out = Coefficients(f=f, g=g, mu2=1.0 / (1.0 + k), kappa=k, kappa_prime=kp)
    if Xt is None:
        return out
    D = Xt - Yt if Wt is None else 2 * t * Wt
    Q = tau * kp - 1.0 - 2 * k + 2 * t**2 * k
    dx = 1.0 + t * g * Yt
    dy = 1.0 - t * g * Xt
    lead = (1.0 + 2 * k - k * t**2) / (2 * s2 * e)
    cross = 2 * t * wb * Xt * Yt / c
    out.H11 = wb * Yt / (2 * c * e * dx)
    out.H21 = wb * Xt / (2 * c * e * dy)
    out.H12 = D * lead / dx - f * wb / dx * (cross - Q * Xt)
    out.H22 = -D * lead / dy + f * wb / dy * (cross + Q * Yt)
    return out


def unsplit_rhs(t, tau, c, gas: GasParams, Xt, Yt):
    """Right sides of D_X Xt and D_Y Yt written with the explicit 1/t quotient.

    Independent of the H_ij bookkeeping; used to cross-check it.
    """
    co = coefficients(t, tau, c, gas)
    k, kp, f, g = co.kappa, co.kappa_prime, co.f, co.g
    wb = np.sqrt(1 - t**2)
    Q = tau * kp - 1 - 2 * k + 2 * t**2 * k
    quot = (Xt - Yt) * (1 + k) / (2 * t)
    rx = f * wb / (1 + t * g * Yt) * (quot - 2 * t**2 * wb * Xt * Yt / c + Q * Xt * t)
    ry = f * wb / (1 - t * g * Xt) * (-quot + 2 * t**2 * wb * Xt * Yt / c + Q * Yt * t)
    return rx, ry


def split_rhs(t, co: Coefficients, Wt):
    rx = Wt + 2 * t * co.H11 * Wt + t * co.H12
    ry = -Wt + 2 * t * co.H21 * Wt + t * co.H22
    return rx, ry


def char_speeds(t, c, f, g, Xt, Yt):
    """(Lx, Ly): transport speeds dz/dt of Xt and Yt."""
    dx = 1.0 + t * g * Yt
    dy = 1.0 - t * g * Xt
    if np.any(dx <= 0) or np.any(dy <= 0):
        raise DenominatorLoss(f"min(1+tgYt)={np.min(dx):.3g}, min(1-tgXt)={np.min(dy):.3g}")
    return c * f * t**2 * Yt / dx, -c * f * t**2 * Xt / dy


# -- determinate domain ----------------------------------------------------

@dataclass
class DomainOmega:
    delta: float
    delta_raw: float
    M_tilde: float
    M_hat: float
    m_tilde: float
    m0: float
    M0: float
    c0: float
    c1: float
    kappa_hat: float
    A_hat: float
    curve: BoundaryCurve = field(repr=False)

    def z_tilde_of_t(self, t):
        return self.curve.z_tilde(t)

    @property
    def z_top(self) -> float:
        return float(self.curve.z_tilde(self.delta)[0])

    def z_bar_of_t(self, t):
        t = np.asarray(t, dtype=float)
        return self.z_top + self.M_tilde / 3 * (self.delta**3 - t**3)

    def summary(self):
        keys = ["delta", "delta_raw", "M_tilde", "M_hat", "m_tilde", "m0", "M0", "c0", "c1",
                "kappa_hat", "A_hat"]
        d = {k: float(getattr(self, k)) for k in keys}
        d["z_bar_0"] = float(self.z_bar_of_t(0.0))
        d["z_top"] = self.z_top
        return d


def build_domain(bd: BoundaryData, gas: GasParams, delta_quantum: float = 0.0) -> DomainOmega:
    """Constants of the determinate-domain construction and the domain itself.

    delta is optionally rounded down to a multiple of delta_quantum so that
    refined runs share the same domain.
    """
    if bd.t0 <= 0:
        raise ValueError("t0 = 0: empty positivity window")
    c0, c1 = float(bd.c_hat.min()), float(bd.c_hat.max())
    kap = kappa(bd.tau_hat, gas)
    kp = np.abs(kappa_prime(bd.tau_hat, gas))
    k_hat = float(kap.min())
    A_hat = float(np.exp(0.5 * kp.max() * (bd.tau_hat.max() - bd.tau_hat.min())))
    m0, M0 = bd.m0, bd.M0
    psi0, psi1 = bd.spec.bounds()
    sk = np.sqrt(k_hat)
    M_hat = 1 + 4 * A_hat * (3 + 4 * k_hat) / (c0 * sk * (1 + k_hat / 2) * m0)
    M_tilde = 8 * A_hat * c1 / (m0 * sk)
    m_tilde = c0 * np.sqrt(1 + psi0**2) / psi1
    delta_raw = min(bd.t0, 1 / np.sqrt(2), c0 * m0 * sk / (4 * A_hat), np.log(2) / M_hat, m_tilde / M_hat)
    delta = delta_raw
    if delta_quantum > 0:
        delta = delta_quantum * np.floor(delta_raw / delta_quantum + 1e-9)
        if delta <= 0:
            raise ValueError("delta_quantum larger than the admissible delta")
    return DomainOmega(delta=float(delta), delta_raw=float(delta_raw), M_tilde=float(M_tilde),
                       M_hat=float(M_hat), m_tilde=float(m_tilde), m0=m0, M0=M0, c0=c0, c1=c1,
                       kappa_hat=k_hat, A_hat=A_hat, curve=BoundaryCurve(bd))


# -- marching --------------------------------------------------------------

@dataclass
class Level:
    t: float
    z: np.ndarray
    Xt: np.ndarray
    Yt: np.ndarray
    Wt: np.ndarray
    tau: np.ndarray
    c: np.ndarray
    # X-characteristic footpoint bookkeeping, reused by the inversion
    foot_z: np.ndarray = None
    foot_t: np.ndarray = None
    foot_cross: np.ndarray = None

    def as_rows(self):
        n = self.z.size
        return zip([self.t] * n, self.z, self.Xt, self.Yt, self.Wt, self.tau, self.c)


@dataclass
class SonicTrace:
    z: np.ndarray
    Xt: np.ndarray
    Yt: np.ndarray
    Wt: np.ndarray
    tau: np.ndarray
    c: np.ndarray
    foot_z: np.ndarray | None = None
    foot_t: np.ndarray | None = None
    foot_cross: np.ndarray | None = None

    @property
    def common(self):
        return 0.5 * (self.Xt + self.Yt)


@dataclass
class HodographField:
    levels: list
    sonic: SonicTrace
    dt: float
    dz: float
    domain: DomainOmega
    phi_M: float
    gas: GasParams
    monitors: dict = field(default_factory=dict)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["t", "z", "X_tilde", "Y_tilde", "W_tilde", "tau", "c"])
            for lev in self.levels:
                for row in lev.as_rows():
                    wr.writerow([repr(float(v)) for v in row])

    @property
    def last(self) -> Level:
        return self.levels[-1]


@dataclass(frozen=True)
class GridSpec:
    dt: float = 1e-3
    dz: float = 0.0          # 0 selects |z_bar(0)|/n_z
    n_z: int = 128
    threads: int = 1
    tau_rtol: float = 1e-13


def level_nodes(t, dom: DomainOmega, dz: float):
    """Grid points z = -j dz strictly inside (z_bar, z_tilde) plus both edges."""
    zr = float(dom.z_tilde_of_t(t)[0])
    zl = float(dom.z_bar_of_t(t))
    if zr - zl <= 1e-15 * max(1.0, abs(zl)):
        return np.array([zr])
    j_lo = int(np.ceil(-zr / dz))
    j_hi = int(np.floor(-zl / dz))
    inner = -dz * np.arange(j_hi, j_lo - 1, -1, dtype=float)
    keep = (inner > zl + 0.25 * dz) & (inner < zr - 0.25 * dz)
    return np.concatenate([[zl], inner[keep], [zr]])


def _interp(zq, lev: Level, arr):
    return np.interp(zq, lev.z, arr)


def _grad(z, v):
    if z.size < 2:
        return np.zeros_like(v)
    if z.size == 2:
        s = (v[1] - v[0]) / (z[1] - z[0])
        return np.array([s, s])
    return np.gradient(v, z)


def _rhs(t, z_unused, Xt, Yt, Wt, tau, c, Yz, gas):
    co = coefficients(t, tau, c, gas, Xt, Yt, Wt)
    lx, ly = char_speeds(t, c, co.f, co.g, Xt, Yt)
    rx, ry = split_rhs(t, co, Wt)
    # (Lx - Ly)/(2t) is O(t); written without the division
    rw = (co.H11 - co.H21) * Wt + 0.5 * (co.H12 - co.H22) - 0.5 * c * co.f * t * (
        Yt / (1 + t * co.g * Yt) + Xt / (1 - t * co.g * Xt)) * Yz
    return rx, ry, rw, lx, ly


class CurveTable:
    """Boundary image tabulated on a fine uniform t-grid, cubic-spline interpolated."""

    keys = ("z", "X", "Y", "W", "tau", "c", "xi", "eta", "theta")

    def __init__(self, curve: BoundaryCurve, t_max: float, n: int = 4097):
        ts = np.linspace(0.0, t_max, n)
        vals = curve.at_t(ts)
        self.t_max = t_max
        self.splines = {k: CubicSpline(ts, vals[k]) for k in self.keys}
        self._dz = self.splines["z"].derivative()

    def __call__(self, t, key):
        return self.splines[key](t)

    def at_t(self, t):
        return {k: self.splines[k](t) for k in self.keys}

    def crossing(self, z_new, t_new, t_old, slope):
        """Times s in [t_new, t_old] where z_new + (s - t_new) slope meets the curve."""
        def h(s):
            return z_new + (s - t_new) * slope - self.splines["z"](s)
        lo = np.full(z_new.shape, t_new, dtype=float)
        hi = np.full(z_new.shape, t_old, dtype=float)
        s = 0.5 * (lo + hi)
        for _ in range(60):
            hs = h(s)
            lo = np.where(hs < 0, s, lo)
            hi = np.where(hs < 0, hi, s)
            new = s - hs / (slope - self._dz(s))
            new = np.where((new > lo) & (new < hi), new, 0.5 * (lo + hi))
            if np.all(np.abs(new - s) <= 1e-16 + 1e-15 * np.abs(s)):
                s = new
                break
            s = new
        return s


class _Stepper:
    def __init__(self, gas, dom, phi_M, window, rtol, threads=1):
        self.gas, self.dom, self.phi_M, self.window, self.rtol = gas, dom, phi_M, window, rtol
        self.threads = threads
        self.curve = dom.curve
        self.table = CurveTable(dom.curve, dom.delta)

    def speeds_on(self, lev: Level, zq, t):
        Xt, Yt, c, tau = (_interp(zq, lev, a) for a in (lev.Xt, lev.Yt, lev.c, lev.tau))
        co = coefficients(t, tau, c, self.gas)
        return char_speeds(t, c, co.f, co.g, Xt, Yt)

    def feet(self, lev: Level, z, t_new, which):
        """Backward footpoints of one family: (z_foot, t_foot, crossed)."""
        dt = lev.t - t_new
        tm = t_new + 0.5 * dt
        s0 = self.speeds_on(lev, z, tm)[which]
        s1 = self.speeds_on(lev, z + 0.5 * dt * s0, tm)[which]
        zf = z + dt * s1
        crossed = zf > lev.z[-1]
        tf = np.full(z.shape, lev.t)
        if crossed.any():
            tc = self.table.crossing(z[crossed], t_new, lev.t, s1[crossed])
            tf[crossed] = tc
            zf[crossed] = z[crossed] + (tc - t_new) * s1[crossed]
        return zf, tf, crossed

    def foot_values(self, lev: Level, Yz_old, zf, tf, crossed):
        vals = {k: _interp(zf, lev, getattr(lev, k)) for k in ("Xt", "Yt", "Wt", "tau", "c")}
        vals["Yz"] = np.interp(zf, lev.z, Yz_old)
        if crossed.any():
            bd = self.table.at_t(tf[crossed])
            vals["Xt"][crossed] = bd["X"]
            vals["Yt"][crossed] = bd["Y"]
            vals["Wt"][crossed] = bd["W"]
            vals["tau"][crossed] = bd["tau"]
            vals["c"][crossed] = bd["c"]
        return vals

    def _solve_tau(self, z, t, tau0, pool):
        solve = lambda zz, gg: solve_tau_array(zz, t, self.phi_M, self.gas, self.window, tau0=gg,
                                               rtol=self.rtol)
        if pool is None or z.size < 64:
            return solve(z, tau0)
        # per-entry results do not depend on the batch, so chunking is bitwise neutral
        parts = np.array_split(np.arange(z.size), self.threads)
        return np.concatenate(list(pool.map(lambda ix: solve(z[ix], tau0[ix]), parts)))

    def step(self, lev: Level, t_new: float, z: np.ndarray, pool=None) -> Level:
        gas = self.gas
        bnd = self.curve.at_t([t_new])
        n = z.size
        inner = slice(0, n - 1)  # last node sits on the boundary curve
        zi = z[inner]
        Yz_old = _grad(lev.z, lev.Yt)

        zx, tx, cx = self.feet(lev, zi, t_new, 0)
        zy, ty, cy = self.feet(lev, zi, t_new, 1)
        zl_old = float(self.dom.z_bar_of_t(lev.t))
        tol = 1e-12 * max(1.0, abs(zl_old))
        if zi.size and (np.min(zy) < zl_old - tol or np.min(zx) < zl_old - tol):
            raise MonitorViolation("domain", f"footpoint left of z_bar at t={lev.t:.6g}")
        fx = self.foot_values(lev, Yz_old, zx, tx, cx)
        fy = self.foot_values(lev, Yz_old, zy, ty, cy)
        hx = tx - t_new
        hy = ty - t_new

        rx0, _, rw0, _, _ = _rhs(tx, zx, fx["Xt"], fx["Yt"], fx["Wt"], fx["tau"], fx["c"], fx["Yz"], gas)
        _, ry0, _, _, _ = _rhs(ty, zy, fy["Xt"], fy["Yt"], fy["Wt"], fy["tau"], fy["c"], fy["Yz"], gas)
        Xp = fx["Xt"] - hx * rx0
        Yp = fy["Yt"] - hy * ry0
        Wp = fx["Wt"] - hx * rw0

        tau_guess = _interp(zi, lev, lev.tau)
        taup = self._solve_tau(zi, t_new, tau_guess, pool)
        cp = sound_speed(taup, gas)
        Ypred_full = np.append(Yp, bnd["Y"])
        Yz_new = _grad(z, Ypred_full)[inner]
        rx1, ry1, rw1, _, _ = _rhs(t_new, zi, Xp, Yp, Wp, taup, cp, Yz_new, gas)
        X = fx["Xt"] - 0.5 * hx * (rx0 + rx1)
        Y = fy["Yt"] - 0.5 * hy * (ry0 + ry1)
        W = (X - Y) / (2 * t_new)

        new = Level(t=t_new, z=z,
                    Xt=np.append(X, bnd["X"]), Yt=np.append(Y, bnd["Y"]), Wt=np.append(W, bnd["W"]),
                    tau=np.append(taup, bnd["tau"]), c=np.append(cp, bnd["c"]),
                    foot_z=np.append(zx, np.nan), foot_t=np.append(tx, t_new),
                    foot_cross=np.append(cx, True))
        return new


def _check_level(lev: Level, gas, dom, mon):
    co = coefficients(lev.t, lev.tau, lev.c, gas)
    dx = 1 + lev.t * co.g * lev.Yt
    dy = 1 - lev.t * co.g * lev.Xt
    mon["min_Xt"] = min(mon.get("min_Xt", np.inf), float(lev.Xt.min()))
    mon["min_Yt"] = min(mon.get("min_Yt", np.inf), float(lev.Yt.min()))
    mon["min_den"] = min(mon.get("min_den", np.inf), float(min(dx.min(), dy.min())))
    mon["sup_W"] = max(mon.get("sup_W", 0.0), float(np.abs(lev.Wt).max()))
    if lev.t > 0:
        lx, ly = char_speeds(lev.t, lev.c, co.f, co.g, lev.Xt, lev.Yt)
        ratio = float(max(np.abs(lx).max(), np.abs(ly).max()) / lev.t**2)
        mon["max_speed_ratio"] = max(mon.get("max_speed_ratio", 0.0), ratio)
    mon["max_closure"] = max(mon.get("max_closure", 0.0),
                             float(np.abs(lev.Xt - lev.Yt - 2 * lev.t * lev.Wt).max()))
    if mon["min_Xt"] <= 0 or mon["min_Yt"] <= 0:
        raise MonitorViolation("positivity", f"Xt or Yt <= 0 at t={lev.t:.6g}")
    if mon["min_den"] <= 0:
        raise DenominatorLoss(f"t={lev.t:.6g}")


def march(bd: BoundaryData, dom: DomainOmega, grid: GridSpec = GridSpec(), w_bound: float = np.inf) -> HodographField:
    gas = bd.gas
    dz = grid.dz if grid.dz > 0 else abs(float(dom.z_bar_of_t(0.0))) / grid.n_z
    if dz <= 0:
        raise ValueError("dz must be positive")
    n_lev = int(round(dom.delta / grid.dt))
    if n_lev < 2:
        raise ValueError("dt too large for the domain height")
    ts = dom.delta - grid.dt * np.arange(n_lev)
    stepper = _Stepper(gas, dom, bd.phi_M, bd.window, grid.tau_rtol, grid.threads)
    top = dom.curve.at_t([ts[0]])
    lev = Level(t=float(ts[0]), z=top["z"].copy(), Xt=top["X"], Yt=top["Y"], Wt=top["W"],
                tau=top["tau"], c=top["c"], foot_z=np.array([np.nan]), foot_t=np.array([ts[0]]),
                foot_cross=np.array([True]))
    mon = {}
    _check_level(lev, gas, dom, mon)
    levels = [lev]
    pool = ThreadPoolExecutor(grid.threads) if grid.threads > 1 else None
    try:
        for t_new in ts[1:]:
            z = level_nodes(float(t_new), dom, dz)
            lev = stepper.step(lev, float(t_new), z, pool)
            _check_level(lev, gas, dom, mon)
            if mon["sup_W"] > w_bound:
                raise MonitorViolation("W_bound", f"sup|W|={mon['sup_W']:.4g} > {w_bound}")
            levels.append(lev)
    finally:
        if pool is not None:
            pool.shutdown()
    mon["speed_bound_ok"] = mon["max_speed_ratio"] <= dom.M_tilde
    sonic = _sonic_trace(levels, dom, dz, bd, stepper)
    return HodographField(levels=levels, sonic=sonic, dt=grid.dt, dz=dz, domain=dom, phi_M=bd.phi_M,
                          gas=gas, monitors=mon)


def corner_extrapolate(z, l1, l2, a1, a2, corner_value, rule):
    """Extrapolate level data to t = 0 at nodes z via rule(v1, v2).

    Nodes right of the last level's edge have no data on that level; there
    the result is linear in z between the edge's extrapolation and the exact
    corner value at z = 0.
    """
    z_edge = l1.z[-1]
    inside = z <= z_edge
    out = np.empty_like(z)
    out[inside] = rule(np.interp(z[inside], l1.z, a1), np.interp(z[inside], l2.z, a2))
    out[-1] = corner_value
    corner = ~inside
    corner[-1] = False
    if corner.any():
        v_edge = rule(a1[-1], np.interp(z_edge, l2.z, a2))
        out[corner] = np.interp(z[corner], [z_edge, z[-1]], [v_edge, corner_value])
    return out


def _sonic_trace(levels, dom, dz, bd, stepper):
    l1, l2 = levels[-1], levels[-2]
    z = level_nodes(0.0, dom, dz)
    z[-1] = 0.0
    m = dom.curve.at_t([0.0])
    ext = {}
    for k, mk in (("Xt", "X"), ("Yt", "Y"), ("Wt", "W")):
        # linear in t through (t1, v1), (t2, v2), evaluated at t = 0
        ext[k] = corner_extrapolate(z, l1, l2, getattr(l1, k), getattr(l2, k), m[mk][0],
                                    lambda v1, v2: v1 - l1.t * (v2 - v1) / (l2.t - l1.t))
    tau = solve_tau_array(z, 0.0, bd.phi_M, bd.gas, bd.window, tau0=np.interp(z, l1.z, l1.tau))
    # footpoints of the Xt family, used by the inversion's last step
    zx, tx, cx = stepper.feet(l1, z[:-1], 0.0, 0)
    return SonicTrace(z=z, Xt=ext["Xt"], Yt=ext["Yt"], Wt=ext["Wt"], tau=tau, c=sound_speed(tau, bd.gas),
                      foot_z=np.append(zx, np.nan), foot_t=np.append(tx, 0.0),
                      foot_cross=np.append(cx, True))


def regularity_monitors(field: HodographField, seed: int = 0) -> dict:
    """Diagnostics of the a-priori bounds; nothing here raises.

    x_window: X = 1/Xt and Y = 1/Yt against [m0/(2s), 2 M0 s] with s the
    A-factor span; p_fit: exponent p in max_z |d_z Xt| ~ t^(-p) over the
    levels; sup_W; holder_X / holder_W: Hölder fits (alpha, C, R^2) of Xt
    and Wt along the extrapolated sonic trace.
    """
    from .verify import FitSkipped, holder_estimate

    dom = field.domain
    X = np.concatenate([1 / lv.Xt for lv in field.levels])
    Y = np.concatenate([1 / lv.Yt for lv in field.levels])
    lo, hi = dom.m0 / (2 * dom.A_hat), 2 * dom.M0 * dom.A_hat
    rep = {"X_min": float(X.min()), "X_max": float(X.max()), "Y_min": float(Y.min()),
           "Y_max": float(Y.max()), "window": (float(lo), float(hi))}
    rep["window_ok"] = bool(min(X.min(), Y.min()) >= lo and max(X.max(), Y.max()) <= hi)
    ts, gmax = [], []
    for lv in field.levels:
        if lv.z.size >= 3:
            ts.append(lv.t)
            gmax.append(np.abs(np.gradient(lv.Xt, lv.z)).max())
    if len(ts) >= 3:
        slope, _ = np.polyfit(np.log(ts), np.log(gmax), 1)
        rep["p_fit"] = float(-slope)
    else:
        rep["p_fit"] = None
    rep["sup_W"] = float(max(np.abs(lv.Wt).max() for lv in field.levels))
    so = field.sonic
    for name, vals in (("holder_X", so.Xt), ("holder_W", so.Wt)):
        try:
            rep[name] = holder_estimate(so.z, vals, seed=seed)
        except FitSkipped as exc:
            rep[name] = None
            rep[name + "_skipped"] = str(exc)
    return rep
