"""Map the hodograph solution back to the self-similar plane.

Along the Xt-transport characteristic (the minus characteristic of the
physical plane), with A = t f wbar Yt/(1 + t g Yt),

    d xi/dt    = A (t cos(theta) + wbar sin(theta))
    d eta/dt   = A (t sin(theta) - wbar cos(theta))
    d theta/dt = t f wbar (wbar^2 Yt / c - kappa t wbar)/(1 + t g Yt)

These are integrated with the same footpoints and Heun stages the solver
used, starting from the streamline and ending on the sonic line t = 0,
where the integrands vanish.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .angle_state import AngleState, from_angle_vars
from .gas_vdw import bernoulli_potential, kappa, sound_speed
from .hodograph_solver import CurveTable, HodographField, MonitorViolation, coefficients


@dataclass
class InversionMap:
    t: list
    z: list
    xi: list
    eta: list
    theta: list
    J: list
    sonic_xi: np.ndarray
    sonic_eta: np.ndarray
    sonic_theta: np.ndarray
    sonic_J: np.ndarray

    def flat(self, name):
        return np.concatenate(getattr(self, name))


def _inv_rhs(t, Yt, theta, tau, c, gas):
    co = coefficients(t, tau, c, gas)
    wb = np.sqrt(1 - t**2)
    A = t * co.f * wb * Yt / (1 + t * co.g * Yt)
    ct, st = np.cos(theta), np.sin(theta)
    return (A * (t * ct + wb * st), A * (t * st - wb * ct),
            t * co.f * wb * (wb**2 * Yt / c - co.kappa * t * wb) / (1 + t * co.g * Yt))


def jacobian(t, Xt, Yt, c, tau, gas):
    """phi_xi wbar_eta - phi_eta wbar_xi = q d_n wbar = (c/wbar)(1 + kappa wbar^2)(X - Y)/2."""
    wb = np.sqrt(1 - np.asarray(t) ** 2)
    k = kappa(tau, gas)
    return c / wb * (1 + k * wb**2) * (1 / Xt + 1 / Yt) / 2


def integrate_inversion(field: HodographField, table: CurveTable | None = None) -> InversionMap:
    gas = field.gas
    dom = field.domain
    if table is None:
        table = CurveTable(dom.curve, dom.delta)
    lv0 = field.levels[0]
    b0 = dom.curve.at_t([lv0.t])
    xs, es, ths, Js = [b0["xi"]], [b0["eta"]], [b0["theta"]], []
    Js.append(jacobian(lv0.t, lv0.Xt, lv0.Yt, lv0.c, lv0.tau, gas))
    prev = lv0
    for lev in field.levels[1:]:
        xi, eta, th = _inv_step(prev, lev, lev.t, xs[-1], es[-1], ths[-1], table, dom, gas)
        xs.append(xi)
        es.append(eta)
        ths.append(th)
        Js.append(jacobian(lev.t, lev.Xt, lev.Yt, lev.c, lev.tau, gas))
        prev = lev
    so = field.sonic
    sx, se, st = _inv_step(prev, so, 0.0, xs[-1], es[-1], ths[-1], table, dom, gas)
    sJ = jacobian(0.0, so.Xt, so.Yt, so.c, so.tau, gas)
    return InversionMap(t=[lv.t for lv in field.levels], z=[lv.z for lv in field.levels], xi=xs, eta=es,
                        theta=ths, J=Js, sonic_xi=sx, sonic_eta=se, sonic_theta=st, sonic_J=sJ)


def _inv_step(prev, lev, t_new, xi_old, eta_old, th_old, table, dom, gas):
    """One Heun step of the map ODEs from level prev to lev along the solver's Xt footpoints."""
    n = lev.z.size
    zf, tf, cr = lev.foot_z[:-1], lev.foot_t[:-1], lev.foot_cross[:-1]
    xi_f = np.interp(zf, prev.z, xi_old)
    eta_f = np.interp(zf, prev.z, eta_old)
    th_f = np.interp(zf, prev.z, th_old)
    Y_f = np.interp(zf, prev.z, prev.Yt)
    tau_f = np.interp(zf, prev.z, prev.tau)
    c_f = np.interp(zf, prev.z, prev.c)
    if cr.any():
        if np.any(tf[cr] > dom.delta + 1e-12):
            raise MonitorViolation("domain", "characteristic fails to reach the boundary")
        bt = table.at_t(tf[cr])
        xi_f[cr], eta_f[cr], th_f[cr] = bt["xi"], bt["eta"], bt["theta"]
        Y_f[cr], tau_f[cr], c_f[cr] = bt["Y"], bt["tau"], bt["c"]
    h = tf - t_new
    k0 = _inv_rhs(tf, Y_f, th_f, tau_f, c_f, gas)
    th_p = th_f - h * k0[2]
    sl = slice(0, n - 1)
    k1 = _inv_rhs(t_new, lev.Yt[sl], th_p, lev.tau[sl], lev.c[sl], gas)
    xi = xi_f - 0.5 * h * (k0[0] + k1[0])
    eta = eta_f - 0.5 * h * (k0[1] + k1[1])
    th = th_f - 0.5 * h * (k0[2] + k1[2])
    bn = dom.curve.at_t([t_new])
    return np.append(xi, bn["xi"]), np.append(eta, bn["eta"]), np.append(th, bn["theta"])


# -- reconstruction --------------------------------------------------------

TAGS = ("interior", "LM", "MN", "NO")


@dataclass
class PatchSolution:
    xi: np.ndarray
    eta: np.ndarray
    u: np.ndarray
    v: np.ndarray
    tau: np.ndarray
    c: np.ndarray
    theta: np.ndarray
    wbar: np.ndarray
    tag: np.ndarray
    z: np.ndarray
    t: np.ndarray
    level: np.ndarray
    phi_M: float

    def bernoulli_residual(self, gas):
        U, V = self.u - self.xi, self.v - self.eta
        phi = self.z + self.phi_M
        return (U**2 + V**2) / 2 + bernoulli_potential(self.tau, gas) + phi

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["xi", "eta", "u", "v", "tau", "c", "theta", "wbar", "tag"])
            for i in range(self.xi.size):
                wr.writerow([repr(float(a[i])) for a in (self.xi, self.eta, self.u, self.v, self.tau,
                                                          self.c, self.theta, self.wbar)] + [TAGS[self.tag[i]]])


def check_injectivity(xi, eta, tol: float = 1e-9):
    """Spatial hash: no two distinct nodes closer than tol."""
    keys = {}
    cell = tol
    for i, (a, b) in enumerate(zip(xi, eta)):
        ka, kb = int(np.floor(a / cell)), int(np.floor(b / cell))
        for da in (-1, 0, 1):
            for db in (-1, 0, 1):
                for j in keys.get((ka + da, kb + db), ()):
                    if np.hypot(xi[j] - a, eta[j] - b) < tol:
                        return False, (j, i)
        keys.setdefault((ka, kb), []).append(i)
    return True, None


def reconstruct(imap: InversionMap, field: HodographField, no_curve=None) -> PatchSolution:
    cols = {k: [] for k in ("xi", "eta", "tau", "c", "theta", "t", "z", "tag", "level")}
    for k, lev in enumerate(field.levels):
        n = lev.z.size
        tag = np.zeros(n, dtype=int)
        tag[-1] = 1
        for key, arr in (("xi", imap.xi[k]), ("eta", imap.eta[k]), ("tau", lev.tau), ("c", lev.c),
                         ("theta", imap.theta[k]), ("z", lev.z)):
            cols[key].append(np.asarray(arr, dtype=float))
        cols["t"].append(np.full(n, lev.t))
        cols["tag"].append(tag)
        cols["level"].append(np.full(n, k))
    so = field.sonic
    n = so.z.size
    tag = np.full(n, 2)
    tag[-1] = 1
    for key, arr in (("xi", imap.sonic_xi), ("eta", imap.sonic_eta), ("tau", so.tau), ("c", so.c),
                     ("theta", imap.sonic_theta), ("z", so.z)):
        cols[key].append(np.asarray(arr, dtype=float))
    cols["t"].append(np.zeros(n))
    cols["tag"].append(tag)
    cols["level"].append(np.full(n, len(field.levels)))
    d = {k: np.concatenate(v) for k, v in cols.items()}
    if no_curve is not None:
        d["tag"] = np.where((d["tag"] == 0) & _near_curve(d["z"], d["t"], no_curve, field.dz), 3, d["tag"])
    wbar = np.sqrt(1 - d["t"] ** 2)
    u, v = from_angle_vars(d["xi"], d["eta"], AngleState(d["c"], d["theta"], wbar))
    return PatchSolution(xi=d["xi"], eta=d["eta"], u=u, v=v, tau=d["tau"], c=d["c"], theta=d["theta"],
                         wbar=wbar, tag=d["tag"], z=d["z"], t=d["t"], level=d["level"], phi_M=field.phi_M)


def _near_curve(z, t, curve, dz):
    zc = np.interp(t, curve["t"][::-1], curve["z"][::-1])
    return np.abs(z - zc) <= 0.5 * dz


# -- closing characteristic and sonic curve --------------------------------

def characteristic_NO(field: HodographField, imap: InversionMap, t_start=None, n_sub: int = 4):
    """Plus characteristic dz/dt = Ly from the boundary point at t_start down to t = 0.

    Integrated with Heun on the solved field (Xt interpolated bilinearly).
    t_start defaults to the height where the same characteristic launched
    upward from the bottom-left corner of the domain meets the boundary.
    Returns a dict of arrays (t, z, xi, eta, slope_err).
    """
    gas = field.gas
    dom = field.domain
    levels = field.levels
    ts = np.array([lv.t for lv in levels])

    def state(z, t):
        # linear interpolation between the two levels bracketing t
        if t <= ts[-1]:
            lo = levels[-1]
            so = field.sonic
            w = t / lo.t
            Xt = w * np.interp(z, lo.z, lo.Xt) + (1 - w) * np.interp(z, so.z, so.Xt)
            tau = w * np.interp(z, lo.z, lo.tau) + (1 - w) * np.interp(z, so.z, so.tau)
            return Xt, tau
        k = int(np.searchsorted(-ts, -t))
        k = min(max(k, 1), len(levels) - 1)
        a, b = levels[k - 1], levels[k]
        w = (t - b.t) / (a.t - b.t)
        Xt = w * np.interp(z, a.z, a.Xt) + (1 - w) * np.interp(z, b.z, b.Xt)
        tau = w * np.interp(z, a.z, a.tau) + (1 - w) * np.interp(z, b.z, b.tau)
        return Xt, tau

    def speed(z, t):
        Xt, tau = state(z, t)
        c = sound_speed(tau, gas)
        co = coefficients(t, tau, c, gas)
        return -c * co.f * t**2 * Xt / (1 - t * co.g * Xt)

    h = field.dt / n_sub
    zl = dom.z_bar_of_t

    def descend(t0):
        t, z = t0, float(dom.z_tilde_of_t(t0)[0])
        pt, pz = [t], [z]
        while t > 1e-15:
            hh = min(h, t)
            s0 = speed(z, t)
            s1 = speed(z - hh * s0, t - hh)
            z, t = z - 0.5 * hh * (s0 + s1), t - hh
            pt.append(t)
            pz.append(z)
        return pt, pz

    if t_start is None:
        # the characteristic landing on the bottom-left corner N'
        z_corner = float(zl(0.0))
        miss = lambda t0: descend(t0)[1][-1] - z_corner
        lo, hi = 2 * h, dom.delta
        if miss(lo) * miss(hi) > 0:
            raise MonitorViolation("domain", "no boundary point reaches the sonic corner")
        t_start = brentq(miss, lo, hi, xtol=1e-14, rtol=1e-14)
    path_t, path_z = descend(t_start)
    tol = 1e-9 * abs(float(zl(0.0)))
    if any(z < float(zl(t)) - tol for t, z in zip(path_t, path_z)):
        raise MonitorViolation("domain", "closing characteristic leaves the domain")
    path_t, path_z = np.array(path_t), np.array(path_z)
    m = _map_points(field, imap, path_z, path_t)
    return dict(t=path_t, z=path_z, xi=m["xi"], eta=m["eta"], theta=m["theta"], t_start=t_start)


def _map_points(field, imap, zq, tq, table=None):
    """(xi, eta, theta) at arbitrary hodograph points, linear in z and t.

    Between two levels the upper one ends at z_tilde(t_upper); points right
    of that edge are interpolated between the lower level and the boundary
    image at the height t_b where z_tilde(t_b) = z.
    """
    dom = field.domain
    if table is None:
        table = CurveTable(dom.curve, dom.delta)
    ts = np.array(imap.t + [0.0])
    zs = imap.z + [field.sonic.z]
    cols = {"xi": imap.xi + [imap.sonic_xi], "eta": imap.eta + [imap.sonic_eta],
            "theta": imap.theta + [imap.sonic_theta]}
    out = {k: np.empty(len(zq)) for k in cols}
    for i, (z, t) in enumerate(zip(zq, tq)):
        k = min(max(int(np.searchsorted(-ts, -t)), 1), len(ts) - 1)
        lo = {key: np.interp(z, zs[k], v[k]) for key, v in cols.items()}
        if z <= zs[k - 1][-1]:
            t_hi = ts[k - 1]
            hi = {key: np.interp(z, zs[k - 1], v[k - 1]) for key, v in cols.items()}
        else:
            t_hi = brentq(lambda s: float(table(s, "z")) - z, ts[k], ts[k - 1], xtol=1e-15)
            hi = {key: float(table(t_hi, key)) for key in cols}
        w = (t - ts[k]) / (t_hi - ts[k])
        for key in cols:
            out[key][i] = w * hi[key] + (1 - w) * lo[key]
    return out


@dataclass
class SonicCurve:
    xi: np.ndarray
    eta: np.ndarray
    tangent_angle: np.ndarray
    grad_wbar_sq: np.ndarray
    holder_fit: tuple | None

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["xi", "eta", "tangent_angle"])
            for row in zip(self.xi, self.eta, self.tangent_angle):
                wr.writerow([repr(float(v)) for v in row])


def extract_sonic_curve(sol: PatchSolution, field: HodographField, seed: int = 0) -> SonicCurve:
    """Sonic polyline ordered from M toward N, with tangent angles and |grad wbar|^2."""
    from .verify import holder_estimate
    m = sol.tag == 2
    m |= (sol.t == 0) & (sol.tag == 1)
    idx = np.nonzero(m)[0]
    order = np.argsort(-sol.z[idx])
    idx = idx[order]
    xi, eta = sol.xi[idx], sol.eta[idx]
    dxi, deta = np.gradient(xi), np.gradient(eta)
    ang = np.arctan2(deta, dxi)
    # |grad wbar|^2 on t = 0: wbar_n from the sonic trace, (1+kappa)(X - Y)/2
    so = field.sonic
    k = kappa(so.tau, field.gas)
    gn = ((1 + k) * (1 / so.Xt + 1 / so.Yt) / 2)[::-1]
    fit = None
    if idx.size >= 8:
        s = np.concatenate([[0.0], np.cumsum(np.hypot(np.diff(xi), np.diff(eta)))])
        try:
            fit = holder_estimate(s, np.unwrap(ang), seed=seed)
        except ValueError:
            fit = None
    return SonicCurve(xi=xi, eta=eta, tangent_angle=ang, grad_wbar_sq=gn**2, holder_fit=fit)


def slope_error_along(curve):
    """Inclination error |atan(d eta/d xi) - (theta + omega)| (mod pi) along a plus characteristic.

    Compared as angles since the slope itself blows up where the curve turns
    vertical.  The two stencils touching the endpoints are dropped.
    """
    xi, eta, t = curve["xi"], curve["eta"], curve["t"]
    ang = np.arctan2(np.gradient(eta), np.gradient(xi))
    th = curve["theta"]
    alpha = th + np.arcsin(np.sqrt(1 - t**2))
    err = np.abs((ang - alpha + np.pi / 2) % np.pi - np.pi / 2)
    return err[2:-2]

