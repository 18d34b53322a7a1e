"""Verification harness: PDE residuals, Hölder fits, convergence orders, reports."""
from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import gas_vdw as gv
from .angle_state import decomposition_residuals, eigenvalues, quadratic_residual, residual_stats
from .boundary import build_boundary, solve_compatibility
from .gas_vdw import GasParams, IdealGasClosedForm
from .hodograph_solver import GridSpec, build_domain, coefficients, march, split_rhs, unsplit_rhs
from .inversion import check_injectivity, slope_error_along
from .pipeline import run_pipeline, write_artifacts

SCHEMA_VERSION = "1.0"


class FitSkipped(ValueError):
    pass


@dataclass
class Check:
    name: str
    value: float
    tolerance: float
    passed: bool
    comparison: str = "<="
    mandatory: bool = True
    note: str = ""


@dataclass
class VerificationReport:
    checks: list = field(default_factory=list)
    convergence: list = field(default_factory=list)
    info: dict = field(default_factory=dict)

    def add(self, name, value, tolerance, comparison="<=", mandatory=True, note=""):
        value = float(value)
        ok = {"<=": value <= tolerance, ">=": value >= tolerance, "<": value < tolerance,
              ">": value > tolerance}[comparison]
        if any(c.name == name for c in self.checks):
            raise ValueError(f"duplicate check {name}")
        self.checks.append(Check(name, value, float(tolerance), bool(ok), comparison, mandatory, note))
        return ok

    def extend(self, other: "VerificationReport"):
        for c in other.checks:
            if any(d.name == c.name for d in self.checks):
                raise ValueError(f"duplicate check {c.name}")
            self.checks.append(c)
        self.convergence += other.convergence
        self.info.update(other.info)

    def get(self, name) -> Check:
        return next(c for c in self.checks if c.name == name)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if c.mandatory)

    @property
    def failed(self) -> list:
        return [c.name for c in self.checks if c.mandatory and not c.passed]

    def to_dict(self):
        return {"schema_version": SCHEMA_VERSION, "passed": self.passed,
                "checks": [asdict(c) for c in self.checks], "convergence": self.convergence,
                "info": self.info}

    def to_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True, default=_jsonable)
            fh.write("\n")


def _jsonable(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(type(x))


# -- Hölder exponent -------------------------------------------------------

def holder_estimate(positions, values, n_pairs: int = 10_000, n_lags: int = 24, seed: int = 0,
                    min_samples: int = 32, min_decades: float = 1.5):
    """Fit |dv| <= C |dx|^alpha from the upper envelope of pair increments.

    Samples are sorted by position and paired at log-spaced index lags, so
    every scale sees every base point (random pairs would almost never hit
    the point where the exponent is attained).  At most n_pairs pairs are
    used; lags over budget are subsampled with a seeded RNG.  For each lag
    the largest increment is kept and log|dv| is regressed on log|dx|.
    Returns (alpha, C, R^2).
    """
    x = np.asarray(positions, dtype=float)
    v = np.asarray(values, dtype=float)
    if x.size < min_samples:
        raise FitSkipped(f"need at least {min_samples} samples, got {x.size}")
    order = np.argsort(x, kind="stable")
    x, v = x[order], v[order]
    n = x.size
    if np.all(v == v[0]):
        raise FitSkipped("all increments vanish")
    span = x[-1] - x[0]
    lags = np.unique(np.rint(np.geomspace(1, max(n // 2, 1), n_lags)).astype(int))
    budget = max(n_pairs // lags.size, 1)
    rng = np.random.default_rng(seed)
    xs, ys = [], []
    for L in lags:
        i = np.arange(n - L)
        if i.size > budget:
            i = np.sort(rng.choice(i, budget, replace=False))
        dx = x[i + L] - x[i]
        dv = np.abs(v[i + L] - v[i])
        ok = (dx > 0) & (dx <= 0.5 * span)
        if not ok.any() or dv[ok].max() <= 0:
            continue
        m = np.argmax(np.where(ok, dv, -1.0))
        xs.append(np.log10(dx[m]))
        ys.append(np.log10(dv[m]))
    xs, ys = np.array(xs), np.array(ys)
    if xs.size < 3:
        raise FitSkipped("too few separation scales with nonzero increments")
    if xs.max() - xs.min() < min_decades:
        raise FitSkipped(f"separations span {xs.max() - xs.min():.2f} decades < {min_decades}")
    A = np.vstack([xs, np.ones_like(xs)]).T
    (alpha, c0), *_ = np.linalg.lstsq(A, ys, rcond=None)
    pred = A @ np.array([alpha, c0])
    ss = np.sum((ys - ys.mean()) ** 2)
    r2 = 1 - np.sum((ys - pred) ** 2) / ss if ss > 0 else 1.0
    return float(alpha), float(10**c0), float(r2)


def convergence_order(coarse, fine, ratio: float = 2.0):
    if fine <= 0:
        return np.inf
    return float(np.log(coarse / fine) / np.log(ratio))


# -- derivatives on the hodograph grid -------------------------------------

class HodographGrid:
    """Structured (level, j) indexing of patch nodes with z = -j dz.

    Derivatives in (xi, eta) come from central differences in (z, t) and
    the chain rule through the computed map (xi, eta)(z, t).
    """

    def __init__(self, sol, dz: float, dt: float):
        self.sol, self.dz, self.dt = sol, dz, dt
        j = -sol.z / dz
        jr = np.rint(j)
        on = np.abs(j - jr) < 1e-6
        self.index = {}
        for i in np.nonzero(on)[0]:
            self.index[(int(sol.level[i]), int(jr[i]))] = i
        rows = []
        for (k, jj), i in self.index.items():
            nb = [self.index.get((k, jj - 1)), self.index.get((k, jj + 1)),
                  self.index.get((k - 1, jj)), self.index.get((k + 1, jj))]
            if all(x is not None for x in nb):
                rows.append([i] + nb)
        rows.sort()
        self.nodes = np.array([r[0] for r in rows], dtype=int)
        self.nb = np.array([r[1:] for r in rows], dtype=int).reshape(-1, 4)
        xz, xt = self._dzt(sol.xi)
        ez, et = self._dzt(sol.eta)
        self.det = xz * et - xt * ez
        self._m = (xz, xt, ez, et)

    def _dzt(self, F):
        F = np.asarray(F)
        up, dn, hi, lo = (F[self.nb[:, k]] for k in range(4))
        return (up - dn) / (2 * self.dz), (hi - lo) / (2 * self.dt)

    def grad(self, F):
        """(F_xi, F_eta) at self.nodes for a node field F."""
        Fz, Ft = self._dzt(F)
        xz, xt, ez, et = self._m
        return (Fz * et - Ft * ez) / self.det, (Ft * xz - Fz * xt) / self.det

    def restrict(self, F):
        return np.asarray(F)[self.nodes]


def run_residual_suite(sol, gas: GasParams, dz: float, dt: float, t_min: float = 0.0) -> dict:
    """Residual statistics on interior nodes with t >= t_min.

    Returns {name: (max, l2)} for the first-order angle system and the other
    decomposition identities, irrotationality, the continuity form of the
    potential equation and Bernoulli's law.
    """
    g = HodographGrid(sol, dz, dt)
    mask = g.restrict(sol.t) >= t_min
    R = g.restrict
    phi = sol.z + sol.phi_M
    full = {"c": sol.c, "theta": sol.theta, "wbar": sol.wbar, "phi": phi,
            "omega": np.arcsin(np.clip(sol.wbar, -1, 1))}
    grads = {k: g.grad(v) for k, v in full.items()}
    res = decomposition_residuals(R(sol.c), R(sol.theta), R(sol.wbar), R(sol.tau), R(phi), gas,
                                  grads=grads, mask=mask)
    ux, uy = g.grad(sol.u)
    vx, vy = g.grad(sol.v)
    res["irrotational"] = residual_stats(uy - vx, mask)
    U, V = R(sol.u) - R(sol.xi), R(sol.v) - R(sol.eta)
    c2 = R(sol.c) ** 2
    res["continuity"] = residual_stats((c2 - U**2) * ux - U * V * (uy + vx) + (c2 - V**2) * vy, mask)
    # Bernoulli holds pointwise, so it is checked on every node
    res["bernoulli"] = residual_stats(sol.bernoulli_residual(gas))
    return res


# -- thresholds ------------------------------------------------------------

def load_thresholds(overrides: dict | None = None) -> dict:
    """Frozen defaults from defaults.toml, updated by config overrides."""
    import sys
    if sys.version_info >= (3, 11):
        import tomllib
    else:
        import tomli as tomllib
    from importlib.resources import files

    raw = tomllib.loads(files("sonicpatch").joinpath("defaults.toml").read_text())
    th = dict(raw["thresholds"])
    th["version"] = raw["version"]
    for k, v in (overrides or {}).items():
        if k not in th:
            raise KeyError(f"unknown monitor threshold {k!r}")
        th[k] = float(v)
    return th


class _Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0


# -- acceptance checks -----------------------------------------------------
# Each function returns a VerificationReport holding the checks of one
# acceptance item; acceptance_suite() assembles all of them.

def check_thermodynamics(gas: GasParams, window, th, seed=0, n=1000) -> VerificationReport:
    rep = VerificationReport()
    with _Timer() as tm:
        rng = np.random.default_rng(seed)
        tau = np.exp(rng.uniform(np.log(window.tau_min), np.log(window.tau_max), n))
        p1, _ = gv.pressure_derivs(tau, gas)
        c2 = np.asarray(gv.sound_speed(tau, gas)) ** 2
        rep.add("thermo_sound_speed", np.max(np.abs(c2 + tau**2 * p1) / c2), th["thermo_sound_speed"])
        c2x = np.asarray(gv.sound_speed_explicit(tau, gas)) ** 2
        rep.info["thermo_sound_speed_explicit"] = float(np.max(np.abs(c2x - c2) / c2))
        ideal = GasParams(gas.K, gas.gamma, 0.0, 0.0)
        kid = np.asarray(gv.kappa(tau, ideal))
        rep.add("thermo_kappa_ideal", np.max(np.abs(kid - 2 / gas.gamma)), th["thermo_kappa_ideal"])
        # fourth-order central difference of kappa
        h = 1e-3 * (tau - gas.b)
        k = lambda x: np.asarray(gv.kappa(x, gas))
        fd = (-k(tau + 2 * h) + 8 * k(tau + h) - 8 * k(tau - h) + k(tau - 2 * h)) / (12 * h)
        kp = np.asarray(gv.kappa_prime(tau, gas))
        scale = np.abs(kp) + np.abs(k(tau)) / tau
        rep.add("thermo_kappa_prime_fd", np.max(np.abs(fd - kp) / scale), th["thermo_kappa_prime_fd"])
        # tau -> (z, t) -> tau through the Bernoulli closure
        t = rng.uniform(0.0, 0.9, n)
        phi_M = -1.0
        tau_in = np.exp(rng.uniform(np.log(window.tau_min), np.log(window.tau_max), n))
        c2i = np.asarray(gv.sound_speed(tau_in, gas)) ** 2
        # z such that -z - phi_M - E(tau_in) = c^2/(2(1 - t^2))
        z = -(c2i / (2 * (1 - t**2)) + np.asarray(gv.bernoulli_potential(tau_in, gas)) + phi_M)
        tau_out = gv.solve_tau_array(z, t, phi_M, gas, window)
        rep.add("thermo_bernoulli_roundtrip", np.max(np.abs(tau_out - tau_in) / tau_in),
                th["thermo_bernoulli_roundtrip"])
    rep.add("thermo_runtime_s", tm.elapsed, th["thermo_runtime_s"])
    return rep


def check_eigenstructure(th, seed=0, n=10_000) -> VerificationReport:
    rep = VerificationReport()
    with _Timer() as tm:
        rng = np.random.default_rng(seed)
        c = rng.uniform(0.5, 5.0, n)
        q = c / rng.uniform(0.05, 0.99, n)        # supersonic: q > c
        theta = rng.uniform(-np.pi, np.pi, n)
        U, V = q * np.cos(theta), q * np.sin(theta)
        keep = np.abs(U**2 - c**2) > 1e-3 * c**2  # stay away from vertical characteristics
        U, V, c, theta, q = U[keep], V[keep], c[keep], theta[keep], q[keep]
        lam = eigenvalues(U, V, c)
        scale = lambda l: (np.abs(c**2 - U**2) * l**2 + 2 * np.abs(U * V * l) + np.abs(c**2 - V**2))
        res = max(np.max(np.abs(quadratic_residual(U, V, c, l)) / scale(l))
                  for l in (lam.lambda_plus, lam.lambda_minus))
        rep.add("eig_quadratic", res, th["eig_quadratic"])
        om = np.arcsin(c / q)
        ta, tb = np.tan(theta + om), np.tan(theta - om)
        # {lambda+, lambda-} = {tan(theta + omega), tan(theta - omega)} as sets
        d1 = np.maximum(np.abs(lam.lambda_plus - ta) / np.maximum(1, np.abs(ta)),
                        np.abs(lam.lambda_minus - tb) / np.maximum(1, np.abs(tb)))
        d2 = np.maximum(np.abs(lam.lambda_plus - tb) / np.maximum(1, np.abs(tb)),
                        np.abs(lam.lambda_minus - ta) / np.maximum(1, np.abs(ta)))
        rep.add("eig_tan", np.max(np.minimum(d1, d2)), th["eig_tan"])
        rep.info["eig_states"] = int(keep.sum())
    rep.add("eig_runtime_s", tm.elapsed, th["eig_runtime_s"])
    return rep


def check_boundary(cfg, th, n_order=(16, 32, 64)) -> VerificationReport:
    rep = VerificationReport()
    with _Timer() as tm:
        window = cfg.tau_window()
        spec = cfg.resolved_streamline(window)
        bd = build_boundary(spec, cfg.gas, window, cfg.grid.n_boundary, cfg.window.positivity_fraction)
        t = bd.t_of_xi
        ident = np.abs(bd.a_hat + bd.b_hat - 2 * t * bd.d_hat) / np.maximum(1, np.abs(bd.d_hat))
        rep.add("boundary_identity", ident.max(), th["boundary_identity"])
        # three nested grids, uniform in t, compared on the coarse nodes
        sols = []
        tQ = float(spec.t_of_xi(bd.xiQ))
        for n in n_order:
            xs = spec.xi_of_t(np.linspace(tQ, 0.0, n + 1))
            xs[0], xs[-1] = bd.xiQ, spec.xi2
            sols.append(solve_compatibility(spec, cfg.gas, window, xs)[1])
        r = n_order[1] // n_order[0]
        e1 = np.max(np.abs(sols[0] - sols[1][::r]))
        e2 = np.max(np.abs(sols[1][::r] - sols[2][::r * r]))
        order = np.log(e1 / e2) / np.log(r)
        rep.convergence.append({"quantity": "compatibility tau_hat", "grids": list(n_order),
                                "differences": [float(e1), float(e2)], "order": float(order)})
        rep.add("compat_order", order, th["compat_order_min"], ">=")
    rep.add("boundary_runtime_s", tm.elapsed, th["boundary_runtime_s"])
    return rep


def check_transcription(cfg, th, seed=0, n=1000) -> VerificationReport:
    """Split coefficients H_ij against the unsplit right sides at random states."""
    rep = VerificationReport()
    with _Timer() as tm:
        rng = np.random.default_rng(seed)
        window = cfg.tau_window()
        tau = np.exp(rng.uniform(np.log(window.tau_min), np.log(min(window.tau_max, 10 * window.tau_min)), n))
        c = np.asarray(gv.sound_speed(tau, cfg.gas))
        t = rng.uniform(1e-3, 0.5, n)
        Xt = rng.uniform(0.2, 5.0, n)
        Yt = rng.uniform(0.2, 5.0, n)
        co = coefficients(t, tau, c, cfg.gas)
        ok = (1 + t * co.g * Yt > 0.1) & (1 - t * co.g * Xt > 0.1)
        t, tau, c, Xt, Yt = t[ok], tau[ok], c[ok], Xt[ok], Yt[ok]
        Wt = (Xt - Yt) / (2 * t)
        co = coefficients(t, tau, c, cfg.gas, Xt, Yt, Wt)
        sx, sy = split_rhs(t, co, Wt)
        ux, uy = unsplit_rhs(t, tau, c, cfg.gas, Xt, Yt)
        rel = np.maximum(np.abs(sx - ux) / np.maximum(np.abs(ux), 1e-12 + np.abs(Wt)),
                         np.abs(sy - uy) / np.maximum(np.abs(uy), 1e-12 + np.abs(Wt)))
        rep.add("transcription_rel", rel.max(), th["transcription_rel"])
        rep.info["transcription_states"] = int(ok.sum())
    rep.add("transcription_runtime_s", tm.elapsed, th["transcription_runtime_s"])
    return rep


def check_reference_run(res, elapsed, th) -> VerificationReport:
    rep = VerificationReport()
    mon = res.field.monitors
    rep.add("ref_positivity", min(mon["min_Xt"], mon["min_Yt"]), 0.0, ">")
    rep.add("ref_denominators", mon["min_den"], 0.0, ">")
    rep.add("ref_speed_bound", mon["max_speed_ratio"] / res.domain.M_tilde, 1.0, "<=",
            note="characteristic speeds within the domain's slope bound; footpoint containment is asserted while marching")
    rep.add("ref_closure", mon["max_closure"], th["closure_projection"])
    J = np.concatenate(res.imap.J + [res.imap.sonic_J])
    same_sign = bool(np.all(J > 0) or np.all(J < 0))
    rep.add("ref_jacobian_strict_sign", np.abs(J).min() if same_sign else -1.0, 0.0, ">")
    rep.add("ref_jacobian_negative", J.max(), 0.0, "<", mandatory=False,
            note="J = q d_n wbar is positive with X > 0 > Y; kept as an informational check")
    inj, _ = check_injectivity(res.patch.xi, res.patch.eta)
    rep.add("ref_injective", float(inj), 1.0, ">=")
    rep.add("ref_patch_bernoulli", np.abs(res.patch.bernoulli_residual(res.config.gas)).max(),
            th["patch_bernoulli"])
    p = res.patch
    son = p.t == 0
    mach = np.abs(np.hypot(p.u - p.xi, p.v - p.eta)[son] - p.c[son]) / p.c[son]
    rep.add("ref_sonic_mach", mach.max(), th["sonic_mach"])
    rep.add("ref_runtime_s", elapsed, th["reference_runtime_s"])
    rep.info["monitors"] = dict(mon)
    rep.info["domain"] = res.domain.summary()
    rep.info["no_slope_error_max"] = float(slope_error_along(res.no_curve).max())
    return rep


def check_sonic_closure(cfg, th) -> VerificationReport:
    """|Xt - Yt| on the last level against C dt at dt and dt/2."""
    rep = VerificationReport()
    with _Timer() as tm:
        Cs = []
        for k in (1, 2):
            c2 = cfg.with_grid(dt=cfg.grid.dt / k, n_z=cfg.grid.n_z * k,
                               dz=cfg.grid.dz / k if cfg.grid.dz else 0.0)
            fld = _march_only(c2)
            last = fld.last
            Cs.append(np.abs(last.Xt - last.Yt).max() / fld.dt)
        drift = abs(Cs[1] / Cs[0] - 1)
        rep.info["closure_C"] = [float(c) for c in Cs]
        rep.add("closure_C_stability", drift, th["closure_C_stability"])
    rep.add("closure_runtime_s", tm.elapsed, th["closure_runtime_s"])
    return rep


def check_holder(res, th, seed=0) -> VerificationReport:
    rep = VerificationReport()
    with _Timer() as tm:
        x = np.linspace(-1, 1, 401)
        worst = 0.0
        for expo in (0.33, 0.5, 1.0):
            alpha, _, _ = holder_estimate(x, np.abs(x) ** expo, seed=seed)
            worst = max(worst, abs(alpha - expo))
        rep.add("holder_synthetic", worst, th["holder_synthetic_tol"])
        so = res.field.sonic
        alpha, C, r2 = holder_estimate(so.z, so.Xt, seed=seed)
        rep.add("holder_alpha", alpha, th["holder_alpha_min"], ">=")
        rep.add("holder_r2", r2, th["holder_r2_min"], ">=")
        rep.info["holder_fit_X"] = (alpha, C, r2)
        rep.info["holder_fit_W"] = res.regularity.get("holder_W")
        rep.info["sonic_curve_fit"] = res.sonic.holder_fit
    rep.add("holder_runtime_s", tm.elapsed, th["holder_runtime_s"])
    return rep


RESIDUAL_KEYS = ("system+", "system-", "irrotational", "bernoulli")


def check_residuals(cfg, th, res_coarse=None) -> VerificationReport:
    """Residual orders under joint (dt, dz) halving."""
    rep = VerificationReport()
    with _Timer() as tm:
        out = []
        for k in (1, 2):
            if k == 1 and res_coarse is not None:
                r = res_coarse
            else:
                r = run_pipeline(cfg.with_grid(dt=cfg.grid.dt / k, n_z=cfg.grid.n_z * k,
                                               dz=cfg.grid.dz / k if cfg.grid.dz else 0.0), threads=1)
            out.append(run_residual_suite(r.patch, cfg.gas, r.field.dz, r.field.dt))
        worst_order, worst_max = np.inf, 0.0
        for key in out[0]:
            m0, m1 = out[0][key][0], out[1][key][0]
            at_floor = m1 <= th["roundoff_floor"]
            order = np.inf if at_floor else convergence_order(m0, m1)
            rep.convergence.append({"quantity": key, "grids": ["h", "h/2"], "max": [m0, m1],
                                    "l2": [out[0][key][1], out[1][key][1]],
                                    "order": None if at_floor else order, "at_roundoff": bool(at_floor)})
            if key in RESIDUAL_KEYS:
                worst_order = min(worst_order, order)
                worst_max = max(worst_max, m1)
        rep.add("residual_order", worst_order, th["residual_order_min"], ">=",
                note="angle system, irrotationality and Bernoulli; residuals at round-off count as converged")
        rep.add("residual_max_fine", worst_max, th["residual_max"])
    rep.add("residual_runtime_s", tm.elapsed, th["residual_runtime_s"])
    return rep


def ideal_config(cfg):
    """The ideal-gas companion of a configuration: a = b = 0 and a grid fine enough for its shorter domain."""
    from dataclasses import replace
    return replace(cfg, gas=GasParams(cfg.gas.K, cfg.gas.gamma, 0.0, 0.0),
                   grid=replace(cfg.grid, dt=1e-4, delta_quantum=1e-4, n_z=64))


def ideal_gas_crosscheck(cfg, th=None) -> VerificationReport:
    """General and closed-form constant-kappa paths on the same ideal-gas problem."""
    from dataclasses import replace
    from scipy.spatial.distance import directed_hausdorff

    th = th or load_thresholds(cfg.monitors)
    if not cfg.gas.is_ideal:
        raise ValueError("the cross-check needs a = b = 0")
    rep = VerificationReport()
    with _Timer() as tm:
        gen = run_pipeline(replace(cfg, gas=GasParams(cfg.gas.K, cfg.gas.gamma, 0.0, 0.0)), threads=1)
        cls = run_pipeline(replace(cfg, gas=IdealGasClosedForm(cfg.gas.K, cfg.gas.gamma, 0.0, 0.0)),
                           threads=1)
        kp = np.asarray(gv.kappa_prime(gen.field.last.tau, gen.config.gas))
        rep.info["kappa_prime_general_path_max"] = float(np.abs(kp).max())
        worst = 0.0
        if len(gen.field.levels) != len(cls.field.levels):
            worst = np.inf
        else:
            for a, b in zip(gen.field.levels + [gen.field.sonic], cls.field.levels + [cls.field.sonic]):
                if a.z.size != b.z.size:
                    worst = np.inf
                    break
                for k in ("z", "Xt", "Yt", "Wt", "tau", "c"):
                    x, y = getattr(a, k), getattr(b, k)
                    scale = np.maximum(np.abs(x).max(), 1e-300)
                    worst = max(worst, float(np.abs(x - y).max() / scale))
        rep.add("ideal_field_rel", worst, th["ideal_field_rel"])
        P = np.column_stack([gen.sonic.xi, gen.sonic.eta])
        Q = np.column_stack([cls.sonic.xi, cls.sonic.eta])
        haus = max(directed_hausdorff(P, Q)[0], directed_hausdorff(Q, P)[0])
        rep.add("ideal_hausdorff", haus, th["ideal_hausdorff"])
        rep.info["ideal_levels"] = len(gen.field.levels)
    rep.add("ideal_runtime_s", tm.elapsed, th["ideal_runtime_s"])
    return rep


def check_determinism(cfg, th, threads=(1, 8)) -> VerificationReport:
    """Artifacts from runs with different thread counts must be byte-identical."""
    import tempfile
    from pathlib import Path

    rep = VerificationReport()
    with _Timer() as tm:
        digests = []
        with tempfile.TemporaryDirectory() as tmp:
            for n in threads:
                d = Path(tmp) / f"threads{n}"
                r = run_pipeline(cfg, threads=n)
                files = write_artifacts(r, d, {"boundary": True, "field": True, "patch": True})
                digests.append({p.name: p.read_bytes() for p in files})
        same = digests[0].keys() == digests[1].keys() and all(
            digests[0][k] == digests[1][k] for k in digests[0])
        rep.add("determinism_identical", float(same), 1.0, ">=")
    rep.add("determinism_runtime_s", tm.elapsed, th["determinism_runtime_s"])
    return rep


def _march_only(cfg):
    window = cfg.tau_window()
    spec = cfg.resolved_streamline(window)
    bd = build_boundary(spec, cfg.gas, window, cfg.grid.n_boundary, cfg.window.positivity_fraction)
    dom = build_domain(bd, cfg.gas, delta_quantum=cfg.grid.delta_quantum)
    return march(bd, dom, GridSpec(dt=cfg.grid.dt, dz=cfg.grid.dz, n_z=cfg.grid.n_z, tau_rtol=cfg.tau_rtol))


def acceptance_suite(cfg, res=None, elapsed=None) -> VerificationReport:
    """Every acceptance check, once, for the given configuration."""
    th = load_thresholds(cfg.monitors)
    if res is None:
        with _Timer() as tm:
            res = run_pipeline(cfg, threads=1)
        elapsed = tm.elapsed
    rep = VerificationReport(info={"thresholds_version": th["version"]})
    rep.extend(check_thermodynamics(cfg.gas, cfg.tau_window(), th, seed=cfg.seed))
    rep.extend(check_eigenstructure(th, seed=cfg.seed))
    rep.extend(check_boundary(cfg, th))
    rep.extend(check_transcription(cfg, th, seed=cfg.seed))
    rep.extend(check_reference_run(res, elapsed, th))
    rep.extend(check_sonic_closure(cfg, th))
    rep.extend(check_holder(res, th, seed=cfg.seed))
    rep.extend(check_residuals(cfg, th, res_coarse=res))
    rep.extend(ideal_gas_crosscheck(ideal_config(cfg), th))
    rep.extend(check_determinism(cfg, th))
    return rep
