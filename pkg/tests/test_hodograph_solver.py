import numpy as np
import pytest
from hypothesis import given, strategies as st

from sonicpatch.gas_vdw import GasParams, kappa, sound_speed
from sonicpatch.hodograph_solver import (DenominatorLoss, GridSpec, MonitorViolation, build_domain,
                                         char_speeds, coefficients, corner_extrapolate, level_nodes, march,
                                         split_rhs, unsplit_rhs)

GAS = GasParams(1.0, 0.5, 0.02, 0.05)


def test_coefficients_at_sonic_line():
    tau = 0.13
    c = sound_speed(tau, GAS)
    k = kappa(tau, GAS)
    Xt, Yt = 0.7, 1.9
    co = coefficients(0.0, tau, c, GAS, Xt, Yt, 0.4)
    assert co.f == pytest.approx(1 / (1 + k), rel=1e-14)
    assert co.f == pytest.approx(co.mu2, rel=1e-14)
    assert co.g == pytest.approx(-co.mu2 / c, rel=1e-14)
    # with Yt = -1/Y the t = 0 values are +Yt/(2c(1+kappa)) and +Xt/(2c(1+kappa))
    assert co.H11 == pytest.approx(Yt / (2 * c * (1 + k)), rel=1e-14)
    assert co.H21 == pytest.approx(Xt / (2 * c * (1 + k)), rel=1e-14)


@given(t=st.floats(1e-3, 0.5), tau=st.floats(0.11, 1.0), Xt=st.floats(0.2, 5), Yt=st.floats(0.2, 5))
def test_split_matches_unsplit(t, tau, Xt, Yt):
    c = sound_speed(tau, GAS)
    co = coefficients(t, tau, c, GAS)
    if 1 + t * co.g * Yt < 0.1 or 1 - t * co.g * Xt < 0.1:
        return
    Wt = (Xt - Yt) / (2 * t)
    sx, sy = split_rhs(t, coefficients(t, tau, c, GAS, Xt, Yt, Wt), Wt)
    ux, uy = unsplit_rhs(t, tau, c, GAS, Xt, Yt)
    scale = 1 + abs(Wt)
    assert abs(sx - ux) <= 1e-9 * scale and abs(sy - uy) <= 1e-9 * scale


@given(t=st.floats(1e-4, 0.5), tau=st.floats(0.11, 2.0), Xt=st.floats(0.1, 5), Yt=st.floats(0.1, 5))
def test_char_speed_signs(t, tau, Xt, Yt):
    c = sound_speed(tau, GAS)
    co = coefficients(t, tau, c, GAS)
    if 1 + t * co.g * Yt <= 0 or 1 - t * co.g * Xt <= 0:
        with pytest.raises(DenominatorLoss):
            char_speeds(t, c, co.f, co.g, Xt, Yt)
        return
    lx, ly = char_speeds(t, c, co.f, co.g, Xt, Yt)
    assert lx > 0 > ly


def test_char_speeds_vanish_on_sonic_line():
    c = sound_speed(0.13, GAS)
    co = coefficients(0.0, 0.13, c, GAS)
    assert char_speeds(0.0, c, co.f, co.g, 1.0, 2.0) == (0.0, 0.0)


def test_domain_construction(ref):
    dom = ref.domain
    assert dom.z_bar_of_t(dom.delta) == pytest.approx(dom.z_top, abs=1e-15)
    # the left edge ends strictly left of the sonic point z_tilde(0) = 0
    assert dom.z_bar_of_t(0.0) < 0.0
    assert 0 < dom.delta <= dom.delta_raw <= ref.boundary.t0
    assert dom.delta_raw <= 1 / np.sqrt(2)


def test_delta_stable_under_boundary_refinement(ref_cfg, ref):
    from sonicpatch.boundary import build_boundary
    w = ref_cfg.tau_window()
    bd = build_boundary(ref_cfg.resolved_streamline(w), ref_cfg.gas, w, 1024)
    assert build_domain(bd, ref_cfg.gas).delta_raw == pytest.approx(ref.domain.delta_raw, abs=1e-6)


def test_delta_quantum_too_coarse(ref):
    with pytest.raises(ValueError):
        build_domain(ref.boundary, GAS, delta_quantum=1.0)


def test_level_nodes_structure(ref):
    dom, dz = ref.domain, ref.field.dz
    for t in (dom.delta, 0.5 * dom.delta, 0.0):
        z = level_nodes(t, dom, dz)
        assert np.all(np.diff(z) > 0)
        assert z[-1] == pytest.approx(float(dom.z_tilde_of_t(t)[0]), abs=0)
    assert level_nodes(dom.delta, dom, dz).size == 1


def test_top_level_is_boundary_data(ref):
    top = ref.field.levels[0]
    b = ref.domain.curve.at_t([top.t])
    assert top.Xt[0] == 1 / b["a"][0]
    assert top.Yt[0] == -1 / b["b"][0]
    assert top.Wt[0] == b["d"][0] / (b["a"][0] * b["b"][0])


def test_field_invariants(ref):
    mon = ref.field.monitors
    assert mon["min_Xt"] > 0 and mon["min_Yt"] > 0
    assert mon["min_den"] > 0
    assert mon["max_closure"] <= 1e-12
    assert mon["speed_bound_ok"]
    for lev in ref.field.levels:
        assert np.abs(lev.Xt - lev.Yt - 2 * lev.t * lev.Wt).max() <= 1e-12


def test_symmetric_data_at_sonic_point(ref):
    """At M the boundary data satisfy a_hat = -b_hat, so Xt = Yt there."""
    so = ref.field.sonic
    assert so.Xt[-1] == pytest.approx(so.Yt[-1], rel=1e-12)
    b = ref.domain.curve.at_t([0.0])
    assert b["X"][0] == pytest.approx(b["Y"][0], rel=1e-12)


def test_sonic_closure_linear_in_dt(ref, ref_half):
    C = [np.abs(r.field.last.Xt - r.field.last.Yt).max() / r.field.dt for r in (ref, ref_half)]
    assert abs(C[1] / C[0] - 1) <= 0.1


def test_sup_W_stable(ref, ref_half):
    a, b = ref.regularity["sup_W"], ref_half.regularity["sup_W"]
    assert abs(b / a - 1) <= 0.05


def test_self_convergence_of_Xt(ref, ref_half, ref_quarter):
    def diff(a, b):
        out = []
        for i, lev in enumerate(a.field.levels):
            fine = b.field.levels[2 * i]
            assert fine.t == pytest.approx(lev.t, abs=1e-15)
            z = lev.z[1:-1]
            out.append(np.abs(lev.Xt[1:-1] - np.interp(z, fine.z, fine.Xt)) / lev.Xt[1:-1])
        return np.concatenate(out).max()

    e1, e2 = diff(ref, ref_half), diff(ref_half, ref_quarter)
    assert np.log2(e1 / e2) >= 0.9


def test_regularity_monitors(ref):
    reg = ref.regularity
    alpha, _, r2 = reg["holder_X"]
    assert alpha >= 0.30 and r2 >= 0.9
    assert np.isfinite(reg["sup_W"])
    assert reg["X_min"] > 0 and reg["Y_min"] > 0


def test_thread_count_is_bitwise_neutral(ref):
    bd, dom = ref.boundary, ref.domain
    spec = dict(dt=ref.field.dt, dz=ref.field.dz, tau_rtol=ref.config.tau_rtol)
    a = march(bd, dom, GridSpec(threads=1, **spec))
    b = march(bd, dom, GridSpec(threads=4, **spec))
    for la, lb in zip(a.levels, b.levels):
        for k in ("z", "Xt", "Yt", "Wt", "tau", "c"):
            assert np.array_equal(getattr(la, k), getattr(lb, k))


def test_W_bound_violation_aborts(ref):
    with pytest.raises(MonitorViolation) as exc:
        march(ref.boundary, ref.domain, GridSpec(dt=ref.field.dt, dz=ref.field.dz), w_bound=1e-3)
    assert exc.value.name == "W_bound"


def test_dt_too_large(ref):
    with pytest.raises(ValueError):
        march(ref.boundary, ref.domain, GridSpec(dt=1.0))


def test_corner_extrapolate_linear_data(ref):
    """Data linear in t is extrapolated exactly; corner nodes interpolate toward the corner value."""
    l1, l2 = ref.field.levels[-1], ref.field.levels[-2]
    f = lambda lev: 3.0 + 2.0 * lev.t + 0 * lev.z
    rule = lambda v1, v2: v1 - l1.t * (v2 - v1) / (l2.t - l1.t)
    z = np.concatenate([l1.z[:-1], [0.5 * l1.z[-1], 0.0]])
    out = corner_extrapolate(z, l1, l2, f(l1), f(l2), 3.0, rule)
    assert out == pytest.approx(np.full(z.size, 3.0), rel=1e-12)


def test_looser_tau_tolerance(ref):
    """A looser tau tolerance still respects the closure and positivity."""
    g = GridSpec(dt=ref.field.dt, dz=ref.field.dz, tau_rtol=1e-10)
    fld = march(ref.boundary, ref.domain, g)
    assert fld.monitors["min_Xt"] > 0 and fld.monitors["max_closure"] <= 1e-12
