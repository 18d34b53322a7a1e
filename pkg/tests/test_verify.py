import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sonicpatch.verify import (SCHEMA_VERSION, FitSkipped, HodographGrid, VerificationReport, convergence_order,
                               holder_estimate, load_thresholds, run_residual_suite)


def test_holder_linear():
    x = np.linspace(0, 1, 200)
    alpha, C, r2 = holder_estimate(x, 3 * x)
    assert alpha == pytest.approx(1.0, abs=0.01)
    assert C == pytest.approx(3.0, rel=1e-6)


@pytest.mark.parametrize("expo", [0.33, 0.5, 1.0])
def test_holder_synthetic_exponents(expo):
    x = np.linspace(-1, 1, 401)
    alpha, _, r2 = holder_estimate(x, np.abs(x) ** expo)
    assert alpha == pytest.approx(expo, abs=0.05)
    assert r2 >= 0.9


def jittered(seed, n=601):
    rng = np.random.default_rng(seed)
    g = np.linspace(-1, 1, n)
    x = g + rng.uniform(-0.3, 0.3, n) * (g[1] - g[0])
    x[n // 2] = 0.0
    return x


@given(expo=st.floats(0.2, 1.0), seed=st.integers(0, 1000))
def test_holder_jittered_full_budget(expo, seed):
    x = jittered(seed)
    alpha, _, _ = holder_estimate(x, np.abs(x) ** expo, n_pairs=10**6, seed=seed)
    assert alpha == pytest.approx(expo, abs=0.04)


@given(expo=st.floats(0.2, 1.0), seed=st.integers(0, 1000))
def test_holder_subsampled_budget_only_overestimates(expo, seed):
    """Dropping pairs can only lose the extremal increment, so the slope errs high."""
    x = jittered(seed)
    alpha, _, _ = holder_estimate(x, np.abs(x) ** expo, seed=seed)
    assert alpha >= expo - 0.02


def test_holder_pair_budget_is_seeded():
    x = np.linspace(-1, 1, 5001)
    v = np.abs(x) ** 0.5 + 0.01 * np.sin(40 * x)
    assert holder_estimate(x, v, n_pairs=2000, seed=1) == holder_estimate(x, v, n_pairs=2000, seed=1)


def test_holder_constant_is_skipped():
    with pytest.raises(FitSkipped):
        holder_estimate(np.linspace(0, 1, 100), np.ones(100))


def test_holder_needs_samples_and_span():
    with pytest.raises(FitSkipped):
        holder_estimate(np.linspace(0, 1, 10), np.linspace(0, 1, 10))
    with pytest.raises(FitSkipped):
        holder_estimate(np.linspace(0, 1, 40), np.linspace(0, 1, 40), min_decades=3.0)


def test_convergence_order():
    assert convergence_order(4e-3, 1e-3) == pytest.approx(2.0)
    assert convergence_order(1.0, 0.0) == np.inf


def test_report_schema_and_mandatory_logic(tmp_path):
    rep = VerificationReport(info={"run": 1})
    rep.add("a", 1e-9, 1e-8)
    rep.add("b", 1.5, 1.0, ">=")
    rep.add("c", 2.0, 1.0, "<", mandatory=False)
    assert rep.passed and rep.failed == []
    assert not rep.get("c").passed
    rep.add("d", 3.0, 1.0)
    assert not rep.passed and rep.failed == ["d"]
    with pytest.raises(ValueError):
        rep.add("a", 0.0, 1.0)
    rep.to_json(tmp_path / "r.json")
    d = json.loads((tmp_path / "r.json").read_text())
    assert d["schema_version"] == SCHEMA_VERSION
    assert set(d) == {"schema_version", "passed", "checks", "convergence", "info"}
    assert [c["name"] for c in d["checks"]] == ["a", "b", "c", "d"]
    assert set(d["checks"][0]) == {"name", "value", "tolerance", "passed", "comparison", "mandatory", "note"}


def test_report_extend_rejects_duplicates():
    a, b = VerificationReport(), VerificationReport()
    a.add("x", 0, 1)
    b.add("x", 0, 1)
    with pytest.raises(ValueError):
        a.extend(b)


def test_thresholds_frozen_and_overridable():
    th = load_thresholds()
    assert th["version"] == "1.0"
    assert th["patch_bernoulli"] == 1e-8 and th["residual_order_min"] == 0.9
    assert load_thresholds({"patch_bernoulli": 1e-6})["patch_bernoulli"] == 1e-6
    with pytest.raises(KeyError):
        load_thresholds({"no_such_key": 1.0})


def test_hodograph_grid_recovers_linear_fields(ref):
    """Chain-rule gradients are exact for fields linear in (xi, eta)."""
    p = ref.patch
    g = HodographGrid(p, ref.field.dz, ref.field.dt)
    assert g.nodes.size > 500
    fx, fy = g.grad(2.0 * p.xi - 3.0 * p.eta)
    assert fx == pytest.approx(np.full(fx.size, 2.0), rel=1e-6)
    assert fy == pytest.approx(np.full(fy.size, -3.0), rel=1e-6)


def test_residual_suite_reference(ref):
    res = run_residual_suite(ref.patch, ref.config.gas, ref.field.dz, ref.field.dt)
    assert res["bernoulli"][0] <= 1e-8
    for key in ("system+", "system-", "irrotational"):
        assert res[key][0] <= 1e-3
