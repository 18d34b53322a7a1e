import json

import pytest

from sonicpatch.gas_vdw import IdealGasClosedForm
from sonicpatch.pipeline import ConfigError, config_from_dict, write_artifacts


def base():
    return {"gas": {"K": 1.0, "gamma": 0.5, "a": 0.02, "b": 0.05},
            "streamline": {"tau_M_factor": 1.1}, "grid": {"dt": 1e-3}}


def test_reference_config_values(ref_cfg):
    assert (ref_cfg.gas.K, ref_cfg.gas.gamma, ref_cfg.gas.a, ref_cfg.gas.b) == (1.0, 0.5, 0.02, 0.05)
    s = ref_cfg.streamline
    assert (s.xi1, s.xi2, s.eta_M, s.s1, s.s2, s.r) == (-0.5, 0.0, 0.0, -0.8, -0.6, 0.9)
    assert ref_cfg.tau_M_factor == 1.1
    assert (ref_cfg.grid.n_boundary, ref_cfg.grid.dt) == (256, 1e-3)
    w = ref_cfg.tau_window()
    assert ref_cfg.resolved_streamline(w).tau_M == pytest.approx(1.1 * w.tau_threshold)


@pytest.mark.parametrize("mutate", [
    lambda d: d["gas"].update(gamma=1.5),
    lambda d: d["gas"].update(K=-1.0),
    lambda d: d["gas"].update(c=1.0),
    lambda d: d["streamline"].update(tau_M=0.05, tau_M_factor=None) or d["streamline"].pop("tau_M_factor"),
    lambda d: d["streamline"].update(tau_M=0.2),
    lambda d: d["streamline"].update(tau_M_factor=0.9),
    lambda d: d["grid"].update(dt=0.0),
    lambda d: d["grid"].update(dz=-1.0),
    lambda d: d.update(extra=1),
    lambda d: d.update(tolerances={"what": 1}),
    lambda d: d.update(gas=3),
])
def test_invalid_configs(mutate):
    d = base()
    mutate(d)
    with pytest.raises(ConfigError):
        config_from_dict(d)


def test_closed_form_flag():
    d = base()
    d["gas"].update(a=0.0, b=0.0)
    d["closed_form_ideal"] = True
    assert isinstance(config_from_dict(d).gas, IdealGasClosedForm)


def test_to_dict_drops_threads(ref_cfg):
    d = ref_cfg.to_dict()
    assert "threads" not in d and d["gas_path"] == "general"
    json.dumps(d)


def test_write_artifacts(ref, tmp_path):
    files = write_artifacts(ref, tmp_path, {"boundary": True, "field": False, "patch": True})
    names = sorted(p.name for p in files)
    assert names == ["boundary.csv", "patch.csv", "run.json", "sonic_curve.csv"]
    meta = json.loads((tmp_path / "run.json").read_text())
    assert meta["boundary"]["phi_M"] == ref.boundary.phi_M
    rows = (tmp_path / "patch.csv").read_text().splitlines()
    assert len(rows) == ref.patch.xi.size + 1
