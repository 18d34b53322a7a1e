import json
import re

import pytest

from sonicpatch.cli import main
from sonicpatch.pipeline import REFERENCE_CONFIG

REF_TEXT = REFERENCE_CONFIG.read_text()


def write(tmp_path, text, name="c.toml"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_gamma_out_of_range(tmp_path):
    cfg = write(tmp_path, REF_TEXT.replace("gamma = 0.5", "gamma = 1.5"))
    assert main(["run", cfg, "--out", str(tmp_path / "o")]) == 2


def test_tau_M_at_or_below_covolume(tmp_path):
    text = re.sub(r"tau_M_factor = .*", "tau_M = 0.05", REF_TEXT)
    assert main(["run", write(tmp_path, text), "--out", str(tmp_path / "o")]) == 2


def test_unreadable_config(tmp_path):
    assert main(["run", str(tmp_path / "missing.toml")]) == 2
    assert main(["run", write(tmp_path, "[gas\n")]) == 2
    assert main([]) == 2


def test_bad_thread_count(tmp_path):
    assert main(["run", write(tmp_path, REF_TEXT), "--threads", "0"]) == 2


def test_numerical_failure_exit_code(tmp_path):
    text = re.sub(r"tau_M_factor = .*", "tau_M_factor = 200.0", REF_TEXT)
    assert main(["run", write(tmp_path, text), "--out", str(tmp_path / "o"), "--quick"]) == 4


@pytest.fixture(scope="module")
def reference_artifacts(tmp_path_factory):
    out = tmp_path_factory.mktemp("ref") / "artifacts"
    code = main(["run", str(REFERENCE_CONFIG), "--out", str(out)])
    return code, out


def test_reference_run_exit_zero(reference_artifacts):
    code, out = reference_artifacts
    assert code == 0
    for name in ("boundary.csv", "field.csv", "patch.csv", "sonic_curve.csv", "run.json", "report.json"):
        assert (out / name).stat().st_size > 0
    rep = json.loads((out / "report.json").read_text())
    assert rep["passed"] and rep["schema_version"] == "1.0"
    names = [c["name"] for c in rep["checks"]]
    assert len(names) == len(set(names))


def test_verify_only(reference_artifacts, tmp_path):
    code, out = reference_artifacts
    assert main(["--verify-only", str(out)]) == 0
    assert json.loads((out / "verify_report.json").read_text())["passed"]
    # corrupt one sonic row: the Mach check must fail
    bad = tmp_path / "bad"
    bad.mkdir()
    for p in out.iterdir():
        (bad / p.name).write_bytes(p.read_bytes())
    rows = (bad / "patch.csv").read_text().splitlines()
    i = next(k for k, r in enumerate(rows) if r.endswith(",MN"))
    cells = rows[i].split(",")
    cells[2] = repr(float(cells[2]) + 1e-3)
    rows[i] = ",".join(cells)
    (bad / "patch.csv").write_text("\n".join(rows) + "\n")
    assert main(["--verify-only", str(bad)]) == 3


def test_verify_only_missing_directory(tmp_path):
    assert main(["--verify-only", str(tmp_path / "none")]) == 2


def test_dump_flags_select_files(tmp_path):
    text = REF_TEXT.replace("dump_boundary = true", "dump_boundary = false").replace(
        "dump_field = true", "dump_field = false").replace("dump_patch = true", "dump_patch = false")
    out = tmp_path / "o"
    assert main(["run", write(tmp_path, text), "--out", str(out), "--quick", "--dump-boundary"]) == 0
    assert sorted(p.name for p in out.iterdir()) == ["boundary.csv", "config.toml", "report.json", "run.json"]
