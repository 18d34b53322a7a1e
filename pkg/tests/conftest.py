import time

import pytest
from hypothesis import HealthCheck, settings

from sonicpatch.pipeline import reference_config, run_pipeline

settings.register_profile("repo", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")

# acceptance lines collected by tests/test_acceptance.py, printed at the end of the session
ACCEPTANCE_LINES = {}


@pytest.fixture(scope="session")
def ref_cfg():
    return reference_config()


@pytest.fixture(scope="session")
def ref_run(ref_cfg):
    t0 = time.perf_counter()
    res = run_pipeline(ref_cfg, threads=1)
    return res, time.perf_counter() - t0


@pytest.fixture(scope="session")
def ref(ref_run):
    return ref_run[0]


@pytest.fixture(scope="session")
def ref_half(ref_cfg):
    """Reference problem with dt and dz halved."""
    return run_pipeline(ref_cfg.with_grid(dt=ref_cfg.grid.dt / 2, n_z=2 * ref_cfg.grid.n_z), threads=1)


@pytest.fixture(scope="session")
def ref_quarter(ref_cfg):
    return run_pipeline(ref_cfg.with_grid(dt=ref_cfg.grid.dt / 4, n_z=4 * ref_cfg.grid.n_z), threads=1)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
