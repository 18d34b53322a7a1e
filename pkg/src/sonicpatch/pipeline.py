"""Run configuration and the boundary -> domain -> march -> inversion pipeline."""
from __future__ import annotations

import json
import sys
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .boundary import BoundaryData, StreamlineSpec, build_boundary
from .gas_vdw import GasDomainError, GasParams, IdealGasClosedForm, TauWindow, default_window
from .hodograph_solver import (DomainOmega, GridSpec, HodographField, build_domain, march,
                               regularity_monitors)
from .inversion import (InversionMap, PatchSolution, SonicCurve, characteristic_NO,
                        extract_sonic_curve, integrate_inversion, reconstruct)

PACKAGE_DIR = Path(__file__).resolve().parent
REFERENCE_CONFIG = PACKAGE_DIR / "reference.toml"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class GridConfig:
    n_boundary: int = 256
    dt: float = 1e-3
    dz: float = 0.0           # 0 selects |z_bar(0)|/n_z
    n_z: int = 128
    delta_quantum: float = 0.004


@dataclass(frozen=True)
class WindowConfig:
    search: tuple = (0.1, 50.0)
    margin: float = 0.1
    positivity_fraction: float = 0.5


@dataclass(frozen=True)
class OutputConfig:
    directory: str = "artifacts"
    dump_boundary: bool = False
    dump_field: bool = False
    dump_patch: bool = False


@dataclass(frozen=True)
class RunConfig:
    gas: GasParams
    streamline: StreamlineSpec
    tau_M_factor: float | None = 1.1   # tau_M = factor * tau_1 unless given directly
    grid: GridConfig = GridConfig()
    window: WindowConfig = WindowConfig()
    tau_rtol: float = 1e-13
    monitors: dict = field(default_factory=dict)
    outputs: OutputConfig = OutputConfig()
    seed: int = 0
    threads: int = 1

    def with_grid(self, **kw) -> "RunConfig":
        return replace(self, grid=replace(self.grid, **kw))

    def tau_window(self) -> TauWindow:
        return default_window(self.gas, self.window.search, self.window.margin)

    def resolved_streamline(self, window: TauWindow) -> StreamlineSpec:
        if self.tau_M_factor is None:
            return self.streamline
        return replace(self.streamline, tau_M=self.tau_M_factor * window.tau_threshold)

    def to_dict(self):
        d = asdict(self)
        d.pop("threads")  # execution detail; results do not depend on it
        d["gas"] = asdict(self.gas)
        d["gas_path"] = "closed_form_ideal" if isinstance(self.gas, IdealGasClosedForm) else "general"
        d["streamline"] = asdict(self.streamline)
        return d


def _section(raw, name, cls):
    sec = raw.get(name, {})
    if not isinstance(sec, dict):
        raise ConfigError(f"[{name}] must be a table")
    known = set(cls.__dataclass_fields__)
    extra = set(sec) - known
    if extra:
        raise ConfigError(f"unknown keys in [{name}]: {sorted(extra)}")
    return sec


def config_from_dict(raw: dict) -> RunConfig:
    try:
        gas_kw = _section(raw, "gas", GasParams)
        gas_cls = IdealGasClosedForm if raw.get("closed_form_ideal", False) else GasParams
        gas = gas_cls(**gas_kw)
        sl = dict(raw.get("streamline", {}))
        factor = sl.pop("tau_M_factor", None)
        if "tau_M" in sl and factor is not None:
            raise ConfigError("give either tau_M or tau_M_factor, not both")
        if "tau_M" not in sl and factor is None:
            factor = 1.1
        _section({"streamline": sl}, "streamline", StreamlineSpec)
        streamline = StreamlineSpec(**sl)
        if factor is None and not streamline.tau_M > gas.b:
            raise ConfigError(f"tau_M={streamline.tau_M} must exceed the covolume b={gas.b}")
        if factor is not None and not factor > 1.0:
            raise ConfigError("tau_M_factor must exceed 1")
        grid = GridConfig(**_section(raw, "grid", GridConfig))
        if not grid.dt > 0 or grid.dz < 0 or grid.n_z < 2 or grid.n_boundary < 16:
            raise ConfigError("grid needs dt > 0, dz >= 0, n_z >= 2 and n_boundary >= 16")
        win = _section(raw, "window", WindowConfig)
        if "search" in win:
            win["search"] = tuple(float(v) for v in win["search"])
        window = WindowConfig(**win)
        tol = dict(raw.get("tolerances", {}))
        tau_rtol = float(tol.pop("tau_rtol", 1e-13))
        monitors = dict(tol.pop("monitors", {}))
        if tol:
            raise ConfigError(f"unknown keys in [tolerances]: {sorted(tol)}")
        outputs = OutputConfig(**_section(raw, "outputs", OutputConfig))
        extra = set(raw) - {"gas", "streamline", "grid", "window", "tolerances", "outputs", "seed",
                            "threads", "closed_form_ideal"}
        if extra:
            raise ConfigError(f"unknown top-level keys: {sorted(extra)}")
        return RunConfig(gas=gas, streamline=streamline, tau_M_factor=factor, grid=grid, window=window,
                         tau_rtol=tau_rtol, monitors=monitors, outputs=outputs,
                         seed=int(raw.get("seed", 0)), threads=int(raw.get("threads", 1)))
    except ConfigError:
        raise
    except (GasDomainError, TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path) -> RunConfig:
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    return config_from_dict(raw)


def reference_config() -> RunConfig:
    return load_config(REFERENCE_CONFIG)


@dataclass
class RunResult:
    config: RunConfig
    boundary: BoundaryData
    domain: DomainOmega
    field: HodographField
    imap: InversionMap
    no_curve: dict
    patch: PatchSolution
    sonic: SonicCurve
    regularity: dict


def run_pipeline(cfg: RunConfig, threads: int | None = None) -> RunResult:
    window = cfg.tau_window()
    spec = cfg.resolved_streamline(window)
    if not spec.tau_M > cfg.gas.b:
        raise ConfigError("tau_M must exceed the covolume b")
    bd = build_boundary(spec, cfg.gas, window, cfg.grid.n_boundary, cfg.window.positivity_fraction)
    dom = build_domain(bd, cfg.gas, delta_quantum=cfg.grid.delta_quantum)
    grid = GridSpec(dt=cfg.grid.dt, dz=cfg.grid.dz, n_z=cfg.grid.n_z,
                    threads=cfg.threads if threads is None else threads, tau_rtol=cfg.tau_rtol)
    fld = march(bd, dom, grid)
    imap = integrate_inversion(fld)
    no = characteristic_NO(fld, imap)
    sol = reconstruct(imap, fld, no)
    sonic = extract_sonic_curve(sol, fld, seed=cfg.seed)
    reg = regularity_monitors(fld, seed=cfg.seed)
    return RunResult(cfg, bd, dom, fld, imap, no, sol, sonic, reg)


def write_artifacts(res: RunResult, outdir, dumps=None) -> list:
    """Write the requested CSV dumps plus run.json; returns the written paths."""
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    o = res.config.outputs
    dumps = dumps or {}
    written = []
    if dumps.get("boundary", o.dump_boundary):
        res.boundary.to_csv(out / "boundary.csv")
        written.append(out / "boundary.csv")
    if dumps.get("field", o.dump_field):
        res.field.to_csv(out / "field.csv")
        written.append(out / "field.csv")
    if dumps.get("patch", o.dump_patch):
        res.patch.to_csv(out / "patch.csv")
        res.sonic.to_csv(out / "sonic_curve.csv")
        written += [out / "patch.csv", out / "sonic_curve.csv"]
    meta = {"config": res.config.to_dict(), "domain": res.domain.summary(),
            "boundary": {"xi0": res.boundary.xi0, "xiQ": res.boundary.xiQ, "phi_M": res.boundary.phi_M,
                         "tau_M": res.boundary.spec.tau_M},
            "monitors": res.field.monitors, "regularity": res.regularity,
            "no_t_start": res.no_curve["t_start"]}
    with open(out / "run.json", "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True, default=_plain)
        fh.write("\n")
    written.append(out / "run.json")
    return written


def _plain(x):
    if isinstance(x, (np.floating, np.integer, np.bool_)):
        return x.item()
    if isinstance(x, (np.ndarray, tuple)):
        return list(x)
    raise TypeError(type(x))
