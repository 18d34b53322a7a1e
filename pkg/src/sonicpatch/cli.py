"""Command line: `sonicpatch run CONFIG` and `sonicpatch --verify-only DIR`.

Exit codes: 0 all mandatory checks pass, 2 configuration error, 3 monitor
violation or failed check, 4 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import shutil
import sys
import time
from pathlib import Path

import numpy as np

from .boundary import BoundaryError, EmptyPositivityWindow
from .gas_vdw import GasDomainError, NoBracket, NonMonotone, bernoulli_potential, sound_speed
from .hodograph_solver import MonitorViolation
from .pipeline import ConfigError, load_config, run_pipeline, write_artifacts

EXIT_OK, EXIT_CONFIG, EXIT_MONITOR, EXIT_NUMERIC = 0, 2, 3, 4
NUMERICAL_ERRORS = (NoBracket, NonMonotone, BoundaryError, EmptyPositivityWindow, GasDomainError,
                    FloatingPointError, ZeroDivisionError)

log = logging.getLogger("sonicpatch")


def _parser():
    p = argparse.ArgumentParser(prog="sonicpatch", description=__doc__.splitlines()[0])
    p.add_argument("command", nargs="?", choices=["run"], help="run the pipeline on CONFIG")
    p.add_argument("config", nargs="?", help="TOML configuration file")
    p.add_argument("--out", help="artifact directory (default: [outputs] directory)")
    p.add_argument("--dump-boundary", action="store_true", help="write boundary.csv")
    p.add_argument("--dump-field", action="store_true", help="write field.csv (one row per hodograph node)")
    p.add_argument("--dump-patch", action="store_true", help="write patch.csv and sonic_curve.csv")
    p.add_argument("--verify-only", metavar="ARTIFACTS", help="re-check an artifact directory")
    p.add_argument("--threads", type=int, default=None, help="worker threads for the level update")
    p.add_argument("--quick", action="store_true", help="skip the refinement and cross-check studies")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    if args.verify_only:
        return verify_only(Path(args.verify_only))
    if args.command != "run" or not args.config:
        _parser().print_usage(sys.stderr)
        return EXIT_CONFIG
    return run(args)


def run(args) -> int:
    from .verify import VerificationReport, acceptance_suite, check_reference_run, load_thresholds

    try:
        cfg = load_config(args.config)
        if args.threads is not None:
            if args.threads < 1:
                raise ConfigError("--threads must be at least 1")
            from dataclasses import replace
            cfg = replace(cfg, threads=args.threads)
        th = load_thresholds(cfg.monitors)
    except (ConfigError, KeyError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(args.out or cfg.outputs.directory)
    try:
        t0 = time.perf_counter()
        res = run_pipeline(cfg)
        elapsed = time.perf_counter() - t0
        log.info("pipeline finished in %.2f s", elapsed)
        if args.quick:
            report = VerificationReport(info={"thresholds_version": th["version"], "quick": True})
            report.extend(check_reference_run(res, elapsed, th))
        else:
            report = acceptance_suite(cfg, res, elapsed)
    except MonitorViolation as exc:
        print(f"monitor violation: {exc}", file=sys.stderr)
        return EXIT_MONITOR
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    dumps = {"boundary": args.dump_boundary or cfg.outputs.dump_boundary,
             "field": args.dump_field or cfg.outputs.dump_field,
             "patch": args.dump_patch or cfg.outputs.dump_patch}
    write_artifacts(res, out, dumps)
    shutil.copyfile(args.config, out / "config.toml")
    report.to_json(out / "report.json")
    for c in report.checks:
        flag = "ok  " if c.passed else ("FAIL" if c.mandatory else "info")
        log.info("%s %-28s %.4g %s %.4g", flag, c.name, c.value, c.comparison, c.tolerance)
    if not report.passed:
        print("failed checks: " + ", ".join(report.failed), file=sys.stderr)
        return EXIT_MONITOR
    print(f"ok: artifacts in {out}")
    return EXIT_OK


def _read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    head, body = rows[0], rows[1:]
    cols = {h: [r[i] for r in body] for i, h in enumerate(head)}
    return {h: (np.array(v, dtype=float) if h != "tag" else np.array(v)) for h, v in cols.items()}


def verify_only(outdir: Path) -> int:
    """Recompute the artifact-level invariants from the CSV files alone."""
    from .verify import VerificationReport, load_thresholds

    try:
        cfg = load_config(outdir / "config.toml")
        meta = json.loads((outdir / "run.json").read_text())
        field = _read_csv(outdir / "field.csv")
        patch = _read_csv(outdir / "patch.csv")
    except (ConfigError, OSError, json.JSONDecodeError) as exc:
        print(f"cannot load artifacts: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    th = load_thresholds(cfg.monitors)
    gas = cfg.gas
    rep = VerificationReport(info={"source": str(outdir)})
    rep.add("artifact_positivity", min(field["X_tilde"].min(), field["Y_tilde"].min()), 0.0, ">")
    t = field["t"]
    closure = np.abs(field["X_tilde"] - field["Y_tilde"] - 2 * t * field["W_tilde"])
    rep.add("artifact_closure", closure.max(), th["closure_projection"])
    tau, c = field["tau"], field["c"]
    phi_M = meta["boundary"]["phi_M"]
    bern = c**2 - 2 * (1 - t**2) * (-field["z"] - phi_M - np.asarray(bernoulli_potential(tau, gas)))
    rep.add("artifact_field_bernoulli", np.max(np.abs(bern) / c**2), th["patch_bernoulli"])
    rep.add("artifact_eos", np.max(np.abs(np.asarray(sound_speed(tau, gas)) - c) / c), th["patch_bernoulli"])
    U, V = patch["u"] - patch["xi"], patch["v"] - patch["eta"]
    q = np.hypot(U, V)
    rep.add("artifact_wbar", np.max(np.abs(patch["c"] / q - patch["wbar"])), th["sonic_mach"])
    son = patch["tag"] == "MN"
    rep.add("artifact_sonic_mach", np.max(np.abs(q[son] - patch["c"][son]) / patch["c"][son]), th["sonic_mach"])
    rep.add("artifact_wbar_range", float(np.all((patch["wbar"] > 0) & (patch["wbar"] <= 1))), 1.0, ">=")
    rep.to_json(outdir / "verify_report.json")
    if not rep.passed:
        print("failed checks: " + ", ".join(rep.failed), file=sys.stderr)
        return EXIT_MONITOR
    print(f"ok: {len(rep.checks)} artifact checks passed")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
