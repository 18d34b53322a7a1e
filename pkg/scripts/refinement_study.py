"""Grid refinement of the reference problem: sonic gap, closure constant, NO slope error, Xt."""
import argparse

import numpy as np

from sonicpatch.inversion import slope_error_along
from sonicpatch.pipeline import reference_config, run_pipeline


def xt_difference(coarse, fine):
    out = []
    for i, lev in enumerate(coarse.field.levels):
        f = fine.field.levels[2 * i]
        z = lev.z[1:-1]
        out.append(np.abs(lev.Xt[1:-1] - np.interp(z, f.z, f.Xt)) / lev.Xt[1:-1])
    return np.concatenate(out).max()


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--levels", type=int, default=3, help="number of halvings, starting at the reference grid")
    args = ap.parse_args()

    cfg = reference_config()
    runs = []
    for k in range(args.levels):
        m = 2**k
        runs.append(run_pipeline(cfg.with_grid(dt=cfg.grid.dt / m, n_z=cfg.grid.n_z * m), threads=1))

    print(f"{'dt':>9} {'sonic gap':>11} {'C=|X-Y|/dt':>11} {'NO slope':>10} {'mu':>7} {'sup W':>8}")
    gaps, slopes = [], []
    for r in runs:
        last, so = r.field.last, r.field.sonic
        gap = np.abs(r.imap.xi[-1] - np.interp(last.z, so.z, r.imap.sonic_xi)).max()
        C = np.abs(last.Xt - last.Yt).max() / r.field.dt
        slope = slope_error_along(r.no_curve).max()
        gaps.append(gap)
        slopes.append(slope)
        print(f"{r.field.dt:9.3g} {gap:11.3e} {C:11.5f} {slope:10.3e} {r.sonic.holder_fit[0]:7.3f} "
              f"{r.regularity['sup_W']:8.5f}")
    print("observed orders")
    print("  sonic gap ", np.round(np.log2(np.array(gaps[:-1]) / gaps[1:]), 3))
    print("  NO slope  ", np.round(np.log2(np.array(slopes[:-1]) / slopes[1:]), 3))
    if len(runs) >= 3:
        e = [xt_difference(runs[i], runs[i + 1]) for i in range(len(runs) - 1)]
        print("  Xt        ", np.round(np.log2(np.array(e[:-1]) / e[1:]), 3))


if __name__ == "__main__":
    main()
