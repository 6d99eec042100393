"""Verdict maps over the complex tau plane, written as CSV plus a coarse text picture."""

import argparse
import time
from pathlib import Path

import numpy as np

from fockflow import cli
from fockflow.semigroup import GridSpec, region_scan

SPECS = Path(__file__).resolve().parent / "specs"
SCANS = {
    "rho": ("rotated_oscillator.json", GridSpec(-8, 1, 200, -4, 4, 160)),
    "fp": ("fokker_planck_b0.json", GridSpec(-10, 0, 1001, 5, 30, 101)),
}


def ascii_map(mask: np.ndarray, rows: int = 24, cols: int = 72) -> str:
    ri = np.linspace(0, mask.shape[0] - 1, rows).round().astype(int)[::-1]
    ci = np.linspace(0, mask.shape[1] - 1, cols).round().astype(int)
    return "\n".join("".join("#" if mask[r, c] else "." for c in ci) for r in ri)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("which", choices=sorted(SCANS))
    ap.add_argument("--out", type=Path, help="CSV destination")
    ap.add_argument("--workers", type=int, default=4)
    args = ap.parse_args()
    name, grid = SCANS[args.which]
    spec = cli.parse((SPECS / name).read_text())
    nf = cli.build_normal_form(spec)
    start = time.perf_counter()
    if args.out:
        args.out.write_text(cli.scan_csv(spec, nf, grid, args.workers, with_delta0=False))
    scan = region_scan(nf, grid, with_delta0=False, workers=args.workers)
    print(f"{args.which}: {grid.re_count}x{grid.im_count} cells in "
          f"{time.perf_counter() - start:.1f}s ('#' = unbounded, Im tau upwards)")
    print(ascii_map(scan.unbounded_mask()))
    if args.which == "fp":
        u = scan.unbounded_mask()
        print("\n   Im tau   boundary Re tau   -2 log Im tau")
        for i in range(0, len(scan.im_axis), 10):
            j = np.flatnonzero(u[i])[0]
            edge = 0.5 * (scan.re_axis[j - 1] + scan.re_axis[j])
            print(f"{scan.im_axis[i]:9.2f} {edge:17.3f} {-2 * np.log(scan.im_axis[i]):15.3f}")


if __name__ == "__main__":
    main()
