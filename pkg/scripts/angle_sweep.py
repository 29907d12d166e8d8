"""Scattering angle over a (p, d) grid: closed formula vs boundary-value integration.

    python3 scripts/angle_sweep.py --out angle.csv
"""

import argparse
import csv
import time

import numpy as np

from suslov.scattering import delta_psi_formula, delta_psi_numeric


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--p", type=float, nargs="+", default=[0.5, 1, 1.5, 2, 2.5, 3, 4])
    ap.add_argument("--d", type=float, nargs="+", default=[0.5, 1.0, 2.0])
    ap.add_argument("--out", default="angle_sweep.csv")
    args = ap.parse_args()

    rows = []
    for p in args.p:
        for d in args.d:
            t0 = time.perf_counter()
            f = delta_psi_formula(p, d)
            n = delta_psi_numeric(p, d)
            rows.append([p, d, f.folded, n.folded, abs(f.folded - n.folded), time.perf_counter() - t0])
            print(f"p={p:<5g} d={d:<5g} formula={f.folded:.12f} numeric={n.folded:.12f} diff={rows[-1][4]:.1e}")
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(["p", "d", "formula", "numeric", "abs_diff", "seconds"])
        w.writerows([[format(v, ".17g") for v in r] for r in rows])
    print(f"max |diff| = {max(r[4] for r in rows):.2e}; wrote {args.out}")
    # a dense curve of the formula for plotting
    ps = np.linspace(0.01, 6, 600)
    with open(args.out.replace(".csv", "_curve.csv"), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(["p"] + [f"d={d:g}" for d in args.d])
        for p in ps:
            w.writerow([format(p, ".17g")] + [format(delta_psi_formula(p, d).delta_psi, ".17g") for d in args.d])


if __name__ == "__main__":
    main()
