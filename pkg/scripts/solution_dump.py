"""Sample the explicit real solution triples for odd p and report orthonormality and residuals."""

import argparse
import csv

import numpy as np

from suslov.meromorphic import poisson_residual, solution_triple


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--p", type=int, default=3)
    ap.add_argument("--d", type=float, default=0.5)
    ap.add_argument("--branch", type=int, default=1, choices=(1, -1))
    ap.add_argument("--t", type=float, nargs=2, default=[-10.0, 10.0])
    ap.add_argument("--samples", type=int, default=401)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    tri = solution_triple(args.p, args.d, args.branch)
    ts = np.linspace(*args.t, args.samples)
    G = tri(ts)
    gram = max(float(np.abs(np.array(tri(t)) @ np.array(tri(t)).T - np.eye(3)).max()) for t in ts[:: max(1, len(ts) // 50)])
    res = max(poisson_residual(sol, sol.derivative, ts, args.p, args.d) for sol in (tri.symmetric, tri.rotating))
    print(f"p={args.p} d={args.d} handedness={tri.handedness} max|G-I|={gram:.1e} poisson residual={res:.1e}")
    if args.out:
        with open(args.out, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\r\n")
            w.writerow(["t"] + [f"gamma{i}_{j}" for i in (1, 2, 3) for j in (1, 2, 3)])
            for n, t in enumerate(ts):
                w.writerow([format(v, ".17g") for v in [t, *(G[i][j][n] for i in range(3) for j in range(3))]])


if __name__ == "__main__":
    main()
