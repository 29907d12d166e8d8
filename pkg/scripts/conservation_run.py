"""Drift of F1, F2 and (odd p) F3 along long integrations of the special system."""

import argparse

import numpy as np

from suslov.integrals import build_extra_integral, f3_evaluate
from suslov.integrator import conservation_report, simulate
from suslov.model import SuslovParams


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--p", type=int, nargs="+", default=[1, 2, 3, 5, 7, 9])
    ap.add_argument("--d", type=float, nargs="+", default=[0.5, 1.0])
    ap.add_argument("--T", type=float, default=20.0)
    ap.add_argument("--rel-tol", type=float, default=1e-10)
    args = ap.parse_args()

    g = np.array([0.3, -0.5, 0.8]) / np.linalg.norm([0.3, -0.5, 0.8])
    print(f"{'p':>3} {'d':>5} {'F1':>10} {'F2':>10} {'F3':>10} {'steps':>6}")
    for p in args.p:
        for d in args.d:
            x0 = np.array([0.4 * p / d, -0.9 * p / d, *g])
            extra = {}
            if p % 2:
                E = build_extra_integral(p, d)
                extra["F3"] = lambda Y, E=E, d=d: f3_evaluate(E, Y, d)
            tr = simulate(SuslovParams.special(p, d), x0, -args.T, args.T, rel_tol=args.rel_tol, abs_tol=args.rel_tol / 100, extra=extra)
            rep = conservation_report(tr)
            f3 = f"{rep['F3']:.2e}" if "F3" in rep else "-"
            print(f"{p:>3} {d:>5g} {rep['F1']:>10.2e} {rep['F2']:>10.2e} {f3:>10} {tr.stats.steps:>6}")


if __name__ == "__main__":
    main()
