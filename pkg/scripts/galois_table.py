"""Logarithm pattern, degree candidates and verdicts of the reduced equation for a range of p."""

import argparse
import time
from fractions import Fraction

from suslov.galois import exponential_degree_bound, frobenius_log_test, liouvillian_verdict, reduced_equation


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--pmax", type=int, default=14)
    ap.add_argument("--c", default="5/4", help="rational c > 1 (d = sqrt(c^2-1) rational keeps s3, s4 exact)")
    args = ap.parse_args()
    c = Fraction(args.c)
    print(f"{'p':>3}  s1 s2 s3 s4  {'degrees':<16} verdict")
    for p in range(1, args.pmax + 1):
        t0 = time.perf_counter()
        eq = reduced_equation(p, c)
        flags = {i: frobenius_log_test(eq, i).logarithmic for i in (1, 2, 3, 4)}
        marks = "  ".join("L" if flags[i] else "." for i in (1, 2, 3, 4))
        degs = str(list(exponential_degree_bound(p, flags)))
        v = liouvillian_verdict(p, extend=True, c=c)
        tag = " (extension)" if v.extension else ""
        print(f"{p:>3}  {marks}  {degs:<16} {v.kind.value}{tag}  [{time.perf_counter() - t0:.2f} s]")


if __name__ == "__main__":
    main()
