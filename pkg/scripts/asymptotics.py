"""Tabulate A, B/c, C/c^(n-1), D/c^(n-2) for large c against their limits."""

import argparse
from fractions import Fraction

from chernscal import calabi_solver as cs


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m", type=int, default=4)
    ap.add_argument("--p", default="3")
    ap.add_argument("--lam", default="1/2")
    ap.add_argument("--c", type=float, nargs="+", default=[1e2, 1e3, 1e4, 1e5, 1e6])
    args = ap.parse_args()
    template = cs.RuledParams.from_lambda(args.m, Fraction(args.p), 1, Fraction(args.lam))
    rep = cs.asymptotic_check(template, sorted(args.c))
    print(f"{'c':>10} {'A':>14} {'B/c':>14} {'C/c^(n-1)':>14} {'D/c^(n-2)':>14}")
    for row in zip(rep.c_values, rep.A, rep.B_over_c, rep.C_over_cn1, rep.D_over_cn2):
        print(f"{row[0]:10.3g} " + " ".join(f"{v:14.8f}" for v in row[1:]))
    print("limits      " + " ".join(f"{v:14.8f}" for v in rep.x_infty_expected))
    print(f"fitted      {rep.A_limit:14.8f} {rep.B_slope:14.8f} {rep.C_slope:14.8f}")
    print(f"max relative deviation of fitted limits: {rep.max_relative_deviation:.2e}")


if __name__ == "__main__":
    main()
