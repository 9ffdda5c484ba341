"""Futaki invariant and solvability of the weighted equation on [0, 1] across slopes."""

import argparse

import numpy as np

from chernscal import toric_futaki as tf


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--a-min", type=float, default=-0.9, help="must exceed -b")
    ap.add_argument("--a-max", type=float, default=3.0)
    ap.add_argument("--points", type=int, default=14)
    ap.add_argument("--b", type=float, default=1.0, help="constant term of the weight")
    args = ap.parse_args()
    I1 = tf.interval()
    print(f"{'a':>8} {'F(z)':>12} {'C':>10} {'kappa':>10} {'compat':>10}")
    for a in np.linspace(args.a_min, args.a_max, args.points):
        w = tf.AffineWeight((float(a),), args.b)
        rep = tf.futaki(I1, w)
        sol = tf.solve_interval(w)
        print(f"{a:8.3f} {rep.futaki_values['z1']:12.3e} {rep.C_value:10.5f} "
              f"{sol.kappa:10.5f} {sol.compat:10.2e}")


if __name__ == "__main__":
    main()
