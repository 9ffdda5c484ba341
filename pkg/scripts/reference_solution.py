"""Solve the ruled-surface ODE at m = 4, p = 3, c = 3, lambda = 1/2 and write an SVG."""

import argparse
from fractions import Fraction
from pathlib import Path

import numpy as np

from chernscal import calabi_solver as cs
from chernscal import cli


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", type=Path, default=Path("out"))
    args = ap.parse_args()
    args.out_dir.mkdir(parents=True, exist_ok=True)
    json_path = args.out_dir / "reference.json"
    cli.main(["solve-ruled", "--m", "4", "--p", "3", "--c", "3", "--lambda", "0.5",
              "--out", str(json_path)])
    cli.main(["plot", "--in", str(json_path), "--out", str(args.out_dir / "reference.svg")])

    sol = cs.solve(cs.RuledParams.from_lambda(4, 3, 3, Fraction(1, 2)))
    xs = np.linspace(0.0, 1.0, 2001)
    vals = sol.f(xs + 0.5)
    k = int(np.argmax(vals))
    print(f"A = {sol.A:.6g}  B = {sol.B:.6g}  C = {sol.C:.6g}  D = {sol.D:.6g}")
    print(f"positivity: {sol.positivity.mode}")
    print(f"peak f = {vals[k]:.5f} at x = {xs[k]:.4f}")
    print(f"wrote {json_path} and {args.out_dir / 'reference.svg'}")


if __name__ == "__main__":
    main()
