"""Scalar curvatures and identity residuals for the built-in and random models."""

import argparse

import numpy as np

from chernscal import frame_calculus as fc
from chernscal.models import BUILTIN, builtin, random_model


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--random", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    models = [builtin(name) for name in BUILTIN]
    models += [random_model(rng) for _ in range(args.random)]
    print(f"{'model':<18} {'sC':>9} {'sH':>9} {'s':>9} {'sg':>9} {'|N|^2':>8} {'max resid':>10}")
    worst = 0.0
    for model in models:
        r = fc.scalars(model)
        resid = max(r.residuals.values())
        worst = max(worst, resid)
        if not model.name.startswith("random"):
            print(f"{model.name:<18} {r.sC:9.4f} {r.sH:9.4f} {r.s:9.4f} {r.sg:9.4f} "
                  f"{r.norms['N']:8.4f} {resid:10.1e}")
    print(f"{len(models)} models, worst identity residual {worst:.2e}")


if __name__ == "__main__":
    main()
