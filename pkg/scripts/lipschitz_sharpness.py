"""How tight is the interpolated Lipschitz bound on random operators?

For each case the measured constant on the delta spaces is divided by the
geometric-mean bound, the max bound and the shifted-chain bound.
"""

import argparse

import numpy as np

from minterp.generate import random_operator, random_pair
from minterp.operators import verify_interpolation
from minterp.verify import default_grid


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--cases", type=int, default=300)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    ratios = {"theorem": [], "max": [], "shift": []}
    for i in range(args.cases):
        rng = np.random.default_rng([args.seed, i])
        dom, cod = random_pair(rng, 6, 6), random_pair(rng, 6, 6)
        T = random_operator(rng, dom, cod)
        for params in default_grid():
            rep = verify_interpolation(T, params)
            if rep.measured == 0.0:
                continue
            ratios["theorem"].append(rep.measured / rep.theorem_bound)
            ratios["max"].append(rep.measured / rep.max_bound)
            ratios["shift"].append(rep.measured / rep.shift_bound)
    for name, r in ratios.items():
        r = np.array(r)
        print(f"measured / {name:>7} bound: median {np.median(r):.3f}  p95 {np.quantile(r, 0.95):.3f}  max {r.max():.6f}")


if __name__ == "__main__":
    main()
