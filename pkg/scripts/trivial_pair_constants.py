"""Compare delta with dX on single-metric instances.

For X0 = X1 = X with one metric, delta is squeezed between dX / M and dX.
This prints the smallest observed delta / dX per parameter together with
1/m_gamma and 1/m_holder, and replays a collinear triple where the sup case
goes below dX / m_gamma.
"""

import argparse
import math

import numpy as np

from minterp.generate import random_trivial
from minterp.interp_jmprime import delta_matrix, p_func
from minterp.pairspace import InterpParams, metric_from_rows, trivial_pair
from minterp.seqnorm import m_gamma, m_holder
from minterp.verify import default_grid


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=100)
    ap.add_argument("--seed", type=int, default=6)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    pairs = [random_trivial(rng, 8) for _ in range(args.n)]

    print(f"{'theta':>6} {'q':>5} {'min delta/dX':>13} {'1/m_gamma':>10} {'1/m_holder':>11}")
    for params in default_grid():
        lo = math.inf
        for pair in pairs:
            d = delta_matrix(pair, params).values
            off = ~np.eye(len(d), dtype=bool)
            lo = min(lo, float((d[off] / pair.dX.dist[off]).min()))
        q = params.as_dict()["q"]
        print(f"{params.theta:>6} {q!s:>5} {lo:>13.6f} {1 / m_gamma(params):>10.6f} {1 / m_holder(params):>11.6f}")

    m = metric_from_rows("yzx", [[0, 1, 2], [1, 0, 1], [2, 1, 0]])
    params = InterpParams(0.5, math.inf)
    value, chain = p_func(trivial_pair(m), params, "x", "y")
    print(f"\ncollinear y-z-x, dX(x, y) = 2, theta=1/2, q=inf: p(x, y) = {value:.6f} via {chain.moves()}")
    print(f"dX / m_gamma = {2 / m_gamma(params):.6f}, dX / m_holder = {2 / m_holder(params):.6f}")


if __name__ == "__main__":
    main()
