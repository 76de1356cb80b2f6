"""Measure how far p is from symmetric and how often delta drops below P or p.

Neither p = P nor delta = P is a theorem, so these counts are the empirical
answer on a seeded corpus.
"""

import argparse
import itertools

from minterp.interp_jmprime import delta_matrix
from minterp.pairspace import intersection
from minterp.verify import corpus_pair, default_grid

def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=200)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--n-max", type=int, default=8)
    args = ap.parse_args()

    print(f"{'theta':>6} {'q':>5} {'pairs':>7} {'p!=p^T':>8} {'max rel asym':>13} {'p>delta':>8} {'delta<P':>8}")
    for params in default_grid():
        pairs = asym = above = below = 0
        worst = 0.0
        for i in range(args.n):
            pair = corpus_pair(args.seed, i, args.n_max)
            dm = delta_matrix(pair, params)
            p, P, d = dm.p, dm.P, dm.values
            for a, b in itertools.permutations(range(len(intersection(pair))), 2):
                pairs += 1
                rel = abs(p[a, b] - p[b, a]) / max(p[a, b], p[b, a])
                worst = max(worst, rel)
                asym += rel > 1e-12
                above += p[a, b] > d[a, b] * (1 + 1e-12)
                below += d[a, b] < P[a, b] * (1 - 1e-12)
        q = params.as_dict()["q"]
        print(f"{params.theta:>6} {q!s:>5} {pairs:>7} {asym:>8} {worst:>13.3e} {above:>8} {below:>8}")

if __name__ == "__main__":
    main()
