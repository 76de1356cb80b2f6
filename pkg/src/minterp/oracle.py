"""Brute-force references for the optimized solvers.

Nothing here uses shortest-path or dynamic-programming code.  Every
infimum is taken by listing candidates outright, which is exponential and
only meant for small instances.  Restricting to simple paths (and, for
``delta``, simple chains) loses nothing because every step cost is
nonnegative: cutting a loop out of a sequence never makes it dearer.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .pairspace import CompatiblePair, InterpParams, PointError, intersection


class BudgetExceeded(RuntimeError):
    """The enumeration would exceed its cap; no partial minimum is returned."""


@dataclass(frozen=True)
class EnumBudget:
    max_chain_len: int = 3
    k_window: tuple[int, int] = (-10, 10)
    max_paths: int = 2_000_000

    def __post_init__(self):
        lo, hi = self.k_window
        if self.max_chain_len < 1 or self.max_paths < 1 or hi < lo:
            raise ValueError(f"invalid budget {self}")


class _Counter:
    def __init__(self, budget: EnumBudget):
        self.cap = budget.max_paths
        self.n = 0

    def tick(self, k: int = 1):
        self.n += k
        if self.n > self.cap:
            raise BudgetExceeded(f"enumeration exceeded {self.cap} candidates")


def _step(pair: CompatiblePair, t: float, u: str, v: str) -> float | None:
    """Admissible step cost, or ``None`` when the step is not admissible."""
    a0 = pair.in0(u) and pair.in0(v)
    a1 = pair.in1(u) and pair.in1(v)
    if a0 and a1:
        return min(pair.d0.d(u, v), t * pair.d1.d(u, v))
    if a0:
        return pair.d0.d(u, v)
    if a1:
        return t * pair.d1.d(u, v)
    return None


def km_bruteforce(pair: CompatiblePair, t: float, x: str, y: str, budget: EnumBudget = EnumBudget()) -> float:
    for z in (x, y):
        if not pair.in_union(z):
            raise PointError(f"point {z!r} not in X0 ∪ X1")
    if x == y:
        return 0.0
    others = [z for z in pair.union if z not in (x, y)]
    counter = _Counter(budget)
    best = math.inf
    for r in range(len(others) + 1):
        for middle in itertools.permutations(others, r):
            counter.tick()
            path = (x, *middle, y)
            total = 0.0
            for u, v in zip(path, path[1:]):
                c = _step(pair, t, u, v)
                if c is None:
                    break
                total += c
            else:
                best = min(best, total)
    return best


def _scale_table(pair: CompatiblePair, params: InterpParams, u: str, v: str, scales: np.ndarray) -> np.ndarray:
    """Weighted cost of the move ``u -> v`` at every scale in ``scales``."""
    return np.exp2(-scales * params.theta) * np.maximum(pair.d0.d(u, v), np.exp2(scales) * pair.d1.d(u, v))


def p_bruteforce(
    pair: CompatiblePair, params: InterpParams, x: str, y: str, budget: EnumBudget = EnumBudget()
) -> float:
    """Minimum over sequences ``y -> ... -> x`` with at most ``max_chain_len`` moves in ``k_window``.

    Every route with no repeated consecutive point is paired with every
    strictly increasing placement of its moves inside the window.
    """
    for z in (x, y):
        if not pair.in_intersection(z):
            raise PointError(f"point {z!r} not in X0 ∩ X1")
    if x == y:
        return 0.0
    pts = intersection(pair)
    lo, hi = budget.k_window
    scales = np.arange(lo, hi + 1, dtype=float)
    counter = _Counter(budget)
    best = math.inf
    for m in range(1, budget.max_chain_len + 1):
        placements = np.array(list(itertools.combinations(range(len(scales)), m)), dtype=int)
        if placements.size == 0:
            continue
        for middle in itertools.product(pts, repeat=m - 1):
            route = (y, *middle, x)
            if any(a == b for a, b in zip(route, route[1:])):
                continue
            counter.tick(len(placements))
            terms = np.stack(
                [_scale_table(pair, params, u, v, scales)[placements[:, j]]
                 for j, (u, v) in enumerate(zip(route, route[1:]))],
                axis=1,
            )
            if params.q_is_inf:
                costs = terms.max(axis=1)
            else:
                costs = (terms**params.q).sum(axis=1) ** (1.0 / params.q)
            best = min(best, float(costs.min()))
    return best


def delta_bruteforce(pair: CompatiblePair, params: InterpParams, budget: EnumBudget = EnumBudget()):
    """``(delta, P, p)`` tables from exhaustive enumeration, intersection order."""
    pts = intersection(pair)
    n = len(pts)
    p = np.zeros((n, n))
    for i, j in itertools.permutations(range(n), 2):
        p[i, j] = p_bruteforce(pair, params, pts[i], pts[j], budget)
    P = 0.5 * (p + p.T)
    counter = _Counter(budget)
    delta = np.zeros((n, n))
    for i, j in itertools.permutations(range(n), 2):
        others = [k for k in range(n) if k not in (i, j)]
        best = math.inf
        for r in range(len(others) + 1):
            for middle in itertools.permutations(others, r):
                counter.tick()
                route = (i, *middle, j)
                best = min(best, math.fsum(P[a, b] for a, b in zip(route, route[1:])))
        delta[i, j] = best
    return delta, P, p


def fixed_points_scan(mapping: dict[str, str]) -> list[str]:
    return sorted(x for x, fx in mapping.items() if x == fx)
