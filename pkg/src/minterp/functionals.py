"""Per-scale functionals of a compatible pair.

``h_t`` is the cost of one admissible step, ``J_M(t)`` lives on the
intersection, and ``K_M(t)`` is the cheapest admissible linking sequence
between two points of the union.

Step costs are nonnegative, so removing a loop from a linking sequence
never increases its cost.  The infimum over all admissible sequences is
therefore attained by a simple path in the admissibility graph, and
``K_M(t)`` is exactly a single-source shortest-path distance there.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse.csgraph import csgraph_from_dense, dijkstra

from .pairspace import CompatiblePair, PointError, intersection


class NotAdmissibleError(ValueError):
    """A step between a point of X0 \\ X1 and a point of X1 \\ X0."""


@dataclass(frozen=True)
class AdmissibleGraph:
    """Union points plus the two metrics spread onto the union index.

    ``d0`` / ``d1`` are ``nan`` wherever the corresponding metric is not
    defined.  Edges exist exactly between pairs inside X0 or inside X1.
    """

    nodes: tuple[str, ...]
    in0: np.ndarray
    in1: np.ndarray
    d0: np.ndarray
    d1: np.ndarray

    @classmethod
    def of(cls, pair: CompatiblePair) -> "AdmissibleGraph":
        nodes = pair.union
        n = len(nodes)
        in0 = np.array([pair.in0(x) for x in nodes])
        in1 = np.array([pair.in1(x) for x in nodes])
        d0 = np.full((n, n), np.nan)
        d1 = np.full((n, n), np.nan)
        i0 = [nodes.index(x) for x in pair.d0.labels]
        i1 = [nodes.index(x) for x in pair.d1.labels]
        d0[np.ix_(i0, i0)] = pair.d0.dist
        d1[np.ix_(i1, i1)] = pair.d1.dist
        return cls(nodes, in0, in1, d0, d1)

    @property
    def edges(self) -> np.ndarray:
        return np.outer(self.in0, self.in0) | np.outer(self.in1, self.in1)

    def weight_at(self, t: float) -> np.ndarray:
        """``h_t`` on every admissible pair, ``inf`` elsewhere."""
        both0 = np.outer(self.in0, self.in0)
        both1 = np.outer(self.in1, self.in1)
        inter = both0 & both1
        W = np.full(self.d0.shape, np.inf)
        W[both0] = self.d0[both0]
        W[both1 & ~both0] = t * self.d1[both1 & ~both0]
        W[inter] = np.minimum(self.d0[inter], t * self.d1[inter])
        return W


def _check_t(t: float) -> float:
    t = float(t)
    if not t > 0:
        raise ValueError(f"scale t must be positive, got {t}")
    return t


def h_cost(pair: CompatiblePair, t: float, x: str, y: str) -> float:
    """Step cost ``h_t(x, y)``.

    On the intersection both metrics apply and the cheaper one is taken.
    If both points lie in X0 but not both in X1 only ``d0`` is available,
    and symmetrically for X1.
    """
    t = _check_t(t)
    for z in (x, y):
        if not pair.in_union(z):
            raise PointError(f"point {z!r} not in X0 ∪ X1")
    if x == y:
        return 0.0
    both0 = pair.in0(x) and pair.in0(y)
    both1 = pair.in1(x) and pair.in1(y)
    if both0 and both1:
        return min(pair.d0.d(x, y), t * pair.d1.d(x, y))
    if both0:
        return pair.d0.d(x, y)
    if both1:
        return t * pair.d1.d(x, y)
    raise NotAdmissibleError(f"({x!r}, {y!r}) is not an admissible step")


def jm(pair: CompatiblePair, t: float, x: str, y: str) -> float:
    t = _check_t(t)
    for z in (x, y):
        if not pair.in_intersection(z):
            raise PointError(f"point {z!r} not in X0 ∩ X1")
    return max(pair.d0.d(x, y), t * pair.d1.d(x, y))


def jm_matrix(pair: CompatiblePair, t: float) -> np.ndarray:
    """``J_M(t)`` over the intersection, in :func:`intersection` order."""
    t = _check_t(t)
    pts = intersection(pair)
    D0 = pair.d0.restrict(pts).dist
    D1 = pair.d1.restrict(pts).dist
    return np.maximum(D0, t * D1)


def km_matrix(pair: CompatiblePair, t: float) -> np.ndarray:
    """All-pairs ``K_M(t)`` over the union, in ``pair.union`` order."""
    t = _check_t(t)
    W = AdmissibleGraph.of(pair).weight_at(t)
    np.fill_diagonal(W, np.inf)
    graph = csgraph_from_dense(W, null_value=np.inf)
    return dijkstra(graph, directed=False)


def km(pair: CompatiblePair, t: float, x: str, y: str) -> float:
    t = _check_t(t)
    nodes = pair.union
    for z in (x, y):
        if not pair.in_union(z):
            raise PointError(f"point {z!r} not in X0 ∪ X1")
    if x == y:
        return 0.0
    W = AdmissibleGraph.of(pair).weight_at(t)
    np.fill_diagonal(W, np.inf)
    graph = csgraph_from_dense(W, null_value=np.inf)
    dist = dijkstra(graph, directed=False, indices=nodes.index(x))
    return float(dist[nodes.index(y)])


def km_profile(pair: CompatiblePair, x: str, y: str, k_lo: int, k_hi: int) -> list[tuple[int, float]]:
    """``[(k, K_M(2**k; x, y)) for k in k_lo..k_hi]``."""
    if k_lo > k_hi:
        raise ValueError(f"empty scale range [{k_lo}, {k_hi}]")
    return [(k, km(pair, 2.0**k, x, y)) for k in range(k_lo, k_hi + 1)]
