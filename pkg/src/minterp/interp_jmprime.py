"""The J-side interpolated metric built from bi-infinite linking sequences.

On a finite instance an approximating sequence is eventually constant, so a
bi-infinite linking sequence from ``x`` to ``y`` is any integer-indexed
sequence of intersection points that equals ``y`` far to the left and ``x``
far to the right.  Its cost is ``gamma`` of the step costs
``J_M(2**k; S_k, S_{k+1})``; only steps that actually move contribute.

``p(x, y)`` is the cheapest such sequence.  The cost separates over scales,
so a layered dynamic program over states ``(k, S_k)`` is exact on any window
that contains every scale at which a move could still beat the one-step
sequence costing ``J_M(1; x, y)``:

* a move ``u -> v`` at scale ``k`` costs at least ``2**(-k*theta) * d0(u, v)``,
  which exceeds the bound once ``k`` is small enough;
* it also costs at least ``2**(k*(1-theta)) * d1(u, v)``, which exceeds the
  bound once ``k`` is large enough.

``P`` symmetrizes ``p`` and ``delta`` is the chain closure of ``P``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse.csgraph import floyd_warshall

from .pairspace import CompatiblePair, InterpParams, PointError, intersection

_TIE_RTOL = 1e-12


@dataclass(frozen=True)
class PlacedChain:
    """``points = (z_0, ..., z_m)`` placed so that the move ``z_i -> z_{i+1}`` sits at scale ``start_k + i``.

    The bi-infinite sequence it stands for is ``z_0`` for every ``k <=
    start_k`` and ``z_m`` for every ``k >= start_k + m``.  ``z_0`` is the
    left (``y``) end and ``z_m`` the right (``x``) end.
    """

    points: tuple[str, ...]
    start_k: int = 0

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        if not self.points:
            raise ValueError("a chain needs at least one point")

    @property
    def left(self) -> str:
        return self.points[0]

    @property
    def right(self) -> str:
        return self.points[-1]

    def moves(self) -> list[tuple[int, str, str]]:
        """``(k, S_k, S_{k+1})`` for every scale where the sequence changes."""
        z = self.points
        return [(self.start_k + i, z[i], z[i + 1]) for i in range(len(z) - 1) if z[i] != z[i + 1]]

    def canonical(self) -> "PlacedChain":
        moves = self.moves()
        if not moves:
            return PlacedChain((self.right,), 0)
        first, last = moves[0][0], moves[-1][0]
        lo = first - self.start_k
        return PlacedChain(self.points[lo : last - self.start_k + 2], first)

    def as_dict(self) -> dict:
        return {"points": list(self.points), "start_k": self.start_k}


def _step_term(params: InterpParams, k: int, d0: float, d1: float) -> float:
    t = 2.0**k
    return 2.0 ** (-k * params.theta) * max(d0, t * d1)


def _aggregate(params: InterpParams, terms: list[float]) -> float:
    if not terms:
        return 0.0
    if params.q_is_inf:
        return max(terms)
    q = params.q
    return sum(t**q for t in terms) ** (1.0 / q)


def chain_cost(pair: CompatiblePair, params: InterpParams, chain: PlacedChain) -> float:
    """``gamma`` of the step costs ``J_M(2**k; S_k, S_{k+1})`` along the chain."""
    for z in chain.points:
        if not pair.in_intersection(z):
            raise PointError(f"point {z!r} not in X0 ∩ X1")
    terms = [_step_term(params, k, pair.d0.d(u, v), pair.d1.d(u, v)) for k, u, v in chain.moves()]
    return _aggregate(params, terms)


def certified_window(params: InterpParams, bound: float, d0_min: float, d1_min: float) -> tuple[int, int]:
    """Scales outside ``[k_lo, k_hi]`` host no move cheaper than ``bound``."""
    th = params.theta
    k_lo = math.floor(-math.log2(bound / d0_min) / th) - 1
    k_hi = math.ceil(math.log2(bound / d1_min) / (1.0 - th)) + 1
    return k_lo, k_hi


def _intersection_tables(pair: CompatiblePair):
    pts = intersection(pair)
    return pts, pair.d0.restrict(pts).dist, pair.d1.restrict(pts).dist


def _positive_min(D: np.ndarray) -> float:
    off = D[~np.eye(len(D), dtype=bool)]
    return float(off.min())


def _layer_costs(params: InterpParams, k: int, D0: np.ndarray, D1: np.ndarray) -> np.ndarray:
    """Per-move contributions at scale ``k``, raised to ``q`` when ``q`` is finite."""
    C = 2.0 ** (-k * params.theta) * np.maximum(D0, 2.0**k * D1)
    if not params.q_is_inf:
        C = C**params.q
    np.fill_diagonal(C, 0.0)
    return C


def _combine(params: InterpParams, a, b):
    return np.maximum(a, b) if params.q_is_inf else a + b


def p_func(pair: CompatiblePair, params: InterpParams, x: str, y: str) -> tuple[float, PlacedChain]:
    """Cheapest bi-infinite linking sequence from ``x`` (right end) to ``y`` (left end).

    Among optimal sequences the witness has the earliest first move, then
    the smallest label indices, step by step.  The returned value is the
    cost of that witness.
    """
    for z in (x, y):
        if not pair.in_intersection(z):
            raise PointError(f"point {z!r} not in X0 ∩ X1")
    if x == y:
        return 0.0, PlacedChain((x,), 0)
    pts, D0, D1 = _intersection_tables(pair)
    ix, iy = pts.index(x), pts.index(y)
    bound = max(D0[ix, iy], D1[ix, iy])
    k_lo, k_hi = certified_window(params, bound, _positive_min(D0), _positive_min(D1))
    n = len(pts)

    layers = [_layer_costs(params, k, D0, D1) for k in range(k_lo, k_hi + 1)]
    # to_go[i][u]: best aggregate from S_{k_lo+i} = u to the right end
    to_go = [None] * (len(layers) + 1)
    g = np.full(n, np.inf)
    g[ix] = 0.0
    to_go[-1] = g
    for i in range(len(layers) - 1, -1, -1):
        g = _combine(params, layers[i], to_go[i + 1][None, :]).min(axis=1)
        to_go[i] = g
    best = to_go[0][iy]
    slack = _TIE_RTOL * best

    u, acc, started = iy, 0.0, False
    seq = [iy]
    for i, C in enumerate(layers):
        total = _combine(params, _combine(params, acc, C[u]), to_go[i + 1])
        ok = np.flatnonzero(total <= best + slack)
        moving = ok[ok != u]
        if not started and moving.size:
            v = int(moving[0])
        else:
            v = int(ok[0])
        if v != u:
            started = True
        acc = _combine(params, acc, C[u, v])
        u = v
        seq.append(u)
    assert u == ix, "reconstruction did not reach the right end"
    chain = PlacedChain(tuple(pts[s] for s in seq), k_lo).canonical()
    return chain_cost(pair, params, chain), chain


def p_matrix(pair: CompatiblePair, params: InterpParams) -> np.ndarray:
    """``p(x, y)`` for all intersection pairs; row ``x``, column ``y``."""
    pts, D0, D1 = _intersection_tables(pair)
    n = len(pts)
    if n == 1:
        return np.zeros((1, 1))
    bound = float(np.maximum(D0, D1).max())
    k_lo, k_hi = certified_window(params, bound, _positive_min(D0), _positive_min(D1))
    # reach[s, u]: best aggregate of sequences leaving s on the left and sitting at u
    reach = np.full((n, n), np.inf)
    np.fill_diagonal(reach, 0.0)
    for k in range(k_lo, k_hi + 1):
        C = _layer_costs(params, k, D0, D1)
        reach = _combine(params, reach[:, :, None], C[None, :, :]).min(axis=1)
    if not params.q_is_inf:
        reach = reach ** (1.0 / params.q)
    return reach.T.copy()


def big_p(pair: CompatiblePair, params: InterpParams, x: str, y: str) -> float:
    return 0.5 * (p_func(pair, params, x, y)[0] + p_func(pair, params, y, x)[0])


@dataclass(frozen=True, eq=False)
class DeltaMatrix:
    """``delta`` on the intersection, with the ``p`` and ``P`` tables it came from."""

    points: tuple[str, ...]
    values: np.ndarray
    params: InterpParams
    p: np.ndarray
    P: np.ndarray

    def __getitem__(self, xy: tuple[str, str]) -> float:
        x, y = xy
        return float(self.values[self.points.index(x), self.points.index(y)])


def metric_closure(W: np.ndarray) -> np.ndarray:
    """Largest metric below a symmetric nonnegative table (all-pairs shortest chains)."""
    W = np.array(W, dtype=float)
    if len(W) == 1:
        return np.zeros((1, 1))
    return floyd_warshall(W, directed=False)


def delta_matrix(pair: CompatiblePair, params: InterpParams) -> DeltaMatrix:
    pts = intersection(pair)
    p = p_matrix(pair, params)
    P = 0.5 * (p + p.T)
    return DeltaMatrix(pts, metric_closure(P), params, p, P)
