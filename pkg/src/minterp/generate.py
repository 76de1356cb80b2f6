"""Seeded random instances.

Points are drawn in the unit square.  Each of ``d0``, ``d1``, ``dX`` is a
Euclidean metric after stretching the two axes by its own factors, so all
metric axioms hold by construction.  The ambient stretch is chosen below
both others on each axis, which gives ``dX <= d_i`` (``C0 = C1 = 1``).
"""

from __future__ import annotations

import itertools

import numpy as np

from .operators import OperatorTable
from .pairspace import CompatiblePair, MetricMatrix, intersection, trivial_pair

MIN_SEPARATION = 0.02


def _points(rng: np.random.Generator, n: int) -> np.ndarray:
    while True:
        xy = rng.random((n, 2))
        if n < 2:
            return xy
        gaps = [np.linalg.norm(xy[i] - xy[j]) for i, j in itertools.combinations(range(n), 2)]
        if min(gaps) >= MIN_SEPARATION:
            return xy


def _euclid(xy: np.ndarray, stretch: np.ndarray) -> np.ndarray:
    z = xy * stretch
    return np.sqrt(((z[:, None, :] - z[None, :, :]) ** 2).sum(-1))


def random_pair(
    rng: np.random.Generator,
    n_max: int = 8,
    n_min: int = 2,
    min_intersection: int = 1,
    max_intersection: int | None = None,
) -> CompatiblePair:
    n = int(rng.integers(n_min, n_max + 1))
    hi = n if max_intersection is None else min(n, max_intersection)
    lo = min(min_intersection, hi)
    n_int = int(rng.integers(lo, hi + 1))
    labels = [f"p{i}" for i in range(n)]
    role = np.array([2] * n_int + list(rng.integers(0, 2, n - n_int)))
    rng.shuffle(role)
    X0 = [lab for lab, r in zip(labels, role) if r in (0, 2)]
    X1 = [lab for lab, r in zip(labels, role) if r in (1, 2)]

    xy = _points(rng, n)
    s0 = rng.uniform(0.5, 2.0, 2)
    s1 = rng.uniform(0.5, 2.0, 2)
    sX = np.minimum(s0, s1) * rng.uniform(0.5, 1.0, 2)
    D0, D1, DX = _euclid(xy, s0), _euclid(xy, s1), _euclid(xy, sX)
    i0 = [labels.index(x) for x in X0]
    i1 = [labels.index(x) for x in X1]
    return CompatiblePair(
        tuple(X0),
        tuple(X1),
        MetricMatrix(tuple(X0), D0[np.ix_(i0, i0)]),
        MetricMatrix(tuple(X1), D1[np.ix_(i1, i1)]),
        MetricMatrix(tuple(labels), DX),
    )


def random_trivial(rng: np.random.Generator, n_max: int = 8, n_min: int = 2) -> CompatiblePair:
    n = int(rng.integers(n_min, n_max + 1))
    xy = _points(rng, n)
    D = _euclid(xy, rng.uniform(0.5, 2.0, 2))
    return trivial_pair(MetricMatrix(tuple(f"p{i}" for i in range(n)), D))


def _allowed(dom: CompatiblePair, cod: CompatiblePair, x: str) -> list[str]:
    if dom.in_intersection(x):
        return list(intersection(cod))
    if dom.in0(x):
        return list(cod.X0)
    return list(cod.X1)


def random_operator(rng: np.random.Generator, dom: CompatiblePair, cod: CompatiblePair) -> OperatorTable:
    """Any map sending X0 into Y0, X1 into Y1 and the intersection into the intersection."""
    mapping = {}
    for x in dom.union:
        options = _allowed(dom, cod, x)
        mapping[x] = options[int(rng.integers(len(options)))]
    return OperatorTable(dom, cod, mapping)


def _contracts(pair: CompatiblePair, mapping: dict, x: str, fx: str) -> bool:
    for w, fw in mapping.items():
        if pair.in0(x) and pair.in0(w) and pair.d0.d(fx, fw) >= pair.d0.d(x, w):
            return False
        if pair.in1(x) and pair.in1(w) and pair.d1.d(fx, fw) >= pair.d1.d(x, w):
            return False
    return True


def random_contraction(rng: np.random.Generator, pair: CompatiblePair, attempts: int = 50) -> OperatorTable:
    """A self-map with Lipschitz constant below 1 on both X0 and X1.

    Images are assigned point by point among the choices that keep every
    already-fixed pair strictly contracted; an attempt that gets stuck is
    dropped.  Of the completed attempts the one with the largest image is
    kept, and the constant map is the last resort.
    """
    inter = intersection(pair)
    best = None
    for _ in range(attempts):
        anchor = inter[int(rng.integers(len(inter)))]
        mapping = {anchor: anchor}
        order = [x for x in pair.union if x != anchor]
        rng.shuffle(order)
        for x in order:
            options = [v for v in _allowed(pair, pair, x) if _contracts(pair, mapping, x, v)]
            if not options:
                break
            mapping[x] = options[int(rng.integers(len(options)))]
        else:
            if best is None or len(set(mapping.values())) > len(set(best.values())):
                best = mapping
    if best is None:
        best = {x: inter[0] for x in pair.union}
    return OperatorTable(pair, pair, best)
