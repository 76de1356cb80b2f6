"""The K-side interpolated metric on the intersection.

``beta(x, y)`` is ``gamma`` of the dyadic profile ``k -> K_M(2**k; x, y)``.
Only a finite window of the profile is evaluated; the rest is certified:

* ``K_M(t)`` is nondecreasing in ``t`` and never exceeds ``d0(x, y)``, so
  once the profile reaches ``d0(x, y)`` it stays there and the right tail
  is an exact geometric series.  Otherwise ``d0(x, y)`` bounds it.
* ``K_M(t) / t`` is nonincreasing and never exceeds ``d1(x, y)``, so once
  the profile equals ``2**k * d1(x, y)`` the left tail is exact as well.
  Otherwise ``2**k * d1(x, y)`` bounds it.

On a finite instance every Cauchy sequence is eventually constant, so the
relative completion of ``(X0 ∩ X1, beta)`` adds no points: the interpolated
space is the intersection itself with metric ``beta``.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from .functionals import km_matrix
from .pairspace import CompatiblePair, InterpParams, PointError, intersection
from .seqnorm import CertifiedValue, WindowedSequence, gamma

DEFAULT_WINDOW = 40
DEFAULT_CAP = 120
WIDTH_TOL = 1e-9


class WindowCapExceeded(RuntimeError):
    """The certified interval is still too wide at the maximal window."""


def max_window() -> int:
    raw = os.environ.get("MINTERP_MAX_WINDOW")
    return DEFAULT_CAP if raw is None else int(raw)


def _tail_masses(params: InterpParams, scale: float, k_start: int, rate: float) -> float:
    """Mass of ``scale * 2**(-rate*j)``-type geometric tails.

    Returns ``sum_{j>=0} (scale * 2**(-rate*(k_start + j)))**q`` for finite
    ``q`` and the first term for ``q = inf``.
    """
    first = scale * 2.0 ** (-rate * k_start)
    if params.q_is_inf:
        return first
    q = params.q
    return first**q / -math.expm1(-rate * q * math.log(2.0))


def _profile_sequence(
    params: InterpParams, profile: np.ndarray, k_lo: int, k_hi: int, d0xy: float, d1xy: float
) -> WindowedSequence:
    th = params.theta
    # right tail, k > k_hi: weighted term 2^{-k th} d0
    hi = _tail_masses(params, d0xy, k_hi + 1, th)
    hi_floor = hi if profile[-1] >= d0xy else 0.0
    # left tail, k < k_lo: weighted term 2^{k (1-th)} d1, j = k_lo - 1 - k >= 0
    lo = _tail_masses(params, d1xy * 2.0 ** ((k_lo - 1) * (1.0 - th)), 0, 1.0 - th)
    lo_floor = lo if profile[0] >= 2.0**k_lo * d1xy else 0.0
    return WindowedSequence(k_lo, k_hi, tuple(profile), lo, hi, lo_floor, hi_floor)


@dataclass(frozen=True)
class BetaMatrix:
    points: tuple[str, ...]
    values: tuple[tuple[CertifiedValue, ...], ...]
    params: InterpParams
    window: tuple[int, int]

    @property
    def lower(self) -> np.ndarray:
        return np.array([[v.lower for v in row] for row in self.values]).reshape(len(self.points), -1)

    @property
    def upper(self) -> np.ndarray:
        return np.array([[v.upper for v in row] for row in self.values]).reshape(len(self.points), -1)

    @property
    def mid(self) -> np.ndarray:
        return 0.5 * (self.lower + self.upper)

    def __getitem__(self, xy: tuple[str, str]) -> CertifiedValue:
        x, y = xy
        return self.values[self.points.index(x)][self.points.index(y)]


def _windows(start: int, cap: int):
    w = min(start, cap)
    while True:
        yield w
        if w >= cap:
            return
        w = min(2 * w, cap)


def beta_matrix(
    pair: CompatiblePair,
    params: InterpParams,
    window: int = DEFAULT_WINDOW,
    width_tol: float = WIDTH_TOL,
) -> BetaMatrix:
    pts = intersection(pair)
    n = len(pts)
    if n == 1:
        return BetaMatrix(pts, ((CertifiedValue.exact(0.0),),), params, (0, 0))
    idx = [pair.union.index(x) for x in pts]
    D0 = pair.d0.restrict(pts).dist
    D1 = pair.d1.restrict(pts).dist
    J1 = np.maximum(D0, D1)
    cache: dict[int, np.ndarray] = {}

    def profile_at(k: int) -> np.ndarray:
        if k not in cache:
            cache[k] = km_matrix(pair, 2.0**k)[np.ix_(idx, idx)]
        return cache[k]

    cap = max_window()
    for w in _windows(window, cap):
        ks = range(-w, w + 1)
        stack = np.stack([profile_at(k) for k in ks])
        rows = []
        worst = 0.0
        for i in range(n):
            row = []
            for j in range(n):
                if i == j:
                    row.append(CertifiedValue.exact(0.0))
                    continue
                seq = _profile_sequence(params, stack[:, i, j], -w, w, D0[i, j], D1[i, j])
                cv = gamma(params, seq)
                worst = max(worst, cv.width / J1[i, j])
                row.append(cv)
            rows.append(tuple(row))
        if worst < width_tol:
            return BetaMatrix(pts, tuple(rows), params, (-w, w))
    raise WindowCapExceeded(
        f"relative interval width {worst:.3g} >= {width_tol:g} at window ±{cap}; "
        "raise MINTERP_MAX_WINDOW"
    )


def beta(
    pair: CompatiblePair,
    params: InterpParams,
    x: str,
    y: str,
    window: int = DEFAULT_WINDOW,
    width_tol: float = WIDTH_TOL,
) -> CertifiedValue:
    for z in (x, y):
        if not pair.in_intersection(z):
            raise PointError(f"point {z!r} not in X0 ∩ X1")
    if x == y:
        return CertifiedValue.exact(0.0)
    return beta_matrix(pair, params, window, width_tol)[x, y]
