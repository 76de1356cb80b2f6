"""Dyadically weighted l^q functionals on integer-indexed sequences.

``gamma`` evaluates ``[sum_k (2**(-k*theta) |x_k|)**q]**(1/q)`` (or the
weighted supremum when ``q = inf``) on a finite window and returns an
interval that certifies the value of the full bi-infinite sum.

Two different constants appear in the theory and both are exposed:

* :func:`m_gamma` is the functional applied to ``min(1, 2**k)``; it bounds
  the K-side interpolated metric from above and below.
* :func:`m_holder` is the conjugate-exponent norm of ``2**(j*theta) *
  min(1, 2**-j)``; it is the constant in ``K_M(1) <= M * p``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .pairspace import InterpParams


class HypothesisViolation(ValueError):
    """The pointwise domination ``a_k <= omega0 * b_k`` fails at some index."""


@dataclass(frozen=True)
class CertifiedValue:
    lower: float
    upper: float

    def __post_init__(self):
        if not (math.isfinite(self.lower) and math.isfinite(self.upper)):
            raise ValueError(f"certified bounds must be finite: [{self.lower}, {self.upper}]")
        if self.lower > self.upper:
            raise ValueError(f"empty interval [{self.lower}, {self.upper}]")

    @classmethod
    def exact(cls, v: float) -> "CertifiedValue":
        return cls(v, v)

    @property
    def mid(self) -> float:
        return 0.5 * (self.lower + self.upper)

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def scale(self, c: float) -> "CertifiedValue":
        if c < 0:
            raise ValueError("only nonnegative scaling keeps the interval ordered")
        return CertifiedValue(c * self.lower, c * self.upper)

    def as_list(self) -> list[float]:
        return [self.lower, self.upper]


@dataclass(frozen=True)
class WindowedSequence:
    """Values ``x_k`` for ``k_lo <= k <= k_hi`` plus bounds on what was left out.

    Tail quantities are expressed in the units of the functional they feed:
    the omitted mass ``sum (2**(-k*theta) |x_k|)**q`` when ``q`` is finite,
    the omitted weighted supremum when ``q`` is infinite.  ``tail_bound_*``
    are upper bounds; ``tail_floor_*`` are optional certified lower bounds
    (zero unless the omitted part is known exactly).
    """

    k_lo: int
    k_hi: int
    values: tuple[float, ...]
    tail_bound_lo: float = 0.0
    tail_bound_hi: float = 0.0
    tail_floor_lo: float = 0.0
    tail_floor_hi: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if self.k_hi < self.k_lo or not self.values:
            raise ValueError("empty window")
        if len(self.values) != self.k_hi - self.k_lo + 1:
            raise ValueError(
                f"window [{self.k_lo}, {self.k_hi}] needs {self.k_hi - self.k_lo + 1} values, "
                f"got {len(self.values)}"
            )
        for name in ("tail_bound_lo", "tail_bound_hi", "tail_floor_lo", "tail_floor_hi"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise ValueError(f"{name} must be nonnegative and finite, got {v}")
        if self.tail_floor_lo > self.tail_bound_lo or self.tail_floor_hi > self.tail_bound_hi:
            raise ValueError("tail floor exceeds tail bound")

    @classmethod
    def from_function(cls, f, k_lo: int, k_hi: int, **tails) -> "WindowedSequence":
        return cls(k_lo, k_hi, tuple(f(k) for k in range(k_lo, k_hi + 1)), **tails)

    @property
    def ks(self) -> range:
        return range(self.k_lo, self.k_hi + 1)

    def scale(self, c: float, params: InterpParams) -> "WindowedSequence":
        """Multiply every ``x_k`` by ``c >= 0``; tails rescale in their own units."""
        tc = c if params.q_is_inf else c**params.q
        return WindowedSequence(
            self.k_lo,
            self.k_hi,
            tuple(c * v for v in self.values),
            tc * self.tail_bound_lo,
            tc * self.tail_bound_hi,
            tc * self.tail_floor_lo,
            tc * self.tail_floor_hi,
        )


def weighted_terms(params: InterpParams, ks: Sequence[int] | range, values: Sequence[float]) -> np.ndarray:
    ks = np.asarray(ks, dtype=float)
    return np.exp2(-ks * params.theta) * np.abs(np.asarray(values, dtype=float))


def gamma(params: InterpParams, seq: WindowedSequence) -> CertifiedValue:
    terms = weighted_terms(params, seq.ks, seq.values)
    if params.q_is_inf:
        w = float(terms.max())
        lower = max(w, seq.tail_floor_lo, seq.tail_floor_hi)
        upper = max(w, seq.tail_bound_lo, seq.tail_bound_hi)
        return CertifiedValue(lower, upper)
    q = params.q
    mass = float(np.sum(terms**q))
    lower = (mass + seq.tail_floor_lo + seq.tail_floor_hi) ** (1.0 / q)
    upper = (mass + seq.tail_bound_lo + seq.tail_bound_hi) ** (1.0 / q)
    return CertifiedValue(lower, max(lower, upper))


def _one_minus_pow2(x: float) -> float:
    """``1 - 2**(-x)`` without cancellation for small ``x``."""
    return -math.expm1(-x * math.log(2.0))


def _two_sided_geometric(first: float, second: float, r: float) -> float:
    # [1/(1 - 2^-first) + 2^-second/(1 - 2^-second)]^(1/r)
    total = 1.0 / _one_minus_pow2(first) + 2.0 ** (-second) / _one_minus_pow2(second)
    return total ** (1.0 / r)


def m_gamma(params: InterpParams) -> float:
    """``gamma`` of the sequence ``min(1, 2**k)`` over all integers ``k``."""
    if params.q_is_inf:
        return 1.0
    q, th = params.q, params.theta
    return _two_sided_geometric(q * th, q * (1.0 - th), q)


def m_holder(params: InterpParams) -> float:
    """l^p norm of ``2**(j*theta) * min(1, 2**-j)``, ``p`` conjugate to ``q``.

    With ``q = 1`` the conjugate is ``p = inf`` and the norm is the supremum,
    which is 1 (attained at ``j = 0``).
    """
    p, th = params.p, params.theta
    if math.isinf(p):
        return 1.0
    return _two_sided_geometric(p * (1.0 - th), p * th, p)


@dataclass(frozen=True)
class ReindexReport:
    ratio: float
    shift: int
    dyadic: bool
    constant: float
    lhs: CertifiedValue
    rhs: CertifiedValue
    holds: bool
    slack: float = field(default=0.0)

    def as_dict(self) -> dict:
        return {
            "lambda": self.ratio,
            "r": self.shift,
            "case": "dyadic" if self.dyadic else "general",
            "C": self.constant,
            "lhs": self.lhs.as_list(),
            "rhs": self.rhs.as_list(),
            "slack": self.slack,
            "holds": self.holds,
        }


def dyadic_shift(ratio: float) -> tuple[int, bool]:
    """``(floor(log2 ratio), ratio is an exact power of two)``."""
    if not (ratio > 0 and math.isfinite(ratio)):
        raise ValueError(f"ratio must be positive and finite, got {ratio}")
    mant, exp = math.frexp(ratio)
    return exp - 1, mant == 0.5


def reindex_bound_check(
    a: WindowedSequence,
    b: WindowedSequence,
    omega0: float,
    omega1: float,
    params: InterpParams,
    tol: float = 1e-12,
) -> ReindexReport:
    """Check the reindexing estimate for an operator with constants ``omega0, omega1``.

    ``a`` holds the image-side step costs measured at scales ``2**k * lam``
    with ``lam = omega0 / omega1``; ``b`` the source-side costs at ``2**k``.
    Given ``a_k <= omega0 * b_k``, shifting ``a`` by ``r = floor(log2 lam)``
    places it on the dyadic grid, and

        gamma(shift_r a) <= C * omega0**(1-theta) * omega1**theta * gamma(b)

    with ``C = 1`` when ``lam`` is a power of two and ``C = 2**theta``
    otherwise.  ``lhs`` is the shifted functional, ``rhs`` the bound.
    """
    if not (omega0 > 0 and omega1 > 0):
        raise ValueError("omega0 and omega1 must be positive")
    if (a.k_lo, a.k_hi) != (b.k_lo, b.k_hi):
        raise ValueError("a and b must share a window")
    for k, ak, bk in zip(a.ks, a.values, b.values):
        if ak > omega0 * bk * (1.0 + tol):
            raise HypothesisViolation(f"a_{k} = {ak!r} exceeds omega0 * b_{k} = {omega0 * bk!r}")
    lam = omega0 / omega1
    r, dyadic = dyadic_shift(lam)
    th = params.theta
    C = 1.0 if dyadic else 2.0**th
    lhs = gamma(params, a).scale(2.0 ** (-r * th))
    rhs = gamma(params, b).scale(C * omega0 ** (1.0 - th) * omega1**th)
    slack = rhs.lower - lhs.upper
    holds = slack >= -tol * max(1.0, rhs.lower)
    return ReindexReport(lam, r, dyadic, C, lhs, rhs, holds, slack)
