"""Finite metric spaces and compatible pairs.

A compatible pair is two finite metric spaces ``(X0, d0)`` and ``(X1, d1)``
sharing at least one point, both sitting inside an ambient ``(X, dX)`` with
``dX <= C_i * d_i`` on ``X_i``.  Everything downstream works on instances of
:class:`CompatiblePair`.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

DEFAULT_TOL = 1e-9


class MetricStructureError(ValueError):
    """Malformed table: not square, wrong size, negative or non-finite entry."""


class PairError(ValueError):
    """The two spaces cannot form a compatible pair at all."""


class PointError(KeyError):
    """A label that is not in the space it was looked up in."""


@dataclass(frozen=True)
class Violation:
    axiom: str
    witness: tuple[str, ...]
    detail: str

    def as_dict(self) -> dict:
        return {"axiom": self.axiom, "witness": list(self.witness), "detail": self.detail}


@dataclass
class ValidationReport:
    subject: str
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def as_dict(self) -> dict:
        return {
            "subject": self.subject,
            "ok": self.ok,
            "violations": [v.as_dict() for v in self.violations],
        }


@dataclass(frozen=True, eq=False)
class MetricMatrix:
    """Distance table over an ordered tuple of labels."""

    labels: tuple[str, ...]
    dist: np.ndarray

    def __post_init__(self):
        labels = tuple(str(lab) for lab in self.labels)
        if len(set(labels)) != len(labels):
            raise MetricStructureError(f"duplicate labels in {labels}")
        arr = np.array(self.dist, dtype=float, copy=True)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise MetricStructureError(f"distance table must be square, got shape {arr.shape}")
        if arr.shape[0] != len(labels):
            raise MetricStructureError(
                f"{len(labels)} labels but a {arr.shape[0]}x{arr.shape[0]} table"
            )
        if not np.all(np.isfinite(arr)):
            raise MetricStructureError("distance table has non-finite entries")
        if np.any(arr < 0):
            raise MetricStructureError("distance table has negative entries")
        arr.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "dist", arr)
        object.__setattr__(self, "_index", {lab: i for i, lab in enumerate(labels)})

    def __len__(self) -> int:
        return len(self.labels)

    def __contains__(self, label: str) -> bool:
        return label in self._index

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise PointError(f"point {label!r} not in {self.labels}") from None

    def d(self, x: str, y: str) -> float:
        return float(self.dist[self.index(x), self.index(y)])

    def restrict(self, labels: Sequence[str]) -> "MetricMatrix":
        idx = [self.index(lab) for lab in labels]
        return MetricMatrix(tuple(labels), self.dist[np.ix_(idx, idx)])

    def scaled(self, c: float) -> "MetricMatrix":
        return MetricMatrix(self.labels, c * self.dist)

    def relabeled(self, mapping: dict[str, str]) -> "MetricMatrix":
        return MetricMatrix(tuple(mapping[lab] for lab in self.labels), self.dist)


def validate_metric(m: MetricMatrix, tol: float = DEFAULT_TOL, name: str = "metric") -> ValidationReport:
    """Check identity, symmetry, separation and the triangle inequality.

    Structural problems are caught when the :class:`MetricMatrix` is built;
    here every axiom failure is listed with a witnessing tuple of labels.
    """
    report = ValidationReport(name)
    D = m.dist
    lab = m.labels
    n = len(lab)
    for i in range(n):
        if abs(D[i, i]) > tol:
            report.violations.append(Violation("identity", (lab[i],), f"d={float(D[i, i])!r}"))
    for i in range(n):
        for j in range(i + 1, n):
            if abs(D[i, j] - D[j, i]) > tol:
                report.violations.append(
                    Violation("symmetry", (lab[i], lab[j]), f"{float(D[i, j])!r} != {float(D[j, i])!r}")
                )
            if D[i, j] <= tol or D[j, i] <= tol:
                report.violations.append(
                    Violation("separation", (lab[i], lab[j]), f"d={float(min(D[i, j], D[j, i]))!r}")
                )
    # slack[i, j, k] = D[i, j] + D[j, k] - D[i, k]
    slack = D[:, :, None] + D[None, :, :] - D[:, None, :]
    for i, j, k in zip(*np.nonzero(slack < -tol)):
        if i == k or j in (i, k):
            continue
        report.violations.append(
            Violation(
                "triangle",
                (lab[i], lab[j], lab[k]),
                f"d({lab[i]},{lab[k]})={float(D[i, k])!r} > {float(D[i, j])!r} + {float(D[j, k])!r}",
            )
        )
    return report


@dataclass(frozen=True)
class InterpParams:
    """Interpolation exponent ``theta`` in (0, 1) and integrability ``q`` in [1, inf].

    ``q = math.inf`` is the supremum case and is kept as the IEEE infinity,
    never as a large finite number.  The Hölder conjugate ``p`` is also held
    as a :class:`~fractions.Fraction` (``None`` for infinity) so that
    ``1/p + 1/q = 1`` holds exactly, see :meth:`conjugate_identity_holds`.
    """

    theta: float
    q: float = math.inf
    p: float = field(init=False, repr=False)
    q_exact: Fraction | None = field(init=False, repr=False, compare=False)
    p_exact: Fraction | None = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        theta = float(self.theta)
        q = parse_q(self.q)
        if not (0.0 < theta < 1.0):
            raise ValueError(f"theta must lie in (0, 1), got {theta}")
        if not q >= 1.0:
            raise ValueError(f"q must be >= 1, got {q}")
        if math.isinf(q):
            q_exact, p_exact = None, Fraction(1)
        elif q == 1.0:
            q_exact, p_exact = Fraction(1), None
        else:
            q_exact = Fraction(q)
            p_exact = q_exact / (q_exact - 1)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "q_exact", q_exact)
        object.__setattr__(self, "p_exact", p_exact)
        object.__setattr__(self, "p", math.inf if p_exact is None else float(p_exact))

    @property
    def q_is_inf(self) -> bool:
        return math.isinf(self.q)

    def conjugate_identity_holds(self) -> bool:
        inv_p = Fraction(0) if self.p_exact is None else 1 / self.p_exact
        inv_q = Fraction(0) if self.q_exact is None else 1 / self.q_exact
        return inv_p + inv_q == 1

    def as_dict(self) -> dict:
        return {"theta": self.theta, "q": format_q(self.q)}


def parse_q(q: float | str) -> float:
    if isinstance(q, str):
        s = q.strip().lower()
        if s in ("inf", "infinity", "oo", "∞"):
            return math.inf
        return float(s)
    return float(q)


def format_q(q: float) -> str | float:
    return "inf" if math.isinf(q) else q


@dataclass(frozen=True, eq=False)
class CompatiblePair:
    """Two finite metric spaces with a common ambient metric.

    ``dX`` is the ambient metric restricted to ``X0 ∪ X1``; its label order
    is the canonical point order for the whole instance.
    """

    X0: tuple[str, ...]
    X1: tuple[str, ...]
    d0: MetricMatrix
    d1: MetricMatrix
    dX: MetricMatrix
    C0: float = 1.0
    C1: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "X0", tuple(self.X0))
        object.__setattr__(self, "X1", tuple(self.X1))
        if set(self.d0.labels) != set(self.X0):
            raise MetricStructureError("d0 labels do not match X0")
        if set(self.d1.labels) != set(self.X1):
            raise MetricStructureError("d1 labels do not match X1")
        if set(self.dX.labels) != set(self.X0) | set(self.X1):
            raise MetricStructureError("dX labels must be exactly X0 ∪ X1")
        if not (self.C0 > 0 and self.C1 > 0):
            raise MetricStructureError("compatibility constants must be positive")
        s0, s1 = set(self.X0), set(self.X1)
        object.__setattr__(self, "_s0", s0)
        object.__setattr__(self, "_s1", s1)
        order = self.dX.labels
        object.__setattr__(self, "union", order)
        object.__setattr__(self, "_intersection", tuple(x for x in order if x in s0 and x in s1))

    @property
    def points(self) -> tuple[str, ...]:
        return self.union

    def in0(self, x: str) -> bool:
        return x in self._s0

    def in1(self, x: str) -> bool:
        return x in self._s1

    def in_union(self, x: str) -> bool:
        return x in self._s0 or x in self._s1

    def in_intersection(self, x: str) -> bool:
        return x in self._s0 and x in self._s1

    @classmethod
    def from_dict(cls, data: dict) -> "CompatiblePair":
        try:
            X0 = [str(x) for x in data["X0"]]
            X1 = [str(x) for x in data["X1"]]
            d0 = MetricMatrix(tuple(X0), np.asarray(data["d0"], dtype=float))
            d1 = MetricMatrix(tuple(X1), np.asarray(data["d1"], dtype=float))
            points = data.get("points")
            if points is None:
                points = list(dict.fromkeys(X0 + X1))
            dX = MetricMatrix(tuple(str(p) for p in points), np.asarray(data["dX"], dtype=float))
            C0 = float(data.get("C0", 1.0))
            C1 = float(data.get("C1", 1.0))
        except KeyError as exc:
            raise MetricStructureError(f"instance is missing field {exc}") from None
        except (TypeError, ValueError) as exc:
            if isinstance(exc, MetricStructureError):
                raise
            raise MetricStructureError(f"malformed instance: {exc}") from None
        return cls(tuple(X0), tuple(X1), d0, d1, dX, C0, C1)

    def to_dict(self) -> dict:
        return {
            "points": list(self.union),
            "X0": list(self.X0),
            "X1": list(self.X1),
            "d0": self.d0.dist.tolist(),
            "d1": self.d1.dist.tolist(),
            "dX": self.dX.dist.tolist(),
            "C0": self.C0,
            "C1": self.C1,
        }

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def relabeled(self, mapping: dict[str, str]) -> "CompatiblePair":
        return CompatiblePair(
            tuple(mapping[x] for x in self.X0),
            tuple(mapping[x] for x in self.X1),
            self.d0.relabeled(mapping),
            self.d1.relabeled(mapping),
            self.dX.relabeled(mapping),
            self.C0,
            self.C1,
        )

    def with_constants(self, C0: float, C1: float) -> "CompatiblePair":
        return CompatiblePair(self.X0, self.X1, self.d0, self.d1, self.dX, C0, C1)


def trivial_pair(m: MetricMatrix) -> CompatiblePair:
    """``X0 = X1 = X`` with ``d0 = d1 = dX``."""
    return CompatiblePair(m.labels, m.labels, m, m, m)


def intersection(pair: CompatiblePair) -> tuple[str, ...]:
    """``X0 ∩ X1`` in the instance's canonical label order."""
    return pair._intersection


def validate_pair(pair: CompatiblePair, tol: float = DEFAULT_TOL) -> ValidationReport:
    if not intersection(pair):
        raise PairError("X0 and X1 are disjoint; a compatible pair needs a common point")
    report = ValidationReport("pair")
    for name, labels, di, C in (("C0", pair.X0, pair.d0, pair.C0), ("C1", pair.X1, pair.d1, pair.C1)):
        for a in range(len(labels)):
            for b in range(a + 1, len(labels)):
                x, y = labels[a], labels[b]
                lhs = pair.dX.d(x, y)
                rhs = C * di.d(x, y)
                if lhs > rhs + tol:
                    report.violations.append(
                        Violation("compatibility", (x, y), f"dX={lhs!r} > {name}*d={rhs!r}")
                    )
    return report


def validate_instance(pair: CompatiblePair, tol: float = DEFAULT_TOL) -> list[ValidationReport]:
    return [
        validate_metric(pair.d0, tol, "d0"),
        validate_metric(pair.d1, tol, "d1"),
        validate_metric(pair.dX, tol, "dX"),
        validate_pair(pair, tol),
    ]


def metric_from_rows(labels: Iterable[str], rows) -> MetricMatrix:
    return MetricMatrix(tuple(labels), np.asarray(rows, dtype=float))
