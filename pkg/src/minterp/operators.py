"""Point maps between compatible pairs and what the theory says about them."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from pathlib import Path

from .interp_jmprime import DeltaMatrix, delta_matrix
from .pairspace import CompatiblePair, InterpParams, MetricMatrix, PointError, intersection
from .seqnorm import dyadic_shift


class OperatorError(ValueError):
    """The map is not a valid operator between the two pairs."""


class PreconditionError(ValueError):
    pass


class InvariantViolation(AssertionError):
    """A computed outcome contradicts a proven statement."""


@dataclass(frozen=True, eq=False)
class OperatorTable:
    domain: CompatiblePair
    codomain: CompatiblePair
    mapping: dict

    def __post_init__(self):
        m = {str(k): str(v) for k, v in self.mapping.items()}
        object.__setattr__(self, "mapping", m)
        dom, cod = self.domain, self.codomain
        missing = [x for x in dom.union if x not in m]
        if missing:
            raise OperatorError(f"map is not total: no image for {missing}")
        extra = [x for x in m if not dom.in_union(x)]
        if extra:
            raise OperatorError(f"map has points outside the domain: {extra}")
        for x in dom.union:
            fx = m[x]
            if not cod.in_union(fx):
                raise OperatorError(f"T({x}) = {fx!r} is outside the codomain")
            if dom.in0(x) and not cod.in0(fx):
                raise OperatorError(f"T({x}) = {fx!r} leaves Y0 although {x} is in X0")
            if dom.in1(x) and not cod.in1(fx):
                raise OperatorError(f"T({x}) = {fx!r} leaves Y1 although {x} is in X1")

    def __call__(self, x: str) -> str:
        return self.mapping[x]

    @property
    def is_endomorphism(self) -> bool:
        return self.domain is self.codomain or self.domain.digest() == self.codomain.digest()

    def omegas(self) -> tuple[float, float]:
        """Lipschitz constants of the restrictions to X0 and to X1."""
        return (
            lipschitz_constant(self.mapping, self.domain.d0, self.codomain.d0),
            lipschitz_constant(self.mapping, self.domain.d1, self.codomain.d1),
        )

    def to_dict(self) -> dict:
        return {"domain": self.domain.to_dict(), "codomain": self.codomain.to_dict(), "map": dict(self.mapping)}


def lipschitz_constant(mapping: dict, dom_metric: MetricMatrix, cod_metric: MetricMatrix) -> float:
    """Largest ratio ``cod(Tx, Ty) / dom(x, y)`` over distinct domain points.

    On a finite space this maximum is the infimum of admissible constants.
    A domain with fewer than two points gets 0.
    """
    labels = dom_metric.labels
    for x in labels:
        if mapping[x] not in cod_metric:
            raise PointError(f"image {mapping[x]!r} of {x!r} not in the codomain metric")
    if len(labels) < 2:
        return 0.0
    best = 0.0
    for x, y in itertools.combinations(labels, 2):
        best = max(best, cod_metric.d(mapping[x], mapping[y]) / dom_metric.d(x, y))
    return best


def _interpolated_ratio(T: OperatorTable, dX: DeltaMatrix, dY: DeltaMatrix):
    best, witness = 0.0, None
    for x, y in itertools.combinations(dX.points, 2):
        ratio = dY[T(x), T(y)] / dX[x, y]
        if ratio > best:
            best, witness = ratio, (x, y)
    return best, witness


@dataclass(frozen=True)
class InterpolationReport:
    params: InterpParams
    omega0: float
    omega1: float
    measured: float
    theorem_bound: float
    max_bound: float
    shift_bound: float
    witness: tuple[str, str] | None
    tol: float

    @property
    def theorem_holds(self) -> bool:
        return self.measured <= self.theorem_bound + self.tol

    @property
    def max_holds(self) -> bool:
        return self.measured <= self.max_bound + self.tol

    @property
    def shift_holds(self) -> bool:
        return self.measured <= self.shift_bound + self.tol

    @property
    def ok(self) -> bool:
        return self.theorem_holds and self.max_holds

    def as_dict(self) -> dict:
        return {
            "params": self.params.as_dict(),
            "omega0": self.omega0,
            "omega1": self.omega1,
            "measured": self.measured,
            "theorem_bound": self.theorem_bound,
            "max_bound": self.max_bound,
            "shift_bound": self.shift_bound,
            "witness": list(self.witness) if self.witness else None,
            "theorem_holds": self.theorem_holds,
            "max_holds": self.max_holds,
        }


def shift_bound(omega0: float, omega1: float, theta: float) -> float:
    """Sharper constant from placing the image chain ``floor(log2(omega0/omega1))`` scales up.

    Equals ``omega0**(1-theta) * omega1**theta`` when the ratio is a power of
    two and never exceeds ``2**theta`` times that.
    """
    if omega0 == 0.0 or omega1 == 0.0:
        return 0.0
    r, _ = dyadic_shift(omega0 / omega1)
    return min(2.0 ** (-r * theta) * omega0, 2.0 ** ((r + 1) * (1.0 - theta)) * omega1)


def verify_interpolation(T: OperatorTable, params: InterpParams, tol: float = 1e-9) -> InterpolationReport:
    """Measure the Lipschitz constant of ``T`` between the two ``delta`` spaces."""
    escaped = [x for x in intersection(T.domain) if not T.codomain.in_intersection(T(x))]
    if escaped:
        raise OperatorError(f"T maps intersection points {escaped} outside Y0 ∩ Y1")
    w0, w1 = T.omegas()
    th = params.theta
    dX = delta_matrix(T.domain, params)
    dY = delta_matrix(T.codomain, params)
    measured, witness = _interpolated_ratio(T, dX, dY)
    return InterpolationReport(
        params=params,
        omega0=w0,
        omega1=w1,
        measured=measured,
        theorem_bound=2.0**th * w0 ** (1.0 - th) * w1**th,
        max_bound=max(w0, w1),
        shift_bound=shift_bound(w0, w1, th),
        witness=witness,
        tol=tol,
    )


def iterate_to_rest(T: OperatorTable, start: str) -> tuple[str, int]:
    """Follow the orbit of ``start`` until it stops moving."""
    seen = {start}
    x = start
    for steps in itertools.count(1):
        fx = T(x)
        if fx == x:
            return x, steps - 1
        if fx in seen:
            raise InvariantViolation(f"orbit of {start!r} cycles through {fx!r} without resting")
        seen.add(fx)
        x = fx


@dataclass(frozen=True)
class FixedPointReport:
    point: str
    omega0: float
    omega1: float
    steps: dict

    def as_dict(self) -> dict:
        return {"fixed_point": self.point, "omega0": self.omega0, "omega1": self.omega1, "steps": self.steps}


def fixed_point_report(T: OperatorTable, params: InterpParams | None = None, tol: float = 0.0) -> FixedPointReport:
    if not T.is_endomorphism:
        raise PreconditionError("fixed points need domain == codomain")
    w0, w1 = T.omegas()
    if not (w0 < 1.0 - tol and w1 < 1.0 - tol):
        raise PreconditionError(f"T must contract both restrictions, got omega0={w0}, omega1={w1}")
    limits, steps = {}, {}
    for x in T.domain.union:
        limits[x], steps[x] = iterate_to_rest(T, x)
    found = set(limits.values())
    if len(found) != 1:
        raise InvariantViolation(f"several resting points {sorted(found)}")
    return FixedPointReport(found.pop(), w0, w1, steps)


def fixed_point(T: OperatorTable, params: InterpParams | None = None, tol: float = 0.0) -> str:
    """The unique fixed point of a map contracting both X0 and X1.

    Every orbit is followed until it rests, from every start point, and all
    of them must end at the same place.
    """
    return fixed_point_report(T, params, tol).point


def closedness_note(T: OperatorTable | None = None) -> dict:
    return {
        "closed": "automatic (finite instance)",
        "reason": "convergent sequences in a finite metric space are eventually constant, "
        "so the graph of any total map is closed",
    }


def load_operator(path: str | Path) -> OperatorTable:
    path = Path(path)
    data = json.loads(path.read_text())
    return operator_from_dict(data, base=path.parent)


def operator_from_dict(data: dict, base: Path | None = None) -> OperatorTable:
    def resolve(ref):
        if isinstance(ref, dict):
            return CompatiblePair.from_dict(ref)
        p = Path(ref)
        if base is not None and not p.is_absolute():
            p = base / p
        return CompatiblePair.from_dict(json.loads(p.read_text()))

    try:
        dom = resolve(data["domain"])
        cod = dom if data["codomain"] == data["domain"] else resolve(data["codomain"])
        mapping = data["map"]
    except KeyError as exc:
        raise OperatorError(f"operator is missing field {exc}") from None
    return OperatorTable(dom, cod, mapping)

