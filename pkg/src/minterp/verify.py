"""Property suites run over seeded corpora or user-supplied instances.

Each suite works on one case at a time and returns plain dictionaries, so
cases can be farmed out to worker processes and reassembled in case order.
A *check* is a proven statement and any failure is an invariant violation.
An *observation* is a measured quantity the theory leaves open; it is
reported but never fails a run.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .functionals import jm_matrix, km, km_matrix
from .generate import random_contraction, random_operator, random_pair, random_trivial
from .interp_jmprime import delta_matrix, p_func
from .interp_km import beta_matrix
from .operators import InvariantViolation, OperatorTable, fixed_point_report, verify_interpolation
from .oracle import EnumBudget, delta_bruteforce, fixed_points_scan, km_bruteforce
from .pairspace import DEFAULT_TOL, CompatiblePair, InterpParams, format_q, intersection, validate_metric
from .seqnorm import m_gamma, m_holder

SUITES = (
    "metric-axioms",
    "lemma-inequalities",
    "separator",
    "interpolation-theorem",
    "fixed-point",
    "oracle-equivalence",
)
SCALES = (0.25, 0.5, 1.0, 2.0, 4.0)
THETAS = (0.25, 0.5, 0.75)
QS = (1.0, 2.0, math.inf)
MAX_WITNESSES = 3
ORACLE_TOL = 1e-12


def default_grid() -> list[InterpParams]:
    return [InterpParams(th, q) for th in THETAS for q in QS]


def _ptag(params: InterpParams) -> str:
    return f"theta={params.theta:g},q={format_q(params.q)}"


@dataclass
class CaseResult:
    case: int
    digest: str
    checks: dict = field(default_factory=dict)
    observations: dict = field(default_factory=dict)
    info: dict = field(default_factory=dict)

    def check(self, name: str, passed: bool, witness: dict | None = None):
        entry = self.checks.setdefault(name, {"passed": 0, "failed": 0, "witnesses": []})
        if passed:
            entry["passed"] += 1
        else:
            entry["failed"] += 1
            if len(entry["witnesses"]) < MAX_WITNESSES:
                entry["witnesses"].append({"case": self.case, **(witness or {})})

    def observe(self, name: str, value):
        self.observations[name] = self.observations.get(name, 0) + value

    @property
    def failed(self) -> int:
        return sum(c["failed"] for c in self.checks.values())

    def as_dict(self) -> dict:
        return {
            "case": self.case,
            "digest": self.digest,
            "checks": self.checks,
            "observations": self.observations,
            "info": self.info,
        }


def _pairs(points, ordered=False):
    return itertools.permutations(points, 2) if ordered else itertools.combinations(points, 2)


def _leq(a: float, b: float, tol: float) -> bool:
    return a <= b + tol * max(1.0, abs(b))


def is_trivial(pair: CompatiblePair) -> bool:
    if set(pair.X0) != set(pair.X1):
        return False
    order = pair.union
    return np.array_equal(pair.d0.restrict(order).dist, pair.dX.dist) and np.array_equal(
        pair.d1.restrict(order).dist, pair.dX.dist
    )


# -- suites ---------------------------------------------------------------


def suite_metric_axioms(res: CaseResult, pair: CompatiblePair, grid, tol: float, with_beta: bool = True):
    for t in SCALES:
        rep = validate_metric(type(pair.dX)(pair.union, km_matrix(pair, t)), tol, f"K_M({t:g})")
        res.check(f"K_M({t:g}) metric", rep.ok, {"violations": [v.as_dict() for v in rep.violations[:2]]})
        rep = validate_metric(type(pair.dX)(intersection(pair), jm_matrix(pair, t)), tol, f"J_M({t:g})")
        res.check(f"J_M({t:g}) metric", rep.ok, {"violations": [v.as_dict() for v in rep.violations[:2]]})
    for params in grid:
        dm = delta_matrix(pair, params)
        rep = validate_metric(type(pair.dX)(dm.points, dm.values), tol, "delta")
        res.check(
            f"delta metric [{_ptag(params)}]", rep.ok, {"violations": [v.as_dict() for v in rep.violations[:2]]}
        )
        if with_beta:
            bm = beta_matrix(pair, params)
            width = float((bm.upper - bm.lower).max())
            rep = validate_metric(type(pair.dX)(bm.points, bm.mid), tol + width, "beta")
            res.check(
                f"beta metric [{_ptag(params)}]", rep.ok, {"violations": [v.as_dict() for v in rep.violations[:2]]}
            )


def suite_lemmas(res: CaseResult, pair: CompatiblePair, grid, tol: float, rng: np.random.Generator,
                 n_scale_pairs: int = 20, with_beta: bool = True):
    union = pair.union
    inter = intersection(pair)
    ii = [union.index(x) for x in inter]
    for _ in range(n_scale_pairs):
        # mix dyadic and non-dyadic scales
        a, b = (2.0 ** rng.integers(-4, 5) if rng.random() < 0.5 else 2.0 ** rng.uniform(-4, 4) for _ in range(2))
        Ka, Kb = km_matrix(pair, a), km_matrix(pair, b)
        Ja, Jb = jm_matrix(pair, a), jm_matrix(pair, b)
        up, down = max(1.0, a / b), min(1.0, a / b)
        Ka_i = Ka[np.ix_(ii, ii)]
        for i, j in _pairs(range(len(union))):
            res.check("K_M(a) <= max{1,a/b} K_M(b)", _leq(Ka[i, j], up * Kb[i, j], tol),
                      {"a": a, "b": b, "points": [union[i], union[j]], "lhs": Ka[i, j], "rhs": up * Kb[i, j]})
        for i, j in _pairs(range(len(inter))):
            res.check("J_M(a) <= max{1,a/b} J_M(b)", _leq(Ja[i, j], up * Jb[i, j], tol),
                      {"a": a, "b": b, "points": [inter[i], inter[j]], "lhs": Ja[i, j], "rhs": up * Jb[i, j]})
            res.check("K_M(a) <= min{1,a/b} J_M(b)", _leq(Ka_i[i, j], down * Jb[i, j], tol),
                      {"a": a, "b": b, "points": [inter[i], inter[j]], "lhs": Ka_i[i, j], "rhs": down * Jb[i, j]})
    if not with_beta:
        return
    J1 = jm_matrix(pair, 1.0)
    dX = pair.dX.restrict(inter).dist
    unit_constants = pair.C0 == 1.0 and pair.C1 == 1.0
    for params in grid:
        bm = beta_matrix(pair, params)
        M = m_gamma(params)
        for i, j in _pairs(range(len(inter))):
            w = {"params": params.as_dict(), "points": [inter[i], inter[j]], "beta": bm.values[i][j].as_list()}
            res.check("beta <= m_gamma J_M(1)", _leq(bm.values[i][j].lower, M * J1[i, j], tol), w)
            if unit_constants:
                res.check("m_gamma dX <= beta", _leq(M * dX[i, j], bm.values[i][j].upper, tol), w)


def suite_separator(res: CaseResult, pair: CompatiblePair, grid, tol: float):
    inter = intersection(pair)
    n = len(inter)
    K1 = km_matrix(pair, 1.0)
    ii = [pair.union.index(x) for x in inter]
    K1 = K1[np.ix_(ii, ii)]
    J1 = jm_matrix(pair, 1.0)
    trivial = is_trivial(pair)
    for params in grid:
        dm = delta_matrix(pair, params)
        p, P, delta = dm.p, dm.P, dm.values
        Mh = m_holder(params)
        Mg = m_gamma(params)
        tag = _ptag(params)
        for i in range(n):
            res.check("p(x,x) = 0", p[i, i] == 0.0, {"params": params.as_dict(), "point": inter[i]})
        for i, j in _pairs(range(n), ordered=True):
            w = {"params": params.as_dict(), "points": [inter[i], inter[j]],
                 "p": p[i, j], "P": P[i, j], "delta": delta[i, j], "K_M(1)": K1[i, j], "J_M(1)": J1[i, j]}
            res.check("p(x,y) > 0 for x != y", p[i, j] > 0.0, w)
            res.check("K_M(1) <= m_holder p", _leq(K1[i, j], Mh * p[i, j], tol), w)
            res.check("p <= J_M(1)", _leq(p[i, j], J1[i, j], tol), w)
            res.check("min(p) <= P <= max(p)",
                      min(p[i, j], p[j, i]) <= P[i, j] <= max(p[i, j], p[j, i]), w)
            res.check("P symmetric", P[i, j] == P[j, i], w)
            res.check("K_M(1) <= m_holder delta", _leq(K1[i, j], Mh * delta[i, j], tol), w)
            res.check("delta <= P", _leq(delta[i, j], P[i, j], tol), w)
            res.check("P <= J_M(1)", _leq(P[i, j], J1[i, j], tol), w)
            res.observe(f"p asymmetric [{tag}]", int(abs(p[i, j] - p[j, i]) > tol * max(1.0, p[i, j])))
            res.observe(f"p > delta [{tag}]", int(p[i, j] > delta[i, j] + tol * max(1.0, delta[i, j])))
            res.observe(f"delta < P [{tag}]", int(delta[i, j] < P[i, j] - tol * max(1.0, P[i, j])))
            if trivial:
                d = pair.dX.d(inter[i], inter[j])
                res.check("trivial: dX / m_holder <= delta <= dX",
                          _leq(d / Mh, delta[i, j], tol) and _leq(delta[i, j], d, tol), {**w, "dX": d})
                res.observe(f"trivial: delta < dX / m_gamma [{tag}]", int(delta[i, j] < d / Mg - tol))
    if trivial:
        for i, j in _pairs(range(n)):
            d = pair.dX.d(inter[i], inter[j])
            res.check("trivial: K_M(1) = dX", K1[i, j] == d, {"points": [inter[i], inter[j]], "K_M(1)": K1[i, j], "dX": d})


def suite_interpolation(res: CaseResult, T: OperatorTable, grid, tol: float):
    for params in grid:
        rep = verify_interpolation(T, params, tol)
        w = rep.as_dict()
        res.check("Lipschitz <= 2^theta w0^(1-theta) w1^theta", rep.theorem_holds, w)
        res.check("Lipschitz <= max{w0, w1}", rep.max_holds, w)
        res.check("Lipschitz <= shifted-chain bound", rep.shift_holds, w)


def _is_contraction(T: OperatorTable) -> bool:
    return T.is_endomorphism and max(T.omegas()) < 1.0


def suite_fixed_point(res: CaseResult, T: OperatorTable):
    try:
        rep = fixed_point_report(T)
    except InvariantViolation as exc:
        res.check("unique fixed point from every start", False,
                  {"error": str(exc), "scan": fixed_points_scan(T.mapping), "map": dict(T.mapping)})
        return
    scan = fixed_points_scan(T.mapping)
    res.check("unique fixed point from every start", scan == [rep.point],
              {"iterated": rep.point, "scan": scan, "omega0": rep.omega0, "omega1": rep.omega1})
    res.info["fixed_point"] = rep.point
    res.info["omega"] = [rep.omega0, rep.omega1]


def suite_oracle(res: CaseResult, pair: CompatiblePair, grid, budget: EnumBudget = EnumBudget(),
                 max_union: int = 6, max_intersection: int = 4):
    union = pair.union
    if len(union) <= max_union:
        for t in SCALES:
            K = km_matrix(pair, t)
            for i, j in _pairs(range(len(union))):
                brute = km_bruteforce(pair, t, union[i], union[j], budget)
                single = km(pair, t, union[i], union[j])
                res.check("km = km_bruteforce",
                          abs(K[i, j] - brute) <= ORACLE_TOL and abs(single - brute) <= ORACLE_TOL,
                          {"t": t, "points": [union[i], union[j]], "km": K[i, j], "brute": brute})
    else:
        res.observe("oracle skipped: union too large", 1)
    inter = intersection(pair)
    if len(inter) > max_intersection:
        res.observe("oracle skipped: intersection too large", 1)
        return
    for params in grid:
        dm = delta_matrix(pair, params)
        d_b, _, p_b = delta_bruteforce(pair, params, budget)
        for i, j in _pairs(range(len(inter)), ordered=True):
            value, chain = p_func(pair, params, inter[i], inter[j])
            w = {"params": params.as_dict(), "points": [inter[i], inter[j]], "p_func": value,
                 "p_matrix": dm.p[i, j], "brute": p_b[i, j], "chain": chain.as_dict()}
            res.check("p_func = p_bruteforce",
                      abs(value - p_b[i, j]) <= ORACLE_TOL and abs(dm.p[i, j] - p_b[i, j]) <= ORACLE_TOL, w)
            res.check("delta_matrix = delta_bruteforce", abs(dm.values[i, j] - d_b[i, j]) <= ORACLE_TOL,
                      {"params": params.as_dict(), "points": [inter[i], inter[j]],
                       "delta": dm.values[i, j], "brute": d_b[i, j]})


# -- corpora ----------------------------------------------------------------


def case_rng(seed: int, case: int, stream: int = 0) -> np.random.Generator:
    return np.random.default_rng([seed, case, stream])


def corpus_pair(seed: int, case: int, n_max: int = 8) -> CompatiblePair:
    rng = case_rng(seed, case)
    if case % 10 == 9:
        return random_trivial(rng, n_max)
    return random_pair(rng, n_max)


@dataclass(frozen=True)
class CaseSpec:
    suite: str
    case: int
    seed: int
    pair: CompatiblePair | None = None
    operator: OperatorTable | None = None
    grid: tuple = ()
    tol: float = DEFAULT_TOL


def run_case(spec: CaseSpec) -> dict:
    suites = SUITES if spec.suite == "all" else (spec.suite,)
    grid = list(spec.grid) or default_grid()
    pair = spec.pair
    if pair is None:
        pair = spec.operator.domain if spec.operator is not None else corpus_pair(spec.seed, spec.case)
    res = CaseResult(spec.case, pair.digest())
    for name in suites:
        if name == "metric-axioms":
            suite_metric_axioms(res, pair, grid, spec.tol)
        elif name == "lemma-inequalities":
            suite_lemmas(res, pair, grid, spec.tol, case_rng(spec.seed, spec.case, 1))
        elif name == "separator":
            suite_separator(res, pair, grid, spec.tol)
        elif name == "interpolation-theorem":
            T = spec.operator
            if T is None:
                rng = case_rng(spec.seed, spec.case, 2)
                if spec.pair is None:
                    T = random_operator(rng, random_pair(rng, 6, 6), random_pair(rng, 6, 6))
                else:
                    T = random_operator(rng, pair, pair)
            suite_interpolation(res, T, grid, spec.tol)
        elif name == "fixed-point":
            T = spec.operator
            if T is not None and spec.suite == "all" and not _is_contraction(T):
                res.observe("fixed-point skipped: operator is not a contraction", 1)
                continue
            if T is None or not T.is_endomorphism:
                T = random_contraction(case_rng(spec.seed, spec.case, 3), pair)
            suite_fixed_point(res, T)
        elif name == "oracle-equivalence":
            suite_oracle(res, pair, grid)
        else:
            raise ValueError(f"unknown suite {name!r}")
    return res.as_dict()


def run_cases(specs: list[CaseSpec], jobs: int = 1) -> list[dict]:
    if jobs <= 1:
        results = [run_case(s) for s in specs]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run_case, specs, chunksize=max(1, len(specs) // (4 * jobs))))
    return sorted(results, key=lambda r: r["case"])


def summarize(results: list[dict]) -> dict:
    checks: dict = {}
    observations: dict = {}
    for r in results:
        for name, c in r["checks"].items():
            agg = checks.setdefault(name, {"passed": 0, "failed": 0, "witnesses": []})
            agg["passed"] += c["passed"]
            agg["failed"] += c["failed"]
            room = MAX_WITNESSES - len(agg["witnesses"])
            agg["witnesses"].extend(c["witnesses"][:room])
        for name, v in r["observations"].items():
            observations[name] = observations.get(name, 0) + v
    failed = sum(c["failed"] for c in checks.values())
    return {
        "cases": len(results),
        "failed_checks": failed,
        "ok": failed == 0,
        "checks": dict(sorted(checks.items())),
        "observations": dict(sorted(observations.items())),
    }
