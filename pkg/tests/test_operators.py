import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from minterp.generate import random_contraction, random_operator, random_pair
from minterp.operators import (
    InvariantViolation,
    OperatorError,
    OperatorTable,
    PreconditionError,
    closedness_note,
    fixed_point,
    fixed_point_report,
    iterate_to_rest,
    lipschitz_constant,
    load_operator,
    shift_bound,
    verify_interpolation,
)
from minterp.oracle import fixed_points_scan
from minterp.pairspace import InterpParams

from conftest import GRID, INSTANCES, load, pair_from_seed, params_st, seeds


def test_operator_validation(e3):
    with pytest.raises(OperatorError):
        OperatorTable(e3, e3, {"a": "a", "m": "m"})
    with pytest.raises(OperatorError):
        OperatorTable(e3, e3, {"a": "b", "m": "m", "b": "b"})
    with pytest.raises(OperatorError):
        OperatorTable(e3, e3, {"a": "a", "m": "m", "b": "b", "zz": "a"})
    T = OperatorTable(e3, e3, {"a": "m", "m": "m", "b": "m"})
    assert T("a") == "m" and T.is_endomorphism


def test_lipschitz_constant():
    from minterp.pairspace import metric_from_rows

    m = metric_from_rows("abc", [[0, 1, 2], [1, 0, 1], [2, 1, 0]])
    assert lipschitz_constant({"a": "a", "b": "a", "c": "b"}, m, m) == 1.0
    assert lipschitz_constant({x: x for x in "abc"}, m, m.scaled(0.5)) == 0.5
    assert lipschitz_constant({"a": "c", "b": "b", "c": "a"}, m, m) == 1.0
    single = metric_from_rows("a", [[0]])
    assert lipschitz_constant({"a": "a"}, single, single) == 0.0


def test_shift_bound():
    # power-of-two ratio: exactly the geometric mean
    assert shift_bound(4.0, 1.0, 0.5) == pytest.approx(2.0)
    for w0, w1, th in [(3.0, 1.0, 0.3), (0.2, 0.7, 0.6), (1.0, 1.0, 0.5)]:
        g = w0 ** (1 - th) * w1**th
        assert g * (1 - 1e-12) <= shift_bound(w0, w1, th) <= 2**th * g * (1 + 1e-12)
        assert shift_bound(w0, w1, th) <= max(w0, w1) * (1 + 1e-12)
    assert shift_bound(0.0, 1.0, 0.5) == 0.0


def test_line4_contraction():
    T = load_operator(INSTANCES / "line4_contraction.json")
    assert fixed_point(T) == "v"
    rep = fixed_point_report(T)
    assert rep.omega0 < 1 and rep.omega1 < 1
    assert rep.steps["z"] == 2 and rep.steps["v"] == 0
    assert closedness_note(T)["closed"].startswith("automatic")


def test_fixed_point_preconditions(e1):
    swap = OperatorTable(e1, e1, {"a": "b", "b": "a"})
    with pytest.raises(PreconditionError):
        fixed_point(swap)
    with pytest.raises(InvariantViolation):
        iterate_to_rest(swap, "a")
    e3 = load("e3.json")
    with pytest.raises(PreconditionError):
        fixed_point_report(OperatorTable(e3, e1, {"a": "a", "m": "a", "b": "b"}))


def test_operator_file_inline_and_errors(tmp_path, e1):
    doc = {"domain": e1.to_dict(), "codomain": e1.to_dict(), "map": {"a": "a", "b": "a"}}
    path = tmp_path / "op.json"
    path.write_text(json.dumps(doc))
    T = load_operator(path)
    assert T.omegas() == (0.0, 0.0) and fixed_point(T) == "a"
    path.write_text(json.dumps({"domain": e1.to_dict(), "map": {}}))
    with pytest.raises(OperatorError):
        load_operator(path)


def test_interpolation_requires_intersection_images():
    dom = pair_from_seed(11, 5, min_intersection=2)
    rng = np.random.default_rng(0)
    cod = random_pair(rng, 5)
    T = random_operator(rng, dom, cod)
    rep = verify_interpolation(T, InterpParams(0.5, 2))
    assert rep.ok


@given(seeds, seeds, params_st)
def test_interpolation_theorem(s1, s2, params):
    rng = np.random.default_rng([s1, s2])
    dom, cod = random_pair(rng, 6, 6), random_pair(rng, 6, 6)
    T = random_operator(rng, dom, cod)
    rep = verify_interpolation(T, params)
    assert rep.theorem_holds and rep.max_holds and rep.shift_holds, rep.as_dict()


@given(seeds)
def test_contraction_fixed_point_matches_scan(seed):
    rng = np.random.default_rng(seed)
    pair = random_pair(rng, 7)
    T = random_contraction(rng, pair)
    w0, w1 = T.omegas()
    assert w0 < 1 and w1 < 1
    assert fixed_points_scan(T.mapping) == [fixed_point(T)]


@given(seeds, st.sampled_from(GRID))
def test_contraction_is_a_delta_contraction(seed, params):
    rng = np.random.default_rng(seed)
    pair = random_pair(rng, 6)
    T = random_contraction(rng, pair)
    rep = verify_interpolation(T, params)
    assert rep.measured < 1.0 or math.isclose(rep.measured, 0.0)
