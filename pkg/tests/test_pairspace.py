import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from minterp.pairspace import (
    CompatiblePair,
    InterpParams,
    MetricMatrix,
    MetricStructureError,
    PairError,
    PointError,
    intersection,
    metric_from_rows,
    parse_q,
    trivial_pair,
    validate_instance,
    validate_metric,
    validate_pair,
)

from conftest import pairs, seeds, trivial_from_seed


def test_metric_matrix_rejects_bad_tables():
    with pytest.raises(MetricStructureError):
        MetricMatrix(("a", "b"), np.zeros((2, 3)))
    with pytest.raises(MetricStructureError):
        MetricMatrix(("a", "b"), np.array([[0, -1], [-1, 0]]))
    with pytest.raises(MetricStructureError):
        MetricMatrix(("a", "b"), np.array([[0, np.nan], [np.nan, 0]]))
    with pytest.raises(MetricStructureError):
        MetricMatrix(("a", "a"), np.zeros((2, 2)))
    with pytest.raises(MetricStructureError):
        MetricMatrix(("a",), np.zeros((2, 2)))


def test_metric_matrix_is_read_only():
    m = metric_from_rows("ab", [[0, 1], [1, 0]])
    with pytest.raises(ValueError):
        m.dist[0, 1] = 5.0


def test_metric_lookup_and_restrict():
    m = metric_from_rows("abc", [[0, 1, 2], [1, 0, 1.5], [2, 1.5, 0]])
    assert m.d("c", "b") == 1.5
    r = m.restrict(["c", "a"])
    assert r.labels == ("c", "a") and r.d("a", "c") == 2.0
    with pytest.raises(PointError):
        m.d("a", "z")
    assert m.scaled(2.0).d("a", "c") == 4.0


def test_validate_metric_reports_triangle_witness():
    m = metric_from_rows("xyz", [[0, 1, 5], [1, 0, 1], [5, 1, 0]])
    rep = validate_metric(m)
    assert not rep.ok
    tri = [v for v in rep.violations if v.axiom == "triangle"]
    assert ("x", "y", "z") in [tuple(v.witness) for v in tri]


def test_validate_metric_other_axioms():
    m = metric_from_rows("xy", [[0.5, 1], [2, 0]])
    axioms = {v.axiom for v in validate_metric(m).violations}
    assert {"identity", "symmetry"} <= axioms
    m = metric_from_rows("xy", [[0, 0], [0, 0]])
    assert [v.axiom for v in validate_metric(m).violations] == ["separation"]


def test_validate_metric_respects_tol():
    m = metric_from_rows("xyz", [[0, 1, 2 + 1e-12], [1, 0, 1], [2 + 1e-12, 1, 0]])
    assert validate_metric(m, tol=1e-9).ok
    assert not validate_metric(m, tol=0.0).ok


def test_params_parsing_and_conjugates():
    assert parse_q("inf") == math.inf and parse_q(" Infinity ") == math.inf
    p = InterpParams(0.5, "inf")
    assert p.q_is_inf and p.p == 1.0
    assert InterpParams(0.3, 1).p == math.inf
    assert InterpParams(0.3, 2).p == 2.0
    assert InterpParams(0.3, 3).p_exact == Fraction(3, 2)
    for q in (1, 1.5, 2, 3, 7.25, math.inf):
        assert InterpParams(0.4, q).conjugate_identity_holds()
    for bad in ((0.0, 2), (1.0, 2), (1.5, 2), (0.5, 0.5)):
        with pytest.raises(ValueError):
            InterpParams(*bad)


def test_pair_roundtrip_and_digest(e3):
    d = e3.to_dict()
    again = CompatiblePair.from_dict(json.loads(json.dumps(d)))
    assert again.digest() == e3.digest()
    shuffled = dict(reversed(list(d.items())))
    assert CompatiblePair.from_dict(shuffled).digest() == e3.digest()
    assert intersection(e3) == ("m",)
    assert e3.union == ("a", "m", "b")


def test_points_default_to_x0_then_x1():
    data = {"X0": ["a", "m"], "X1": ["m", "b"], "d0": [[0, 1], [1, 0]], "d1": [[0, 2], [2, 0]],
            "dX": [[0, 1, 3], [1, 0, 2], [3, 2, 0]]}
    assert CompatiblePair.from_dict(data).union == ("a", "m", "b")


def test_from_dict_errors():
    with pytest.raises(MetricStructureError):
        CompatiblePair.from_dict({"X0": ["a"]})
    with pytest.raises(MetricStructureError):
        CompatiblePair.from_dict({"X0": ["a"], "X1": ["a"], "d0": "zz", "d1": [[0]], "dX": [[0]]})
    with pytest.raises(MetricStructureError):
        CompatiblePair.from_dict({"X0": ["a"], "X1": ["b"], "d0": [[0]], "d1": [[0]], "dX": [[0]],
                                  "points": ["a"]})


def test_validate_pair_compatibility_and_disjoint(e1):
    assert validate_pair(e1).ok
    assert not validate_pair(e1.with_constants(0.4, 1.0)).ok
    disjoint = CompatiblePair.from_dict(
        {"X0": ["a"], "X1": ["b"], "d0": [[0]], "d1": [[0]], "dX": [[0, 1], [1, 0]]}
    )
    with pytest.raises(PairError):
        validate_pair(disjoint)


def test_trivial_pair():
    m = metric_from_rows("abc", [[0, 1, 2], [1, 0, 1], [2, 1, 0]])
    t = trivial_pair(m)
    assert t.X0 == t.X1 == ("a", "b", "c")
    assert all(r.ok for r in validate_instance(t))


@given(pairs)
def test_generated_pairs_are_valid(pair):
    assert all(r.ok for r in validate_instance(pair))
    assert intersection(pair)
    assert pair.C0 == pair.C1 == 1.0


@given(seeds)
def test_generated_trivial_pairs_are_valid(seed):
    pair = trivial_from_seed(seed)
    assert all(r.ok for r in validate_instance(pair))


@given(pairs, st.randoms())
def test_relabeling_keeps_structure(pair, rnd):
    names = [f"q{i}" for i in range(len(pair.union))]
    rnd.shuffle(names)
    mapping = dict(zip(pair.union, names))
    other = pair.relabeled(mapping)
    for x in pair.union:
        assert other.in0(mapping[x]) == pair.in0(x)
        assert other.in1(mapping[x]) == pair.in1(x)
    for x in pair.X0:
        for y in pair.X0:
            assert other.d0.d(mapping[x], mapping[y]) == pair.d0.d(x, y)
