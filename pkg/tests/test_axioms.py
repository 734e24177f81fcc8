from __future__ import annotations

import dataclasses
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

import oracle
from genmetric import fixtures
from genmetric.axioms import (
    AXIOMS,
    CLASS_AXIOMS,
    IMPLICATIONS,
    ClassTag,
    Semantics,
    SpaceClass,
    check_axioms,
    classes_for,
    classify,
    evaluate_axiom,
    implies,
    lattice_conflict,
    parse_class,
    witness_is_genuine,
)
from genmetric.search import enumerate_spaces
from genmetric.spaces import FiniteSpace, SpaceError, materialize, shift_space, zero_space

PAIRS, DISTINCT = Semantics.ALL_PAIRS, Semantics.DISTINCT_PAIRS
RECT = [ClassTag.RM, ClassTag.RPM, ClassTag.RML, ClassTag.RMML]


def every_class():
    out = [SpaceClass(t) for t in ClassTag if not t.rectangular]
    return out + [SpaceClass(t, s) for t in RECT for s in Semantics]


def agree_with_oracle(space: FiniteSpace) -> None:
    table = [list(r) for r in space.table]
    for cls in every_class():
        w = check_axioms(space, cls)
        expected = oracle.first_violation(table, cls.tag.value, cls.semantics is DISTINCT)
        if expected is None:
            assert w is None, (space.to_json(), str(cls))
        else:
            assert w is not None, (space.to_json(), str(cls))
            axiom_id, idx = expected
            assert w.axiom_id == axiom_id
            roles = AXIOMS[axiom_id].roles
            assert w.points == {r: space.points[i] for r, i in zip(roles, idx)}
            assert witness_is_genuine(space, cls, w)


# -- worked examples ----------------------------------------------------------


def test_ml_not_mml_example():
    space = fixtures.ml_not_mml()
    assert check_axioms(space, SpaceClass(ClassTag.ML)) is None
    w = check_axioms(space, SpaceClass(ClassTag.MML))
    assert w.axiom_id == "mσ3"
    assert w.points == {"x": "2", "y": "3", "z": "1"}
    assert (w.lhs, w.rhs) == (2, 1)
    assert w.relation == "<="


def test_rml_not_rmml_example():
    space = fixtures.rml_not_rmml()
    assert check_axioms(space, SpaceClass(ClassTag.RML, PAIRS)) is None
    w = check_axioms(space, SpaceClass(ClassTag.RMML, PAIRS))
    assert w.axiom_id == "RMML3"
    assert w.points == {"x": "2", "y": "3", "u": "1", "v": "1"}
    assert (w.lhs, w.rhs) == (Fraction(5, 2), 0)
    assert check_axioms(space, SpaceClass(ClassTag.RMML, DISTINCT)) is None


def test_zero_table():
    for cls in every_class():
        assert check_axioms(zero_space(1), cls) is None
    # on two or more points zero distance between distinct points breaks the
    # identity axiom of every class; every inequality axiom still holds
    for n in (2, 3, 5):
        space = zero_space(n)
        for cls in every_class():
            w = check_axioms(space, cls)
            assert w.axiom_id == CLASS_AXIOMS[cls.tag][0]
            assert w.points == {"x": "a", "y": "b"}
        for axiom_id in ("M3", "p2", "p4", "mσ3"):
            tuples = product(space.points, repeat=len(AXIOMS[axiom_id].roles))
            assert all(evaluate_axiom(space, axiom_id, dict(zip(AXIOMS[axiom_id].roles, t)))[2] for t in tuples)


def test_satish_grid_is_rpm_not_rm():
    space = materialize(fixtures.satish_rpm(3, 3))
    assert check_axioms(space, SpaceClass(ClassTag.RPM)) is None
    w = check_axioms(space, SpaceClass(ClassTag.RM))
    assert w.axiom_id == "R1"
    # the lexicographically first failure is at 0.5; the textbook instance is 1
    assert w.points == {"x": "0.5", "y": "0.5"}
    lhs, rhs, ok = evaluate_axiom(space, "R1", {"x": "1", "y": "1"})
    assert (lhs, rhs, ok) == (1, 0, False)


def test_satish_rpm_needs_distinct_intermediates():
    space = materialize(fixtures.satish_rpm(3, 3))
    w = check_axioms(space, SpaceClass(ClassTag.RPM, PAIRS))
    assert w is not None and w.axiom_id == "RP4"
    assert w.points["u"] == w.points["v"]


def test_classify_five_point_example():
    report = classify(fixtures.ml_not_mml())
    got = {c.tag.value: w is None for c, w in report.verdicts.items()}
    assert got == {
        "METRIC": False,
        "PM": False,
        "ML": True,
        "MML": False,
        "RM": False,
        "RPM": False,
        "RML": True,
        # fails under ALL_PAIRS: x=2, y=3, u=v=1 gives 2+3+2-3-3 = 1 < 2
        "RMML": False,
    }
    assert report.zero_self_set == ["2", "3", "4", "5"]
    w = report.witness("RMML")
    assert w.points == {"x": "2", "y": "3", "u": "1", "v": "1"}
    assert (w.lhs, w.rhs) == (2, 1)
    assert check_axioms(fixtures.ml_not_mml(), SpaceClass(ClassTag.RMML, DISTINCT)) is None
    assert {"class": "RMML", "pairs": False, "distinct": True} in report.discrepancies


def test_classify_zero_and_single_point():
    assert all(w is None for w in classify(zero_space(1)).verdicts.values())
    report = classify(zero_space(3))
    assert not any(w is None for w in report.verdicts.values())
    assert report.zero_self_set == ["a", "b", "c"]
    one = classify(FiniteSpace.from_rows(["a"], [["1"]]))
    assert one.holds("RPM") and one.holds("ML") and one.holds("PM")
    assert not one.holds("RM")
    assert one.zero_self_set == []


def test_report_json_shape():
    doc = classify(fixtures.rml_not_rmml()).to_json()
    assert set(doc) == {"verdicts", "zero_self_set", "semantics_discrepancies"}
    rmml = doc["verdicts"]["RMML"]
    assert rmml["semantics"] == "pairs" and rmml["holds"] is False
    assert rmml["witness"]["lhs"] == "5/2" and rmml["witness"]["rhs"] == "0"
    assert "semantics" not in doc["verdicts"]["ML"]


def test_default_semantics():
    assert SpaceClass(ClassTag.RM).semantics is DISTINCT
    assert SpaceClass(ClassTag.RPM).semantics is DISTINCT
    assert SpaceClass(ClassTag.RML).semantics is PAIRS
    assert SpaceClass(ClassTag.RMML).semantics is PAIRS
    assert SpaceClass(ClassTag.ML, PAIRS).semantics is None
    assert str(SpaceClass(ClassTag.RMML)) == "RMML(pairs)"
    assert [str(c) for c in classes_for(DISTINCT)][-1] == "RMML(distinct)"


def test_parse_class():
    assert parse_class("mml") == SpaceClass(ClassTag.MML)
    assert parse_class("RMML(distinct)") == SpaceClass(ClassTag.RMML, DISTINCT)
    assert parse_class("RM", PAIRS) == SpaceClass(ClassTag.RM, PAIRS)
    with pytest.raises(SpaceError, match="unknown space class"):
        parse_class("QM")
    with pytest.raises(SpaceError):
        parse_class("RM(sometimes)")


def test_evaluate_axiom_validates_roles():
    space = fixtures.rml_not_rmml()
    with pytest.raises(SpaceError, match="roles"):
        evaluate_axiom(space, "mσ3", {"x": "1", "y": "2"})
    with pytest.raises(SpaceError, match="outside"):
        evaluate_axiom(space, "RMML3", {"x": "1", "y": "2", "u": "1", "v": "3"})
    with pytest.raises(SpaceError, match="distinct"):
        evaluate_axiom(space, "RMML3", {"x": "2", "y": "3", "u": "1", "v": "1"}, DISTINCT)
    lhs, rhs, ok = evaluate_axiom(space, "RMML3", {"x": "2", "y": "3", "u": "1", "v": "1"})
    assert (lhs, rhs, ok) == (Fraction(5, 2), 0, False)


def test_vacuous_rectangular_axioms():
    # with two points no u, v outside {x, y} exists
    space = FiniteSpace.from_rows(["a", "b"], [["0", "9"], ["9", "0"]])
    assert check_axioms(space, SpaceClass(ClassTag.RM, PAIRS)) is None
    # three points: one candidate u, so only u = v, which DISTINCT excludes
    space = FiniteSpace.from_rows(["a", "b", "c"], [["0", "9", "1"], ["9", "0", "1"], ["1", "1", "0"]])
    assert check_axioms(space, SpaceClass(ClassTag.RM, DISTINCT)) is None
    w = check_axioms(space, SpaceClass(ClassTag.RM, PAIRS))
    assert w.points == {"x": "a", "y": "b", "u": "c", "v": "c"}


# -- checker vs oracle --------------------------------------------------------


def test_checkers_match_oracle_up_to_three_points():
    for n in (1, 2, 3):
        for space in enumerate_spaces(n, [0, 1, 2]):
            agree_with_oracle(space)


@pytest.mark.slow
def test_checkers_match_oracle_on_four_points():
    for space in enumerate_spaces(4, [0, 1, 2]):
        agree_with_oracle(space)


def test_checkers_match_oracle_on_fixtures():
    for space in (
        fixtures.ml_not_mml(),
        fixtures.rml_not_rmml(),
        materialize(fixtures.satish_rpm(3, 3)),
        materialize(fixtures.abs_plus_c(2)),
        fixtures.max_partial_metric(),
        fixtures.ml_not_mml_triangle(),
    ):
        agree_with_oracle(space)


small_tables = st.integers(1, 5).flatmap(
    lambda n: st.lists(
        st.fractions(min_value=0, max_value=4, max_denominator=3),
        min_size=n * (n + 1) // 2,
        max_size=n * (n + 1) // 2,
    ).map(lambda cells: _symmetric(n, cells))
)


def _symmetric(n, cells):
    rows = [[Fraction(0)] * n for _ in range(n)]
    it = iter(cells)
    for i in range(n):
        for j in range(i, n):
            rows[i][j] = rows[j][i] = next(it)
    return FiniteSpace.from_rows([f"p{i}" for i in range(n)], rows)


@settings(max_examples=200, deadline=None)
@given(small_tables)
def test_witnesses_are_genuine_and_oracle_agrees(space):
    for cls in every_class():
        w = check_axioms(space, cls)
        if w is not None:
            assert witness_is_genuine(space, cls, w)
    agree_with_oracle(space)


@settings(max_examples=100, deadline=None)
@given(small_tables, st.randoms(use_true_random=False))
def test_verdicts_invariant_under_point_order(space, rnd):
    order = list(range(len(space)))
    rnd.shuffle(order)
    permuted = space.relabel(order)
    a, b = classify(space), classify(permuted)
    for cls in a.verdicts:
        assert (a.verdicts[cls] is None) == (b.verdicts[cls] is None)
        if b.verdicts[cls] is not None:
            assert witness_is_genuine(permuted, cls, b.verdicts[cls])
    assert sorted(a.zero_self_set) == sorted(b.zero_self_set)


def test_identity_permutation_keeps_witness_labels():
    space = fixtures.ml_not_mml()
    w = check_axioms(space.relabel(range(5)), SpaceClass(ClassTag.MML))
    assert w == check_axioms(space, SpaceClass(ClassTag.MML))


# -- implication lattice --------------------------------------------------------


def test_lattice_edges_include_stated_implications():
    edges = {(str(a), str(b)) for a, b in IMPLICATIONS}
    for a, b in [
        ("METRIC", "PM"),
        ("PM", "MML"),
        ("MML", "ML"),
        ("METRIC", "RM(distinct)"),
        ("RM(distinct)", "RPM(distinct)"),
        ("RMML(pairs)", "RML(pairs)"),
        ("RMML(distinct)", "RML(distinct)"),
        ("RML(pairs)", "RML(distinct)"),
        ("RMML(pairs)", "RMML(distinct)"),
    ]:
        assert (a, b) in edges
    assert implies(parse_class("METRIC"), parse_class("ML"))
    assert not implies(parse_class("ML"), parse_class("MML"))


def test_lattice_has_no_counterexample_up_to_three_points():
    classes = {c for e in IMPLICATIONS for c in e}
    for n in (1, 2, 3):
        for space in enumerate_spaces(n, [0, 1, 2]):
            holds = {c: check_axioms(space, c) is None for c in classes}
            for a, b in IMPLICATIONS:
                assert not holds[a] or holds[b], (space.to_json(), str(a), str(b))


def test_lattice_conflict():
    assert lattice_conflict([parse_class("METRIC")], [parse_class("ML")]) is not None
    assert lattice_conflict([parse_class("ML")], [parse_class("MML")]) is None


def test_triangle_classes_imply_rectangular_ones():
    for a, b in [("ML", "RML"), ("MML", "RMML"), ("PM", "RPM"), ("METRIC", "RM")]:
        for sem in Semantics:
            assert implies(parse_class(a), parse_class(b, sem))


def test_rectangular_does_not_imply_triangle():
    # d(a,b) = 3 breaks the triangle through c, but with three points the
    # rectangle through c, c is the only instance and it holds
    space = FiniteSpace.from_rows(["a", "b", "c"], [["0", "3", "1"], ["3", "0", "1"], ["1", "1", "0"]])
    assert check_axioms(space, SpaceClass(ClassTag.ML)) is not None
    assert check_axioms(space, SpaceClass(ClassTag.RM, DISTINCT)) is None
    assert not implies(parse_class("RM"), parse_class("ML"))


# -- shift --------------------------------------------------------------------


def test_shift_preserves_rectangular_like_classes():
    for n in (1, 2, 3):
        for space in enumerate_spaces(n, [0, 1, 2]):
            for sem in Semantics:
                for tag in (ClassTag.RML, ClassTag.RMML):
                    cls = SpaceClass(tag, sem)
                    if check_axioms(space, cls) is not None:
                        continue
                    for alpha in (Fraction(1), Fraction(1, 2), Fraction(5)):
                        assert check_axioms(shift_space(space, alpha), cls) is None


def test_mutated_triangle_is_detected(monkeypatch):
    from genmetric import axioms

    broken = dataclasses.replace(AXIOMS["mσ3"], scan=axioms._triangle_scan(False))
    monkeypatch.setitem(AXIOMS, "mσ3", broken)
    assert check_axioms(fixtures.ml_not_mml(), SpaceClass(ClassTag.MML)) is None


def test_class_axiom_lists():
    assert CLASS_AXIOMS[ClassTag.PM] == ("p1", "p2", "p4")
    assert all(AXIOMS[a].rectangular for t in RECT for a in CLASS_AXIOMS[t] if a[-1] in "34")


def test_first_witness_is_lexicographically_smallest():
    space = FiniteSpace.from_rows(["a", "b", "c"], [["0", "1", "5"], ["1", "0", "1"], ["5", "1", "0"]])
    w = check_axioms(space, SpaceClass(ClassTag.METRIC))
    violations = [
        t
        for t in product(space.points, repeat=3)
        if not evaluate_axiom(space, "M3", dict(zip("xyz", t)))[2]
    ]
    assert violations == [("a", "c", "b"), ("c", "a", "b")]
    assert w.points == {"x": "a", "y": "c", "z": "b"}
