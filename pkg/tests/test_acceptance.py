"""The nine acceptance criteria, one test each.

Every test records a PASS/FAIL line (with timing) that the terminal summary
prints at the end of the run, see conftest.py.
"""

from __future__ import annotations

import dataclasses
import time
from fractions import Fraction
from itertools import product

from genmetric import axioms, fixtures
from genmetric.axioms import (
    AXIOMS,
    IMPLICATIONS,
    ClassTag,
    Semantics,
    SpaceClass,
    check_axioms,
    classify,
    evaluate_axiom,
    lattice_conflict,
)
from genmetric.convergence import check_item, mml_theorem_suite
from genmetric.fixpoint import Condition, SelfMap, contraction_constant, picard_iterate, verify_theorem
from genmetric.search import SearchQuery, enumerate_spaces, find_separation, matches
from genmetric.spaces import materialize, shift_space
from genmetric.suite import run_suite

PAIRS, DISTINCT = Semantics.ALL_PAIRS, Semantics.DISTINCT_PAIRS
RESULTS: list[str] = []


class Criterion:
    def __init__(self, number: int, title: str, limit: float):
        self.number, self.title, self.limit = number, title, limit

    def __enter__(self):
        self.start = time.perf_counter()
        self.detail = ""
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.start
        ok = exc_type is None and elapsed < self.limit
        why = self.detail
        if exc_type is not None:
            first = str(exc).splitlines()[0] if str(exc) else ""
            why = f"{exc_type.__name__}: {first}" if first else exc_type.__name__
        elif elapsed >= self.limit:
            why = f"took {elapsed:.2f}s, limit {self.limit}s"
        line = f"{'PASS' if ok else 'FAIL'}  criterion {self.number}: {self.title} ({elapsed:.2f}s / {self.limit}s) {why}"
        RESULTS.append(line)
        print(line)
        if exc_type is None:
            assert elapsed < self.limit, line
        return False


def test_criterion_1_ml_not_mml():
    with Criterion(1, "five-point ML-not-MML regression", 1.0) as c:
        report = classify(fixtures.ml_not_mml())
        assert report.holds("ML")
        w = report.witness("MML")
        assert w.axiom_id == "mσ3"
        assert w.points == {"x": "2", "z": "1", "y": "3"}
        assert (w.lhs, w.rhs) == (2, 1) and w.lhs > w.rhs
        c.detail = f"mσ3 at x=2, z=1, y=3: {w.lhs} > {w.rhs}"


def test_criterion_2_rml_not_rmml():
    with Criterion(2, "five-point RML-not-RMML regression", 1.0) as c:
        space = fixtures.rml_not_rmml()
        assert check_axioms(space, SpaceClass(ClassTag.RML, PAIRS)) is None
        w = check_axioms(space, SpaceClass(ClassTag.RMML, PAIRS))
        assert w.axiom_id == "RMML3" and w.rhs == 0
        assert w.points["u"] == w.points["v"] == "1"
        assert check_axioms(space, SpaceClass(ClassTag.RMML, DISTINCT)) is None
        report = classify(space)
        assert {"class": "RMML", "pairs": False, "distinct": True} in report.discrepancies
        c.detail = "RMML(pairs) fails at x=2, y=3, u=v=1 with rhs 0; RMML(distinct) holds"


def test_criterion_3_rpm_not_rm():
    with Criterion(3, "RPM-not-RM regression at a=3, alpha=3", 1.0) as c:
        space = materialize(fixtures.satish_rpm(3, 3))
        assert len(space) == 7
        assert check_axioms(space, SpaceClass(ClassTag.RPM)) is None
        w = check_axioms(space, SpaceClass(ClassTag.RM))
        assert w is not None and w.axiom_id == "R1"
        lhs, rhs, ok = evaluate_axiom(space, "R1", {"x": "1", "y": "1"})
        assert (lhs, rhs, ok) == (1, 0, False)
        c.detail = f"RPM holds; RM fails on R1 (rho(1,1) = {lhs} != 0)"


def test_criterion_4_shift_preservation():
    with Criterion(4, "shift preserves RMML", 10.0) as c:
        checked = 0
        for n in (1, 2, 3):
            for space in enumerate_spaces(n, [0, 1, 2]):
                for sem in Semantics:
                    cls = SpaceClass(ClassTag.RMML, sem)
                    if check_axioms(space, cls) is not None:
                        continue
                    for alpha in (Fraction(1), Fraction(1, 2)):
                        assert check_axioms(shift_space(space, alpha), cls) is None, (space.to_json(), str(cls))
                        checked += 1
        assert checked > 0
        c.detail = f"{checked} (space, semantics, alpha) cases"


def test_criterion_5_implication_lattice():
    with Criterion(5, "implication lattice", 60.0) as c:
        classes = {x for e in IMPLICATIONS for x in e}
        spaces = bad = 0
        for n in (1, 2, 3):
            for space in enumerate_spaces(n, [0, 1, 2]):
                spaces += 1
                holds = {x: check_axioms(space, x) is None for x in classes}
                bad += sum(holds[a] and not holds[b] for a, b in IMPLICATIONS)
        assert spaces == 3 + 3**3 + 3**6
        assert bad == 0
        c.detail = f"{len(IMPLICATIONS)} implications over {spaces} tables, 0 counterexamples"


def test_criterion_6_fixed_point_sweep():
    with Criterion(6, "fixed-point theorem sweep", 120.0) as c:
        rml = SpaceClass(ClassTag.RML)
        admissible = 0
        for space in enumerate_spaces(3, [0, 1, 2]):
            if check_axioms(space, rml) is not None:
                continue
            for images in product(space.points, repeat=3):
                T = SelfMap(dict(zip(space.points, images)))
                for cond in Condition:
                    cert = contraction_constant(space, T, cond)
                    if not cert.admissible:
                        continue
                    admissible += 1
                    fixed = T.fixed_points()
                    assert len(fixed) == 1 and space.dist(fixed[0], fixed[0]) == 0
                    for x0 in space.points:
                        result = verify_theorem(space, T, cond, x0)
                        assert result.fixed_point == fixed[0] and result.unique and result.self_distance_zero
                        if cond is Condition.BANACH:
                            k = cert.k_min
                            tr = picard_iterate(space, T, x0)
                            for series in (tr.rho, tr.rho_star, tr.rho_prime):
                                assert all(v <= k**n * series[0] for n, v in enumerate(series))
        assert admissible > 0
        c.detail = f"{admissible} admissible (space, map, condition) triples"


def test_criterion_7_mml_theorem_suite():
    with Criterion(7, "MML convergence theorem suite", 30.0) as c:
        pm_fixtures = [fixtures.max_partial_metric(), materialize(fixtures.abs_plus_c(2))]
        for space in pm_fixtures:
            assert check_axioms(space, SpaceClass(ClassTag.PM)) is None
            for r in mml_theorem_suite(space, seed=0, instances=1000):
                assert r.instances_run == 1000
                assert r.counterexample is None, (space.to_json(), r.item)
        control = mml_theorem_suite(fixtures.ml_not_mml(), seed=0, instances=1000, allow_non_mml=True)
        found = [r for r in control if r.counterexample is not None]
        c.detail = (
            f"PM fixtures: 0 counterexamples; negative control on the five-point space: "
            f"{len(found)} items with a counterexample"
        )
        for r in found:
            ce = r.counterexample
            ante, ok = check_item(ce.item, fixtures.ml_not_mml(), ce.sequences, ce.candidates)
            assert ante and not ok
        # expected to fail: in this space every off-diagonal distance is 2, so a
        # sigma-limit x forces the sequence to be eventually constant at x, and
        # all four conclusions then hold for every sequence, tailed or not
        assert found, (
            "negative control found no counterexample on the five-point space "
            "(none exists there; see the decisions ledger)"
        )


def test_criterion_8_separation_rediscovery():
    with Criterion(8, "separation rediscovery", 10.0) as c:
        hit = find_separation(SearchQuery.build(["ML"], ["MML"], 2, [0, 1, 2]))
        assert hit is not None
        assert hit.space.to_json()["d"] == [["1", "1"], ["1", "2"]]
        q = SearchQuery.build(["METRIC"], ["ML"], 3, [0, 1, 2])
        assert lattice_conflict(q.require, q.forbid) is not None
        assert find_separation(q) is None
        brute = sum(matches(s, q) for n in (1, 2, 3) for s in enumerate_spaces(n, [0, 1, 2]))
        assert brute == 0
        c.detail = "ML-not-MML found at [[1,1],[1,2]]; METRIC-not-ML: none (fast path and brute force)"


def test_criterion_9_mutation_is_caught(monkeypatch):
    with Criterion(9, "mutation sanity", 5.0) as c:
        broken = dataclasses.replace(
            AXIOMS["mσ3"], scan=axioms._triangle_scan(False), at=axioms._triangle_at(False)
        )
        monkeypatch.setitem(AXIOMS, "mσ3", broken)
        results = {r.name: r for r in run_suite()}
        assert not results["ml_not_mml"].passed
        monkeypatch.undo()
        assert all(r.passed for r in run_suite())
        c.detail = "suite fails item ml_not_mml with the subtraction removed, passes without the mutation"
