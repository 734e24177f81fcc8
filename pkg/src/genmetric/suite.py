"""Regression suite over the worked examples, runnable with no input files."""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from . import fixtures
from .axioms import (
    IMPLICATIONS,
    ClassTag,
    Semantics,
    SpaceClass,
    check_axioms,
    evaluate_axiom,
)
from .convergence import SequenceSpec, mml_theorem_suite, sigma_limit_test
from .fixpoint import Condition, SelfMap, verify_theorem
from .search import SearchQuery, enumerate_spaces, find_separation
from .spaces import FiniteSpace, ball_members, materialize, shift_space

C = SpaceClass
PAIRS, DISTINCT = Semantics.ALL_PAIRS, Semantics.DISTINCT_PAIRS


@dataclass(frozen=True)
class ItemResult:
    name: str
    passed: bool
    detail: str
    seconds: float

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "result": "pass" if self.passed else "fail",
            "detail": self.detail,
            "seconds": round(self.seconds, 4),
        }


def _witness_is(w, axiom_id, points, lhs, rhs) -> bool:
    return (
        w is not None
        and w.axiom_id == axiom_id
        and dict(w.points) == points
        and w.lhs == Fraction(lhs)
        and w.rhs == Fraction(rhs)
    )


def ml_not_mml() -> tuple[bool, str]:
    space = fixtures.ml_not_mml()
    ml = check_axioms(space, C(ClassTag.ML))
    mml = check_axioms(space, C(ClassTag.MML))
    ok = ml is None and _witness_is(mml, "mσ3", {"x": "2", "y": "3", "z": "1"}, 2, 1)
    return ok, f"ML holds={ml is None}; MML witness={mml.to_json() if mml else None}"


def rml_not_rmml() -> tuple[bool, str]:
    space = fixtures.rml_not_rmml()
    rml = check_axioms(space, C(ClassTag.RML, PAIRS))
    rmml = check_axioms(space, C(ClassTag.RMML, PAIRS))
    rmml_distinct = check_axioms(space, C(ClassTag.RMML, DISTINCT))
    ok = (
        rml is None
        and _witness_is(rmml, "RMML3", {"x": "2", "y": "3", "u": "1", "v": "1"}, Fraction(5, 2), 0)
        and rmml_distinct is None
    )
    return ok, (
        f"RML(pairs) holds={rml is None}; RMML(pairs) witness={rmml.to_json() if rmml else None}; "
        f"RMML(distinct) holds={rmml_distinct is None} (verdict depends on quantifier semantics)"
    )


def rpm_not_rm() -> tuple[bool, str]:
    space = materialize(fixtures.satish_rpm(3, 3))
    rpm = check_axioms(space, C(ClassTag.RPM))
    rm = check_axioms(space, C(ClassTag.RM))
    lhs, rhs, at_one = evaluate_axiom(space, "R1", {"x": "1", "y": "1"})
    ok = (
        len(space) == 7
        and space.dist("1", "2") == 6
        and space.dist("1", "1") == 1
        and rpm is None
        and rm is not None
        and rm.axiom_id == "R1"
        and not at_one
        and (lhs, rhs) == (1, 0)
    )
    return ok, (
        f"RPM holds={rpm is None}; RM first witness={rm.to_json() if rm else None}; "
        f"R1 at x=y=1: d(1,1)={lhs} vs 0"
    )


def abs_plus_two() -> tuple[bool, str]:
    space = materialize(fixtures.abs_plus_c(2))
    ok = all(check_axioms(space, C(ClassTag.RMML, s)) is None for s in Semantics)
    return ok, f"|x-y|+2 on {list(space.points)}: RMML under both semantics={ok}"


def alpha_shift() -> tuple[bool, str]:
    grid = materialize(fixtures.abs_plus_c(2))
    shifted = shift_space(grid, Fraction(1))
    same = shifted == materialize(fixtures.abs_plus_c(3))
    keeps = all(
        check_axioms(shift_space(space, a), C(ClassTag.RMML, s)) is None
        for space in (grid, materialize(fixtures.abs_plus_c(0, 0, 2, Fraction(1, 2), False, False)))
        for a in (Fraction(1, 2), Fraction(1), Fraction(7))
        for s in Semantics
    )
    return same and keeps, f"shift(|x-y|+2, 1) == |x-y|+3: {same}; RMML preserved: {keeps}"


def limits_not_unique() -> tuple[bool, str]:
    space = fixtures.constant_one()
    seq = SequenceSpec.constant("a")
    to_a = sigma_limit_test(space, seq, "a").holds
    to_b = sigma_limit_test(space, seq, "b").holds
    return to_a and to_b, f"constant a converges to a: {to_a}, to b: {to_b}"


def ball_asymmetry() -> tuple[bool, str]:
    # reads the remark as: y in B(x, r) need not give x in B(y, r)
    space = fixtures.ml_not_mml()
    b1 = ball_members(space, "1", Fraction(2))
    b2 = ball_members(space, "2", Fraction(2))
    ok = "2" in b1 and "1" not in b2
    return ok, f"B(1,2)={b1}, B(2,2)={b2}"


def implication_lattice(max_points: int = 3, values=(0, 1, 2)) -> tuple[bool, str]:
    classes = {c for edge in IMPLICATIONS for c in edge}
    bad = []
    count = 0
    for n in range(1, max_points + 1):
        for space in enumerate_spaces(n, values):
            count += 1
            verdict = {c: check_axioms(space, c) is None for c in classes}
            for a, b in IMPLICATIONS:
                if verdict[a] and not verdict[b]:
                    bad.append((str(a), str(b), space.to_json()))
    return not bad, f"{count} spaces, {len(IMPLICATIONS)} implications, {len(bad)} counterexamples"


def contraction_fixture() -> tuple[FiniteSpace, SelfMap]:
    space = FiniteSpace.from_rows(
        ["a", "b", "c"], [["0", "1", "1"], ["1", "0", "2"], ["1", "2", "0"]]
    )
    return space, SelfMap({"a": "a", "b": "a", "c": "a"})


def fixed_point_theorems() -> tuple[bool, str]:
    space, T = contraction_fixture()
    certs = [verify_theorem(space, T, c, x0, strict=False) for c in Condition for x0 in space.points]
    ok = all(c.passed and c.fixed_point == "a" for c in certs)
    return ok, f"{len(certs)} certificates, fixed point a, all audits pass: {ok}"


def mml_theorem() -> tuple[bool, str]:
    reports = mml_theorem_suite(fixtures.shifted_zero(3, 1), seed=7, instances=200)
    reports += mml_theorem_suite(fixtures.max_partial_metric(), seed=7, instances=200)
    ok = all(r.counterexample is None for r in reports)
    return ok, f"{len(reports)} item runs, counterexamples: {sum(r.counterexample is not None for r in reports)}"


def separation() -> tuple[bool, str]:
    hit = find_separation(SearchQuery.build(["ML"], ["MML"], 2, [0, 1, 2]))
    none = find_separation(SearchQuery.build(["METRIC"], ["ML"], 3, [0, 1, 2]))
    ok = hit is not None and hit.space.to_json()["d"] == [["1", "1"], ["1", "2"]] and none is None
    return ok, f"ML-not-MML witness: {hit.space.to_json() if hit else None}; METRIC-not-ML: {none}"


ITEMS: list[tuple[str, Callable[[], tuple[bool, str]]]] = [
    ("ml_not_mml", ml_not_mml),
    ("rml_not_rmml", rml_not_rmml),
    ("rpm_not_rm", rpm_not_rm),
    ("abs_plus_two_rmml", abs_plus_two),
    ("alpha_shift_rmml", alpha_shift),
    ("limits_not_unique", limits_not_unique),
    ("ball_asymmetry", ball_asymmetry),
    ("implication_lattice", implication_lattice),
    ("fixed_point_theorems", fixed_point_theorems),
    ("mml_convergence_theorem", mml_theorem),
    ("separation_search", separation),
]


def run_suite() -> list[ItemResult]:
    results = []
    for name, fn in ITEMS:
        start = time.perf_counter()
        try:
            passed, detail = fn()
        except Exception as exc:  # a crash is a failed item, not a crashed suite
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        results.append(ItemResult(name, passed, detail, time.perf_counter() - start))
    return results
