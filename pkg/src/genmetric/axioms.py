"""Axiom systems of the eight space classes, exhaustive checkers and witnesses.

Every checker scans its quantified tuples in lexicographic point order
(roles in the order they are listed on the axiom) and stops at the first
violation, so witnesses are reproducible. Symmetry is validated when a
:class:`~genmetric.spaces.FiniteSpace` is built and is never re-checked here.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping

from .rationals import format_rational
from .spaces import FiniteSpace, SpaceError


class ClassTag(str, enum.Enum):
    METRIC = "METRIC"
    PM = "PM"
    ML = "ML"
    MML = "MML"
    RM = "RM"
    RPM = "RPM"
    RML = "RML"
    RMML = "RMML"

    @property
    def rectangular(self) -> bool:
        return self in RECTANGULAR


RECTANGULAR = frozenset({ClassTag.RM, ClassTag.RPM, ClassTag.RML, ClassTag.RMML})


class Semantics(str, enum.Enum):
    """Range of the intermediate points u, v in a quadrilateral inequality."""

    DISTINCT_PAIRS = "distinct"  # u, v in X \ {x, y} and u != v
    ALL_PAIRS = "pairs"  # u, v in X \ {x, y}, u == v allowed

    def other(self) -> Semantics:
        return Semantics.ALL_PAIRS if self is Semantics.DISTINCT_PAIRS else Semantics.DISTINCT_PAIRS


DEFAULT_SEMANTICS = {
    ClassTag.RM: Semantics.DISTINCT_PAIRS,
    ClassTag.RPM: Semantics.DISTINCT_PAIRS,
    ClassTag.RML: Semantics.ALL_PAIRS,
    ClassTag.RMML: Semantics.ALL_PAIRS,
}


@dataclass(frozen=True)
class SpaceClass:
    tag: ClassTag
    semantics: Semantics | None = None

    def __post_init__(self) -> None:
        if self.tag.rectangular and self.semantics is None:
            object.__setattr__(self, "semantics", DEFAULT_SEMANTICS[self.tag])
        elif not self.tag.rectangular and self.semantics is not None:
            object.__setattr__(self, "semantics", None)

    @classmethod
    def of(cls, tag: ClassTag | str, semantics: Semantics | str | None = None) -> SpaceClass:
        return cls(ClassTag(tag), Semantics(semantics) if semantics is not None else None)

    def __str__(self) -> str:
        if self.semantics is None:
            return self.tag.value
        return f"{self.tag.value}({self.semantics.value})"


ALL_TAGS = tuple(ClassTag)


@dataclass(frozen=True)
class AxiomViolationWitness:
    """A tuple of points at which an axiom fails.

    ``relation`` is what should have held between ``lhs`` and ``rhs``:
    ``"<="``, ``"=="``, ``"!="`` or ``"not-all-equal"`` (p1-style: the
    pair distance and both self-distances must not coincide).
    """

    axiom_id: str
    points: Mapping[str, str]
    lhs: Fraction
    rhs: Fraction
    relation: str

    def to_json(self) -> dict:
        return {
            "axiom": self.axiom_id,
            "points": dict(self.points),
            "lhs": format_rational(self.lhs),
            "rhs": format_rational(self.rhs),
            "relation": self.relation,
        }


# -- axiom instances and scans -----------------------------------------------
#
# ``at(d, idx)`` evaluates one instance on any numeric table and returns
# (lhs, rhs, holds). ``scan(d, n, distinct)`` walks every instance in
# lexicographic order over the roles and returns (idx, lhs, rhs) for the first
# failing one, or None. Scans are written out longhand: they run millions of
# times in the enumeration sweeps.


def _identity_zero_at(d, idx):
    x, y = idx
    if x == y:
        return d[x][x], 0, d[x][x] == 0
    return d[x][y], 0, d[x][y] != 0


def _identity_zero_scan(d, n, distinct):
    for x in range(n):
        row = d[x]
        for y in range(n):
            if (row[y] == 0) != (x == y):
                return (x, y), row[y], 0
    return None


def _zero_implies_equal_at(d, idx):
    x, y = idx
    return d[x][y], 0, x == y or d[x][y] != 0


def _zero_implies_equal_scan(d, n, distinct):
    for x in range(n):
        row = d[x]
        for y in range(n):
            if x != y and row[y] == 0:
                return (x, y), 0, 0
    return None


def _partial_identity_at(d, idx):
    x, y = idx
    return d[x][y], d[x][x], x == y or not (d[x][y] == d[x][x] == d[y][y])


def _partial_identity_scan(d, n, distinct):
    for x in range(n):
        row = d[x]
        for y in range(n):
            if x != y and row[y] == row[x] == d[y][y]:
                return (x, y), row[y], row[x]
    return None


def _small_self_at(d, idx):
    x, y = idx
    return d[x][x], d[x][y], d[x][x] <= d[x][y]


def _small_self_scan(d, n, distinct):
    for x in range(n):
        row = d[x]
        for y in range(n):
            if row[x] > row[y]:
                return (x, y), row[x], row[y]
    return None


def _triangle_at(subtract: bool):
    def at(d, idx):
        x, y, z = idx
        rhs = d[x][z] + d[z][y] - (d[z][z] if subtract else 0)
        return d[x][y], rhs, d[x][y] <= rhs

    return at


def _triangle_scan(subtract: bool):
    def scan(d, n, distinct):
        r = range(n)
        for x in r:
            dx = d[x]
            for y in r:
                lhs = dx[y]
                for z in r:
                    dz = d[z]
                    rhs = dx[z] + dz[y] - dz[z] if subtract else dx[z] + dz[y]
                    if lhs > rhs:
                        return (x, y, z), lhs, rhs
        return None

    return scan


def _rectangle_at(subtract: bool):
    def at(d, idx):
        x, y, u, v = idx
        rhs = d[x][u] + d[u][v] + d[v][y]
        if subtract:
            rhs -= d[u][u] + d[v][v]
        return d[x][y], rhs, d[x][y] <= rhs

    return at


def _rectangle_scan(subtract: bool):
    def scan(d, n, distinct):
        r = range(n)
        for x in r:
            dx = d[x]
            for y in r:
                lhs = dx[y]
                mids = [u for u in r if u != x and u != y]
                for u in mids:
                    du = d[u]
                    head = dx[u] - du[u] if subtract else dx[u]
                    for v in mids:
                        if distinct and u == v:
                            continue
                        dv = d[v]
                        rhs = head + du[v] + dv[y] - dv[v] if subtract else head + du[v] + dv[y]
                        if lhs > rhs:
                            return (x, y, u, v), lhs, rhs
        return None

    return scan


@dataclass(frozen=True)
class Axiom:
    id: str
    roles: tuple[str, ...]
    relation: str
    at: Callable
    scan: Callable
    rectangular: bool = False


def _axiom_table() -> dict[str, Axiom]:
    pair = ("x", "y")
    tri = ("x", "y", "z")
    quad = ("x", "y", "u", "v")
    idz = dict(at=_identity_zero_at, scan=_identity_zero_scan)
    zeq = dict(at=_zero_implies_equal_at, scan=_zero_implies_equal_scan, relation="!=")
    pid = dict(at=_partial_identity_at, scan=_partial_identity_scan, relation="not-all-equal")
    small = dict(at=_small_self_at, scan=_small_self_scan, relation="<=")

    def tri_ax(i, sub):
        return Axiom(i, tri, "<=", _triangle_at(sub), _triangle_scan(sub))

    def rect_ax(i, sub):
        return Axiom(i, quad, "<=", _rectangle_at(sub), _rectangle_scan(sub), rectangular=True)

    axioms = [
        Axiom("M1", pair, "iff-zero", **idz),
        tri_ax("M3", False),
        Axiom("p1", pair, **pid),
        Axiom("p2", pair, **small),
        tri_ax("p4", True),
        Axiom("σ1", pair, **zeq),
        tri_ax("σ3", False),
        Axiom("mσ1", pair, **zeq),
        tri_ax("mσ3", True),
        Axiom("R1", pair, "iff-zero", **idz),
        rect_ax("R3", False),
        Axiom("RP1", pair, **pid),
        Axiom("RP2", pair, **small),
        rect_ax("RP4", True),
        Axiom("RML1", pair, **zeq),
        rect_ax("RML3", False),
        Axiom("RMML1", pair, **zeq),
        rect_ax("RMML3", True),
    ]
    return {a.id: a for a in axioms}


AXIOMS: dict[str, Axiom] = _axiom_table()

CLASS_AXIOMS: dict[ClassTag, tuple[str, ...]] = {
    ClassTag.METRIC: ("M1", "M3"),
    ClassTag.PM: ("p1", "p2", "p4"),
    ClassTag.ML: ("σ1", "σ3"),
    ClassTag.MML: ("mσ1", "mσ3"),
    ClassTag.RM: ("R1", "R3"),
    ClassTag.RPM: ("RP1", "RP2", "RP4"),
    ClassTag.RML: ("RML1", "RML3"),
    ClassTag.RMML: ("RMML1", "RMML3"),
}


def _relation_for(axiom: Axiom, idx: tuple[int, ...]) -> str:
    if axiom.relation == "iff-zero":
        return "==" if idx[0] == idx[1] else "!="
    return axiom.relation


def check_axioms(space: FiniteSpace, cls: SpaceClass) -> AxiomViolationWitness | None:
    """Exhaustively check ``cls`` on ``space``.

    Returns None when every axiom holds, otherwise the lexicographically
    first violation of the first failing axiom.
    """
    scale, d = space.scaled
    n = len(space)
    distinct = cls.semantics is Semantics.DISTINCT_PAIRS
    for axiom_id in CLASS_AXIOMS[cls.tag]:
        axiom = AXIOMS[axiom_id]
        hit = axiom.scan(d, n, distinct)
        if hit is not None:
            idx, lhs, rhs = hit
            return AxiomViolationWitness(
                axiom_id,
                {role: space.points[i] for role, i in zip(axiom.roles, idx)},
                Fraction(lhs, scale),
                Fraction(rhs, scale),
                _relation_for(axiom, idx),
            )
    return None


def holds(space: FiniteSpace, cls: SpaceClass) -> bool:
    return check_axioms(space, cls) is None


def evaluate_axiom(
    space: FiniteSpace,
    axiom_id: str,
    points: Mapping[str, str],
    semantics: Semantics | None = None,
) -> tuple[Fraction, Fraction, bool]:
    """Evaluate one instance of an axiom straight from the Fraction table.

    Rectangular instances must respect the quantifier range: u, v outside
    {x, y}, and u != v under DISTINCT_PAIRS.
    """
    axiom = AXIOMS[axiom_id]
    if set(points) != set(axiom.roles):
        raise SpaceError(f"axiom {axiom_id} takes roles {axiom.roles}, got {sorted(points)}")
    idx = tuple(space.index(points[role]) for role in axiom.roles)
    if axiom.rectangular:
        x, y, u, v = idx
        if u in (x, y) or v in (x, y):
            raise SpaceError("u and v must lie outside {x, y}")
        if semantics is Semantics.DISTINCT_PAIRS and u == v:
            raise SpaceError("u and v must be distinct under DISTINCT_PAIRS")
    lhs, rhs, ok = axiom.at(space.table, idx)
    return Fraction(lhs), Fraction(rhs), ok


def witness_is_genuine(space: FiniteSpace, cls: SpaceClass, w: AxiomViolationWitness) -> bool:
    if w.axiom_id not in CLASS_AXIOMS[cls.tag]:
        return False
    lhs, rhs, ok = evaluate_axiom(space, w.axiom_id, w.points, cls.semantics)
    return not ok and lhs == w.lhs and rhs == w.rhs


# -- classification -----------------------------------------------------------


def classes_for(semantics: Semantics | None = None) -> list[SpaceClass]:
    """The eight classes; ``semantics`` overrides the rectangular defaults."""
    return [SpaceClass(tag, semantics if tag.rectangular else None) for tag in ALL_TAGS]


@dataclass(frozen=True)
class ClassificationReport:
    verdicts: dict[SpaceClass, AxiomViolationWitness | None]
    zero_self_set: list[str]
    # rectangular classes whose verdict flips with the quantifier semantics
    discrepancies: list[dict] = field(default_factory=list)

    def holds(self, cls: SpaceClass | ClassTag | str) -> bool:
        return self.witness(cls) is None

    def witness(self, cls: SpaceClass | ClassTag | str) -> AxiomViolationWitness | None:
        if not isinstance(cls, SpaceClass):
            tag = ClassTag(cls)
            matches = [c for c in self.verdicts if c.tag is tag]
            cls = matches[0]
        return self.verdicts[cls]

    def to_json(self) -> dict:
        verdicts = {}
        for cls, w in self.verdicts.items():
            entry: dict = {"holds": w is None}
            if cls.semantics is not None:
                entry["semantics"] = cls.semantics.value
            if w is not None:
                entry["witness"] = w.to_json()
            verdicts[cls.tag.value] = entry
        return {
            "verdicts": verdicts,
            "zero_self_set": list(self.zero_self_set),
            "semantics_discrepancies": list(self.discrepancies),
        }


def classify(space: FiniteSpace, semantics: Semantics | None = None) -> ClassificationReport:
    verdicts = {cls: check_axioms(space, cls) for cls in classes_for(semantics)}
    discrepancies = []
    for cls, w in verdicts.items():
        if cls.semantics is None:
            continue
        alt = SpaceClass(cls.tag, cls.semantics.other())
        alt_holds = holds(space, alt)
        if alt_holds != (w is None):
            discrepancies.append(
                {
                    "class": cls.tag.value,
                    cls.semantics.value: w is None,
                    alt.semantics.value: alt_holds,
                }
            )
    return ClassificationReport(verdicts, space.zero_self_set(), discrepancies)


# -- implication lattice ------------------------------------------------------


def _implication_edges() -> list[tuple[SpaceClass, SpaceClass]]:
    S = SpaceClass
    edges = [
        (S(ClassTag.METRIC), S(ClassTag.PM)),
        (S(ClassTag.PM), S(ClassTag.MML)),
        (S(ClassTag.MML), S(ClassTag.ML)),
    ]
    for sem in Semantics:
        edges += [
            (S(ClassTag.METRIC), S(ClassTag.RM, sem)),
            (S(ClassTag.RM, sem), S(ClassTag.RPM, sem)),
            (S(ClassTag.RPM, sem), S(ClassTag.RMML, sem)),
            (S(ClassTag.RMML, sem), S(ClassTag.RML, sem)),
            # two applications of a triangle inequality give the rectangle one
            (S(ClassTag.PM), S(ClassTag.RPM, sem)),
            (S(ClassTag.MML), S(ClassTag.RMML, sem)),
            (S(ClassTag.ML), S(ClassTag.RML, sem)),
        ]
    for tag in RECTANGULAR:
        edges.append((S(tag, Semantics.ALL_PAIRS), S(tag, Semantics.DISTINCT_PAIRS)))
    return edges


IMPLICATIONS: tuple[tuple[SpaceClass, SpaceClass], ...] = tuple(_implication_edges())


def consequences(cls: SpaceClass) -> set[SpaceClass]:
    """Every class implied by ``cls`` (reflexive, transitive)."""
    seen = {cls}
    stack = [cls]
    while stack:
        cur = stack.pop()
        for a, b in IMPLICATIONS:
            if a == cur and b not in seen:
                seen.add(b)
                stack.append(b)
    return seen


def implies(a: SpaceClass, b: SpaceClass) -> bool:
    return b in consequences(a)


def lattice_conflict(
    require: Iterable[SpaceClass], forbid: Iterable[SpaceClass]
) -> tuple[SpaceClass, SpaceClass] | None:
    """A (required, forbidden) pair the lattice makes unsatisfiable, if any."""
    forbid = list(forbid)
    for r in require:
        implied = consequences(r)
        for f in forbid:
            if f in implied:
                return r, f
    return None


def parse_class(text: str, semantics: Semantics | None = None) -> SpaceClass:
    """Parse ``"RMML"`` or ``"RMML(pairs)"``; bare rectangular tags take ``semantics``."""
    text = text.strip()
    try:
        if text.endswith(")") and "(" in text:
            name, sem = text[:-1].split("(", 1)
            return SpaceClass.of(name.strip().upper(), sem.strip())
        tag = ClassTag(text.upper())
    except ValueError:
        raise SpaceError(f"unknown space class {text!r}") from None
    return SpaceClass(tag, semantics if tag.rectangular else None)
