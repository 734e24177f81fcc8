"""Enumeration of small finite spaces and separating-example search."""

from __future__ import annotations

import json
import os
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterator, Mapping, Sequence

from .axioms import (
    ClassificationReport,
    Semantics,
    SpaceClass,
    check_axioms,
    classify,
    lattice_conflict,
    parse_class,
)
from .rationals import MalformedNumber, format_rational, parse_rational
from .spaces import FiniteSpace, _default_labels

THREADS_ENV = "GENMETRIC_THREADS"
CHUNK = 4096


class QueryError(ValueError):
    pass


def _free_cells(n: int) -> list[tuple[int, int]]:
    # upper triangle including the diagonal, row-major
    return [(i, j) for i in range(n) for j in range(i, n)]


def _sorted_values(values: Sequence) -> tuple[Fraction, ...]:
    vals = sorted({Fraction(v) for v in values})
    if not vals:
        raise QueryError("value set is empty")
    if vals[0] < 0:
        raise QueryError("values must be nonnegative")
    return tuple(vals)


def space_count(n: int, values: Sequence) -> int:
    return len(_sorted_values(values)) ** (n * (n + 1) // 2)


def _build(n: int, cells, combo, labels) -> FiniteSpace:
    rows = [[None] * n for _ in range(n)]
    for (i, j), v in zip(cells, combo):
        rows[i][j] = rows[j][i] = v
    return FiniteSpace(labels, tuple(tuple(r) for r in rows))


def enumerate_spaces(n: int, values: Sequence) -> Iterator[FiniteSpace]:
    """Every symmetric n x n table over ``values``, once each.

    Order is lexicographic in the upper triangle (diagonal included, row
    major) with values ascending.
    """
    if n < 1:
        raise QueryError("n must be at least 1")
    vals = _sorted_values(values)
    cells = _free_cells(n)
    labels = tuple(_default_labels(n))
    for combo in product(vals, repeat=len(cells)):
        yield _build(n, cells, combo, labels)


def space_at(n: int, values: Sequence, index: int) -> FiniteSpace:
    """The ``index``-th table of :func:`enumerate_spaces` without enumerating."""
    vals = _sorted_values(values)
    cells = _free_cells(n)
    base = len(vals)
    digits = []
    for _ in cells:
        index, r = divmod(index, base)
        digits.append(vals[r])
    if index:
        raise QueryError("index out of range")
    return _build(n, cells, reversed(digits), tuple(_default_labels(n)))


def index_of(space: FiniteSpace, values: Sequence) -> int:
    """Position of ``space``'s table in :func:`enumerate_spaces`; labels are ignored."""
    vals = _sorted_values(values)
    pos = {v: i for i, v in enumerate(vals)}
    index = 0
    for i, j in _free_cells(len(space)):
        v = space.table[i][j]
        if v not in pos:
            raise QueryError(f"entry {format_rational(v)} is not in the value set")
        index = index * len(vals) + pos[v]
    return index


@dataclass(frozen=True)
class SearchQuery:
    require: tuple[SpaceClass, ...]
    forbid: tuple[SpaceClass, ...]
    max_points: int
    values: tuple[Fraction, ...]
    seed: int | None = None  # None: exhaustive
    budget: int | None = None
    semantics: Semantics | None = None

    def __post_init__(self) -> None:
        overlap = set(self.require) & set(self.forbid)
        if overlap:
            raise QueryError(
                "contradictory query: " + ", ".join(sorted(str(c) for c in overlap)) + " both required and forbidden"
            )
        if not self.values:
            raise QueryError("value set is empty")
        if self.max_points < 1:
            raise QueryError("max_points must be at least 1")
        if self.seed is not None and (self.budget is None or self.budget < 1):
            raise QueryError("randomized mode needs a positive budget")

    @property
    def exhaustive(self) -> bool:
        return self.seed is None

    @classmethod
    def build(
        cls,
        require: Sequence[str | SpaceClass],
        forbid: Sequence[str | SpaceClass],
        max_points: int,
        values: Sequence,
        seed: int | None = None,
        budget: int | None = None,
        semantics: Semantics | str | None = None,
    ) -> SearchQuery:
        sem = Semantics(semantics) if semantics is not None else None

        def conv(c):
            return c if isinstance(c, SpaceClass) else parse_class(c, sem)

        return cls(
            tuple(conv(c) for c in require),
            tuple(conv(c) for c in forbid),
            max_points,
            _sorted_values(values),
            seed,
            budget,
            sem,
        )


def load_query(document: str | Mapping) -> SearchQuery:
    doc = json.loads(document) if isinstance(document, str) else document
    if not isinstance(doc, Mapping):
        raise QueryError("query document must be a JSON object")
    try:
        values = [parse_rational(v, "values") for v in doc.get("values", [])]
    except MalformedNumber as exc:
        raise QueryError(str(exc)) from None
    mode = doc.get("mode") or {"exhaustive": True}
    seed = budget = None
    if not mode.get("exhaustive"):
        if "seed" not in mode:
            raise QueryError("mode must be {'exhaustive': true} or {'seed': s, 'budget': b}")
        seed, budget = int(mode["seed"]), int(mode.get("budget", 0))
    max_points = doc.get("max_points")
    if not isinstance(max_points, int):
        raise QueryError("field 'max_points' must be an integer")
    try:
        return SearchQuery.build(
            doc.get("require", []),
            doc.get("forbid", []),
            max_points,
            values,
            seed,
            budget,
            doc.get("semantics"),
        )
    except ValueError as exc:
        raise QueryError(str(exc)) from None


@dataclass(frozen=True)
class SeparationWitness:
    space: FiniteSpace
    report: ClassificationReport
    checks: dict[SpaceClass, object]  # queried class -> witness or None
    canonical: bool
    index: int  # position within the enumeration of its point count

    def to_json(self) -> dict:
        return {
            "found": True,
            "space": self.space.to_json(),
            "canonical": self.canonical,
            "index": self.index,
            "checks": {
                str(c): ({"holds": True} if w is None else {"holds": False, "witness": w.to_json()})
                for c, w in self.checks.items()
            },
            "report": self.report.to_json(),
        }


def matches(space: FiniteSpace, query: SearchQuery) -> bool:
    for c in query.require:
        if check_axioms(space, c) is not None:
            return False
    for c in query.forbid:
        if check_axioms(space, c) is None:
            return False
    return True


def _witness(space: FiniteSpace, query: SearchQuery, canonical: bool, index: int) -> SeparationWitness:
    checks = {c: check_axioms(space, c) for c in (*query.require, *query.forbid)}
    return SeparationWitness(space, classify(space, query.semantics), checks, canonical, index)


def _scan_chunk(args) -> int | None:
    query, n, start, stop = args
    for i in range(start, stop):
        if matches(space_at(n, query.values, i), query):
            return i
    return None


def _worker_count(workers: int | None) -> int:
    if workers is not None:
        return max(1, workers)
    raw = os.environ.get(THREADS_ENV)
    return max(1, int(raw)) if raw and raw.isdigit() else 1


def find_separation(
    query: SearchQuery, workers: int | None = None
) -> SeparationWitness | None:
    """First space satisfying every required class and failing every forbidden one.

    Exhaustive mode scans point counts 1..max_points in enumeration order and
    returns the globally first hit, even when chunks run in parallel.
    Randomized mode draws (point count, table index) pairs from a seeded
    ``random.Random``. A query the implication lattice rules out returns None
    without enumerating.
    """
    if lattice_conflict(query.require, query.forbid) is not None:
        return None
    if not query.exhaustive:
        rng = random.Random(query.seed)
        for _ in range(query.budget):
            n = rng.randint(1, query.max_points)
            index = rng.randrange(space_count(n, query.values))
            space = space_at(n, query.values, index)
            if matches(space, query):
                return _witness(space, query, False, index)
        return None

    nworkers = _worker_count(workers)
    for n in range(1, query.max_points + 1):
        total = space_count(n, query.values)
        if nworkers == 1 or total <= CHUNK:
            for i, space in enumerate(enumerate_spaces(n, query.values)):
                if matches(space, query):
                    return _witness(space, query, True, i)
            continue
        chunks = [(query, n, s, min(s + CHUNK, total)) for s in range(0, total, CHUNK)]
        with ProcessPoolExecutor(max_workers=nworkers) as pool:
            hits = [h for h in pool.map(_scan_chunk, chunks) if h is not None]
        if hits:
            i = min(hits)
            return _witness(space_at(n, query.values, i), query, True, i)
    return None


def query_to_json(query: SearchQuery) -> dict:
    out = {
        "require": [str(c) for c in query.require],
        "forbid": [str(c) for c in query.forbid],
        "max_points": query.max_points,
        "values": [format_rational(v) for v in query.values],
        "mode": {"exhaustive": True} if query.exhaustive else {"seed": query.seed, "budget": query.budget},
    }
    if query.semantics is not None:
        out["semantics"] = query.semantics.value
    return out
