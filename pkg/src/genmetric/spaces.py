"""Finite and parametric distance spaces.

A :class:`FiniteSpace` is the carrier every checker works on: labelled points
and an exact, symmetric, nonnegative distance table. A :class:`ParametricSpace`
is one of a few closed families over an interval of the rationals; it can be
evaluated at arbitrary rational points or sampled on a grid.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import lcm
from typing import Any, Mapping, Sequence

from .rationals import MalformedNumber, decimal_label, format_rational, parse_rational

MAX_GRID_POINTS = 10_000


class SpaceError(ValueError):
    """Invalid space document or parameters."""


@dataclass(frozen=True)
class FiniteSpace:
    points: tuple[str, ...]
    table: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self) -> None:
        n = len(self.points)
        if n == 0:
            raise SpaceError("space must have at least one point")
        if len(set(self.points)) != n:
            raise SpaceError("point labels must be unique")
        if len(self.table) != n or any(len(row) != n for row in self.table):
            raise SpaceError(f"distance table must be {n}x{n}")
        for i, row in enumerate(self.table):
            for j, v in enumerate(row):
                if v < 0:
                    raise SpaceError(
                        f"negative distance at ({self.points[i]},{self.points[j]}): {format_rational(v)}"
                    )
        for i in range(n):
            for j in range(i + 1, n):
                if self.table[i][j] != self.table[j][i]:
                    raise SpaceError(
                        f"asymmetric at ({self.points[i]},{self.points[j]}): "
                        f"{format_rational(self.table[i][j])} != {format_rational(self.table[j][i])}"
                    )

    @classmethod
    def from_rows(cls, points: Sequence[str], rows: Sequence[Sequence[Any]]) -> FiniteSpace:
        return cls(
            tuple(points),
            tuple(tuple(parse_rational(v, "d") for v in row) for row in rows),
        )

    @classmethod
    def from_function(cls, points: Sequence[str], fn) -> FiniteSpace:
        pts = tuple(points)
        return cls(pts, tuple(tuple(Fraction(fn(a, b)) for b in pts) for a in pts))

    def __len__(self) -> int:
        return len(self.points)

    @cached_property
    def _index(self) -> dict[str, int]:
        return {p: i for i, p in enumerate(self.points)}

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise SpaceError(f"unknown point {label!r}") from None

    def __contains__(self, label: object) -> bool:
        return label in self._index

    def dist(self, a: str, b: str) -> Fraction:
        return self.table[self.index(a)][self.index(b)]

    @cached_property
    def scaled(self) -> tuple[int, tuple[tuple[int, ...], ...]]:
        """``(scale, ints)`` with ``table[i][j] == ints[i][j] / scale`` exactly.

        Integer arithmetic is several times faster than Fraction arithmetic
        and the checkers only ever add, subtract and compare.
        """
        scale = 1
        for row in self.table:
            for v in row:
                scale = lcm(scale, v.denominator)
        ints = tuple(tuple(int(v * scale) for v in row) for row in self.table)
        return scale, ints

    def zero_self_set(self) -> list[str]:
        return [p for i, p in enumerate(self.points) if self.table[i][i] == 0]

    def relabel(self, order: Sequence[int]) -> FiniteSpace:
        """Permute points: the new i-th point is the old ``order[i]``-th."""
        return FiniteSpace(
            tuple(self.points[i] for i in order),
            tuple(tuple(self.table[i][j] for j in order) for i in order),
        )

    def to_json(self) -> dict:
        return {
            "points": list(self.points),
            "d": [[format_rational(v) for v in row] for row in self.table],
        }


def zero_space(n: int) -> FiniteSpace:
    return FiniteSpace.from_function(_default_labels(n), lambda a, b: 0)


def _default_labels(n: int) -> list[str]:
    if n <= 26:
        return [chr(ord("a") + i) for i in range(n)]
    return [f"p{i}" for i in range(n)]


def load_space(document: str | Mapping) -> FiniteSpace:
    """Validate a space document ``{"points": [...], "d": [[...], ...]}``."""
    doc = json.loads(document) if isinstance(document, str) else document
    if not isinstance(doc, Mapping):
        raise SpaceError("space document must be a JSON object")
    points = doc.get("points")
    rows = doc.get("d")
    if not isinstance(points, list) or not all(isinstance(p, str) for p in points):
        raise SpaceError("field 'points' must be a list of strings")
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise SpaceError("field 'd' must be a list of rows")
    n = len(points)
    if len(rows) != n or any(len(r) != n for r in rows):
        raise SpaceError(f"field 'd' is not square with side {n}")
    table = []
    for i, row in enumerate(rows):
        parsed = []
        for j, v in enumerate(row):
            try:
                parsed.append(parse_rational(v, f"d[{i}][{j}]"))
            except MalformedNumber as exc:
                raise SpaceError(str(exc)) from None
        table.append(tuple(parsed))
    return FiniteSpace(tuple(points), tuple(table))


def shift_space(space: FiniteSpace, alpha: Fraction) -> FiniteSpace:
    alpha = Fraction(alpha)
    if alpha <= 0:
        raise SpaceError(f"shift must be positive, got {format_rational(alpha)}")
    return FiniteSpace(space.points, tuple(tuple(v + alpha for v in row) for row in space.table))


def ball_members(space: FiniteSpace, center: str, radius: Fraction) -> list[str]:
    """Points y with ``|d(center, y) - d(center, center)| < radius``."""
    radius = Fraction(radius)
    if radius <= 0:
        raise SpaceError("radius must be positive")
    c = space.index(center)
    row = space.table[c]
    return [p for j, p in enumerate(space.points) if abs(row[j] - row[c]) < radius]


# -- parametric families ------------------------------------------------------


class Family(str, enum.Enum):
    SATISH_RPM = "satish_rpm"
    ABS_PLUS_C = "abs_plus_c"
    SHIFTED = "shifted"


@dataclass(frozen=True)
class Interval:
    lo: Fraction
    hi: Fraction
    lo_open: bool = False
    hi_open: bool = False

    def __contains__(self, x: object) -> bool:
        if not isinstance(x, (int, Fraction)):
            return False
        above = x > self.lo if self.lo_open else x >= self.lo
        below = x < self.hi if self.hi_open else x <= self.hi
        return above and below

    def is_empty(self) -> bool:
        if self.lo < self.hi:
            return False
        return self.lo > self.hi or self.lo_open or self.hi_open


@dataclass(frozen=True)
class ParametricSpace:
    """A closed family of distance functions over a rational interval.

    ``shifted`` wraps a base space (finite or parametric) and adds a positive
    constant; its points are whatever the base uses.
    """

    family: Family
    params: Mapping[str, Fraction] = field(default_factory=dict)
    domain: Interval | None = None
    step: Fraction | None = None
    base: FiniteSpace | ParametricSpace | None = None

    def __post_init__(self) -> None:
        p = self.params
        if self.family is Family.SATISH_RPM:
            a, alpha = _need(p, "a"), _need(p, "alpha")
            if not (alpha >= a >= 3):
                raise SpaceError(
                    f"satish_rpm needs alpha >= a >= 3, got a={format_rational(a)}, alpha={format_rational(alpha)}"
                )
            if self.domain is not None and not (
                self.domain.lo >= 0 and self.domain.hi <= a
            ):
                raise SpaceError("satish_rpm domain must lie inside [0, a]")
        elif self.family is Family.ABS_PLUS_C:
            if _need(p, "c") < 0:
                raise SpaceError("abs_plus_c needs c >= 0")
        elif self.family is Family.SHIFTED:
            if _need(p, "alpha") <= 0:
                raise SpaceError("shifted needs alpha > 0")
            if self.base is None:
                raise SpaceError("shifted needs a base space")
        if self.family is not Family.SHIFTED and self.domain is None:
            raise SpaceError(f"{self.family.value} needs a domain")
        if self.domain is not None and self.domain.is_empty():
            raise SpaceError("domain interval is empty")
        if self.step is not None and self.step <= 0:
            raise SpaceError("grid step must be positive")

    def contains(self, x: Any) -> bool:
        if self.family is Family.SHIFTED:
            return x in self.base if isinstance(self.base, FiniteSpace) else self.base.contains(x)
        return x in self.domain

    def check_point(self, x: Any) -> None:
        if not self.contains(x):
            shown = format_rational(x) if isinstance(x, Fraction) else repr(x)
            raise SpaceError(f"point {shown} is outside the space")

    def dist(self, x: Any, y: Any) -> Fraction:
        self.check_point(x)
        self.check_point(y)
        return self._formula(x, y)

    def _formula(self, x, y) -> Fraction:
        p = self.params
        if self.family is Family.SATISH_RPM:
            alpha = p["alpha"]
            if x == y:
                return Fraction(x)
            if x in (1, 2) and y in (1, 2):
                return (3 * alpha + x + y) / 2
            return (alpha + x + y) / 2
        if self.family is Family.ABS_PLUS_C:
            return abs(x - y) + p["c"]
        return self.base.dist(x, y) + p["alpha"]

    def grid(self) -> list[Fraction]:
        if self.domain is None or self.step is None:
            raise SpaceError("grid sampling needs a domain and a step")
        dom, step = self.domain, self.step
        count = (dom.hi - dom.lo) // step + 1
        if count > MAX_GRID_POINTS:
            raise SpaceError(f"grid would have {count} points (limit {MAX_GRID_POINTS})")
        pts = [dom.lo + k * step for k in range(int(count))]
        return [x for x in pts if x in dom]


def _need(params: Mapping[str, Fraction], name: str) -> Fraction:
    try:
        return params[name]
    except KeyError:
        raise SpaceError(f"missing parameter {name!r}") from None


def materialize(space: ParametricSpace) -> FiniteSpace:
    """Sample the family on its grid; labels are decimal coordinates."""
    if space.family is Family.SHIFTED:
        base = space.base if isinstance(space.base, FiniteSpace) else materialize(space.base)
        return shift_space(base, space.params["alpha"])
    xs = space.grid()
    if not xs:
        raise SpaceError("grid is empty")
    return FiniteSpace(
        tuple(decimal_label(x) for x in xs),
        tuple(tuple(space._formula(x, y) for y in xs) for x in xs),
    )


def load_parametric(document: str | Mapping) -> ParametricSpace:
    """Parse ``{"family": ..., "params": {...}, "domain": {...}, "step": r}``."""
    doc = json.loads(document) if isinstance(document, str) else document
    if not isinstance(doc, Mapping):
        raise SpaceError("parametric document must be a JSON object")
    try:
        family = Family(doc.get("family"))
    except ValueError:
        raise SpaceError(f"unknown family {doc.get('family')!r}") from None
    raw = doc.get("params") or {}
    if not isinstance(raw, Mapping):
        raise SpaceError("field 'params' must be an object")
    params: dict[str, Fraction] = {}
    base = None
    try:
        for name, value in raw.items():
            if name == "base":
                base = load_any_space(value)
            else:
                params[name] = parse_rational(value, f"params.{name}")
        domain = None
        if doc.get("domain") is not None:
            d = doc["domain"]
            domain = Interval(
                parse_rational(d.get("lo"), "domain.lo"),
                parse_rational(d.get("hi"), "domain.hi"),
                bool(d.get("lo_open", False)),
                bool(d.get("hi_open", False)),
            )
        step = parse_rational(doc["step"], "step") if doc.get("step") is not None else None
    except MalformedNumber as exc:
        raise SpaceError(str(exc)) from None
    return ParametricSpace(family, params, domain, step, base)


def load_any_space(document: str | Mapping) -> FiniteSpace | ParametricSpace:
    doc = json.loads(document) if isinstance(document, str) else document
    if isinstance(doc, Mapping) and "family" in doc:
        return load_parametric(doc)
    return load_space(doc)


def parametric_to_json(space: ParametricSpace) -> dict:
    params: dict[str, Any] = {k: format_rational(v) for k, v in space.params.items()}
    if space.base is not None:
        params["base"] = (
            space.base.to_json()
            if isinstance(space.base, FiniteSpace)
            else parametric_to_json(space.base)
        )
    out: dict[str, Any] = {"family": space.family.value, "params": params}
    if space.domain is not None:
        d = space.domain
        out["domain"] = {
            "lo": format_rational(d.lo),
            "hi": format_rational(d.hi),
            "lo_open": d.lo_open,
            "hi_open": d.hi_open,
        }
    if space.step is not None:
        out["step"] = format_rational(space.step)
    return out
