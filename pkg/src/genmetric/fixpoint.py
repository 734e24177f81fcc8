"""Contraction certificates, Picard iteration and fixed-point certification.

Three contraction conditions on a self-map T of a rectangular metric-like
space, each of the form ``d(Tx, Ty) <= k * bound(x, y)`` for all ordered
pairs including x = y:

* BANACH:            bound = d(x, y)
* MAX_SELF:          bound = max(d(x, y), d(x, x), d(y, y))
* MAX_DISPLACEMENT:  bound = max(d(x, y), d(x, Tx), d(y, Ty))

On a finite space the smallest admissible k is a maximum of finitely many
ratios, so everything here is exact.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .axioms import ClassTag, Semantics, SpaceClass, check_axioms
from .rationals import format_rational
from .spaces import FiniteSpace, SpaceError

INF = math.inf


class Condition(str, enum.Enum):
    BANACH = "banach"
    MAX_SELF = "max-self"
    MAX_DISPLACEMENT = "max-displacement"


class NotRectangularMetricLike(ValueError):
    pass


class NotAdmissible(ValueError):
    pass


class AuditFailure(AssertionError):
    pass


@dataclass(frozen=True)
class SelfMap:
    table: Mapping[str, str]

    def __call__(self, p: str) -> str:
        return self.table[p]

    def validate(self, space: FiniteSpace) -> None:
        missing = [p for p in space.points if p not in self.table]
        if missing:
            raise SpaceError(f"map is not total: no image for {', '.join(missing)}")
        extra = [p for p in self.table if p not in space]
        if extra:
            raise SpaceError(f"map mentions unknown points: {', '.join(extra)}")
        for p, q in self.table.items():
            if q not in space:
                raise SpaceError(f"image of {p} is unknown point {q!r}")

    def fixed_points(self) -> list[str]:
        return [p for p, q in self.table.items() if p == q]

    def to_json(self) -> dict:
        return {"map": dict(self.table)}


def load_map(document: str | Mapping, space: FiniteSpace) -> SelfMap:
    doc = json.loads(document) if isinstance(document, str) else document
    if not isinstance(doc, Mapping) or not isinstance(doc.get("map"), Mapping):
        raise SpaceError("map document must be {'map': {point: point, ...}}")
    table = doc["map"]
    if not all(isinstance(k, str) and isinstance(v, str) for k, v in table.items()):
        raise SpaceError("map keys and values must be point labels")
    m = SelfMap(dict(table))
    m.validate(space)
    return m


def _show_k(k) -> str:
    return "inf" if k == INF else format_rational(k)


@dataclass(frozen=True)
class ContractionCertificate:
    condition: Condition
    k_min: Fraction | float  # INF when some pair has bound 0 but image distance > 0
    binding_pair: tuple[str, str]

    @property
    def admissible(self) -> bool:
        return self.k_min < 1

    def to_json(self) -> dict:
        return {
            "condition": self.condition.value,
            "k_min": _show_k(self.k_min),
            "admissible": self.admissible,
            "binding_pair": list(self.binding_pair),
        }


def condition_bound(space: FiniteSpace, T: SelfMap, condition: Condition, x: str, y: str) -> Fraction:
    d = space.dist
    if condition is Condition.BANACH:
        return d(x, y)
    if condition is Condition.MAX_SELF:
        return max(d(x, y), d(x, x), d(y, y))
    return max(d(x, y), d(x, T(x)), d(y, T(y)))


def require_rml(space: FiniteSpace, semantics: Semantics = Semantics.ALL_PAIRS) -> None:
    w = check_axioms(space, SpaceClass(ClassTag.RML, semantics))
    if w is not None:
        raise NotRectangularMetricLike(
            f"space is not rectangular metric-like ({semantics.value}): axiom {w.axiom_id} fails at "
            + ", ".join(f"{r}={p}" for r, p in w.points.items())
        )


def contraction_constant(
    space: FiniteSpace,
    T: SelfMap,
    condition: Condition,
    semantics: Semantics = Semantics.ALL_PAIRS,
) -> ContractionCertificate:
    """Smallest k with ``d(Tx, Ty) <= k * bound(x, y)`` over all ordered pairs.

    A pair with bound 0 contributes 0 when its image distance is 0 and makes
    k infinite otherwise. The binding pair is the first pair (in point order)
    attaining the maximum.
    """
    require_rml(space, semantics)
    T.validate(space)
    best: Fraction | float = Fraction(0)
    binding = (space.points[0], space.points[0])
    for x in space.points:
        for y in space.points:
            lhs = space.dist(T(x), T(y))
            rhs = condition_bound(space, T, condition, x, y)
            if rhs == 0:
                ratio = Fraction(0) if lhs == 0 else INF
            else:
                ratio = lhs / rhs
            if ratio > best:
                best, binding = ratio, (x, y)
                if best == INF:
                    return ContractionCertificate(condition, INF, binding)
    return ContractionCertificate(condition, best, binding)


class Termination(str, enum.Enum):
    FIXED_POINT = "fixed_point"
    CYCLE = "cycle_detected"
    BUDGET = "budget_exhausted"


@dataclass(frozen=True)
class IterationTrace:
    """Picard orbit ``x_0, x_1 = T x_0, ...`` with its diagnostic series.

    The series have one entry per orbit point: ``rho[n] = d(x_n, x_{n+1})``,
    ``rho_star[n] = d(x_n, x_{n+2})``, ``rho_prime[n] = d(x_n, x_n)``, where
    terms past the end of the orbit come from applying the map.
    """

    orbit: list[str]
    rho: list[Fraction]
    rho_star: list[Fraction]
    rho_prime: list[Fraction]
    termination: Termination
    fixed_point: str | None = None
    period: int | None = None

    def to_json(self) -> dict:
        term: dict = {"kind": self.termination.value}
        if self.fixed_point is not None:
            term["point"] = self.fixed_point
        if self.period is not None:
            term["period"] = self.period
        return {
            "orbit": list(self.orbit),
            "rho": [format_rational(v) for v in self.rho],
            "rho_star": [format_rational(v) for v in self.rho_star],
            "rho_prime": [format_rational(v) for v in self.rho_prime],
            "terminated": term,
        }


def picard_iterate(space: FiniteSpace, T: SelfMap, x0: str, max_steps: int | None = None) -> IterationTrace:
    """Iterate T from x0 until a fixed point, a revisited point or the budget.

    ``max_steps`` caps the number of new orbit points; the default, the
    number of points, always suffices on a finite space.
    """
    space.index(x0)
    T.validate(space)
    if max_steps is None:
        max_steps = len(space)
    if max_steps < 1:
        raise ValueError("max_steps must be at least 1")
    orbit = [x0]
    seen = {x0: 0}
    fixed = period = None
    while True:
        x = orbit[-1]
        nxt = T(x)
        if nxt == x:
            termination, fixed = Termination.FIXED_POINT, x
            break
        if nxt in seen:
            termination, period = Termination.CYCLE, len(orbit) - seen[nxt]
            break
        if len(orbit) - 1 >= max_steps:
            termination = Termination.BUDGET
            break
        seen[nxt] = len(orbit)
        orbit.append(nxt)
    d = space.dist
    return IterationTrace(
        orbit,
        [d(x, T(x)) for x in orbit],
        [d(x, T(T(x))) for x in orbit],
        [d(x, x) for x in orbit],
        termination,
        fixed,
        period,
    )


@dataclass(frozen=True)
class BoundCheck:
    name: str
    passed: bool
    # (n, lhs, rhs) per recorded step
    rows: list[tuple[int, Fraction, Fraction]] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "result": "pass" if self.passed else "fail",
            "steps": [
                {"n": n, "lhs": format_rational(a), "rhs": format_rational(b)} for n, a, b in self.rows
            ],
        }


def _envelope(name: str, series: list[Fraction], k: Fraction) -> BoundCheck:
    rows = [(n, v, k**n * series[0]) for n, v in enumerate(series)]
    return BoundCheck(name, all(a <= b for _, a, b in rows), rows)


def _eventually_zero(name: str, series: list[Fraction]) -> BoundCheck:
    rows = [(len(series) - 1, series[-1], Fraction(0))]
    return BoundCheck(name, series[-1] == 0, rows)


def bound_audits(trace: IterationTrace, condition: Condition, k: Fraction) -> list[BoundCheck]:
    """Per-step inequalities the theorem's proof guarantees along the orbit.

    BANACH gets the three geometric envelopes directly. For the max
    conditions only some series contract on their own; the others contract
    when paired with the self-distance (MAX_SELF) or with the displacement
    (MAX_DISPLACEMENT), which is what the max-argument case analysis yields.
    """
    rho, star, prime = trace.rho, trace.rho_star, trace.rho_prime
    pmax = lambda a, b: [max(u, v) for u, v in zip(a, b)]  # noqa: E731
    if condition is Condition.BANACH:
        return [
            _envelope("rho_n <= k^n rho_0", rho, k),
            _envelope("rho*_n <= k^n rho*_0", star, k),
            _envelope("rho'_n <= k^n rho'_0", prime, k),
        ]
    if condition is Condition.MAX_SELF:
        return [
            _envelope("rho'_n <= k^n rho'_0", prime, k),
            _envelope("max(rho_n, rho'_n) <= k^n max(rho_0, rho'_0)", pmax(rho, prime), k),
            _envelope("max(rho*_n, rho'_n) <= k^n max(rho*_0, rho'_0)", pmax(star, prime), k),
            _eventually_zero("rho_n -> 0", rho),
            _eventually_zero("rho*_n -> 0", star),
        ]
    return [
        _envelope("rho_n <= k^n rho_0", rho, k),
        _envelope("max(rho'_n, rho_n) <= k^n max(rho'_0, rho_0)", pmax(prime, rho), k),
        _envelope("max(rho*_n, rho_n) <= k^n max(rho*_0, rho_0)", pmax(star, rho), k),
        _eventually_zero("rho_n -> 0", rho),
        _eventually_zero("rho*_n -> 0", star),
        _eventually_zero("rho'_n -> 0", prime),
    ]


@dataclass(frozen=True)
class TheoremCertificate:
    condition: Condition
    certificate: ContractionCertificate
    trace: IterationTrace
    fixed_point: str
    self_distance_zero: bool
    unique: bool
    bound_checks: list[BoundCheck]

    @property
    def passed(self) -> bool:
        return self.self_distance_zero and self.unique and all(b.passed for b in self.bound_checks)

    def to_json(self) -> dict:
        return {
            "condition": self.condition.value,
            "certificate": self.certificate.to_json(),
            "fixed_point": self.fixed_point,
            "self_distance_zero": self.self_distance_zero,
            "unique": self.unique,
            "trace": self.trace.to_json(),
            "bound_checks": [b.to_json() for b in self.bound_checks],
            "passed": self.passed,
        }


def verify_theorem(
    space: FiniteSpace,
    T: SelfMap,
    condition: Condition,
    x0: str | None = None,
    semantics: Semantics = Semantics.ALL_PAIRS,
    strict: bool = True,
    max_steps: int | None = None,
) -> TheoremCertificate:
    """Certify the fixed-point conclusion for an admissible contraction.

    Finite spaces are complete (see :func:`genmetric.convergence.cauchy_limit_point`),
    so the hypotheses reduce to the space being rectangular metric-like and
    ``k_min < 1``. Raises :class:`NotAdmissible` otherwise; with ``strict``
    any failed conclusion or audit raises :class:`AuditFailure`.
    """
    cert = contraction_constant(space, T, condition, semantics)
    if not cert.admissible:
        raise NotAdmissible(f"k_min = {_show_k(cert.k_min)} is not below 1")
    x0 = space.points[0] if x0 is None else x0
    trace = picard_iterate(space, T, x0, max_steps)
    if trace.termination is not Termination.FIXED_POINT:
        raise AuditFailure(f"Picard iteration from {x0} ended with {trace.termination.value}")
    u = trace.fixed_point
    # uniqueness is read off the map table, independent of the trace
    others = [v for v in T.fixed_points() if v != u]
    result = TheoremCertificate(
        condition,
        cert,
        trace,
        u,
        space.dist(u, u) == 0,
        not others,
        bound_audits(trace, condition, Fraction(cert.k_min)),
    )
    if strict and not result.passed:
        failed = [b.name for b in result.bound_checks if not b.passed]
        raise AuditFailure(
            f"fixed point {u}: self_distance_zero={result.self_distance_zero}, unique={result.unique}, "
            f"failed audits={failed}"
        )
    return result
