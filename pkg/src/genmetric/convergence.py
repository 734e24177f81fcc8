"""Limits, symmetric limits and Cauchy behaviour of sequences.

Sequences are a finite prefix followed by an optional tail that is constant
or periodic. With a tail, every limit question has an exact answer, because
the tail's values repeat forever. A bare prefix only supports a windowed
estimate, so it is reported as ``inconclusive`` with a ``holds_so_far`` flag
and never as ``holds``.
"""

from __future__ import annotations

import enum
import json
import random
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Any, Mapping, Sequence, Union

from .axioms import ClassTag, SpaceClass, check_axioms
from .rationals import MalformedNumber, format_rational, parse_rational
from .spaces import Family, FiniteSpace, ParametricSpace, SpaceError

Space = Union[FiniteSpace, ParametricSpace]

DEFAULT_EPSILON = Fraction(1, 1000)
DEFAULT_WINDOW = 8


class Mode(str, enum.Enum):
    SIGMA = "sigma"
    SYMMETRIC = "symmetric"
    CAUCHY = "cauchy"


class Outcome(str, enum.Enum):
    HOLDS = "holds"
    FAILS = "fails"
    INCONCLUSIVE = "inconclusive"


class TailKind(str, enum.Enum):
    NONE = "none"
    CONSTANT = "constant"
    PERIODIC = "periodic"


@dataclass(frozen=True)
class SequenceSpec:
    prefix: tuple
    kind: TailKind = TailKind.NONE
    cycle: tuple = ()

    def __post_init__(self) -> None:
        if not self.prefix:
            raise SpaceError("sequence prefix must be nonempty")
        if self.kind is TailKind.CONSTANT and len(self.cycle) != 1:
            raise SpaceError("a constant tail has exactly one point")
        if self.kind is TailKind.PERIODIC and not self.cycle:
            raise SpaceError("a periodic tail needs at least one point")
        if self.kind is TailKind.NONE and self.cycle:
            raise SpaceError("a bare prefix has no tail points")

    @classmethod
    def constant(cls, point, prefix: Sequence = ()) -> SequenceSpec:
        return cls(tuple(prefix) or (point,), TailKind.CONSTANT, (point,))

    @classmethod
    def periodic(cls, cycle: Sequence, prefix: Sequence = ()) -> SequenceSpec:
        cycle = tuple(cycle)
        return cls(tuple(prefix) or cycle[:1], TailKind.PERIODIC, cycle)

    @classmethod
    def bare(cls, prefix: Sequence) -> SequenceSpec:
        return cls(tuple(prefix))

    @property
    def exact(self) -> bool:
        return self.kind is not TailKind.NONE

    def term(self, n: int):
        """The n-th term, counting from 0."""
        if n < len(self.prefix):
            return self.prefix[n]
        if not self.exact:
            raise IndexError("bare prefix has no term beyond its length")
        return self.cycle[(n - len(self.prefix)) % len(self.cycle)]

    def points(self) -> tuple:
        return self.prefix + self.cycle

    def to_json(self) -> dict:
        def show(p):
            return format_rational(p) if isinstance(p, Fraction) else p

        tail: Any = None
        if self.kind is TailKind.CONSTANT:
            tail = {"constant": show(self.cycle[0])}
        elif self.kind is TailKind.PERIODIC:
            tail = {"periodic": [show(p) for p in self.cycle]}
        return {"prefix": [show(p) for p in self.prefix], "tail": tail}


def _uses_labels(space: Space) -> bool:
    while isinstance(space, ParametricSpace):
        if space.family is not Family.SHIFTED:
            return False
        space = space.base
    return True


def check_point(space: Space, p) -> None:
    if isinstance(space, FiniteSpace):
        space.index(p)
    else:
        space.check_point(p)


def load_sequence(document: str | Mapping, space: Space) -> SequenceSpec:
    """Parse ``{"prefix": [...], "tail": null | {"constant": p} | {"periodic": [...]}}``.

    Points are labels on finite spaces and rational strings on parametric ones.
    """
    doc = json.loads(document) if isinstance(document, str) else document
    if not isinstance(doc, Mapping):
        raise SpaceError("sequence document must be a JSON object")
    labels = _uses_labels(space)

    def point(raw, where):
        if labels:
            if not isinstance(raw, str):
                raise SpaceError(f"{where}: expected a point label, got {raw!r}")
            p = raw
        else:
            try:
                p = parse_rational(raw, where)
            except MalformedNumber as exc:
                raise SpaceError(str(exc)) from None
        check_point(space, p)
        return p

    prefix = doc.get("prefix")
    if not isinstance(prefix, list):
        raise SpaceError("field 'prefix' must be a list")
    pre = tuple(point(p, f"prefix[{i}]") for i, p in enumerate(prefix))
    tail = doc.get("tail")
    if tail is None:
        return SequenceSpec(pre)
    if not isinstance(tail, Mapping):
        raise SpaceError("field 'tail' must be null or an object")
    if "constant" in tail:
        return SequenceSpec(pre, TailKind.CONSTANT, (point(tail["constant"], "tail.constant"),))
    if "periodic" in tail and isinstance(tail["periodic"], list):
        cyc = tuple(point(p, f"tail.periodic[{i}]") for i, p in enumerate(tail["periodic"]))
        return SequenceSpec(pre, TailKind.PERIODIC, cyc)
    raise SpaceError("field 'tail' must be {'constant': p} or {'periodic': [...]}")


@dataclass(frozen=True)
class ConvergenceVerdict:
    mode: Mode
    outcome: Outcome
    limit_estimate: Fraction | None
    epsilon: Fraction
    window: int
    detail: str
    holds_so_far: bool = False

    @property
    def holds(self) -> bool:
        return self.outcome is Outcome.HOLDS

    def to_json(self) -> dict:
        return {
            "mode": self.mode.value,
            "outcome": self.outcome.value,
            "inconclusive": self.outcome is Outcome.INCONCLUSIVE,
            "holds_so_far": self.holds_so_far,
            "limit_estimate": None if self.limit_estimate is None else format_rational(self.limit_estimate),
            "epsilon": format_rational(self.epsilon),
            "window": self.window,
            "detail": self.detail,
        }


def _validate(space: Space, seq: SequenceSpec, epsilon, window) -> tuple[Fraction, int]:
    epsilon = Fraction(epsilon)
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if window < 1:
        raise ValueError("window must be at least 1")
    for p in seq.points():
        check_point(space, p)
    return epsilon, window


def _show(p) -> str:
    return format_rational(p) if isinstance(p, Fraction) else str(p)


def _common(values: list[Fraction]) -> Fraction | None:
    return values[0] if all(v == values[0] for v in values) else None


def _trailing(seq: SequenceSpec, window: int) -> tuple | None:
    if len(seq.prefix) < window:
        return None
    return seq.prefix[-window:]


def sigma_limit_test(
    space: Space,
    seq: SequenceSpec,
    candidate,
    epsilon=DEFAULT_EPSILON,
    window: int = DEFAULT_WINDOW,
) -> ConvergenceVerdict:
    """Does ``d(x_n, candidate)`` tend to ``d(candidate, candidate)``?"""
    epsilon, window = _validate(space, seq, epsilon, window)
    check_point(space, candidate)
    target = space.dist(candidate, candidate)

    def verdict(outcome, est, detail, so_far=False):
        return ConvergenceVerdict(Mode.SIGMA, outcome, est, epsilon, window, detail, so_far)

    if seq.exact:
        values = [space.dist(c, candidate) for c in seq.cycle]
        lim = _common(values)
        if lim is None:
            shown = ", ".join(format_rational(v) for v in values)
            return verdict(Outcome.FAILS, None, f"d(x_n, {_show(candidate)}) cycles through {shown}; no limit")
        if lim != target:
            return verdict(
                Outcome.FAILS,
                lim,
                f"d(x_n, {_show(candidate)}) -> {format_rational(lim)} != self-distance {format_rational(target)}",
            )
        return verdict(Outcome.HOLDS, lim, f"d(x_n, {_show(candidate)}) is eventually {format_rational(lim)}")

    tail = _trailing(seq, window)
    if tail is None:
        return verdict(Outcome.INCONCLUSIVE, None, f"prefix shorter than window {window}")
    gap = max(abs(space.dist(p, candidate) - target) for p in tail)
    est = space.dist(tail[-1], candidate)
    ok = gap < epsilon
    return verdict(
        Outcome.INCONCLUSIVE,
        est,
        f"last {window} terms within {format_rational(gap)} of the self-distance"
        + (" (holds so far)" if ok else ""),
        ok,
    )


def symmetric_limit_test(
    space: Space,
    seq: SequenceSpec,
    candidate,
    epsilon=DEFAULT_EPSILON,
    window: int = DEFAULT_WINDOW,
) -> ConvergenceVerdict:
    """``lim d(x_n, x) = lim d(x_n, x_n) = d(x, x)`` for ``x = candidate``."""
    epsilon, window = _validate(space, seq, epsilon, window)
    check_point(space, candidate)
    target = space.dist(candidate, candidate)

    def verdict(outcome, est, detail, so_far=False):
        return ConvergenceVerdict(Mode.SYMMETRIC, outcome, est, epsilon, window, detail, so_far)

    if seq.exact:
        to_x = [space.dist(c, candidate) for c in seq.cycle]
        selfs = [space.dist(c, c) for c in seq.cycle]
        lim = _common(to_x)
        for c, a, b in zip(seq.cycle, to_x, selfs):
            if a != target or b != target:
                return verdict(
                    Outcome.FAILS,
                    lim,
                    f"tail point {_show(c)}: d(x_n,x)={format_rational(a)}, d(x_n,x_n)={format_rational(b)}, "
                    f"d(x,x)={format_rational(target)}",
                )
        return verdict(Outcome.HOLDS, target, f"all three quantities are eventually {format_rational(target)}")

    tail = _trailing(seq, window)
    if tail is None:
        return verdict(Outcome.INCONCLUSIVE, None, f"prefix shorter than window {window}")
    gap = max(
        max(abs(space.dist(p, candidate) - target), abs(space.dist(p, p) - target)) for p in tail
    )
    ok = gap < epsilon
    return verdict(
        Outcome.INCONCLUSIVE,
        space.dist(tail[-1], candidate),
        f"last {window} terms within {format_rational(gap)} of the self-distance"
        + (" (holds so far)" if ok else ""),
        ok,
    )


def cauchy_test(
    space: Space,
    seq: SequenceSpec,
    epsilon=DEFAULT_EPSILON,
    window: int = DEFAULT_WINDOW,
) -> ConvergenceVerdict:
    """Does the double limit of ``d(x_n, x_m)`` exist?

    With a periodic tail it exists exactly when the distance is constant over
    all ordered pairs of cycle points, self-pairs included.
    """
    epsilon, window = _validate(space, seq, epsilon, window)

    def verdict(outcome, est, detail, so_far=False):
        return ConvergenceVerdict(Mode.CAUCHY, outcome, est, epsilon, window, detail, so_far)

    if seq.exact:
        values = {space.dist(a, b) for a in seq.cycle for b in seq.cycle}
        if len(values) > 1:
            shown = ", ".join(format_rational(v) for v in sorted(values))
            return verdict(Outcome.FAILS, None, f"d(x_n, x_m) oscillates over {{{shown}}}")
        (lim,) = values
        return verdict(Outcome.HOLDS, lim, f"d(x_n, x_m) is eventually {format_rational(lim)}")

    tail = _trailing(seq, window)
    if tail is None:
        return verdict(Outcome.INCONCLUSIVE, None, f"prefix shorter than window {window}")
    values = [space.dist(a, b) for a in tail for b in tail]
    spread = max(values) - min(values)
    ok = spread < epsilon
    return verdict(
        Outcome.INCONCLUSIVE,
        space.dist(tail[-1], tail[-1]),
        f"last {window} terms spread {format_rational(spread)}" + (" (holds so far)" if ok else ""),
        ok,
    )


def paired_limit(space: Space, xs: SequenceSpec, ys: SequenceSpec) -> Fraction | None:
    """Exact ``lim d(x_n, y_n)`` for two tailed sequences, None when it does not exist."""
    if not (xs.exact and ys.exact):
        raise ValueError("paired limits need sequences with a tail")
    start = max(len(xs.prefix), len(ys.prefix))
    period = lcm(len(xs.cycle), len(ys.cycle))
    return _common([space.dist(xs.term(n), ys.term(n)) for n in range(start, start + period)])


def cauchy_limit_point(space: FiniteSpace, seq: SequenceSpec):
    """A point the Cauchy sequence ``seq`` converges to, or None if not Cauchy.

    In a finite space the tail points of a Cauchy sequence are pairwise at
    the limit distance r (self-distances included), so any tail point c has
    ``d(x_n, c) -> r = d(c, c)``: finite spaces are complete.
    """
    if not cauchy_test(space, seq).holds:
        return None
    for c in seq.cycle:
        if sigma_limit_test(space, seq, c).holds:
            return c
    return None


# -- theorem harness ------------------------------------------------------------

ITEM_STATEMENTS = {
    1: "x_n ->s x implies {x_n} is Cauchy",
    2: "Cauchy {x_n} with a subsequence ->s x implies x_n ->s x",
    3: "Cauchy {x_n}, {y_n} imply lim d(x_n, y_n) exists",
    4: "x_n ->s x and y_n ->s y imply lim d(x_n, y_n) = d(x, y)",
}


class HypothesisError(ValueError):
    """The space does not satisfy the theorem's hypothesis."""


@dataclass(frozen=True)
class Counterexample:
    item: int
    sequences: dict[str, SequenceSpec]
    candidates: dict[str, Any]
    violated: str

    def to_json(self) -> dict:
        return {
            "item": self.item,
            "sequences": {k: s.to_json() for k, s in self.sequences.items()},
            "candidates": {k: _show(v) for k, v in self.candidates.items()},
            "violated": self.violated,
        }


@dataclass(frozen=True)
class PropertyReport:
    item: int
    instances_run: int
    antecedent_hits: int
    counterexample: Counterexample | None = None

    def to_json(self) -> dict:
        return {
            "item": self.item,
            "statement": ITEM_STATEMENTS[self.item],
            "instances_run": self.instances_run,
            "antecedent_hits": self.antecedent_hits,
            "counterexample": None if self.counterexample is None else self.counterexample.to_json(),
        }


def _random_sequence(rng: random.Random, points: Sequence[str]) -> SequenceSpec:
    prefix = tuple(rng.choice(points) for _ in range(rng.randint(1, 3)))
    if rng.random() < 0.4:
        return SequenceSpec.constant(rng.choice(points), prefix)
    cycle = tuple(rng.choice(points) for _ in range(rng.randint(2, 3)))
    return SequenceSpec.periodic(cycle, prefix)


def _candidate(rng: random.Random, seq: SequenceSpec, points: Sequence[str]):
    return rng.choice(seq.cycle) if rng.random() < 0.5 else rng.choice(points)


def _subsequence(rng: random.Random, seq: SequenceSpec) -> SequenceSpec:
    # any nonempty set of tail points recurs infinitely often, so cycling
    # through it picks out a genuine subsequence
    distinct = list(dict.fromkeys(seq.cycle))
    chosen = [p for p in distinct if rng.random() < 0.5] or [rng.choice(distinct)]
    if len(chosen) == 1:
        return SequenceSpec.constant(chosen[0])
    return SequenceSpec.periodic(chosen)


def check_item(item: int, space: FiniteSpace, seqs: Mapping[str, SequenceSpec], cands: Mapping) -> tuple[bool, bool]:
    """(antecedent holds, conclusion holds) for one instance of an item."""
    sym, cauchy = symmetric_limit_test, cauchy_test
    if item == 1:
        ante = sym(space, seqs["x"], cands["x"]).holds
        return ante, (not ante) or cauchy(space, seqs["x"]).holds
    if item == 2:
        ante = cauchy(space, seqs["x"]).holds and sym(space, seqs["sub"], cands["x"]).holds
        return ante, (not ante) or sym(space, seqs["x"], cands["x"]).holds
    if item == 3:
        ante = cauchy(space, seqs["x"]).holds and cauchy(space, seqs["y"]).holds
        return ante, (not ante) or paired_limit(space, seqs["x"], seqs["y"]) is not None
    if item == 4:
        ante = sym(space, seqs["x"], cands["x"]).holds and sym(space, seqs["y"], cands["y"]).holds
        if not ante:
            return False, True
        lim = paired_limit(space, seqs["x"], seqs["y"])
        return True, lim is not None and lim == space.dist(cands["x"], cands["y"])
    raise ValueError(f"no item {item}")


def mml_theorem_suite(
    space: FiniteSpace,
    seed: int = 0,
    instances: int = 1000,
    allow_non_mml: bool = False,
) -> list[PropertyReport]:
    """Run the four convergence claims for modified metric-like spaces.

    Each item gets ``instances`` pseudo-random instances built from
    eventually constant or periodic sequences, so every verdict is exact.
    The first counterexample per item is kept. On a space that is not
    modified metric-like the run is refused unless ``allow_non_mml``.
    """
    if instances < 1:
        raise ValueError("instances must be at least 1")
    if not allow_non_mml and check_axioms(space, SpaceClass(ClassTag.MML)) is not None:
        raise HypothesisError("space is not modified metric-like")
    rng = random.Random(seed)
    pts = list(space.points)
    reports = []
    for item in (1, 2, 3, 4):
        hits = 0
        found = None
        for _ in range(instances):
            seqs: dict[str, SequenceSpec] = {"x": _random_sequence(rng, pts)}
            cands: dict[str, Any] = {}
            if item in (1, 2, 4):
                cands["x"] = _candidate(rng, seqs["x"], pts)
            if item == 2:
                seqs["sub"] = _subsequence(rng, seqs["x"])
                if rng.random() < 0.5:
                    cands["x"] = rng.choice(seqs["sub"].cycle)
            if item in (3, 4):
                seqs["y"] = _random_sequence(rng, pts)
            if item == 4:
                cands["y"] = _candidate(rng, seqs["y"], pts)
            ante, ok = check_item(item, space, seqs, cands)
            hits += ante
            if not ok and found is None:
                found = Counterexample(item, seqs, cands, ITEM_STATEMENTS[item])
        reports.append(PropertyReport(item, instances, hits, found))
    return reports
