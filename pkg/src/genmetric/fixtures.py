"""Worked spaces from the literature, embedded so the regression suite needs no files."""

from __future__ import annotations

from fractions import Fraction

from .spaces import Family, FiniteSpace, Interval, ParametricSpace, shift_space, zero_space

FIVE = ("1", "2", "3", "4", "5")


def ml_not_mml() -> FiniteSpace:
    """2 off the diagonal, 0 on it except d(1,1) = 3."""
    return FiniteSpace.from_function(
        FIVE, lambda a, b: 2 if a != b else (3 if a == "1" else 0)
    )


def rml_not_rmml() -> FiniteSpace:
    """5/2 off the diagonal, 5 at (1,1), 0 elsewhere on the diagonal."""
    return FiniteSpace.from_function(
        FIVE, lambda a, b: Fraction(5, 2) if a != b else (5 if a == "1" else 0)
    )


def satish_rpm(a=3, alpha=3, step=Fraction(1, 2)) -> ParametricSpace:
    return ParametricSpace(
        Family.SATISH_RPM,
        {"a": Fraction(a), "alpha": Fraction(alpha)},
        Interval(Fraction(0), Fraction(a)),
        Fraction(step),
    )


def abs_plus_c(c=2, lo=0, hi=1, step=Fraction(1, 4), lo_open=True, hi_open=True) -> ParametricSpace:
    return ParametricSpace(
        Family.ABS_PLUS_C,
        {"c": Fraction(c)},
        Interval(Fraction(lo), Fraction(hi), lo_open, hi_open),
        Fraction(step),
    )


def constant_one(labels=("a", "b")) -> FiniteSpace:
    """Every distance, self-distances included, equals 1."""
    return FiniteSpace.from_function(labels, lambda a, b: 1)


def shifted_zero(n=3, alpha=1) -> FiniteSpace:
    return shift_space(zero_space(n), Fraction(alpha))


def max_partial_metric(values=(0, 1, 2, 3)) -> FiniteSpace:
    """p(x, y) = max(x, y) on a few nonnegative numbers, the textbook partial metric."""
    return FiniteSpace.from_function(
        [str(v) for v in values], lambda a, b: max(Fraction(a), Fraction(b))
    )


def ml_not_mml_triangle() -> FiniteSpace:
    """Three points with self-distance 1, d(a,b) = d(a,c) = 1, d(b,c) = 2.

    Metric-like but not modified metric-like; the periodic sequence b, c, b, ...
    converges symmetrically to a without being Cauchy.
    """
    table = {("a", "b"): 1, ("a", "c"): 1, ("b", "c"): 2}
    return FiniteSpace.from_function(
        ("a", "b", "c"),
        lambda x, y: 1 if x == y else table[tuple(sorted((x, y)))],
    )
