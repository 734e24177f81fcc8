"""Executable generalized metric spaces: axiom checks, convergence, fixed points, search."""

from __future__ import annotations

from .axioms import (
    AXIOMS,
    ClassTag,
    ClassificationReport,
    Semantics,
    SpaceClass,
    check_axioms,
    classify,
    evaluate_axiom,
    holds,
)
from .convergence import (
    ConvergenceVerdict,
    Outcome,
    SequenceSpec,
    cauchy_test,
    mml_theorem_suite,
    sigma_limit_test,
    symmetric_limit_test,
)
from .fixpoint import Condition, SelfMap, contraction_constant, picard_iterate, verify_theorem
from .search import SearchQuery, find_separation
from .spaces import FiniteSpace, ParametricSpace, SpaceError, load_space, materialize, shift_space

__version__ = "0.1.0"

__all__ = [
    "AXIOMS",
    "ClassTag",
    "ClassificationReport",
    "Condition",
    "ConvergenceVerdict",
    "FiniteSpace",
    "Outcome",
    "ParametricSpace",
    "SearchQuery",
    "SelfMap",
    "Semantics",
    "SequenceSpec",
    "SpaceClass",
    "SpaceError",
    "cauchy_test",
    "check_axioms",
    "classify",
    "contraction_constant",
    "evaluate_axiom",
    "find_separation",
    "holds",
    "load_space",
    "materialize",
    "mml_theorem_suite",
    "picard_iterate",
    "shift_space",
    "sigma_limit_test",
    "symmetric_limit_test",
    "verify_theorem",
]
