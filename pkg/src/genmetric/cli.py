"""genmetric command line: every command prints one JSON report on stdout.

Exit codes: 0 success / holds, 1 valid but negative outcome, 2 input error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path
from typing import Any

from .axioms import Semantics, check_axioms, classify, lattice_conflict, parse_class
from .convergence import (
    DEFAULT_EPSILON,
    DEFAULT_WINDOW,
    Outcome,
    cauchy_test,
    load_sequence,
    sigma_limit_test,
    symmetric_limit_test,
)
from .fixpoint import (
    AuditFailure,
    Condition,
    NotAdmissible,
    NotRectangularMetricLike,
    contraction_constant,
    load_map,
    verify_theorem,
)
from .rationals import MalformedNumber, parse_rational
from .search import QueryError, find_separation, load_query, query_to_json
from .spaces import FiniteSpace, SpaceError, load_any_space, load_space
from .suite import run_suite

OK, NEGATIVE, INPUT_ERROR = 0, 1, 2


class InputError(Exception):
    pass


class Inputs:
    """Reads input files once, remembering a digest of each."""

    def __init__(self) -> None:
        self.digests: dict[str, str] = {}

    def json(self, path: str) -> Any:
        try:
            raw = Path(path).read_bytes()
        except OSError as exc:
            raise InputError(f"{path}: {exc.strerror}") from None
        self.digests[path] = "sha256:" + hashlib.sha256(raw).hexdigest()
        try:
            return json.loads(raw)
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
        except UnicodeDecodeError as exc:
            raise InputError(f"{path}: {exc}") from None


def _report(command: str, inputs: Inputs, result: Any, code: int) -> dict:
    return {"command": command, "inputs": inputs.digests, "result": result, "exit_code": code}


def cmd_classify(args, inputs: Inputs) -> tuple[Any, int]:
    try:
        space = load_space(inputs.json(args.space))
    except SpaceError as exc:
        raise InputError(f"{args.space}: {exc}") from None
    semantics = Semantics(args.semantics) if args.semantics else None
    if args.cls:
        try:
            cls = parse_class(args.cls, semantics)
        except SpaceError as exc:
            raise InputError(str(exc)) from None
        w = check_axioms(space, cls)
        result = {"class": str(cls), "holds": w is None}
        if w is not None:
            result["witness"] = w.to_json()
        return result, OK if w is None else NEGATIVE
    return classify(space, semantics).to_json(), OK


def cmd_fixpoint(args, inputs: Inputs) -> tuple[Any, int]:
    try:
        space = load_space(inputs.json(args.space))
        T = load_map(inputs.json(args.map), space)
        if args.x0 is not None:
            space.index(args.x0)
    except SpaceError as exc:
        raise InputError(str(exc)) from None
    if args.max_steps is not None and args.max_steps < 1:
        raise InputError("--max-steps must be at least 1")
    condition = Condition(args.condition)
    semantics = Semantics(args.semantics)
    try:
        cert = verify_theorem(space, T, condition, args.x0, semantics, strict=False, max_steps=args.max_steps)
    except NotRectangularMetricLike as exc:
        return {"error": str(exc), "hypothesis": "rectangular metric-like"}, NEGATIVE
    except NotAdmissible:
        c = contraction_constant(space, T, condition, semantics)
        return {"certificate": c.to_json(), "k_min": c.to_json()["k_min"], "admissible": False}, NEGATIVE
    except AuditFailure as exc:
        return {"error": str(exc)}, NEGATIVE
    result = cert.to_json()
    result["k_min"] = result["certificate"]["k_min"]
    return result, OK if cert.passed else NEGATIVE


def cmd_converge(args, inputs: Inputs) -> tuple[Any, int]:
    try:
        space = load_any_space(inputs.json(args.space))
        seq = load_sequence(inputs.json(args.sequence), space)
        epsilon = parse_rational(args.epsilon, "--epsilon")
    except (SpaceError, MalformedNumber) as exc:
        raise InputError(str(exc)) from None
    if epsilon <= 0 or args.window < 1:
        raise InputError("--epsilon must be positive and --window at least 1")
    candidate = None
    if args.mode != "cauchy":
        if args.candidate is None:
            raise InputError(f"mode {args.mode} needs --candidate")
        candidate = args.candidate
        if not isinstance(space, FiniteSpace) and not _labelled(space):
            try:
                candidate = parse_rational(candidate, "--candidate")
            except MalformedNumber as exc:
                raise InputError(str(exc)) from None
    try:
        if args.mode == "sigma":
            v = sigma_limit_test(space, seq, candidate, epsilon, args.window)
        elif args.mode == "symmetric":
            v = symmetric_limit_test(space, seq, candidate, epsilon, args.window)
        else:
            v = cauchy_test(space, seq, epsilon, args.window)
    except SpaceError as exc:
        raise InputError(str(exc)) from None
    return v.to_json(), OK if v.outcome is Outcome.HOLDS else NEGATIVE


def _labelled(space) -> bool:
    from .convergence import _uses_labels

    return _uses_labels(space)


def cmd_search(args, inputs: Inputs) -> tuple[Any, int]:
    try:
        query = load_query(inputs.json(args.query))
    except QueryError as exc:
        raise InputError(str(exc)) from None
    conflict = lattice_conflict(query.require, query.forbid)
    hit = find_separation(query, workers=args.workers)
    if hit is None:
        result: dict = {"found": False, "query": query_to_json(query)}
        if conflict is not None:
            result["reason"] = f"lattice: {conflict[0]} implies {conflict[1]}"
        return result, NEGATIVE
    result = hit.to_json()
    result["query"] = query_to_json(query)
    return result, OK


def cmd_paper_suite(args, inputs: Inputs) -> tuple[Any, int]:
    results = run_suite()
    passed = all(r.passed for r in results)
    return {"passed": passed, "items": [r.to_json() for r in results]}, OK if passed else NEGATIVE


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="genmetric", description=__doc__.splitlines()[0])
    ap.add_argument("--pretty", action="store_true", help="human-readable summary instead of JSON")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="check the eight axiom systems on a space")
    p.add_argument("space")
    p.add_argument("--semantics", choices=[s.value for s in Semantics])
    p.add_argument("--class", dest="cls", help="check one class only, e.g. MML or RMML(distinct)")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("fixpoint", help="certify a contraction and its fixed point")
    p.add_argument("space")
    p.add_argument("map")
    p.add_argument("--condition", choices=[c.value for c in Condition], default="banach")
    p.add_argument("--x0")
    p.add_argument("--max-steps", type=int, help="Picard budget (default: number of points)")
    p.add_argument("--semantics", choices=[s.value for s in Semantics], default="pairs")
    p.set_defaults(func=cmd_fixpoint)

    p = sub.add_parser("converge", help="test a sequence for convergence or Cauchy behaviour")
    p.add_argument("space", help="finite or parametric space document")
    p.add_argument("sequence")
    p.add_argument("--mode", choices=["sigma", "symmetric", "cauchy"], default="sigma")
    p.add_argument("--candidate")
    p.add_argument("--epsilon", default=str(DEFAULT_EPSILON))
    p.add_argument("--window", type=int, default=DEFAULT_WINDOW)
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("search", help="find a space separating two sets of classes")
    p.add_argument("query")
    p.add_argument("--workers", type=int, help="worker processes (default: $GENMETRIC_THREADS or 1)")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("paper-suite", help="run the embedded regression suite")
    p.set_defaults(func=cmd_paper_suite)
    return ap


def _pretty(report: dict) -> str:
    lines = [f"{report['command']}: exit {report['exit_code']}"]
    result = report["result"]
    if report["command"] == "paper-suite" and "items" in result:
        lines += [f"  {'PASS' if i['result'] == 'pass' else 'FAIL'}  {i['name']}: {i['detail']}" for i in result["items"]]
    elif report["command"] == "classify" and "verdicts" in result:
        for tag, v in result["verdicts"].items():
            sem = f"({v['semantics']})" if "semantics" in v else ""
            why = ""
            if not v["holds"]:
                w = v["witness"]
                pts = ", ".join(f"{k}={p}" for k, p in w["points"].items())
                why = f"  {w['axiom']} at {pts}: {w['lhs']} vs {w['rhs']}"
            lines.append(f"  {tag}{sem}: {'holds' if v['holds'] else 'fails'}{why}")
    else:
        lines.append(json.dumps(result, indent=2, ensure_ascii=False))
    return "\n".join(lines)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    inputs = Inputs()
    try:
        result, code = args.func(args, inputs)
    except InputError as exc:
        result, code = {"error": str(exc)}, INPUT_ERROR
    except QueryError as exc:
        result, code = {"error": str(exc)}, INPUT_ERROR
    report = _report(args.command, inputs, result, code)
    text = _pretty(report) if args.pretty else json.dumps(report, indent=2, ensure_ascii=False)
    sys.stdout.write(text + "\n")
    sys.stdout.flush()
    return code


if __name__ == "__main__":
    sys.exit(main())
