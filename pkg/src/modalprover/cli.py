"""Command-line front end.

Exit codes (bit-exact contract): 0 proved / answers found / proof valid /
corpus all matched; 1 fail; 2 resource limits hit; 3 input error.  Stdout
is byte-deterministic for a given input and flag set; timings go to
stderr under --verbose.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from .checker import CheckResult, check
from .engine import (
    ANSWERED, EXHAUSTED, FAILED, PROVED, AnswerResult, ModalLimits,
    ProveResult, answer, prove,
)
from .errors import ReasonerError
from .parser import parse_problem
from .proof import parse_proof_json, render_json, render_text
from .saturation import FoLimits
from .syntax import render_term

EXIT_PROVED = 0
EXIT_FAIL = 1
EXIT_EXHAUSTED = 2
EXIT_INPUT = 3

_VERDICT_EXIT = {PROVED: EXIT_PROVED, ANSWERED: EXIT_PROVED,
                 FAILED: EXIT_FAIL, EXHAUSTED: EXIT_EXHAUSTED}


@dataclass
class RunReport:
    """One subcommand invocation: verdict, proof when (and only when)
    proved, the limits actually used, and per-phase wall times (stderr
    only; stdout stays byte-deterministic)."""

    verdict: str
    proof: object | None
    limits_used: ModalLimits
    timings_ms: dict[str, float]

    def __post_init__(self) -> None:
        assert (self.proof is not None) == (self.verdict == PROVED)


def _limits_from(args: argparse.Namespace) -> ModalLimits:
    fo = FoLimits(max_clauses=args.max_clauses, timeout_ms=args.timeout_ms,
                  max_answers=args.max_answers)
    return ModalLimits(max_outer_iterations=args.max_iterations,
                       max_nesting_depth=args.max_depth, fo=fo,
                       max_answers=args.max_answers)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--max-iterations", type=int, default=25)
    p.add_argument("--max-clauses", type=int, default=100_000)
    p.add_argument("--timeout-ms", type=int, default=10_000)
    p.add_argument("--max-depth", type=int, default=3)
    p.add_argument("--max-answers", type=int, default=10)
    p.add_argument("--seed", type=int, default=0,
                   help="reserved; the search is deterministic")
    p.add_argument("--verbose", action="store_true",
                   help="timing and diagnostics on stderr")


def _load_problem(path: str):
    return parse_problem(Path(path).read_text(encoding="utf-8"))


def _emit_prove(result: ProveResult, fmt: str) -> None:
    if fmt == "json":
        doc = {
            "verdict": result.verdict,
            "reason": result.reason,
            "proof": json.loads(render_json(result.proof))
            if result.proof else None,
        }
        print(json.dumps(doc, indent=2))
        return
    if result.verdict == PROVED:
        print("verdict: proved")
        print(render_text(result.proof))
    elif result.verdict == FAILED:
        print(f"verdict: fail ({result.reason})")
    else:
        print(f"verdict: resource-exhausted ({result.reason})")


def _emit_answer(result: AnswerResult, fmt: str) -> None:
    if fmt == "json":
        doc = {
            "verdict": result.verdict,
            "reason": result.reason,
            "answers": [
                {"bindings": {k: render_term(v)
                              for k, v in sorted(a.bindings.items())},
                 "proof": json.loads(render_json(a.proof))}
                for a in result.answers
            ],
        }
        print(json.dumps(doc, indent=2))
        return
    if result.verdict == ANSWERED:
        print(f"verdict: answered ({len(result.answers)} answer(s))")
        for i, a in enumerate(result.answers, start=1):
            shown = ", ".join(f"{k} -> {render_term(v)}"
                              for k, v in sorted(a.bindings.items()))
            print(f"answer {i}: {{{shown}}}")
            print(render_text(a.proof))
    elif result.verdict == FAILED:
        print(f"verdict: fail ({result.reason})")
    else:
        print(f"verdict: resource-exhausted ({result.reason})")


def cmd_prove(args: argparse.Namespace) -> int:
    t_parse = time.perf_counter()
    problem = _load_problem(args.path)
    t0 = time.perf_counter()
    limits = _limits_from(args)
    result = prove(problem, limits)
    report = RunReport(result.verdict, result.proof, limits,
                       {"parse": (t0 - t_parse) * 1000,
                        "prove": (time.perf_counter() - t0) * 1000})
    if args.verbose:
        phases = ", ".join(f"{k} {v:.1f} ms"
                           for k, v in report.timings_ms.items())
        print(f"{phases}; {result.iterations} iteration(s), "
              f"kb size {result.kb_size}", file=sys.stderr)
        for d in result.diagnostics:
            print(f"note: {d}", file=sys.stderr)
    _emit_prove(result, args.format)
    return _VERDICT_EXIT[report.verdict]


def cmd_answer(args: argparse.Namespace) -> int:
    problem = _load_problem(args.path)
    t0 = time.perf_counter()
    result = answer(problem, _limits_from(args))
    if args.verbose:
        ms = (time.perf_counter() - t0) * 1000
        print(f"answer: {ms:.1f} ms, {result.iterations} iteration(s), "
              f"{len(result.answers)} answer(s)", file=sys.stderr)
    _emit_answer(result, args.format)
    return _VERDICT_EXIT[result.verdict]


def cmd_check(args: argparse.Namespace) -> int:
    problem = _load_problem(args.problem)
    try:
        proof = parse_proof_json(Path(args.proof).read_text(encoding="utf-8"),
                                 problem)
    except ReasonerError as err:
        # a structurally sound proof over different symbols: a mismatch,
        # not an input error
        result = CheckResult(False, 0, f"proof does not match problem: {err}")
        if args.format == "json":
            print(json.dumps({"valid": False, "step": 0,
                              "reason": result.reason}, indent=2))
        else:
            print(str(result))
        return EXIT_FAIL
    result = check(proof, problem)
    if args.format == "json":
        print(json.dumps({"valid": result.ok, "step": result.step,
                          "reason": result.reason}, indent=2))
    else:
        print(str(result))
    return EXIT_PROVED if result.ok else EXIT_FAIL


def _with_overrides(limits: ModalLimits, overrides: dict[str, int]) -> ModalLimits:
    fo = FoLimits(
        max_clauses=overrides.get("max-clauses", limits.fo.max_clauses),
        timeout_ms=overrides.get("timeout-ms", limits.fo.timeout_ms),
        max_literals=limits.fo.max_literals,
        max_answers=overrides.get("max-answers", limits.fo.max_answers))
    return ModalLimits(
        max_outer_iterations=overrides.get("max-iterations",
                                           limits.max_outer_iterations),
        max_nesting_depth=overrides.get("max-depth",
                                        limits.max_nesting_depth),
        fo=fo,
        max_answers=overrides.get("max-answers", limits.max_answers))


def _run_one(path: Path, limits: ModalLimits) -> tuple[str, int | None]:
    problem = parse_problem(path.read_text(encoding="utf-8"))
    limits = _with_overrides(limits, problem.limit_overrides)
    if problem.query_vars:
        res = answer(problem, limits)
        return res.verdict, len(res.answers)
    return prove(problem, limits).verdict, None


def cmd_corpus(args: argparse.Namespace) -> int:
    root = Path(args.dir)
    files = sorted(root.glob("*.sxp")) if root.is_dir() else []
    if not files:
        print(f"error: no .sxp problem files in {args.dir}", file=sys.stderr)
        return EXIT_INPUT
    limits = _limits_from(args)
    lines = []
    matched = 0
    for path in files:
        problem = parse_problem(path.read_text(encoding="utf-8"))
        expected = problem.expect
        verdict, n_answers = _run_one(path, limits)
        ok = expected is None or verdict == expected
        if ok and problem.expect_answers is not None \
                and n_answers != problem.expect_answers:
            ok = False
            lines.append(f"FAIL {path.name} expected {problem.expect_answers}"
                         f" answers, got {n_answers}")
        elif ok:
            matched += 1
            lines.append(f"PASS {path.name} {verdict}")
        else:
            lines.append(f"FAIL {path.name} expected {expected}, "
                         f"got {verdict}")
    for line in lines:
        print(line)
    print(f"{matched}/{len(files)} matched")
    return EXIT_PROVED if matched == len(files) else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="modalprover",
        description="Resolution-based reasoner for agent- and time-indexed "
                    "belief, obligation, and goal modalities.")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prove", help="prove a problem file's goal")
    p.add_argument("path")
    _add_common(p)
    p.set_defaults(fn=cmd_prove)

    p = sub.add_parser("answer", help="find witnesses for the goal's "
                                      "answer variables")
    p.add_argument("path")
    _add_common(p)
    p.set_defaults(fn=cmd_answer)

    p = sub.add_parser("check", help="verify a proof file against a problem")
    p.add_argument("proof")
    p.add_argument("problem")
    _add_common(p)
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("corpus", help="run every problem in a directory "
                                      "against its expect header")
    p.add_argument("dir")
    _add_common(p)
    p.set_defaults(fn=cmd_corpus)

    return top


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ReasonerError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT
    except json.JSONDecodeError as err:
        print(f"error: malformed proof JSON: {err}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
