"""Command-line driver: run programs, lint them, cross-check the evaluator.

Exit codes: 0 success, 1 the program failed, 2 lex/parse error (or bad
input file), 3 internal error.  Results go to stdout; traces, warnings,
and error messages go to stderr.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .failure import ExceptionTree, render
from .interp import (
    Budget,
    DEFAULT_MAX_STEPS,
    Failure,
    Success,
    TraceNode,
    eval_goal,
    render_trace,
    run_main,
)
from .oracle import (
    Derivable,
    DepthExhausted,
    NotDerivable,
    SearchConfig,
    derive_bounded,
    gen_program,
)
from .parser import SourceError, parse_program
from .store import CheckpointUnderflow, Store, Value
from .syntax import pretty_program, pretty_print, shared_union_vars

EXIT_SUCCESS = 0
EXIT_FAILURE = 1
EXIT_PARSE_ERROR = 2
EXIT_INTERNAL = 3

_STATUS_CODES = {
    "success": EXIT_SUCCESS,
    "failure": EXIT_FAILURE,
    "parse-error": EXIT_PARSE_ERROR,
    "internal-error": EXIT_INTERNAL,
}


@dataclass
class RunReport:
    status: str
    failtree: ExceptionTree | None = None
    bindings: dict[str, Value] | None = None
    output: list[str] = field(default_factory=list)
    steps_used: int = 0
    message: str = ""
    trace: TraceNode | None = None

    @property
    def exit_code(self) -> int:
        return _STATUS_CODES[self.status]


def _read_input_file(path: str) -> list[int]:
    text = Path(path).read_text(encoding="utf-8")
    return [int(tok) for tok in text.split()]


def cmd_run(path: str, input_path: str | None = None, trace: bool = False,
            max_steps: int = DEFAULT_MAX_STEPS) -> RunReport:
    try:
        source = Path(path).read_text(encoding="utf-8")
    except OSError as err:
        return RunReport(status="parse-error", message=f"cannot read {path}: {err}")
    try:
        program = parse_program(source)
    except SourceError as err:
        return RunReport(status="parse-error", message=f"{path}:{err}")
    input_tokens: list[int] = []
    if input_path is not None:
        try:
            input_tokens = _read_input_file(input_path)
        except (OSError, ValueError) as err:
            return RunReport(status="parse-error", message=f"bad input file {input_path}: {err}")
    budget = Budget(max_steps)
    outcome, flushed, trace_root = run_main(program, input_tokens, budget=budget, trace=trace)
    if isinstance(outcome, Success):
        return RunReport(
            status="success",
            bindings=dict(outcome.store.bindings),
            output=flushed,
            steps_used=budget.used,
            trace=trace_root,
        )
    return RunReport(status="failure", failtree=outcome.tree, steps_used=budget.used, trace=trace_root)


def format_binding_value(v: Value) -> str:
    return f'"{v}"' if isinstance(v, str) else str(v)


def _print_report(report: RunReport) -> None:
    if report.trace is not None:
        print(render_trace(report.trace), file=sys.stderr)
    if report.status == "parse-error":
        print(f"error: {report.message}", file=sys.stderr)
    elif report.status == "failure":
        print(render(report.failtree))
    elif report.status == "success":
        for name in sorted(report.bindings):
            print(f"{name} = {format_binding_value(report.bindings[name])}")
        for line in report.output:
            print(line)


def cmd_check(path: str) -> tuple[int, list[str]]:
    """Parse and lint; returns (exit code, diagnostic lines)."""
    try:
        source = Path(path).read_text(encoding="utf-8")
    except OSError as err:
        return EXIT_PARSE_ERROR, [f"error: cannot read {path}: {err}"]
    try:
        program = parse_program(source)
    except SourceError as err:
        return EXIT_PARSE_ERROR, [f"error: {path}:{err}"]
    diagnostics = []
    goals = [d.body for _, d in sorted(program.defs.items())] + [program.main]
    for goal in goals:
        for node, names in shared_union_vars(goal):
            joined = ", ".join(names)
            diagnostics.append(f"warning: '|' branches share variables: {joined} (in: {pretty_print(node)})")
    return EXIT_SUCCESS, diagnostics


@dataclass
class SelfcheckReport:
    cases: int
    agreed: int = 0
    exhausted: int = 0
    counterexample: str | None = None

    @property
    def exit_code(self) -> int:
        return EXIT_SUCCESS if self.counterexample is None else EXIT_FAILURE


def cmd_selfcheck(cases: int = 1000, seed: int = 0, max_depth: int = 8,
                  size_bound: int = 6) -> SelfcheckReport:
    """Check the evaluator against the reference semantics on generated programs."""
    report = SelfcheckReport(cases=cases)
    config = SearchConfig(max_depth=max_depth)
    for i in range(cases):
        program, store_val, input_tokens = gen_program(seed + i, size_bound)
        reference = derive_bounded(program, store_val, program.main, config)
        if isinstance(reference, DepthExhausted):
            report.exhausted += 1
            continue
        store = Store(input_tokens, dict(store_val.bindings))
        outcome = eval_goal(program, store, program.main)
        if isinstance(reference, Derivable) and isinstance(outcome, Success):
            final = reference.store
            same = (
                final.bindings == store.bindings
                and final.cursor == store.cursor
                and final.output == tuple(store.output)
            )
            if same:
                report.agreed += 1
                continue
            detail = (
                f"final stores differ\n  reference: {final}\n  evaluator: "
                f"bindings={store.bindings!r} cursor={store.cursor} output={tuple(store.output)!r}"
            )
        elif isinstance(reference, NotDerivable) and isinstance(outcome, Failure):
            if reference.tree == outcome.tree:
                report.agreed += 1
                continue
            detail = (
                f"failure trees differ\n  reference: {reference.tree.sorted_paths()}"
                f"\n  evaluator: {outcome.tree.sorted_paths()}"
            )
        else:
            ref_text = "derivable" if isinstance(reference, Derivable) else "not derivable"
            out_text = "success" if isinstance(outcome, Success) else "failure"
            detail = f"reference says {ref_text}, evaluator says {out_text}"
        report.counterexample = (
            f"disagreement on case {i} (seed {seed + i}):\n"
            f"{pretty_program(program)}"
            f"initial bindings: {store_val.bindings!r}\n"
            f"input: {list(input_tokens)!r}\n"
            f"{detail}"
        )
        break
    return report


def build_arg_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="tci",
        description="Interpreter for TC (.tc files): statements succeed or fail, "
        "failing statements roll back, and failures are handled by kind.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="parse and execute a program")
    run_p.add_argument("file", help="program file (.tc)")
    run_p.add_argument("--input", help="whitespace-separated integers for read()")
    run_p.add_argument("--trace", action="store_true", help="print the evaluation trace to stderr")
    run_p.add_argument("--max-steps", type=int, default=DEFAULT_MAX_STEPS, metavar="N",
                       help="step budget before the run fails with /F/sys/depth")

    check_p = sub.add_parser("check", help="parse and lint a program without running it")
    check_p.add_argument("file", help="program file (.tc)")

    self_p = sub.add_parser("selfcheck", help="compare the evaluator against the reference semantics")
    self_p.add_argument("--cases", type=int, default=1000, metavar="N")
    self_p.add_argument("--seed", type=int, default=0, metavar="N")
    self_p.add_argument("--max-depth", type=int, default=8, metavar="N")

    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_arg_parser().parse_args(argv)
    # deep object-language recursion nests host frames; give it headroom
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 20_000))
    try:
        if args.command == "run":
            report = cmd_run(args.file, args.input, args.trace, args.max_steps)
            _print_report(report)
            return report.exit_code
        if args.command == "check":
            code, diagnostics = cmd_check(args.file)
            for line in diagnostics:
                print(line, file=sys.stderr)
            return code
        if args.command == "selfcheck":
            report = cmd_selfcheck(args.cases, args.seed, args.max_depth)
            print(
                f"selfcheck: cases={report.cases} agreed={report.agreed} "
                f"depth-exhausted={report.exhausted}"
            )
            if report.counterexample is not None:
                print(report.counterexample)
            return report.exit_code
        raise AssertionError(f"unhandled command {args.command!r}")
    except CheckpointUnderflow as err:
        print(f"internal error: {err}", file=sys.stderr)
        return EXIT_INTERNAL
    except SourceError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_PARSE_ERROR
    except Exception as err:  # noqa: BLE001 - last-resort boundary for exit code 3
        print(f"internal error: {err!r}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
