"""The TC evaluator.

Every goal evaluates to Success or Failure.  A failing goal leaves no
trace in the store: each evaluation step opens a checkpoint on entry and
rolls it back on failure, so partial updates never escape a failure at
any nesting level.

`G1 | G2` runs both operands in order (the second from the first's result
state when it succeeded) and succeeds if at least one does.  `G1 else G2`
runs the handler only after rolling G1 back, and makes the failure tree
available to `case Failtree of` goals for the handler's dynamic extent.

Trace lines are labeled with evaluation-rule ids: 1 success of `t`,
4 a procedure call, 5 an assignment, 6 sequencing, 7/8/9 the three ways a
`|` can succeed (both operands, only the second, only the first), 10/11
an `else` whose first operand succeeded/failed.  Tests, case dispatch,
calls in expression position, and rule-less failures are tagged `test`,
`case`, `call-expr`, and `fail`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .failure import (
    ExceptionTree,
    SYS_CASE,
    SYS_DEPTH,
    SYS_DIV0,
    SYS_TEST,
    SYS_UNBOUND,
    SYS_UNDEF,
    matches,
    merge,
    throw,
)
from .store import Store, UnboundVariable, Value
from .syntax import (
    Assign,
    Binary,
    Call,
    CallExpr,
    Case,
    Else,
    Expr,
    Fail,
    Goal,
    IntLit,
    Program,
    Read,
    Seq,
    StrLit,
    Test,
    TrueGoal,
    Union,
    Var,
    pretty_expr,
    pretty_print,
    substitute,
)

DEFAULT_MAX_STEPS = 1_000_000

# A procedure invoked in expression position reports its result through
# this global: the caller reads it immediately when the call returns.
RET_VAR = "ret"

PRINT_BUILTIN = "print"


@dataclass(frozen=True)
class Success:
    store: Store


@dataclass(frozen=True)
class Failure:
    tree: ExceptionTree


Outcome = Success | Failure


class Budget:
    """Step allowance, one unit per goal evaluated; exhaustion fails with /F/sys/depth."""

    def __init__(self, max_steps: int = DEFAULT_MAX_STEPS):
        self.max_steps = max_steps
        self.remaining = max_steps

    def spend(self) -> bool:
        if self.remaining <= 0:
            return False
        self.remaining -= 1
        return True

    @property
    def used(self) -> int:
        return self.max_steps - self.remaining


@dataclass
class TraceNode:
    rule: int | str
    goal: str
    result: str
    children: list[TraceNode] = field(default_factory=list)


def render_trace(node: TraceNode) -> str:
    lines: list[str] = []

    def walk(n: TraceNode, depth: int) -> None:
        lines.append(f"{'  ' * depth}[rule {n.rule}] {n.goal} => {n.result}")
        for child in n.children:
            walk(child, depth + 1)

    walk(node, 0)
    return "\n".join(lines)


class _EvalFailure(Exception):
    """Internal: aborts expression evaluation, carrying the failure tree."""

    def __init__(self, tree: ExceptionTree):
        self.tree = tree


def _int_div(a: int, b: int) -> int:
    # truncating division, C-style
    q = abs(a) // abs(b)
    return q if (a < 0) == (b < 0) else -q


def _test_holds(left: Value, op: str, right: Value) -> bool:
    if isinstance(left, int) and isinstance(right, int):
        return {
            "==": left == right,
            "!=": left != right,
            "<": left < right,
            "<=": left <= right,
            ">": left > right,
            ">=": left >= right,
        }[op]
    if isinstance(left, str) and isinstance(right, str) and op in ("==", "!="):
        return (left == right) if op == "==" else (left != right)
    return False


def format_value(v: Value) -> str:
    """How print() renders a value on the output stream."""
    return v if isinstance(v, str) else str(v)


def _literal(v: Value) -> Expr:
    return StrLit(v) if isinstance(v, str) else IntLit(v)


def _default_tag(g: Goal) -> int | str:
    match g:
        case TrueGoal():
            return 1
        case Call():
            return 4
        case Assign():
            return 5
        case Seq():
            return 6
        case Else():
            return 10
        case Test():
            return "test"
        case Case():
            return "case"
        case _:
            return "fail"


def _result_text(out: Outcome) -> str:
    if isinstance(out, Success):
        return "success"
    return "failure(" + ", ".join(out.tree.sorted_paths()) + ")"


class Evaluator:
    """One evaluation run over one store.  Not shared between threads."""

    def __init__(self, program: Program, store: Store, budget: Budget | None = None, trace: bool = False):
        self.program = program
        self.store = store
        self.budget = budget if budget is not None else Budget()
        self._trace: list[list[TraceNode]] | None = [[]] if trace else None

    @property
    def trace_root(self) -> TraceNode | None:
        if self._trace and self._trace[0]:
            return self._trace[0][0]
        return None

    def run(self, goal: Goal) -> Outcome:
        entry_marks = self.store.open_checkpoints
        try:
            return self._eval(goal, None)
        except RecursionError:
            return self._stack_exhausted(goal, entry_marks)

    def eval_expr(self, expr: Expr) -> tuple[Store, Value] | Failure:
        entry_marks = self.store.open_checkpoints
        self.store.checkpoint()
        try:
            value = self._expr(expr, None)
        except _EvalFailure as fail:
            self.store.rollback()
            return Failure(fail.tree)
        except RecursionError:
            return self._stack_exhausted(expr, entry_marks)
        self.store.commit()
        return self.store, value

    def _stack_exhausted(self, subject, entry_marks: int) -> Failure:
        # The object program out-recursed the host stack before the step
        # budget fired; report it as the same depth failure, after undoing
        # every checkpoint the aborted descent left open.
        while self.store.open_checkpoints > entry_marks:
            self.store.rollback()
        out = Failure(throw(SYS_DEPTH))
        if self._trace is not None:
            del self._trace[1:]
            text = pretty_print(subject) if isinstance(subject, Goal) else pretty_expr(subject)
            self._trace[0].append(TraceNode("fail", text, _result_text(out), []))
        return out

    # -- goals -------------------------------------------------------------

    def _eval(self, g: Goal, ambient: ExceptionTree | None) -> Outcome:
        if self._trace is not None:
            self._trace.append([])
        if not self.budget.spend():
            rule: int | str = "fail"
            out: Outcome = Failure(throw(SYS_DEPTH))
        else:
            self.store.checkpoint()
            rule = _default_tag(g)
            try:
                rule, out = self._dispatch(g, ambient)
            except _EvalFailure as fail:
                out = Failure(fail.tree)
            if isinstance(out, Success):
                self.store.commit()
            else:
                self.store.rollback()
        if self._trace is not None:
            children = self._trace.pop()
            self._trace[-1].append(TraceNode(rule, pretty_print(g), _result_text(out), children))
        return out

    def _dispatch(self, g: Goal, ambient: ExceptionTree | None) -> tuple[int | str, Outcome]:
        match g:
            case TrueGoal():
                return 1, Success(self.store)
            case Fail(path):
                return "fail", Failure(throw(path))
            case Assign(var, expr):
                value = self._expr(expr, ambient)
                self.store.bind(var, value)
                return 5, Success(self.store)
            case Test(left, relop, right):
                lv = self._expr(left, ambient)
                rv = self._expr(right, ambient)
                if _test_holds(lv, relop, rv):
                    return "test", Success(self.store)
                return "test", Failure(throw(SYS_TEST))
            case Seq(first, second):
                out = self._eval(first, ambient)
                if isinstance(out, Failure):
                    return 6, out
                return 6, self._eval(second, ambient)
            case Union(first, second):
                out1 = self._eval(first, ambient)
                out2 = self._eval(second, ambient)
                if isinstance(out1, Failure) and isinstance(out2, Failure):
                    return "fail", Failure(merge(out1.tree, out2.tree))
                if isinstance(out1, Failure):
                    return 8, out2
                if isinstance(out2, Failure):
                    return 9, Success(self.store)
                return 7, out2
            case Else(tried, handler):
                out = self._eval(tried, ambient)
                if isinstance(out, Success):
                    return 10, out
                return 11, self._eval(handler, out.tree)
            case Case(arms, default):
                if ambient is None:
                    return "case", Failure(throw(SYS_CASE))
                for pattern, body in arms:
                    if matches(pattern, ambient):
                        return "case", self._eval(body, None)
                if default is not None:
                    return "case", self._eval(default, None)
                return "case", Failure(ambient)
            case Call(name, args):
                return 4, self._invoke(name, args, ambient)
        raise TypeError(f"not a goal: {g!r}")

    def _invoke(self, name: str, args: tuple[Expr, ...], ambient: ExceptionTree | None) -> Outcome:
        values = [self._expr(a, ambient) for a in args]
        defn = self.program.defs.get((name, len(values)))
        if defn is None:
            if name == PRINT_BUILTIN and len(values) == 1:
                self.store.emit_output(format_value(values[0]))
                return Success(self.store)
            return Failure(throw(SYS_UNDEF))
        mapping = {p: _literal(v) for p, v in zip(defn.params, values)}
        return self._eval(substitute(defn.body, mapping), ambient)

    # -- expressions -------------------------------------------------------

    def _expr(self, e: Expr, ambient: ExceptionTree | None) -> Value:
        match e:
            case IntLit(value):
                return value
            case StrLit(value):
                return value
            case Var(name):
                try:
                    return self.store.lookup(name)
                except UnboundVariable:
                    raise _EvalFailure(throw(SYS_UNBOUND)) from None
            case Binary(op, left, right):
                lv = self._expr(left, ambient)
                rv = self._expr(right, ambient)
                if not (isinstance(lv, int) and isinstance(rv, int)):
                    raise _EvalFailure(throw(SYS_TEST))
                if op == "+":
                    return lv + rv
                if op == "-":
                    return lv - rv
                if op == "*":
                    return lv * rv
                if rv == 0:
                    raise _EvalFailure(throw(SYS_DIV0))
                return _int_div(lv, rv)
            case CallExpr():
                return self._call_value(e, ambient)
            case Read():
                return self.store.read_input()
        raise TypeError(f"not an expression: {e!r}")

    def _call_value(self, e: CallExpr, ambient: ExceptionTree | None) -> Value:
        if self._trace is not None:
            self._trace.append([])
        self.store.checkpoint()
        try:
            out = self._invoke(e.name, e.args, ambient)
        except _EvalFailure as fail:
            out = Failure(fail.tree)
        if isinstance(out, Success):
            self.store.commit()
        else:
            self.store.rollback()
        if self._trace is not None:
            children = self._trace.pop()
            self._trace[-1].append(TraceNode("call-expr", pretty_expr(e), _result_text(out), children))
        if isinstance(out, Failure):
            raise _EvalFailure(out.tree)
        try:
            return self.store.lookup(RET_VAR)
        except UnboundVariable:
            raise _EvalFailure(throw(SYS_UNBOUND)) from None


def eval_goal(program: Program, store: Store, goal: Goal, budget: Budget | None = None) -> Outcome:
    return Evaluator(program, store, budget).run(goal)


def eval_expr(program: Program, store: Store, expr: Expr, budget: Budget | None = None):
    return Evaluator(program, store, budget).eval_expr(expr)


def run_main(
    program: Program,
    input_tokens=(),
    budget: Budget | None = None,
    trace: bool = False,
) -> tuple[Outcome, list[str], TraceNode | None]:
    """Run a program's main goal on a fresh store.

    Output is buffered in the store and flushed (returned) only when main
    succeeds; a failing run observably did nothing.
    """
    store = Store(input_tokens)
    ev = Evaluator(program, store, budget=budget, trace=trace)
    store.checkpoint()
    outcome = ev.run(program.main)
    if isinstance(outcome, Success):
        store.commit()
        flushed = list(store.output)
    else:
        store.rollback()
        flushed = []
    return outcome, flushed, ev.trace_root
