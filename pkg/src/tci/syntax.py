"""Abstract syntax for TC programs.

A goal is a statement that either succeeds or fails; an expression denotes
an integer or string value.  Procedure definitions bind a parameter list
over a body goal; a program is a set of definitions keyed by name and
arity plus a main goal.  All nodes are immutable and compare structurally.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Mapping

from .failure import FailPath, ROOT

RELOPS = ("==", "!=", "<", "<=", ">", ">=")
ARITH_OPS = ("+", "-", "*", "/")


class Expr:
    pass


class Goal:
    pass


@dataclass(frozen=True)
class IntLit(Expr):
    value: int


@dataclass(frozen=True)
class StrLit(Expr):
    value: str


@dataclass(frozen=True)
class Var(Expr):
    name: str


@dataclass(frozen=True)
class Binary(Expr):
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True)
class CallExpr(Expr):
    name: str
    args: tuple[Expr, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True)
class Read(Expr):
    """The read() builtin: next integer from the input stream, -1 at end."""


@dataclass(frozen=True)
class TrueGoal(Goal):
    """The statement `t`; always succeeds."""


@dataclass(frozen=True)
class Fail(Goal):
    """The statement `f` / `f(path)`; always fails with the given path."""

    path: FailPath = ROOT


@dataclass(frozen=True)
class Assign(Goal):
    var: str
    expr: Expr


@dataclass(frozen=True)
class Test(Goal):
    left: Expr
    relop: str
    right: Expr


@dataclass(frozen=True)
class Seq(Goal):
    first: Goal
    second: Goal


@dataclass(frozen=True)
class Union(Goal):
    """`G1 | G2`: run both in order, succeed if at least one does."""

    first: Goal
    second: Goal


@dataclass(frozen=True)
class Else(Goal):
    """`G1 else G2`: run G1; on failure roll back and run the handler G2."""

    tried: Goal
    handler: Goal


@dataclass(frozen=True)
class Case(Goal):
    """`case Failtree of { path: G; ...; _: G }` over the ambient failure tree."""

    arms: tuple[tuple[FailPath, Goal], ...]
    default: Goal | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "arms", tuple((p, g) for p, g in self.arms))
        if not self.arms:
            raise ValueError("a case goal needs at least one arm")


@dataclass(frozen=True)
class Call(Goal):
    name: str
    args: tuple[Expr, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "args", tuple(self.args))


TRUE = TrueGoal()


@dataclass(frozen=True)
class Def:
    """A procedure definition name(p1, ..., pn) = body."""

    name: str
    params: tuple[str, ...]
    body: Goal

    def __post_init__(self) -> None:
        object.__setattr__(self, "params", tuple(self.params))
        if len(set(self.params)) != len(self.params):
            raise ValueError(f"duplicate parameter in definition of {self.name}")


@dataclass(frozen=True)
class Program:
    defs: dict[tuple[str, int], Def]
    main: Goal


class SubstitutionIntoAssignTarget(Exception):
    """A substituted variable appears as an assignment target; values are not assignable."""

    def __init__(self, var: str):
        super().__init__(f"cannot substitute into assignment target {var!r}")
        self.var = var


def substitute_expr(e: Expr, bindings: Mapping[str, Expr]) -> Expr:
    match e:
        case Var(name) if name in bindings:
            return bindings[name]
        case Binary(op, left, right):
            return Binary(op, substitute_expr(left, bindings), substitute_expr(right, bindings))
        case CallExpr(name, args):
            return CallExpr(name, tuple(substitute_expr(a, bindings) for a in args))
        case _:
            return e


def substitute(g: Goal, bindings: Mapping[str, Expr]) -> Goal:
    """Replace free occurrences of the bound names throughout a goal.

    Goals introduce no local binders, so replacement is plain; an
    assignment whose target is one of the bound names is rejected.
    """
    match g:
        case TrueGoal() | Fail():
            return g
        case Assign(var, expr):
            if var in bindings:
                raise SubstitutionIntoAssignTarget(var)
            return Assign(var, substitute_expr(expr, bindings))
        case Test(left, relop, right):
            return Test(substitute_expr(left, bindings), relop, substitute_expr(right, bindings))
        case Seq(first, second):
            return Seq(substitute(first, bindings), substitute(second, bindings))
        case Union(first, second):
            return Union(substitute(first, bindings), substitute(second, bindings))
        case Else(tried, handler):
            return Else(substitute(tried, bindings), substitute(handler, bindings))
        case Case(arms, default):
            return Case(
                tuple((p, substitute(body, bindings)) for p, body in arms),
                None if default is None else substitute(default, bindings),
            )
        case Call(name, args):
            return Call(name, tuple(substitute_expr(a, bindings) for a in args))
    raise TypeError(f"not a goal: {g!r}")


def expr_vars(e: Expr) -> set[str]:
    match e:
        case Var(name):
            return {name}
        case Binary(_, left, right):
            return expr_vars(left) | expr_vars(right)
        case CallExpr(_, args):
            out: set[str] = set()
            for a in args:
                out |= expr_vars(a)
            return out
        case _:
            return set()


def free_vars(g: Goal) -> set[str]:
    """All variable names a goal reads or assigns (procedure names excluded)."""
    match g:
        case TrueGoal() | Fail():
            return set()
        case Assign(var, expr):
            return {var} | expr_vars(expr)
        case Test(left, _, right):
            return expr_vars(left) | expr_vars(right)
        case Seq(first, second) | Union(first, second):
            return free_vars(first) | free_vars(second)
        case Else(tried, handler):
            return free_vars(tried) | free_vars(handler)
        case Case(arms, default):
            out: set[str] = set()
            for _, body in arms:
                out |= free_vars(body)
            if default is not None:
                out |= free_vars(default)
            return out
        case Call(_, args):
            out = set()
            for a in args:
                out |= expr_vars(a)
            return out
    raise TypeError(f"not a goal: {g!r}")


def assigned_vars(g: Goal) -> set[str]:
    """Names appearing as assignment targets anywhere in the goal."""
    return {sub.var for sub in iter_goals(g) if isinstance(sub, Assign)}


def iter_goals(g: Goal) -> Iterator[Goal]:
    """The goal and every sub-goal, pre-order."""
    yield g
    match g:
        case Seq(first, second) | Union(first, second):
            yield from iter_goals(first)
            yield from iter_goals(second)
        case Else(tried, handler):
            yield from iter_goals(tried)
            yield from iter_goals(handler)
        case Case(arms, default):
            for _, body in arms:
                yield from iter_goals(body)
            if default is not None:
                yield from iter_goals(default)
        case _:
            pass


def _expr_atom(e: Expr) -> str:
    # Nested arithmetic is always parenthesized, so reading the text back
    # cannot re-associate it.
    text = pretty_expr(e)
    return f"({text})" if isinstance(e, Binary) else text


def pretty_expr(e: Expr) -> str:
    match e:
        case IntLit(value):
            return str(value)
        case StrLit(value):
            return f'"{value}"'
        case Var(name):
            return name
        case Binary(op, left, right):
            return f"{_expr_atom(left)} {op} {_expr_atom(right)}"
        case CallExpr(name, args):
            return f"{name}({', '.join(pretty_expr(a) for a in args)})"
        case Read():
            return "read()"
    raise TypeError(f"not an expression: {e!r}")


def _fail_text(path: FailPath) -> str:
    segs = path.segments
    if segs == ("F",):
        return "f"
    if len(segs) > 2 and segs[:2] == ("F", "usr"):
        return "f(" + "/".join(segs[2:]) + ")"
    return f"f({path})"


def _goal_atom(g: Goal) -> str:
    text = pretty_print(g)
    return f"({text})" if isinstance(g, (Seq, Union, Else)) else text


def pretty_print(g: Goal) -> str:
    """Concrete syntax for a goal; parses back to the same tree."""
    match g:
        case TrueGoal():
            return "t"
        case Fail(path):
            return _fail_text(path)
        case Assign(var, expr):
            return f"{var} = {pretty_expr(expr)}"
        case Test(left, relop, right):
            return f"{_expr_atom(left)} {relop} {_expr_atom(right)}"
        case Seq(first, second):
            return f"{_goal_atom(first)}; {_goal_atom(second)}"
        case Union(first, second):
            return f"{_goal_atom(first)} | {_goal_atom(second)}"
        case Else(tried, handler):
            return f"{_goal_atom(tried)} else {_goal_atom(handler)}"
        case Case(arms, default):
            parts = [f"{path}: {_goal_atom(body)}" for path, body in arms]
            if default is not None:
                parts.append(f"_: {_goal_atom(default)}")
            return "case Failtree of { " + "; ".join(parts) + " }"
        case Call(name, args):
            return f"{name}({', '.join(pretty_expr(a) for a in args)})"
    raise TypeError(f"not a goal: {g!r}")


def pretty_program(p: Program) -> str:
    lines = []
    for (_, _), d in sorted(p.defs.items()):
        lines.append(f"{d.name}({', '.join(d.params)}) = {pretty_print(d.body)}")
    lines.append(f"main {pretty_print(p.main)}")
    return "\n".join(lines) + "\n"


def shared_union_vars(g: Goal) -> list[tuple[Union, list[str]]]:
    """`|` nodes whose branches share variables, with the shared names.

    The two branches of `|` are meant to be independent; sharing state
    between them makes the combined update order observable.
    """
    found = []
    for sub in iter_goals(g):
        if isinstance(sub, Union):
            shared = free_vars(sub.first) & free_vars(sub.second)
            if shared:
                found.append((sub, sorted(shared)))
    return found
