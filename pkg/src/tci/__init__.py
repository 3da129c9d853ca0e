"""TC: a tiny imperative language where every statement succeeds or fails.

Failing statements roll back their partial updates, `G1 | G2` succeeds if
at least one operand does, `G1 else G2` handles failures, and failures are
classified by hierarchical paths under /F.  This package provides the
parser, the evaluator, an independent reference semantics for testing,
and the `tci` command-line driver.
"""

from .failure import ExceptionTree, FailPath, matches, merge, render, throw
from .interp import (
    Budget,
    DEFAULT_MAX_STEPS,
    Evaluator,
    Failure,
    Outcome,
    Success,
    TraceNode,
    eval_expr,
    eval_goal,
    render_trace,
    run_main,
)
from .oracle import SearchConfig, StoreVal, derive_bounded, gen_program
from .parser import (
    DuplicateDefinition,
    LexError,
    MissingMain,
    ParseError,
    SourceError,
    SourceSpan,
    parse_goal,
    parse_program,
    tokenize,
)
from .store import CheckpointUnderflow, Store, UnboundVariable, Value
from .syntax import (
    Assign,
    Binary,
    Call,
    CallExpr,
    Case,
    Def,
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
    free_vars,
    pretty_expr,
    pretty_print,
    pretty_program,
    substitute,
)

__version__ = "0.1.0"
