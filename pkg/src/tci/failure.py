"""Hierarchical failure classification.

Failures are identified by paths rooted at /F, organized like directories:
/F/usr/EOF is a user-thrown end-of-input failure, /F/sys/div0 a division by
zero.  A handler registered for a path catches every failure at or below
it, so /F/usr catches /F/usr/EOF and /F catches everything.  A failing
evaluation carries a tree of such paths (several branches of a `|` may
fail for different reasons at once).
"""

from __future__ import annotations

import re
from dataclasses import dataclass

_SEGMENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


@dataclass(frozen=True)
class FailPath:
    """One failure kind, written /F/seg/.../seg.  The first segment is always F."""

    segments: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "segments", tuple(self.segments))
        if not self.segments or self.segments[0] != "F":
            raise ValueError(f"failure path must be rooted at /F: {self.segments!r}")
        for seg in self.segments:
            if not _SEGMENT_RE.match(seg):
                raise ValueError(f"bad failure path segment: {seg!r}")

    @classmethod
    def parse(cls, text: str) -> FailPath:
        if not text.startswith("/"):
            raise ValueError(f"failure path must start with '/': {text!r}")
        return cls(tuple(text[1:].split("/")))

    def is_prefix_of(self, other: FailPath) -> bool:
        return self.segments == other.segments[: len(self.segments)]

    def __str__(self) -> str:
        return "/" + "/".join(self.segments)


ROOT = FailPath(("F",))
USER = FailPath(("F", "usr"))

# Failures raised by the machine itself, rather than by an f(...) statement.
SYS_TEST = FailPath(("F", "sys", "test"))
SYS_UNBOUND = FailPath(("F", "sys", "unbound"))
SYS_DIV0 = FailPath(("F", "sys", "div0"))
SYS_UNDEF = FailPath(("F", "sys", "undef"))
SYS_DEPTH = FailPath(("F", "sys", "depth"))
SYS_CASE = FailPath(("F", "sys", "case"))


def user_path(segments: tuple[str, ...] | list[str]) -> FailPath:
    """Path for a user-thrown failure: f(a/b) lands under /F/usr."""
    return FailPath(("F", "usr", *segments))


@dataclass(frozen=True)
class ExceptionTree:
    """The failure kinds carried by one failing outcome (a nonempty path set)."""

    paths: frozenset[FailPath]

    def __post_init__(self) -> None:
        object.__setattr__(self, "paths", frozenset(self.paths))
        if not self.paths:
            raise ValueError("an exception tree is never empty")

    def sorted_paths(self) -> list[str]:
        return sorted(str(p) for p in self.paths)

    def __str__(self) -> str:
        return render(self)


def throw(path: FailPath) -> ExceptionTree:
    return ExceptionTree(frozenset((path,)))


def merge(a: ExceptionTree, b: ExceptionTree) -> ExceptionTree:
    return ExceptionTree(a.paths | b.paths)


def matches(handler: FailPath, tree: ExceptionTree) -> bool:
    """True when the handler path is an ancestor (or equal) of some failure in the tree."""
    return any(handler.is_prefix_of(p) for p in tree.paths)


def render(tree: ExceptionTree) -> str:
    """Deterministic tree drawing; children sorted by segment name."""
    root: dict = {}
    for path in tree.paths:
        node = root
        for seg in path.segments[1:]:
            node = node.setdefault(seg, {})
    lines = ["F"]

    def walk(node: dict, prefix: str) -> None:
        names = sorted(node)
        for i, name in enumerate(names):
            last = i == len(names) - 1
            lines.append(prefix + ("└─ " if last else "├─ ") + name)
            walk(node[name], prefix + ("   " if last else "│  "))

    walk(root, "")
    return "\n".join(lines)
