"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class GrwError(Exception):
    """Base class for all errors raised by grw."""


class GraphError(GrwError):
    pass


class UnknownLabel(GraphError):
    pass


class DanglingEdge(GraphError):
    pass


class DuplicateNodeId(GraphError):
    pass


class NodeNotInGraph(GraphError):
    pass


class AlphabetMismatch(GrwError):
    pass


class RuleError(GrwError):
    """A rule is ill-formed (dangling ids, bad pattern, reflexive shift...)."""


class InconsistentSequence(RuleError):
    """A command mentions a node after a ``del_node`` on it."""


class HasDelNode(RuleError):
    """Raised where an operation is only defined for node-preserving rules."""


class NodeVanished(GrwError):
    """Internal assertion: a command refers to a node that no longer exists."""


class NotTerminating(GrwError):
    pass


class LimitExceeded(GrwError):
    def __init__(self, states: int):
        super().__init__(f"state limit exceeded after {states} states")
        self.states = states


class ParseError(GrwError):
    def __init__(self, message: str, line: int = 0, column: int = 0, path: str | None = None):
        self.message = message
        self.line = line
        self.column = column
        self.path = path
        super().__init__(str(self))

    def __str__(self) -> str:
        where = f"{self.path or '<input>'}:{self.line}:{self.column}"
        return f"{where}: {self.message}"
