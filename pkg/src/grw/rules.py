"""Rewrite commands, rule well-formedness and command application."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Mapping, Sequence, Union

from .errors import HasDelNode, InconsistentSequence, NodeVanished, RuleError
from .graph import Graph, NodeId
from .patterns import Pattern, check_pattern


@dataclass(frozen=True)
class Label:
    node: NodeId
    label: str


@dataclass(frozen=True)
class DelEdge:
    source: NodeId
    label: str
    target: NodeId


@dataclass(frozen=True)
class AddEdge:
    source: NodeId
    label: str
    target: NodeId


@dataclass(frozen=True)
class DelNode:
    node: NodeId


@dataclass(frozen=True)
class Shift:
    source: NodeId
    target: NodeId


Command = Union[Label, DelEdge, AddEdge, DelNode, Shift]


def command_nodes(c: Command) -> tuple[NodeId, ...]:
    match c:
        case Label(node=n) | DelNode(node=n):
            return (n,)
        case DelEdge(source=a, target=b) | AddEdge(source=a, target=b) | Shift(source=a, target=b):
            return (a, b)
    raise TypeError(f"not a command: {c!r}")


def render_command(c: Command) -> str:
    match c:
        case Label(n, a):
            return f"label {n} {a}"
        case DelEdge(s, e, t):
            return f"del_edge {s} {e} {t}"
        case AddEdge(s, e, t):
            return f"add_edge {s} {e} {t}"
        case DelNode(n):
            return f"del_node {n}"
        case Shift(a, b):
            return f"shift {a} {b}"
    raise TypeError(f"not a command: {c!r}")


@dataclass(frozen=True)
class Rule:
    name: str
    pattern: Pattern
    commands: tuple = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "commands", tuple(self.commands))

    @property
    def node_preserving(self) -> bool:
        return not any(isinstance(c, DelNode) for c in self.commands)

    @cached_property
    def _edge_program(self) -> tuple | None:
        """``(deletions, additions)`` as position triples when only edges change.

        With an injective matching, distinct pattern triples have distinct
        images, so applying the effective commands as two set operations gives
        the same result as running the sequence.
        """
        if not all(isinstance(c, (AddEdge, DelEdge)) for c in self.commands):
            return None
        pos = {n: i for i, n in enumerate(self.pattern.nodes)}
        dels, adds = [], []
        for c in effective_commands(self.commands):
            target = adds if isinstance(c, AddEdge) else dels
            target.append((pos[c.source], c.label, pos[c.target]))
        return tuple(dels), tuple(adds)


def check_consistency(commands: Sequence[Command]) -> int | None:
    """Index of the first command mentioning an already deleted node, else None."""
    deleted: set = set()
    for i, c in enumerate(commands):
        if deleted.intersection(command_nodes(c)):
            return i
        if isinstance(c, DelNode):
            deleted.add(c.node)
    return None


def validate_rule(rule: Rule) -> None:
    """Raise :class:`RuleError` if the rule is not well formed."""
    problems = check_pattern(rule.pattern)
    if problems:
        raise RuleError(f"rule {rule.name}: " + "; ".join(v.detail for v in problems))
    nodes = set(rule.pattern.nodes)
    alph = rule.pattern.basic.alphabets
    for i, c in enumerate(rule.commands):
        for n in command_nodes(c):
            if n not in nodes:
                raise RuleError(f"rule {rule.name}: command {i} ({render_command(c)}) uses unknown node {n!r}")
        if isinstance(c, Shift) and c.source == c.target:
            raise RuleError(f"rule {rule.name}: command {i} shifts a node onto itself")
        if isinstance(c, Label) and c.label not in alph.node_index:
            raise RuleError(f"rule {rule.name}: unknown node label {c.label!r}")
        if isinstance(c, (AddEdge, DelEdge)) and c.label not in alph.edge_index:
            raise RuleError(f"rule {rule.name}: unknown edge label {c.label!r}")
    bad = check_consistency(rule.commands)
    if bad is not None:
        raise InconsistentSequence(
            f"rule {rule.name}: command {bad} ({render_command(rule.commands[bad])}) uses a deleted node"
        )


def effective_commands(commands: Sequence[Command]) -> list[Command]:
    """Drop add/del commands overridden later on the same triple, and overridden labels."""
    last_edge: dict[tuple, int] = {}
    last_label: dict[NodeId, int] = {}
    for i, c in enumerate(commands):
        if isinstance(c, (AddEdge, DelEdge)):
            last_edge[(c.source, c.label, c.target)] = i
        elif isinstance(c, Label):
            last_label[c.node] = i
    out = []
    for i, c in enumerate(commands):
        if isinstance(c, (AddEdge, DelEdge)) and last_edge[(c.source, c.label, c.target)] != i:
            continue
        if isinstance(c, Label) and last_label[c.node] != i:
            continue
        out.append(c)
    return out


def is_uniform(rule: Rule) -> bool:
    if not rule.node_preserving:
        raise HasDelNode(f"rule {rule.name} deletes nodes; uniformity is undefined")
    return uniformity_violation(rule) is None


def uniformity_violation(rule: Rule) -> Command | None:
    """First effective command breaking uniformity, or None."""
    pattern = rule.pattern
    for c in effective_commands(rule.commands):
        if isinstance(c, AddEdge) and (c.source, c.label, c.target) not in pattern.forbidden_edges:
            return c
        if isinstance(c, DelEdge) and (c.source, c.label, c.target) not in pattern.edges:
            return c
    return None


def shift_map(commands: Sequence[Command], nodes: Sequence[NodeId]) -> dict[NodeId, NodeId]:
    """Composite endpoint redirection of all shifts, as a total map on ``nodes``."""
    phi = {n: n for n in nodes}
    for c in commands:
        if isinstance(c, Shift):
            for n, image in phi.items():
                if image == c.source:
                    phi[n] = c.target
    return phi


def apply_commands(g: Graph, mu: Mapping[NodeId, NodeId], commands: Sequence[Command]) -> Graph:
    """Apply a consistent command sequence to ``g`` at matching ``mu``, left to right."""
    bad = check_consistency(commands)
    if bad is not None:
        raise InconsistentSequence(f"command {bad} uses a deleted node")
    return _apply(g, mu, commands)


def _apply(g: Graph, mu: Mapping[NodeId, NodeId], commands: Sequence[Command]) -> Graph:
    if not commands:
        return g
    labels = g._labels
    copied_labels = False
    edges = set(g._edges)
    image = None
    for c in commands:
        match c:
            case Label(a, alpha):
                n = mu[a]
                if n not in labels:
                    raise NodeVanished(n)
                if not copied_labels:
                    labels = dict(labels)
                    copied_labels = True
                labels[n] = alpha
            case DelEdge(a, e, b):
                edges.discard((mu[a], e, mu[b]))
            case AddEdge(a, e, b):
                s, t = mu[a], mu[b]
                if s not in labels or t not in labels:
                    raise NodeVanished(s if s not in labels else t)
                edges.add((s, e, t))
            case DelNode(a):
                n = mu[a]
                if n not in labels:
                    raise NodeVanished(n)
                if not copied_labels:
                    labels = dict(labels)
                    copied_labels = True
                del labels[n]
                edges = {x for x in edges if x[0] != n and x[2] != n}
            case Shift(a, b):
                src, dst = mu[a], mu[b]
                if src == dst:
                    continue
                if image is None:
                    image = set(mu.values())
                moved = [x for x in edges if (x[0] == src and x[2] not in image) or (x[2] == src and x[0] not in image)]
                for x in moved:
                    edges.discard(x)
                for s, e, t in moved:
                    edges.add((dst, e, t) if s == src else (s, e, dst))
            case _:
                raise TypeError(f"not a command: {c!r}")
    return Graph(labels, frozenset(edges), g.alphabets, None if copied_labels else g.labels_hash)
