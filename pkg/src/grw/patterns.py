"""Patterns with negative conditions and the injective matcher."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping

from .errors import AlphabetMismatch
from .graph import Edge, Graph, NodeId, node_sort_key

Matching = Mapping[NodeId, NodeId]

# below this many same-label nodes, scanning beats building adjacency lists
_SCAN_LIMIT = 12


@dataclass(frozen=True)
class Pattern:
    basic: Graph
    forbidden_edges: frozenset = frozenset()
    forbidden_in: frozenset = frozenset()
    forbidden_out: frozenset = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "forbidden_edges", frozenset(self.forbidden_edges))
        object.__setattr__(self, "forbidden_in", frozenset(self.forbidden_in))
        object.__setattr__(self, "forbidden_out", frozenset(self.forbidden_out))

    @property
    def nodes(self) -> tuple[NodeId, ...]:
        return self.basic.nodes

    @property
    def edges(self) -> frozenset:
        return self.basic.edge_set

    @cached_property
    def search_order(self) -> tuple[NodeId, ...]:
        return _search_order(self.basic)

    @cached_property
    def _plan(self) -> tuple:
        """Compiled search plan, one entry per position of :attr:`search_order`.

        Each entry is ``(label, pool, checks, rest)``: ``pool`` is ``None`` or
        ``(direction, edge label, earlier position)`` naming an adjacency list
        to draw candidates from; ``checks`` are all edges to earlier positions
        or loops, ``rest`` the ones not implied by the pool.
        """
        order = self.search_order
        pos = {n: i for i, n in enumerate(order)}
        plan = []
        for i, n in enumerate(order):
            checks = []
            for s, e, t in self.basic.edge_set:
                if s == n and t == n:
                    checks.append(("loop", e, i))
                elif s == n and pos[t] < i:
                    checks.append(("out", e, pos[t]))
                elif t == n and pos[s] < i:
                    checks.append(("in", e, pos[s]))
            checks.sort()
            pool = None
            for c in checks:
                if c[0] != "loop":
                    # "in" edge from an earlier node: candidates are its successors
                    pool = ("succ" if c[0] == "in" else "pred", c[1], c[2])
                    rest = list(checks)
                    rest.remove(c)
                    break
            else:
                rest = checks
            plan.append((self.basic.label(n), pool, tuple(checks), tuple(rest)))
        return tuple(plan)

    @cached_property
    def _to_pattern_order(self) -> tuple[int, ...]:
        pos = {n: i for i, n in enumerate(self.search_order)}
        return tuple(pos[n] for n in self.nodes)

    @cached_property
    def _matcher(self):
        return _compile_plan(self._plan)

    @cached_property
    def _aligned(self) -> bool:
        return self.search_order == self.nodes

    @cached_property
    def has_negatives(self) -> bool:
        return bool(self.forbidden_edges or self.forbidden_in or self.forbidden_out)


@dataclass(frozen=True)
class Violation:
    kind: str
    detail: str


def _search_order(basic: Graph) -> tuple[NodeId, ...]:
    degree = {n: 0 for n in basic.nodes}
    neighbours: dict[NodeId, set] = {n: set() for n in basic.nodes}
    for s, _, t in basic.edge_set:
        degree[s] += 1
        degree[t] += 1
        neighbours[s].add(t)
        neighbours[t].add(s)
    order: list[NodeId] = []
    placed: set = set()
    remaining = sorted(basic.nodes, key=lambda n: (-degree[n], node_sort_key(n)))
    while remaining:
        # most constrained first; stay connected to what is already placed
        pick = next((n for n in remaining if neighbours[n] & placed), remaining[0])
        order.append(pick)
        placed.add(pick)
        remaining.remove(pick)
    return tuple(order)


def check_pattern(p: Pattern) -> list[Violation]:
    """Report-style validation; an empty list means the pattern is well formed."""
    violations = []
    nodes = set(p.nodes)
    overlap = p.forbidden_edges & p.edges
    for edge in sorted(overlap):
        violations.append(Violation("ForbiddenOverlapsPattern", f"forbidden edge {edge} is also a pattern edge"))
    for edge in sorted(p.forbidden_edges):
        s, e, t = edge
        if s not in nodes or t not in nodes:
            violations.append(Violation("DanglingNegativeCondition", f"forbidden edge {edge} uses an unknown node"))
        elif e not in p.basic.alphabets.edge_index:
            violations.append(Violation("UnknownLabel", f"forbidden edge {edge} uses an unknown label"))
    for kind, conds in (("in", p.forbidden_in), ("out", p.forbidden_out)):
        for n, e in sorted(conds):
            if n not in nodes:
                violations.append(
                    Violation("DanglingNegativeCondition", f"forbidden {kind}-edge ({n}, {e}) uses an unknown node")
                )
            elif e not in p.basic.alphabets.edge_index:
                violations.append(Violation("UnknownLabel", f"forbidden {kind}-edge ({n}, {e}) uses an unknown label"))
    return violations


def _negatives_hold(p: Pattern, g: Graph, mu: Matching) -> bool:
    for s, e, t in p.forbidden_edges:
        if g.has_edge(mu[s], e, mu[t]):
            return False
    if p.forbidden_in or p.forbidden_out:
        image = set(mu.values())
        for n, e in p.forbidden_in:
            if any(src not in image for src in g.predecessors(mu[n], e)):
                return False
        for n, e in p.forbidden_out:
            if any(tgt not in image for tgt in g.successors(mu[n], e)):
                return False
    return True


def matching_sort_key(p: Pattern, mu: Matching) -> tuple:
    return tuple(node_sort_key(mu[n]) for n in p.nodes)


def _check_alphabets(p: Pattern, g: Graph) -> None:
    if p.basic.alphabets != g.alphabets and not p.basic.alphabets.conforms(g.alphabets):
        raise AlphabetMismatch("graph uses labels outside the pattern's alphabets")


def find_matchings(p: Pattern, g: Graph) -> list[dict[NodeId, NodeId]]:
    """All matchings of ``p`` into ``g``, sorted by their images in pattern-node order."""
    _check_alphabets(p, g)
    return _find_matchings(p, g)


def _find_matchings(p: Pattern, g: Graph) -> list[dict[NodeId, NodeId]]:
    nodes = p.nodes
    return [dict(zip(nodes, row)) for row in _find_rows(p, g)]


def _compile_plan(plan: tuple):
    """Turn a search plan into a function of nested loops.

    Interpreting the plan costs more than the matching itself on small graphs,
    and state-space exploration calls the matcher once per state and rule.
    Labels are passed through the namespace, never spliced into the source.
    """
    ns: dict = {"_SCAN_LIMIT": _SCAN_LIMIT}
    lines = ["def match(labels, by_label, edges, succ, pred):", " found = []"]
    for i, (label, pool, checks, _rest) in enumerate(plan):
        pad = " " * (i + 1)
        ns[f"L{i}"] = label
        lines.append(f"{pad}cands = by_label.get(L{i}, ())")
        if pool is not None:
            direction, e, j = pool
            ns[f"P{i}"] = e
            fn = "succ" if direction == "succ" else "pred"
            lines.append(f"{pad}big = len(cands) > _SCAN_LIMIT")
            lines.append(f"{pad}if big: cands = {fn}(c{j}, P{i})")
        lines.append(f"{pad}for c{i} in cands:")
        conds = [f"c{i} == c{k}" for k in range(i)]
        if pool is not None:
            conds.append(f"(big and labels[c{i}] != L{i})")
        for n, (kind, e, j) in enumerate(checks):
            name = f"E{i}_{n}"
            ns[name] = e
            if kind == "out":
                edge = f"(c{i}, {name}, c{j})"
            elif kind == "in":
                edge = f"(c{j}, {name}, c{i})"
            else:
                edge = f"(c{i}, {name}, c{i})"
            conds.append(f"{edge} not in edges")
        if conds:
            lines.append(f"{pad} if {' or '.join(conds)}: continue")
    depth = len(plan)
    row = ", ".join(f"c{i}" for i in range(depth)) + ("," if depth == 1 else "")
    lines.append(" " * (depth + 1) + f"found.append(({row}))")
    lines.append(" return found")
    exec("\n".join(lines), ns)
    return ns["match"]


def _find_rows(p: Pattern, g: Graph) -> list[tuple]:
    """Matchings as image tuples in pattern-node order, canonically sorted."""
    if not p._plan:
        return [()] if _negatives_hold(p, g, {}) else []
    # candidate pools come out in id order, so an aligned search yields sorted rows
    found = p._matcher(g._labels, g.nodes_by_label(), g._edges, g.successors, g.predecessors)
    if p._aligned:
        rows = found
    else:
        back = p._to_pattern_order
        rows = [tuple(t[k] for k in back) for t in found]
        rank = g.node_rank()
        rows.sort(key=lambda row: [rank[x] for x in row])
    if p.has_negatives:
        nodes = p.nodes
        rows = [row for row in rows if _negatives_hold(p, g, dict(zip(nodes, row)))]
    return rows


def is_matching(p: Pattern, g: Graph, candidate: Mapping[NodeId, NodeId]) -> bool:
    """Check one assignment against injectivity, labels, edges and negative conditions."""
    if set(candidate) != set(p.nodes):
        return False
    if len(set(candidate.values())) != len(candidate):
        return False
    for n, image in candidate.items():
        if image not in g or g.label(image) != p.basic.label(n):
            return False
    for s, e, t in p.edges:
        if not g.has_edge(candidate[s], e, candidate[t]):
            return False
    return _negatives_hold(p, g, candidate)


def pattern_edge_image(p: Pattern, mu: Matching) -> frozenset:
    return frozenset((mu[s], e, mu[t]) for s, e, t in p.edges)


def make_pattern(
    basic: Graph,
    forbidden_edges: Iterable[Edge] = (),
    forbidden_in: Iterable[tuple[NodeId, str]] = (),
    forbidden_out: Iterable[tuple[NodeId, str]] = (),
) -> Pattern:
    return Pattern(
        basic,
        frozenset((str(s), e, str(t)) for s, e, t in forbidden_edges),
        frozenset((str(n), e) for n, e in forbidden_in),
        frozenset((str(n), e) for n, e in forbidden_out),
    )
