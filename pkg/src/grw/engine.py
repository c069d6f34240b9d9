"""Rewrite steps, strategies, pipelines and bounded state-space exploration."""

from __future__ import annotations

import gc
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterator, Mapping, Sequence

from .errors import AlphabetMismatch, LimitExceeded, NotTerminating, RuleError
from .graph import Alphabets, Graph, NodeId, canonical_key
from .patterns import _find_rows
from .rules import Rule, _apply, apply_commands, validate_rule

DEFAULT_STATE_LIMIT = 100_000


@dataclass(frozen=True)
class GRS:
    alphabets: Alphabets
    rules: tuple = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "rules", tuple(self.rules))
        names = [r.name for r in self.rules]
        if len(set(names)) != len(names):
            raise RuleError("duplicate rule names")
        for r in self.rules:
            if not self.alphabets.conforms(r.pattern.basic.alphabets):
                raise AlphabetMismatch(f"rule {r.name} uses labels outside the system's alphabets")
            validate_rule(r)

    def rule(self, name: str) -> Rule:
        for r in self.rules:
            if r.name == name:
                return r
        raise KeyError(name)

    def subset(self, names: Sequence[str]) -> "GRS":
        return GRS(self.alphabets, tuple(self.rule(n) for n in names))


@dataclass(frozen=True)
class Pipeline:
    modules: tuple = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "modules", tuple(self.modules))
        alphabets = {grs.alphabets for _, grs in self.modules}
        if len(alphabets) > 1:
            raise AlphabetMismatch("pipeline modules must share their alphabets")


@dataclass(frozen=True)
class RewriteStep:
    rule: str
    matching: Mapping[NodeId, NodeId]
    result: Graph


def _check_graph(grs: GRS, g: Graph) -> None:
    if g.alphabets == grs.alphabets:
        return
    used_nodes = set(g._labels.values())
    used_edges = {e for _, e, _ in g.edge_set}
    if not used_nodes <= set(grs.alphabets.node_labels) or not used_edges <= set(grs.alphabets.edge_labels):
        raise AlphabetMismatch("graph uses labels outside the system's alphabets")


def _raw_steps(grs: GRS, g: Graph) -> Iterator[tuple[str, dict, Graph]]:
    # rules were validated by the GRS constructor, so no per-step consistency check
    for rule in grs.rules:
        nodes = rule.pattern.nodes
        program = rule._edge_program
        for row in _find_rows(rule.pattern, g):
            mu = dict(zip(nodes, row))
            if program is None:
                yield rule.name, mu, _apply(g, mu, rule.commands)
            else:
                yield rule.name, mu, _apply_edges(g, row, program)


def _apply_edges(g: Graph, row: tuple, program: tuple) -> Graph:
    dels, adds = program
    edges = g._edges
    if dels:
        edges = edges.difference([(row[a], e, row[b]) for a, e, b in dels])
    if adds:
        edges = edges.union([(row[a], e, row[b]) for a, e, b in adds])
    return g._with_edges(edges)


def _steps(grs: GRS, g: Graph) -> Iterator[RewriteStep]:
    for name, mu, result in _raw_steps(grs, g):
        yield RewriteStep(name, mu, result)


def step_all(grs: GRS, g: Graph) -> list[RewriteStep]:
    """Every one-step rewrite of ``g``: rules in declaration order, matchings canonical."""
    _check_graph(grs, g)
    return list(_steps(grs, g))


@dataclass(frozen=True)
class NormalizeResult:
    graph: Graph
    steps: int
    exhausted: bool = False


def normalize(
    grs: GRS,
    g: Graph,
    fuel: int,
    on_step: Callable[[RewriteStep], None] | None = None,
) -> NormalizeResult:
    """First-rule / first-matching strategy until a normal form or until fuel runs out."""
    if fuel < 0:
        raise ValueError("fuel must be non-negative")
    _check_graph(grs, g)
    steps = 0
    while True:
        step = next(_steps(grs, g), None)
        if step is None:
            return NormalizeResult(g, steps)
        if steps == fuel:
            return NormalizeResult(g, steps, exhausted=True)
        g = step.result
        steps += 1
        if on_step is not None:
            on_step(step)


@dataclass(frozen=True)
class PipelineResult:
    graph: Graph
    steps: tuple
    exhausted_module: str | None = None


def run_pipeline(
    p: Pipeline,
    g: Graph,
    fuel: int,
    on_step: Callable[[str, RewriteStep], None] | None = None,
) -> PipelineResult:
    counts = []
    for name, grs in p.modules:
        callback = None if on_step is None else (lambda step, _n=name: on_step(_n, step))
        res = normalize(grs, g, fuel, callback)
        counts.append(res.steps)
        g = res.graph
        if res.exhausted:
            return PipelineResult(g, tuple(counts), exhausted_module=name)
    return PipelineResult(g, tuple(counts))


@dataclass
class DerivationSpace:
    """Reachable states keyed by :func:`canonical_key`, in BFS discovery order."""

    start: bytes
    states: dict = field(default_factory=dict)
    transitions: dict = field(default_factory=dict)
    complete: bool = True

    @property
    def transition_count(self) -> int:
        return sum(len(v) for v in self.transitions.values())

    def successors(self, key: bytes) -> list[bytes]:
        return [t for _, _, t in self.transitions.get(key, ())]


def explore(grs: GRS, g: Graph, state_limit: int = DEFAULT_STATE_LIMIT) -> DerivationSpace:
    """Breadth-first exploration of all graphs reachable from ``g``.

    Stops as soon as a new state would exceed ``state_limit``; the space is then
    marked incomplete and unexpanded states carry no transitions.
    """
    if state_limit < 1:
        raise ValueError("state_limit must be at least 1")
    _check_graph(grs, g)
    # the search allocates many small acyclic objects; cyclic GC passes only cost time
    paused = gc.isenabled()
    gc.disable()
    try:
        return _explore(grs, g, state_limit)
    finally:
        if paused:
            gc.enable()


def _explore(grs: GRS, g: Graph, state_limit: int) -> DerivationSpace:
    # Successors are deduplicated on (node map, edge set) before any graph is
    # built; node maps are interned so edge-only steps reuse their parent's.
    label_ids: dict[tuple, int] = {}

    def label_id(h: Graph) -> int:
        return label_ids.setdefault(tuple(h._labels.items()), len(label_ids))

    start_id = label_id(g)
    seen: dict[tuple, bytes] = {(start_id, g._edges): canonical_key(g)}
    space = DerivationSpace(start=canonical_key(g))
    space.states[space.start] = g
    queue = deque([(g, start_id)])
    rules = [(r.name, r.pattern, r.pattern.nodes, r._edge_program, r.commands) for r in grs.rules]
    full = False
    while queue:
        current, lid = queue.popleft()
        edges = current._edges
        out = []
        for name, pattern, nodes, program, commands in rules:
            for row in _find_rows(pattern, current):
                mu = dict(zip(nodes, row))
                if program is not None:
                    dels, adds = program
                    new_edges = edges
                    if len(dels) == 1 and not adds:
                        a, e, b = dels[0]
                        new_edges = edges.difference(((row[a], e, row[b]),))
                    elif dels:
                        new_edges = new_edges.difference([(row[a], e, row[b]) for a, e, b in dels])
                    if adds:
                        new_edges = new_edges.union([(row[a], e, row[b]) for a, e, b in adds])
                    ident = (lid, new_edges)
                    key = seen.get(ident)
                    succ = None
                else:
                    succ = _apply(current, mu, commands)
                    ident = (label_id(succ), succ._edges)
                    key = seen.get(ident)
                if key is None:
                    if len(seen) >= state_limit:
                        full = True
                        break
                    if succ is None:
                        succ = current._with_edges(new_edges)
                    key = canonical_key(succ)
                    seen[ident] = key
                    space.states[key] = succ
                    queue.append((succ, ident[0]))
                out.append((name, mu, key))
            if full:
                break
        if full:
            space.complete = False
            break
        space.transitions[seen[(lid, edges)]] = out
    return space


@dataclass(frozen=True)
class Terminates:
    height: int
    states: int


@dataclass(frozen=True)
class Loops:
    """``prefix`` leads from the start to ``cycle[0]``; ``cycle[0] == cycle[-1]``."""

    prefix: tuple
    cycle: tuple
    steps: tuple  # (rule name, matching) for each consecutive pair of the cycle
    states: int


@dataclass(frozen=True)
class LimitReached:
    states: int


TerminationVerdict = Terminates | Loops | LimitReached


def find_cycle(space: DerivationSpace) -> Loops | None:
    """Iterative DFS from the start state; returns the first cycle met, if any."""
    return _search(space, None)


def _search(space: DerivationSpace, heights: dict | None) -> Loops | None:
    # when ``heights`` is given, finished states record their longest path length
    WHITE, GREY, BLACK = 0, 1, 2
    transitions = space.transitions
    colour: dict[bytes, int] = {}
    path: list[bytes] = []
    edge_in: list = []  # transition used to reach path[i] from path[i-1]
    stack = [(space.start, iter(transitions.get(space.start, ())))]
    colour[space.start] = GREY
    path.append(space.start)
    edge_in.append(None)
    while stack:
        node, it = stack[-1]
        advanced = False
        for rule, mu, succ in it:
            state = colour.get(succ, WHITE)
            if state == GREY:
                i = path.index(succ)
                cycle = tuple(path[i:]) + (succ,)
                steps = tuple((r, m) for r, m in edge_in[i + 1:]) + ((rule, mu),)
                return Loops(tuple(path[: i + 1]), cycle, steps, len(space.states))
            if state == WHITE:
                colour[succ] = GREY
                path.append(succ)
                edge_in.append((rule, mu))
                stack.append((succ, iter(transitions.get(succ, ()))))
                advanced = True
                break
        if not advanced:
            colour[node] = BLACK
            if heights is not None:
                heights[node] = max([heights[t] for _, _, t in transitions.get(node, ())], default=-1) + 1
            stack.pop()
            path.pop()
            edge_in.pop()
    return None


def longest_path(space: DerivationSpace) -> int:
    """Length of the longest path from the start in an acyclic space (memoised)."""
    height: dict[bytes, int] = {}
    stack = [(space.start, False)]
    while stack:
        node, ready = stack.pop()
        if node in height:
            continue
        succs = space.successors(node)
        if ready:
            height[node] = max((height[s] + 1 for s in succs), default=0)
            continue
        stack.append((node, True))
        stack.extend((s, False) for s in succs if s not in height)
    return height[space.start]


def decide_termination_from(
    grs: GRS, g: Graph, state_limit: int = DEFAULT_STATE_LIMIT
) -> TerminationVerdict:
    space = explore(grs, g, state_limit)
    return verdict_of(space)


def verdict_of(space: DerivationSpace) -> TerminationVerdict:
    heights: dict[bytes, int] = {}
    loop = _search(space, heights)
    if loop is not None:
        return loop
    if not space.complete:
        return LimitReached(len(space.states))
    return Terminates(heights[space.start], len(space.states))


def derivation_height_of(grs: GRS, g: Graph, state_limit: int = DEFAULT_STATE_LIMIT) -> int:
    verdict = decide_termination_from(grs, g, state_limit)
    if isinstance(verdict, Loops):
        raise NotTerminating(f"a cycle of length {len(verdict.cycle) - 1} is reachable")
    if isinstance(verdict, LimitReached):
        raise LimitExceeded(verdict.states)
    return verdict.height


def replay(grs: GRS, space: DerivationSpace, loop: Loops) -> list[bytes]:
    """Re-apply the witness steps of a cycle and return the keys reached."""
    g = space.states[loop.cycle[0]]
    keys = [canonical_key(g)]
    for rule_name, mu in loop.steps:
        g = apply_commands(g, mu, grs.rule(rule_name).commands)
        keys.append(canonical_key(g))
    return keys
