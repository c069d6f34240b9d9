"""Line-oriented text formats for graphs, rule systems, pipelines and weights.

Graph files::

    node g0 alpha
    edge g0 A g1

Rule-system files declare optional alphabets, then rule blocks::

    edge_labels A B C
    node_labels e
    rule Q1
      match
        node 0 e
        node 1 e
        edge 0 A 1
      without edge 1 C 0
      without in 0 D
      without out 0 D
      commands
        del_edge 0 A 1
        shift 0 1
    end

Pipeline files list ``module <name> <rule file> [rule names...]``, paths
relative to the pipeline file.  Weight files hold ``edge <label> <int>``,
``node <label> <int>`` and ``pi <a> <b> ... end`` blocks of ``ctx`` and
``node`` lines.  ``#`` starts a comment everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

from .engine import GRS, Pipeline
from .errors import GrwError, InconsistentSequence, ParseError
from .graph import Alphabets, Graph, make_graph, node_sort_key
from .patterns import make_pattern
from .rules import (
    AddEdge,
    DelEdge,
    DelNode,
    Label,
    Rule,
    Shift,
    check_consistency,
    render_command,
    validate_rule,
)
from .termination import ContextualWeight, LexicographicWeight

_PLACEHOLDER = "_"


@dataclass
class _Line:
    number: int
    tokens: list[str]
    columns: list[int]

    def col(self, i: int) -> int:
        return self.columns[i] if i < len(self.columns) else (self.columns[-1] if self.columns else 1)


def _lines(text: str) -> Iterator[_Line]:
    for number, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        tokens, columns = [], []
        i = 0
        while i < len(body):
            if body[i].isspace():
                i += 1
                continue
            j = i
            while j < len(body) and not body[j].isspace():
                j += 1
            tokens.append(body[i:j])
            columns.append(i + 1)
            i = j
        if tokens:
            yield _Line(number, tokens, columns)


def _expect(line: _Line, count: int, form: str, path: str | None) -> None:
    if len(line.tokens) != count:
        # point at the first surplus token, or just past the last one
        col = line.col(count) if len(line.tokens) > count else line.col(len(line.tokens) - 1) + len(line.tokens[-1])
        raise ParseError(f"expected '{form}'", line.number, col, path)


def _int(line: _Line, i: int, path: str | None) -> int:
    try:
        return int(line.tokens[i])
    except ValueError:
        raise ParseError(f"expected an integer, got {line.tokens[i]!r}", line.number, line.col(i), path) from None


def _wrap(err: GrwError, line: _Line, path: str | None) -> ParseError:
    return ParseError(str(err), line.number, line.col(0), path)


@dataclass
class _Collector:
    """Label alphabets gathered in order of first appearance."""

    edges: list[str] = field(default_factory=list)
    nodes: list[str] = field(default_factory=list)

    def edge(self, label: str) -> None:
        if label not in self.edges:
            self.edges.append(label)

    def node(self, label: str) -> None:
        if label not in self.nodes:
            self.nodes.append(label)

    def alphabets(self) -> Alphabets:
        return Alphabets(tuple(self.edges) or (_PLACEHOLDER,), tuple(self.nodes) or (_PLACEHOLDER,))


def _header(line: _Line, declared: dict, path: str | None) -> bool:
    head = line.tokens[0]
    if head not in ("edge_labels", "node_labels"):
        return False
    if len(line.tokens) < 2:
        raise ParseError(f"{head} needs at least one label", line.number, line.col(0), path)
    if head in declared:
        raise ParseError(f"{head} declared twice", line.number, line.col(0), path)
    declared[head] = tuple(line.tokens[1:])
    if len(set(declared[head])) != len(declared[head]):
        raise ParseError(f"{head} contains duplicates", line.number, line.col(1), path)
    return True


def _alphabets(declared: dict, seen: _Collector, given: Alphabets | None) -> Alphabets:
    if given is not None:
        return given
    inferred = seen.alphabets()
    return Alphabets(
        declared.get("edge_labels", inferred.edge_labels),
        declared.get("node_labels", inferred.node_labels),
    )


def parse_graph(text: str, alphabets: Alphabets | None = None, path: str | None = None) -> Graph:
    """Parse a graph file.  Without ``alphabets``, labels are taken from the file."""
    declared: dict = {}
    seen = _Collector()
    nodes, edges, node_lines, where = [], [], [], []
    for line in _lines(text):
        if _header(line, declared, path):
            continue
        head = line.tokens[0]
        if head == "node":
            _expect(line, 3, "node <id> <label>", path)
            nodes.append((line.tokens[1], line.tokens[2]))
            node_lines.append(line)
            seen.node(line.tokens[2])
        elif head == "edge":
            _expect(line, 4, "edge <source> <label> <target>", path)
            edges.append(tuple(line.tokens[1:]))
            seen.edge(line.tokens[2])
            where.append(line)
        else:
            raise ParseError(f"unknown declaration {head!r}", line.number, line.col(0), path)
    alph = _alphabets(declared, seen, alphabets)
    declared_nodes: set = set()
    for (node, label), line in zip(nodes, node_lines):
        if node in declared_nodes:
            raise ParseError(f"node {node!r} declared twice", line.number, line.col(1), path)
        if label not in alph.node_index:
            raise ParseError(f"node label {label!r} is not in the node alphabet", line.number, line.col(2), path)
        declared_nodes.add(node)
    for (s, e, t), line in zip(edges, where):
        if e not in alph.edge_index:
            raise ParseError(f"edge label {e!r} is not in the edge alphabet", line.number, line.col(2), path)
        for i, end in ((1, s), (3, t)):
            if end not in declared_nodes:
                raise ParseError(f"edge endpoint {end!r} is not a declared node", line.number, line.col(i), path)
    return make_graph(nodes, edges, alph)


def _parse_command(line: _Line, path: str | None):
    head, args = line.tokens[0], line.tokens[1:]
    shapes = {
        "label": (2, "label <node> <label>"),
        "del_edge": (3, "del_edge <source> <label> <target>"),
        "add_edge": (3, "add_edge <source> <label> <target>"),
        "del_node": (1, "del_node <node>"),
        "shift": (2, "shift <from> <to>"),
    }
    if head not in shapes:
        raise ParseError(f"unknown command {head!r}", line.number, line.col(0), path)
    count, form = shapes[head]
    _expect(line, count + 1, form, path)
    match head:
        case "label":
            return Label(*args)
        case "del_edge":
            return DelEdge(*args)
        case "add_edge":
            return AddEdge(*args)
        case "del_node":
            return DelNode(*args)
        case _:
            return Shift(*args)


@dataclass
class _RuleDraft:
    name: str
    line: _Line
    nodes: list = field(default_factory=list)
    edges: list = field(default_factory=list)
    without_edges: list = field(default_factory=list)
    without_in: list = field(default_factory=list)
    without_out: list = field(default_factory=list)
    commands: list = field(default_factory=list)
    command_lines: list = field(default_factory=list)


@dataclass
class SourceFile:
    path: str | None
    kind: str  # "graph" | "grs" | "pipeline" | "weights"
    value: object
    positions: dict = field(default_factory=dict)


def _parse_grs_text(text: str, path: str | None) -> tuple[GRS, dict]:
    declared: dict = {}
    seen = _Collector()
    drafts: list[_RuleDraft] = []
    current: _RuleDraft | None = None
    section = None
    for line in _lines(text):
        head = line.tokens[0]
        if current is None:
            if _header(line, declared, path):
                continue
            if head != "rule":
                raise ParseError(f"expected 'rule <name>', got {head!r}", line.number, line.col(0), path)
            _expect(line, 2, "rule <name>", path)
            if any(d.name == line.tokens[1] for d in drafts):
                raise ParseError(f"duplicate rule name {line.tokens[1]!r}", line.number, line.col(1), path)
            current = _RuleDraft(line.tokens[1], line)
            section = None
            continue
        if head == "end":
            _expect(line, 1, "end", path)
            drafts.append(current)
            current = None
            continue
        if head in ("match", "commands"):
            _expect(line, 1, head, path)
            if head == "match" and (section is not None or current.commands):
                raise ParseError("'match' must come first in a rule", line.number, line.col(0), path)
            section = head
            continue
        if head == "without":
            if section == "commands":
                raise ParseError("negative conditions must precede 'commands'", line.number, line.col(0), path)
            kind = line.tokens[1] if len(line.tokens) > 1 else ""
            if kind == "edge":
                _expect(line, 5, "without edge <source> <label> <target>", path)
                current.without_edges.append(tuple(line.tokens[2:]))
                seen.edge(line.tokens[3])
            elif kind in ("in", "out"):
                _expect(line, 4, f"without {kind} <node> <label>", path)
                target = current.without_in if kind == "in" else current.without_out
                target.append((line.tokens[2], line.tokens[3]))
                seen.edge(line.tokens[3])
            else:
                raise ParseError("expected 'without edge|in|out'", line.number, line.col(1), path)
            continue
        if section == "match":
            if head == "node":
                _expect(line, 3, "node <id> <label>", path)
                current.nodes.append((line.tokens[1], line.tokens[2]))
                seen.node(line.tokens[2])
            elif head == "edge":
                _expect(line, 4, "edge <source> <label> <target>", path)
                current.edges.append(tuple(line.tokens[1:]))
                seen.edge(line.tokens[2])
            else:
                raise ParseError(f"unexpected {head!r} in match section", line.number, line.col(0), path)
        elif section == "commands":
            cmd = _parse_command(line, path)
            if isinstance(cmd, Label):
                seen.node(cmd.label)
            elif isinstance(cmd, (AddEdge, DelEdge)):
                seen.edge(cmd.label)
            current.commands.append(cmd)
            current.command_lines.append(line)
        else:
            raise ParseError(f"unexpected {head!r} outside match/commands", line.number, line.col(0), path)
    if current is not None:
        raise ParseError(f"rule {current.name!r} is missing 'end'", current.line.number, current.line.col(0), path)
    alph = _alphabets(declared, seen, None)
    rules = []
    positions = {}
    for d in drafts:
        try:
            basic = make_graph(d.nodes, d.edges, alph)
            pattern = make_pattern(basic, d.without_edges, d.without_in, d.without_out)
            rule = Rule(d.name, pattern, tuple(d.commands))
            validate_rule(rule)
        except GrwError as err:
            bad = check_consistency(d.commands)
            line = d.command_lines[bad] if isinstance(err, InconsistentSequence) and bad is not None else d.line
            raise _wrap(err, line, path) from err
        rules.append(rule)
        positions[d.name] = d.line.number
    try:
        grs = GRS(alph, tuple(rules))
    except GrwError as err:
        # locate the offending rule when the message names it
        line = next((d.line for d in drafts if f"rule {d.name}" in str(err)), None)
        raise ParseError(str(err), line.number if line else 0, 1 if line else 0, path) from err
    return grs, positions


def parse_grs(text: str, path: str | None = None) -> GRS:
    return _parse_grs_text(text, path)[0]


def parse_pipeline(text: str, base: Path | str = ".", path: str | None = None) -> Pipeline:
    base = Path(base)
    modules = []
    cache: dict[Path, GRS] = {}
    for line in _lines(text):
        if line.tokens[0] != "module" or len(line.tokens) < 3:
            raise ParseError("expected 'module <name> <rule file> [rules...]'", line.number, line.col(0), path)
        name, file = line.tokens[1], line.tokens[2]
        if any(n == name for n, _ in modules):
            raise ParseError(f"duplicate module {name!r}", line.number, line.col(1), path)
        source = base / file
        if source not in cache:
            try:
                cache[source] = parse_grs(source.read_text(encoding="utf-8"), str(source))
            except OSError as err:
                raise ParseError(f"cannot read {file}: {err.strerror}", line.number, line.col(2), path) from err
        grs = cache[source]
        if len(line.tokens) > 3:
            try:
                grs = grs.subset(line.tokens[3:])
            except KeyError as err:
                raise ParseError(f"no rule {err.args[0]!r} in {file}", line.number, line.col(3), path) from None
        modules.append((name, grs))
    try:
        return Pipeline(tuple(modules))
    except GrwError as err:
        raise ParseError(str(err), 0, 0, path) from err


def parse_weights(text: str, path: str | None = None) -> LexicographicWeight:
    """Parse a weights file into ``(w0, pis)``; ``node`` lines outside ``pi`` are ignored."""
    w0: dict[str, int] = {}
    pis = []
    block = None
    for line in _lines(text):
        head = line.tokens[0]
        if block is None:
            if head == "edge":
                _expect(line, 3, "edge <label> <int>", path)
                w0[line.tokens[1]] = _int(line, 2, path)
            elif head == "node":
                _expect(line, 3, "node <label> <int>", path)
                _int(line, 2, path)
            elif head == "pi":
                _expect(line, 3, "pi <a> <b>", path)
                a, b = _int(line, 1, path), _int(line, 2, path)
                if a < 0 or b < 0:
                    raise ParseError("pi coefficients must be non-negative", line.number, line.col(1), path)
                block = (a, b, {}, {}, line)
            else:
                raise ParseError(f"unknown weight declaration {head!r}", line.number, line.col(0), path)
            continue
        a, b, omega, eta, start = block
        if head == "ctx":
            _expect(line, 5, "ctx <node label> <edge label> <node label> <int>", path)
            omega[tuple(line.tokens[1:4])] = _int(line, 4, path)
        elif head == "node":
            _expect(line, 3, "node <label> <int>", path)
            eta[line.tokens[1]] = _int(line, 2, path)
        elif head == "end":
            pis.append(ContextualWeight(a, omega, b, eta))
            block = None
        else:
            raise ParseError(f"unexpected {head!r} in pi block", line.number, line.col(0), path)
    if block is not None:
        raise ParseError("pi block is missing 'end'", block[4].number, 1, path)
    return LexicographicWeight(w0, tuple(pis))


def parse_node_weight(text: str, path: str | None = None) -> dict[str, int]:
    """Top-level ``node <label> <int>`` lines of a weights file."""
    eta = {}
    depth = 0
    for line in _lines(text):
        if line.tokens[0] == "pi":
            depth += 1
        elif line.tokens[0] == "end":
            depth -= 1
        elif line.tokens[0] == "node" and depth == 0:
            _expect(line, 3, "node <label> <int>", path)
            eta[line.tokens[1]] = _int(line, 2, path)
    return eta


def check_weight_labels(lw: LexicographicWeight, alph: Alphabets) -> None:
    unknown = [e for e in lw.w0 if e not in alph.edge_index]
    for pi in lw.pis:
        for x, e, y in pi.omega:
            if x not in alph.node_index or y not in alph.node_index:
                unknown.append(f"{x}/{y}")
            if e not in alph.edge_index:
                unknown.append(e)
    if unknown:
        raise ParseError(f"weights mention labels outside the alphabets: {', '.join(sorted(set(unknown)))}")


# rendering


def render_graph(g: Graph, header: bool = False) -> str:
    out = []
    if header:
        out.append("edge_labels " + " ".join(g.alphabets.edge_labels))
        out.append("node_labels " + " ".join(g.alphabets.node_labels))
    out.extend(f"node {n} {g.label(n)}" for n in g.nodes)
    out.extend(f"edge {s} {e} {t}" for s, e, t in g.edges)
    return "".join(line + "\n" for line in out)


def render_rule(rule: Rule) -> str:
    p = rule.pattern
    rank = p.basic.alphabets.edge_index
    edge_key = lambda t: (node_sort_key(t[0]), rank.get(t[1], -1), t[1], node_sort_key(t[2]))  # noqa: E731
    cond_key = lambda c: (node_sort_key(c[0]), rank.get(c[1], -1), c[1])  # noqa: E731
    out = [f"rule {rule.name}", "  match"]
    out.extend(f"    node {n} {p.basic.label(n)}" for n in p.nodes)
    out.extend(f"    edge {s} {e} {t}" for s, e, t in p.basic.edges)
    out.extend(f"  without edge {s} {e} {t}" for s, e, t in sorted(p.forbidden_edges, key=edge_key))
    out.extend(f"  without in {n} {e}" for n, e in sorted(p.forbidden_in, key=cond_key))
    out.extend(f"  without out {n} {e}" for n, e in sorted(p.forbidden_out, key=cond_key))
    if rule.commands:
        out.append("  commands")
        out.extend(f"    {render_command(c)}" for c in rule.commands)
    out.append("end")
    return "".join(line + "\n" for line in out)


def render_grs(grs: GRS) -> str:
    out = [
        "edge_labels " + " ".join(grs.alphabets.edge_labels) + "\n",
        "node_labels " + " ".join(grs.alphabets.node_labels) + "\n",
    ]
    for rule in grs.rules:
        out.append("\n")
        out.append(render_rule(rule))
    return "".join(out)


def render_weights(lw: LexicographicWeight, order: tuple[str, ...] | None = None) -> str:
    labels = order or tuple(lw.w0)
    out = [f"edge {e} {lw.w0.get(e, 0)}" for e in labels]
    for pi in lw.pis:
        out.append(f"pi {pi.a} {pi.b}")
        out.extend(f"  ctx {x} {e} {y} {v}" for (x, e, y), v in pi.omega.items())
        out.extend(f"  node {lab} {v}" for lab, v in pi.eta.items())
        out.append("end")
    return "".join(line + "\n" for line in out)


def load(path: str | Path, kind: str, alphabets: Alphabets | None = None) -> SourceFile:
    """Read and parse a file of the given kind, recording rule positions."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as err:
        raise ParseError(f"cannot read file: {err.strerror}", 0, 0, str(path)) from err
    positions: dict = {}
    if kind == "graph":
        value = parse_graph(text, alphabets, str(path))
    elif kind == "grs":
        value, positions = _parse_grs_text(text, str(path))
    elif kind == "pipeline":
        value = parse_pipeline(text, path.parent, str(path))
    elif kind == "weights":
        value = parse_weights(text, str(path))
    else:
        raise ValueError(f"unknown file kind {kind!r}")
    return SourceFile(str(path), kind, value, positions)
