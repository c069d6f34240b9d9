"""Command-line front end: ``grw <subcommand> ...``.

Exit codes: 0 success / Compatible / Terminates; 1 Incompatible / Loops /
no weight / fuel exhausted; 2 usage or input errors; 3 state limit reached.
"""

from __future__ import annotations

import argparse
import hashlib
import os
import sys
from typing import Mapping, Sequence, TextIO

from .engine import (
    DEFAULT_STATE_LIMIT,
    GRS,
    LimitReached,
    Loops,
    RewriteStep,
    Terminates,
    explore,
    normalize,
    run_pipeline,
    step_all,
    verdict_of,
)
from .errors import GrwError
from .graph import Graph, canonical_key
from .patterns import find_matchings
from .termination import CompatibilityReport, check_compatible, check_lexicographic, synthesize_weight
from .textio import check_weight_labels, load, render_graph

OK, FAIL, USAGE, LIMIT = 0, 1, 2, 3

# exhaustive sign search grows as 3^|labels|; warn before it gets slow
SYNTH_WARN_LABELS = 20


class _Out:
    def __init__(self, stream: TextIO, err: TextIO):
        self.stream = stream
        self.err = err
        self.color = os.environ.get("GRW_COLOR", "") != "0" and stream.isatty()

    def line(self, text: str = "") -> None:
        self.stream.write(text + "\n")

    def note(self, text: str) -> None:
        self.err.write(text + "\n")

    def paint(self, text: str, good: bool) -> str:
        if not self.color:
            return text
        return f"\033[{32 if good else 31}m{text}\033[0m"


def digest(g: Graph) -> str:
    return hashlib.sha256(canonical_key(g)).hexdigest()[:16]


def render_matching(mu: Mapping[str, str]) -> str:
    return " ".join(f"{k}={v}" for k, v in mu.items())


def _summary(g: Graph) -> str:
    edges = ", ".join(f"{s} -{e}-> {t}" for s, e, t in g.edges)
    return edges or "(no edges)"


def _load_grs(path: str) -> GRS:
    return load(path, "grs").value


def _load_graph(path: str, grs: GRS) -> Graph:
    return load(path, "graph", grs.alphabets).value


def _trace(out: _Out, prefix: str = ""):
    def emit(step: RewriteStep) -> None:
        out.note(f"{prefix}{step.rule}, {render_matching(step.matching)}, {digest(step.result)}")

    return emit


def cmd_match(args: argparse.Namespace, out: _Out) -> int:
    grs = _load_grs(args.patterns)
    g = _load_graph(args.graph, grs)
    rules = [grs.rule(args.rule)] if args.rule else grs.rules
    for rule in rules:
        for mu in find_matchings(rule.pattern, g):
            out.line(f"{rule.name}: {render_matching(mu)}")
    return OK


def cmd_rewrite(args: argparse.Namespace, out: _Out) -> int:
    grs = _load_grs(args.rules)
    g = _load_graph(args.graph, grs)
    for i, step in enumerate(step_all(grs, g)):
        if i:
            out.line()
        out.line(f"# {step.rule}: {render_matching(step.matching)}")
        out.stream.write(render_graph(step.result))
    return OK


def cmd_normalize(args: argparse.Namespace, out: _Out) -> int:
    grs = _load_grs(args.rules)
    g = _load_graph(args.graph, grs)
    res = normalize(grs, g, args.fuel, _trace(out) if args.trace else None)
    out.stream.write(render_graph(res.graph))
    if res.exhausted:
        out.note(f"fuel exhausted after {res.steps} steps")
        return FAIL
    out.note(f"normal form after {res.steps} steps")
    return OK


def cmd_pipeline(args: argparse.Namespace, out: _Out) -> int:
    pipeline = load(args.pipeline, "pipeline").value
    if not pipeline.modules:
        out.note("pipeline has no modules")
        return USAGE
    g = load(args.graph, "graph", pipeline.modules[0][1].alphabets).value
    callback = None
    if args.trace:
        callback = lambda name, step: _trace(out, f"{name}: ")(step)  # noqa: E731
    res = run_pipeline(pipeline, g, args.fuel, callback)
    out.stream.write(render_graph(res.graph))
    names = [name for name, _ in pipeline.modules]
    out.note("steps: " + " ".join(f"{n}={c}" for n, c in zip(names, res.steps)))
    if res.exhausted_module is not None:
        out.note(f"fuel exhausted in module {res.exhausted_module}")
        return FAIL
    return OK


def _print_report(report: CompatibilityReport, out: _Out) -> int:
    for v in report.verdicts:
        status = out.paint("compatible" if v.compatible else "incompatible", v.compatible)
        line = f"{v.rule}: {status} ({v.clause}) weight {v.weight_before} -> {v.weight_after}"
        if v.detail:
            line += f"; {v.detail}"
        out.line(line)
    if report.compatible:
        out.line(out.paint("Compatible", True))
        return OK
    out.line(out.paint("Incompatible", False))
    return FAIL


def cmd_terminate(args: argparse.Namespace, out: _Out) -> int:
    grs = _load_grs(args.rules)
    if args.mode in ("weights", "lex"):
        if not args.weights:
            out.note(f"--mode {args.mode} needs --weights")
            return USAGE
        lw = load(args.weights, "weights").value
        check_weight_labels(lw, grs.alphabets)
        if args.mode == "weights":
            return _print_report(check_compatible(grs, lw.w0), out)
        return _print_report(check_lexicographic(grs, lw), out)
    if not args.graph:
        out.note("--mode reach needs --graph")
        return USAGE
    g = _load_graph(args.graph, grs)
    space = explore(grs, g, args.limit)
    verdict = verdict_of(space)
    if isinstance(verdict, Terminates):
        out.line(f"{out.paint('Terminates', True)}: height {verdict.height}, {verdict.states} states")
        return OK
    if isinstance(verdict, LimitReached):
        out.line(f"{out.paint('LimitExceeded', False)}: stopped after {verdict.states} states")
        return LIMIT
    return _print_loop(verdict, space, out)


def _print_loop(loop: Loops, space, out: _Out) -> int:
    length = len(loop.cycle) - 1
    out.line(f"{out.paint('Loops', False)}: cycle of length {length}, {loop.states} states explored")
    for key, (rule, mu) in zip(loop.cycle, loop.steps):
        g = space.states[key]
        out.line(f"  {digest(g)}  {_summary(g)}")
        out.line(f"    -> {rule}: {render_matching(mu)}")
    g = space.states[loop.cycle[-1]]
    out.line(f"  {digest(g)}  {_summary(g)}")
    return FAIL


def cmd_synthesize(args: argparse.Namespace, out: _Out) -> int:
    grs = _load_grs(args.rules)
    if len(grs.alphabets.edge_labels) > SYNTH_WARN_LABELS:
        out.note(f"warning: {len(grs.alphabets.edge_labels)} edge labels; the search may be slow")
    w = synthesize_weight(grs)
    if w is None:
        out.line("NO-WEIGHT")
        return FAIL
    for e in grs.alphabets.edge_labels:
        out.line(f"edge {e} {w.get(e, 0)}")
    return OK


def cmd_height(args: argparse.Namespace, out: _Out) -> int:
    grs = _load_grs(args.rules)
    g = _load_graph(args.graph, grs)
    space = explore(grs, g, args.limit)
    verdict = verdict_of(space)
    if isinstance(verdict, Terminates):
        out.line(str(verdict.height))
        return OK
    if isinstance(verdict, Loops):
        out.note("not terminating: a cycle is reachable")
        return FAIL
    out.note(f"state limit exceeded after {verdict.states} states")
    return LIMIT


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="grw", description="Graph rewriting with termination checks.")
    sub = parser.add_subparsers(dest="command", required=True)

    def rules_arg(p: argparse.ArgumentParser) -> None:
        p.add_argument("-r", "--rules", required=True, help="rule system file (.grs)")

    def graph_arg(p: argparse.ArgumentParser, required: bool = True) -> None:
        p.add_argument("-g", "--graph", required=required, help="graph file (.gr)")

    p = sub.add_parser("match", help="list the matchings of each rule's pattern")
    p.add_argument("-p", "--patterns", required=True, help="rule system whose patterns are matched")
    graph_arg(p)
    p.add_argument("--rule", help="only this rule")
    p.set_defaults(func=cmd_match)

    p = sub.add_parser("rewrite", help="every one-step rewrite of the graph")
    rules_arg(p)
    graph_arg(p)
    p.set_defaults(func=cmd_rewrite)

    p = sub.add_parser("normalize", help="rewrite with the first rule and matching until none applies")
    rules_arg(p)
    graph_arg(p)
    p.add_argument("--fuel", type=int, default=10_000, help="maximum number of steps")
    p.add_argument("--trace", action="store_true", help="print each step on stderr")
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("pipeline", help="run a sequence of rule modules")
    psub = p.add_subparsers(dest="action", required=True)
    run = psub.add_parser("run", help="normalize with each module in turn")
    run.add_argument("-P", "--pipeline", required=True, help="pipeline file")
    graph_arg(run)
    run.add_argument("--fuel", type=int, default=10_000, help="maximum steps per module")
    run.add_argument("--trace", action="store_true", help="print each step on stderr")
    run.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("terminate", help="decide or certify termination")
    rules_arg(p)
    graph_arg(p, required=False)
    p.add_argument("--mode", choices=("reach", "weights", "lex"), default="reach")
    p.add_argument("--limit", type=int, default=DEFAULT_STATE_LIMIT, help="state limit for --mode reach")
    p.add_argument("--weights", help="weights file for --mode weights|lex")
    p.set_defaults(func=cmd_terminate)

    p = sub.add_parser("synthesize", help="search for a compatible edge weight")
    rules_arg(p)
    p.set_defaults(func=cmd_synthesize)

    p = sub.add_parser("height", help="length of the longest derivation from a graph")
    rules_arg(p)
    graph_arg(p)
    p.add_argument("--limit", type=int, default=DEFAULT_STATE_LIMIT, help="state limit")
    p.set_defaults(func=cmd_height)
    return parser


def main(argv: Sequence[str] | None = None, stdout: TextIO | None = None, stderr: TextIO | None = None) -> int:
    out = _Out(stdout or sys.stdout, stderr or sys.stderr)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    if getattr(args, "fuel", 0) < 0 or getattr(args, "limit", 1) < 1:
        out.note("error: --fuel must be >= 0 and --limit >= 1")
        return USAGE
    try:
        return args.func(args, out)
    except KeyError as err:
        out.note(f"error: no rule named {err.args[0]!r}")
        return USAGE
    except GrwError as err:
        out.note(f"error: {err}")
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
