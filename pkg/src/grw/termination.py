"""Weight-based termination analysis for graph rewrite systems.

Simple weights give every edge label an integer; a system is *compatible* with
a weight when each rule either deletes a node or strictly lowers the weight of
its own pattern while never merging crown edges of a negative label.  The
lexicographic variant adds contextual weights that look at endpoint labels.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .engine import GRS
from .errors import HasDelNode
from .graph import Graph
from .linear import solve, to_integers
from .rules import (
    Label,
    Rule,
    Shift,
    apply_commands,
    effective_commands,
    render_command,
    shift_map,
    uniformity_violation,
)

EdgeWeight = Mapping[str, int]
NodeWeight = Mapping[str, int]

# clause names used in reports
DEL_NODE = "del_node"
SIMPLE = "2a-2c"
LEX_2A = "lex-2a"
LEX_2B = "lex-2b"


@dataclass(frozen=True)
class ContextualWeight:
    """``pi(G) = a * omega(G) + b * eta(G)``; absent triples/labels weigh 0."""

    a: int
    omega: Mapping[tuple[str, str, str], int] = field(default_factory=dict)
    b: int = 0
    eta: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.a < 0 or self.b < 0:
            raise ValueError("contextual weight coefficients must be non-negative")

    def fragile_labels(self, edge_labels: Sequence[str], node_labels: Sequence[str]) -> set[str]:
        """Edge labels whose omega-slice is not constant (only when a != 0)."""
        if self.a == 0:
            return set()
        full = len(node_labels) ** 2
        fragile = set()
        for e in edge_labels:
            values = {v for (x, lab, y), v in self.omega.items() if lab == e}
            explicit = sum(1 for (x, lab, y) in self.omega if lab == e)
            if explicit < full:
                values.add(0)
            if len(values) > 1:
                fragile.add(e)
        return fragile


@dataclass(frozen=True)
class LexicographicWeight:
    w0: EdgeWeight
    pis: tuple = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "pis", tuple(self.pis))


@dataclass(frozen=True)
class BoundConstants:
    K_w: int
    K_E: int
    K_eta: int
    C: int
    H: int
    A: int


@dataclass(frozen=True)
class RuleVerdict:
    rule: str
    compatible: bool
    clause: str  # clause used when compatible, first failed condition otherwise
    detail: str = ""
    weight_before: int | None = None
    weight_after: int | None = None


@dataclass(frozen=True)
class CompatibilityReport:
    verdicts: tuple

    @property
    def compatible(self) -> bool:
        return all(v.compatible for v in self.verdicts)

    def __getitem__(self, rule_name: str) -> RuleVerdict:
        for v in self.verdicts:
            if v.rule == rule_name:
                return v
        raise KeyError(rule_name)


def evaluate_w(w: EdgeWeight, g: Graph) -> int:
    return sum(w.get(e, 0) for _, e, _ in g.edge_set)


def evaluate_eta(eta: NodeWeight, g: Graph) -> int:
    return sum(eta.get(label, 0) for label in g._labels.values())


def evaluate_omega(omega: Mapping[tuple[str, str, str], int], g: Graph) -> int:
    labels = g._labels
    return sum(omega.get((labels[s], e, labels[t]), 0) for s, e, t in g.edge_set)


def evaluate_pi(pi: ContextualWeight, g: Graph) -> int:
    total = 0
    if pi.a:
        total += pi.a * evaluate_omega(pi.omega, g)
    if pi.b:
        total += pi.b * evaluate_eta(pi.eta, g)
    return total


@dataclass(frozen=True)
class RuleDelta:
    delta: dict  # edge label -> change in edge count on the pattern
    before: Graph
    after: Graph
    relabels: dict  # pattern node -> (old label, new label)


def rule_deltas(rule: Rule) -> RuleDelta:
    """Apply the rule's effective commands to its own basic pattern (identity matching)."""
    if not rule.node_preserving:
        raise HasDelNode(f"rule {rule.name} deletes nodes")
    basic = rule.pattern.basic
    identity = {n: n for n in basic.nodes}
    after = apply_commands(basic, identity, effective_commands(rule.commands))
    delta = {e: 0 for e in basic.alphabets.edge_labels}
    for _, e, _ in after.edge_set - basic.edge_set:
        delta[e] += 1
    for _, e, _ in basic.edge_set - after.edge_set:
        delta[e] -= 1
    relabels = {n: (basic.label(n), after.label(n)) for n in basic.nodes if basic.label(n) != after.label(n)}
    return RuleDelta(delta, basic, after, relabels)


def merge_guard_violation(rule: Rule, negative: set[str]) -> str | None:
    """Check that shifts never merge crown edges carrying a negative label.

    For each label ``e`` in ``negative`` and each group of pattern nodes sent to
    the same node by the composed shifts, at most one member may have
    unguarded ``e`` in-edges and at most one unguarded ``e`` out-edges.
    """
    if not negative:
        return None
    phi = shift_map(rule.commands, rule.pattern.nodes)
    groups: dict[str, list[str]] = {}
    for n, image in phi.items():
        groups.setdefault(image, []).append(n)
    forbidden_in, forbidden_out = rule.pattern.forbidden_in, rule.pattern.forbidden_out
    alphabet = rule.pattern.basic.alphabets.edge_labels
    for e in (lab for lab in alphabet if lab in negative):
        for image, members in groups.items():
            if len(members) < 2:
                continue
            open_in = [m for m in members if (m, e) not in forbidden_in]
            if len(open_in) > 1:
                return f"nodes {', '.join(open_in)} all shift onto {image} with unguarded {e} in-edges"
            open_out = [m for m in members if (m, e) not in forbidden_out]
            if len(open_out) > 1:
                return f"nodes {', '.join(open_out)} all shift onto {image} with unguarded {e} out-edges"
    return None


def _check_rule(rule: Rule, w: EdgeWeight) -> RuleVerdict:
    if not rule.node_preserving:
        return RuleVerdict(rule.name, True, DEL_NODE)
    bad = uniformity_violation(rule)
    if bad is not None:
        return RuleVerdict(rule.name, False, "2a", f"not uniform: {render_command(bad)}")
    d = rule_deltas(rule)
    before, after = evaluate_w(w, d.before), evaluate_w(w, d.after)
    if not after < before:
        return RuleVerdict(rule.name, False, "2b", f"pattern weight {before} -> {after} does not decrease", before, after)
    negative = {e for e in rule.pattern.basic.alphabets.edge_labels if w.get(e, 0) < 0}
    merge = merge_guard_violation(rule, negative)
    if merge is not None:
        return RuleVerdict(rule.name, False, "2c", merge, before, after)
    return RuleVerdict(rule.name, True, SIMPLE, "", before, after)


def check_compatible(grs: GRS, w: EdgeWeight) -> CompatibilityReport:
    return CompatibilityReport(tuple(_check_rule(r, w) for r in grs.rules))


def _lex_less(left: Sequence[int], right: Sequence[int]) -> bool:
    for a, b in zip(left, right):
        if a != b:
            return a < b
    return False


def _check_rule_lex(rule: Rule, lw: LexicographicWeight, fragile: set[str]) -> RuleVerdict:
    if not rule.node_preserving:
        return RuleVerdict(rule.name, True, DEL_NODE)
    bad = uniformity_violation(rule)
    if bad is not None:
        return RuleVerdict(rule.name, False, "uniform", f"not uniform: {render_command(bad)}")
    d = rule_deltas(rule)
    before, after = evaluate_w(lw.w0, d.before), evaluate_w(lw.w0, d.after)
    if after < before:
        negative = {e for e in rule.pattern.basic.alphabets.edge_labels if lw.w0.get(e, 0) < 0}
        merge = merge_guard_violation(rule, negative)
        if merge is not None:
            return RuleVerdict(rule.name, False, "lex-2a.ii", merge, before, after)
        return RuleVerdict(rule.name, True, LEX_2A, "", before, after)
    if after > before:
        return RuleVerdict(rule.name, False, "lex-2a.i", f"w0 increases {before} -> {after}", before, after)
    pi_before = [evaluate_pi(pi, d.before) for pi in lw.pis]
    pi_after = [evaluate_pi(pi, d.after) for pi in lw.pis]
    if not _lex_less(pi_after, pi_before):
        return RuleVerdict(
            rule.name, False, "lex-2b.ii", f"contextual weights {pi_before} -> {pi_after} do not decrease", before, after
        )
    guards = rule.pattern.forbidden_in | rule.pattern.forbidden_out
    for c in rule.commands:
        if isinstance(c, Label):
            for e in sorted(fragile):
                if (c.node, e) not in guards:
                    return RuleVerdict(
                        rule.name, False, "lex-2b.iii", f"{render_command(c)} but no guard on {e} edges of {c.node}",
                        before, after,
                    )
    if any(isinstance(c, Shift) for c in rule.commands):
        return RuleVerdict(rule.name, False, "lex-2b.iv", "rule contains shift", before, after)
    return RuleVerdict(rule.name, True, LEX_2B, "", before, after)


def check_lexicographic(grs: GRS, lw: LexicographicWeight) -> CompatibilityReport:
    alph = grs.alphabets
    fragile: set[str] = set()
    for pi in lw.pis:
        fragile |= pi.fragile_labels(alph.edge_labels, alph.node_labels)
    return CompatibilityReport(tuple(_check_rule_lex(r, lw, fragile) for r in grs.rules))


def synthesize_weight(grs: GRS) -> dict[str, int] | None:
    """Find an integer edge weight compatible with ``grs``, or None if none exists.

    Tries each set of negative labels (smallest first); for a fixed sign pattern
    the shift-merge guard is syntactic and the remaining conditions are linear.
    """
    labels = grs.alphabets.edge_labels
    weighted = [r for r in grs.rules if r.node_preserving]
    for r in weighted:
        if uniformity_violation(r) is not None:
            return None
    deltas = [rule_deltas(r).delta for r in weighted]
    for size in range(len(labels) + 1):
        for negative in itertools.combinations(labels, size):
            neg = set(negative)
            if any(merge_guard_violation(r, neg) is not None for r in weighted):
                continue
            rows = []
            for delta in deltas:
                rows.append(([delta.get(e, 0) for e in labels], -1))
            for i, e in enumerate(labels):
                unit = [0] * len(labels)
                if e in neg:
                    unit[i] = 1
                    rows.append((unit, -1))
                else:
                    unit[i] = -1
                    rows.append((unit, 0))
            x = solve(rows, len(labels))
            if x is not None:
                return dict(zip(labels, to_integers(x)))
    return None


def bound_constants(grs: GRS, w: EdgeWeight, eta: NodeWeight | None = None) -> BoundConstants:
    alph = grs.alphabets
    k_w = max((abs(w.get(e, 0)) for e in alph.edge_labels), default=0)
    k_e = len(alph.edge_labels) * k_w
    k_eta = max((abs(v) for v in (eta or {}).values()), default=0)
    c = max((2 * len(r.pattern.nodes) ** 2 * len(alph.edge_labels) for r in grs.rules), default=0)
    h = max((len(r.commands) for r in grs.rules), default=0)
    a = 2 * max(1, k_w) * c * (h + 1) + 1
    return BoundConstants(k_w, k_e, k_eta, c, h, a)


def energy(g: Graph, w: EdgeWeight, consts: BoundConstants) -> int:
    return evaluate_w(w, g) + consts.A * len(g) ** 2


def kappa(g: Graph, lw: LexicographicWeight) -> tuple[int, ...]:
    return (len(g), evaluate_w(lw.w0, g), *(evaluate_pi(pi, g) for pi in lw.pis))
