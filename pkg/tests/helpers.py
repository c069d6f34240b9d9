"""Random generators and brute-force oracles shared by the test modules."""

from __future__ import annotations

import itertools
import random

from grw import Alphabets, GRS, Rule, make_graph, make_pattern
from grw.rules import AddEdge, DelEdge, DelNode, Label, Shift
from grw.termination import check_compatible

EDGE_POOL = ("A", "B", "C")
NODE_POOL = ("x", "y")


def random_alphabets(rng: random.Random) -> Alphabets:
    return Alphabets(EDGE_POOL[: rng.randint(1, 3)], NODE_POOL[: rng.randint(1, 2)])


def random_graph(rng: random.Random, alph: Alphabets, max_nodes: int = 6, density: float | None = None):
    n = rng.randint(0, max_nodes)
    nodes = [(f"n{i}", rng.choice(alph.node_labels)) for i in range(n)]
    density = rng.uniform(0.05, 0.5) if density is None else density
    edges = [
        (f"n{i}", e, f"n{j}")
        for i in range(n)
        for j in range(n)
        for e in alph.edge_labels
        if rng.random() < density
    ]
    return make_graph(nodes, edges, alph)


def random_pattern(rng: random.Random, alph: Alphabets, max_nodes: int = 3, negatives: bool = True):
    k = rng.randint(1, max_nodes)
    ids = [str(i) for i in range(k)]
    nodes = [(i, rng.choice(alph.node_labels)) for i in ids]
    triples = [(s, e, t) for s in ids for t in ids for e in alph.edge_labels]
    rng.shuffle(triples)
    n_pos = rng.randint(0, min(3, len(triples)))
    positive, rest = triples[:n_pos], triples[n_pos:]
    forbidden, fin, fout = [], [], []
    if negatives:
        forbidden = rest[: rng.randint(0, min(2, len(rest)))]
        fin = [(rng.choice(ids), rng.choice(alph.edge_labels)) for _ in range(rng.randint(0, 1))]
        fout = [(rng.choice(ids), rng.choice(alph.edge_labels)) for _ in range(rng.randint(0, 1))]
    return make_pattern(make_graph(nodes, positive, alph), forbidden, fin, fout)


def random_commands(rng: random.Random, pattern, alph: Alphabets, allow_del_node: bool = True):
    """A consistent command sequence over the pattern's nodes."""
    alive = list(pattern.nodes)
    out = []
    for _ in range(rng.randint(0, 4)):
        kinds = ["label", "del", "add"]
        if len(alive) >= 2:
            kinds.append("shift")
        if allow_del_node and alive:
            kinds.append("del_node")
        kind = rng.choice(kinds)
        if not alive:
            break
        if kind == "label":
            out.append(Label(rng.choice(alive), rng.choice(alph.node_labels)))
        elif kind == "del":
            out.append(DelEdge(rng.choice(alive), rng.choice(alph.edge_labels), rng.choice(alive)))
        elif kind == "add":
            out.append(AddEdge(rng.choice(alive), rng.choice(alph.edge_labels), rng.choice(alive)))
        elif kind == "shift":
            a, b = rng.sample(alive, 2)
            out.append(Shift(a, b))
        else:
            n = rng.choice(alive)
            alive.remove(n)
            out.append(DelNode(n))
    return out


def random_rule(rng: random.Random, alph: Alphabets, name: str = "R", allow_del_node: bool = True) -> Rule:
    p = random_pattern(rng, alph)
    return Rule(name, p, tuple(random_commands(rng, p, alph, allow_del_node)))


def random_uniform_rule(rng: random.Random, alph: Alphabets, name: str = "R") -> Rule:
    """A rule whose adds are declared forbidden edges and whose deletions are pattern edges."""
    p = random_pattern(rng, alph, negatives=False)
    ids = list(p.nodes)
    free = [(s, e, t) for s in ids for t in ids for e in alph.edge_labels if (s, e, t) not in p.edges]
    rng.shuffle(free)
    forbidden = free[: rng.randint(0, min(2, len(free)))]
    fin = {(rng.choice(ids), rng.choice(alph.edge_labels)) for _ in range(rng.randint(0, 2))}
    fout = {(rng.choice(ids), rng.choice(alph.edge_labels)) for _ in range(rng.randint(0, 2))}
    p = make_pattern(p.basic, forbidden, fin, fout)
    commands = [DelEdge(*t) for t in sorted(p.edges) if rng.random() < 0.6]
    commands += [AddEdge(*t) for t in forbidden if rng.random() < 0.6]
    if rng.random() < 0.3:
        commands.append(Label(rng.choice(ids), rng.choice(alph.node_labels)))
    if len(ids) >= 2 and rng.random() < 0.3:
        a, b = rng.sample(ids, 2)
        commands.append(Shift(a, b))
    rng.shuffle(commands)
    if rng.random() < 0.15:
        commands.append(DelNode(rng.choice(ids)))
    return Rule(name, p, tuple(commands))


def brute_force_matchings(p, g) -> list[dict]:
    """Every injective node map satisfying labels, edges and negative conditions."""
    pn = list(p.nodes)
    image_edges = g.edge_set
    found = []
    for combo in itertools.permutations(list(g.nodes), len(pn)):
        mu = dict(zip(pn, combo))
        if any(g.label(mu[n]) != p.basic.label(n) for n in pn):
            continue
        if any((mu[s], e, mu[t]) not in image_edges for s, e, t in p.edges):
            continue
        if any((mu[s], e, mu[t]) in image_edges for s, e, t in p.forbidden_edges):
            continue
        image = set(combo)
        outside = [x for x in g.nodes if x not in image]
        if any((q, e, mu[n]) in image_edges for n, e in p.forbidden_in for q in outside):
            continue
        if any((mu[n], e, q) in image_edges for n, e in p.forbidden_out for q in outside):
            continue
        found.append(mu)
    return found


def brute_force_weight(grs: GRS, bound: int = 3) -> dict | None:
    labels = grs.alphabets.edge_labels
    for values in itertools.product(range(-bound, bound + 1), repeat=len(labels)):
        w = dict(zip(labels, values))
        if check_compatible(grs, w).compatible:
            return w
    return None
