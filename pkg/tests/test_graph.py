from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from grw import Alphabets, canonical_key, decompose, make_graph
from grw import fixtures as fx
from grw.errors import DanglingEdge, DuplicateNodeId, NodeNotInGraph, UnknownLabel
from grw.graph import empty_graph, node_sort_key

ALPH = Alphabets(("A", "B", "C", "D", "E"), ("alpha", "beta"))


def g0():
    return fx.graph("g0.gr", ALPH)


def test_g0_shape():
    g = g0()
    assert len(g) == 3
    assert len(g.edge_set) == 6
    assert g.label("g1") == "beta"
    assert g.has_edge("g0", "E", "g0")


def test_empty_graph():
    g = make_graph([], [], ALPH)
    assert len(g) == 0 and not g.edge_set
    assert g == empty_graph(ALPH)


def test_duplicate_edges_collapse():
    g = make_graph([("a", "alpha")], [("a", "A", "a"), ("a", "A", "a")], ALPH)
    assert g.edges == (("a", "A", "a"),)


@pytest.mark.parametrize(
    "nodes, edges, error",
    [
        ([("a", "gamma")], [], UnknownLabel),
        ([("a", "alpha")], [("a", "Z", "a")], UnknownLabel),
        ([("a", "alpha")], [("a", "A", "b")], DanglingEdge),
        ([("a", "alpha"), ("a", "beta")], [], DuplicateNodeId),
    ],
)
def test_make_graph_rejects(nodes, edges, error):
    with pytest.raises(error):
        make_graph(nodes, edges, ALPH)


def test_alphabets_validation():
    with pytest.raises(ValueError):
        Alphabets((), ("a",))
    with pytest.raises(ValueError):
        Alphabets(("A", "A"), ("a",))


def test_natural_node_order():
    assert sorted(["n10", "n2", "n1"], key=node_sort_key) == ["n1", "n2", "n10"]
    g = make_graph([("n10", "alpha"), ("n2", "alpha")], [], ALPH)
    assert g.nodes == ("n2", "n10")


def test_canonical_keys():
    g = g0()
    copy = make_graph(list(g.labels.items()), list(g.edges), ALPH)
    assert canonical_key(g) == canonical_key(copy)
    fewer = make_graph(list(g.labels.items()), list(g.edges)[1:], ALPH)
    assert canonical_key(g) != canonical_key(fewer)
    q = fx.grs("q1q2.grs")
    assert canonical_key(fx.graph("g1.gr", q.alphabets)) != canonical_key(fx.graph("g2.gr", q.alphabets))


def test_equality_ignores_construction_order():
    a = make_graph([("x", "alpha"), ("y", "beta")], [("x", "A", "y"), ("y", "B", "x")], ALPH)
    b = make_graph([("y", "beta"), ("x", "alpha")], [("y", "B", "x"), ("x", "A", "y")], ALPH)
    assert a == b and hash(a) == hash(b)
    relabelled = make_graph([("x", "beta"), ("y", "beta")], [("x", "A", "y"), ("y", "B", "x")], ALPH)
    assert a != relabelled


def test_decompose_example():
    nd, ed = decompose(g0(), {"g0", "g1"}, {("g0", "A", "g1")})
    assert nd.pattern_image == {"g0", "g1"}
    assert nd.crown == {"g2"}
    assert nd.context == set()
    assert ed.pattern_edges == {("g0", "A", "g1")}
    assert ed.glued_edges == {("g0", "B", "g1"), ("g0", "E", "g0")}
    assert ed.crown_edges == {("g0", "D", "g2"), ("g1", "C", "g2"), ("g2", "A", "g1")}
    assert ed.context_edges == set()


def test_decompose_extremes():
    g = g0()
    nd, ed = decompose(g, set())
    assert nd.context == set(g.nodes) and ed.context_edges == g.edge_set
    nd, ed = decompose(g, set(g.nodes))
    assert not nd.crown and not nd.context and not ed.crown_edges and not ed.context_edges


def test_decompose_rejects_unknown_node():
    with pytest.raises(NodeNotInGraph):
        decompose(g0(), {"zz"})


graphs = st.builds(
    lambda n, bits: make_graph(
        [(str(i), "alpha") for i in range(n)],
        [(str(i), "A", str(j)) for i in range(n) for j in range(n) if bits >> (i * n + j) & 1],
        ALPH,
    ),
    st.integers(0, 4),
    st.integers(0, 2**16 - 1),
)


@settings(max_examples=200, deadline=None)
@given(graphs, graphs)
def test_key_equality_is_graph_equality(a, b):
    assert (canonical_key(a) == canonical_key(b)) == (a == b)
