from __future__ import annotations

import pytest

from grw import fixtures as fx
from grw.errors import InconsistentSequence, ParseError
from grw.textio import (
    load,
    parse_graph,
    parse_grs,
    parse_pipeline,
    parse_weights,
    render_graph,
    render_grs,
    render_weights,
)

GRS_FILES = ["matching.grs", "q1q2.grs", "clique.grs", "antecedent.grs", "raising.grs", "passive.grs"]
GRAPH_FILES = {
    "g0.gr": "matching.grs",
    "g1.gr": "q1q2.grs",
    "g2.gr": "q1q2.grs",
    "c2.gr": "clique.grs",
    "c3.gr": "clique.grs",
    "c4.gr": "clique.grs",
    "chain3.gr": "antecedent.grs",
    "raising.gr": "raising.grs",
    "short_passive.gr": "passive.grs",
    "long_passive.gr": "passive.grs",
}


def test_small_graph():
    g = parse_graph("node g0 alpha\nnode g1 beta\nedge g0 A g1")
    assert len(g) == 2 and g.edges == (("g0", "A", "g1"),)
    assert len(parse_graph("")) == 0


@pytest.mark.parametrize("name", GRS_FILES)
def test_grs_round_trip(name):
    grs = fx.grs(name)
    again = parse_grs(render_grs(grs))
    assert again == grs


@pytest.mark.parametrize("name", sorted(GRAPH_FILES))
def test_graph_round_trip(name):
    alph = fx.grs(GRAPH_FILES[name]).alphabets
    g = fx.graph(name, alph)
    assert parse_graph(render_graph(g), alph) == g
    assert parse_graph(render_graph(g, header=True)) == g


def test_clique_files_match_generator():
    for n in (2, 3, 4):
        assert fx.graph(f"c{n}.gr") == fx.clique(n)


def test_chain_file_matches_generator():
    alph = fx.grs("antecedent.grs").alphabets
    assert fx.graph("chain3.gr", alph) == fx.chain(3, alph)


def test_fixture_shapes():
    assert [r.name for r in fx.grs("q1q2.grs").rules] == ["Q1", "Q2"]
    assert [r.name for r in fx.grs("antecedent.grs").rules] == ["Init", "Rec", "Stop", "Clean"]
    p = fx.pipeline("antecedent.pipeline")
    assert [(n, [r.name for r in grs.rules]) for n, grs in p.modules] == [
        ("walk", ["Init", "Rec", "Stop"]),
        ("clean", ["Clean"]),
    ]


def test_weights_round_trip():
    for name in ("antecedent.weights", "antecedent_w0.weights", "counter.weights", "clique.weights"):
        lw = fx.weights(name)
        assert parse_weights(render_weights(lw)) == lw


def test_weights_content():
    lw = fx.weights("antecedent.weights")
    assert lw.w0["A"] == -1
    [pi] = lw.pis
    assert (pi.a, pi.b) == (1, 0)
    assert pi.omega == {("P", "E", "X"): 1, ("Pd", "E", "X"): -1}


def test_inconsistent_sequence_reported_at_command():
    text = """edge_labels E
node_labels X
rule R
  match
    node a X
  commands
    del_node a
    label a X
end
"""
    with pytest.raises(ParseError) as info:
        parse_grs(text, "bad.grs")
    assert info.value.line == 8
    assert isinstance(info.value.__cause__, InconsistentSequence)


@pytest.mark.parametrize(
    "text, line, column",
    [
        ("node a X\nedge a E\n", 2, 9),
        ("node a X\nnode a X\n", 2, 6),
        ("node a X\nedge a E b\n", 2, 10),
        ("frob a\n", 1, 1),
    ],
)
def test_graph_error_positions(text, line, column):
    with pytest.raises(ParseError) as info:
        parse_graph(text, path="g.gr")
    assert (info.value.line, info.value.column) == (line, column)
    assert str(info.value).startswith(f"g.gr:{line}:")


def test_graph_rejects_foreign_label():
    alph = fx.grs("clique.grs").alphabets
    with pytest.raises(ParseError):
        parse_graph("node a Z\n", alph)


def test_grs_errors():
    with pytest.raises(ParseError):
        parse_grs("rule R\n  match\n    node a X\n")  # missing end
    with pytest.raises(ParseError):
        parse_grs("edge_labels E\nnode_labels X\nrule R\n  match\n    node a X\n  commands\n    shift a a\nend\n")


def test_pipeline_errors(tmp_path):
    with pytest.raises(ParseError):
        parse_pipeline("module m missing.grs\n", tmp_path)
    (tmp_path / "r.grs").write_text(fx.read("clique.grs"))
    with pytest.raises(ParseError) as info:
        parse_pipeline("module m r.grs Nope\n", tmp_path)
    assert info.value.column == 16


def test_weights_errors():
    with pytest.raises(ParseError):
        parse_weights("pi 1 0\n  ctx P E X 1\n")
    with pytest.raises(ParseError):
        parse_weights("edge A x\n")


def test_load_kinds():
    assert load(fx.data_path("q1q2.grs"), "grs").positions
    assert load(fx.data_path("antecedent.pipeline"), "pipeline").kind == "pipeline"
    with pytest.raises(ParseError):
        load(fx.data_path("absent.gr"), "graph")
