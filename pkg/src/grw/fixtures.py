"""Bundled example systems and graph generators."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .engine import GRS, Pipeline
from .graph import Alphabets, Graph, make_graph
from .textio import parse_graph, parse_grs, parse_pipeline, parse_weights
from .termination import LexicographicWeight


def data_path(name: str) -> Path:
    return Path(str(resources.files("grw") / "data" / name))


def read(name: str) -> str:
    return data_path(name).read_text(encoding="utf-8")


def grs(name: str) -> GRS:
    return parse_grs(read(name), name)


def graph(name: str, alphabets: Alphabets | None = None) -> Graph:
    return parse_graph(read(name), alphabets, name)


def weights(name: str) -> LexicographicWeight:
    return parse_weights(read(name), name)


def pipeline(name: str) -> Pipeline:
    return parse_pipeline(read(name), data_path(name).parent, name)


def clique(n: int, alphabets: Alphabets | None = None) -> Graph:
    """Complete graph on ``n`` e-nodes with every E-edge, loops included."""
    alphabets = alphabets or Alphabets(("E",), ("e",))
    nodes = [(str(i), "e") for i in range(n)]
    edges = [(str(i), "E", str(j)) for i in range(n) for j in range(n)]
    return make_graph(nodes, edges, alphabets)


def chain(length: int, alphabets: Alphabets | None = None) -> Graph:
    """``p:P <-O- x1 <-O- ... <-O- x<length> <-M- y``."""
    alphabets = alphabets or Alphabets(("O", "M", "A", "E"), ("P", "Pd", "X"))
    nodes = [("p", "P")] + [(f"x{i}", "X") for i in range(1, length + 1)] + [("y", "X")]
    previous = ["p"] + [f"x{i}" for i in range(1, length)]
    edges = [(f"x{i}", "O", previous[i - 1]) for i in range(1, length + 1)]
    edges.append(("y", "M", f"x{length}" if length else "p"))
    return make_graph(nodes, edges, alphabets)
