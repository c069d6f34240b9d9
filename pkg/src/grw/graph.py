"""Node- and edge-labeled directed graphs over fixed alphabets.

A graph is an immutable value: a map from node ids to node labels plus a set
of ``(source, label, target)`` triples.  Node ids are strings and are never
renamed by rewriting, so two graphs reached from the same start graph are the
same state exactly when their node maps and edge sets coincide.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property, lru_cache
from types import MappingProxyType
from typing import Iterable, Mapping, Tuple

from .errors import DanglingEdge, DuplicateNodeId, NodeNotInGraph, UnknownLabel

NodeId = str
Edge = Tuple[str, str, str]

_DIGITS = re.compile(r"(\d+)")


@lru_cache(maxsize=65536)
def node_sort_key(node: NodeId) -> tuple:
    """Natural ordering on node ids: ``n2`` sorts before ``n10``."""
    parts = _DIGITS.split(node)
    return tuple((0, int(p), p) if p.isdigit() else (1, 0, p) for p in parts if p != "")


@dataclass(frozen=True)
class Alphabets:
    edge_labels: tuple[str, ...]
    node_labels: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "edge_labels", tuple(self.edge_labels))
        object.__setattr__(self, "node_labels", tuple(self.node_labels))
        for name, labels in (("edge", self.edge_labels), ("node", self.node_labels)):
            if not labels:
                raise ValueError(f"{name} alphabet must not be empty")
            if len(set(labels)) != len(labels):
                raise ValueError(f"{name} alphabet contains duplicates")

    @cached_property
    def edge_index(self) -> dict[str, int]:
        return {e: i for i, e in enumerate(self.edge_labels)}

    @cached_property
    def node_index(self) -> dict[str, int]:
        return {a: i for i, a in enumerate(self.node_labels)}

    def conforms(self, other: "Alphabets") -> bool:
        """True if every label of ``other`` belongs to this alphabet."""
        return set(other.edge_labels) <= set(self.edge_labels) and set(
            other.node_labels
        ) <= set(self.node_labels)


class Graph:
    """Immutable labeled graph.  Build with :func:`make_graph`."""

    __slots__ = (
        "_labels", "_edges", "alphabets", "_hash", "_lhash", "_out", "_in", "_key", "_sorted_edges",
        "_by_label", "_rank",
    )

    def __init__(
        self, labels: dict[NodeId, str], edges: frozenset, alphabets: Alphabets, labels_hash: int | None = None
    ):
        # trusted constructor: callers guarantee validity and sorted node order
        self._labels = labels
        self._edges = edges
        self.alphabets = alphabets
        self._lhash = labels_hash
        self._hash = None
        self._out = None
        self._in = None
        self._key = None
        self._sorted_edges = None
        self._by_label = None
        self._rank = None

    @property
    def labels(self) -> Mapping[NodeId, str]:
        return MappingProxyType(self._labels)

    @property
    def nodes(self) -> tuple[NodeId, ...]:
        return tuple(self._labels)

    @property
    def edge_set(self) -> frozenset:
        return self._edges

    @property
    def edges(self) -> tuple[Edge, ...]:
        """Edges in canonical order (source id, label rank, target id)."""
        if self._sorted_edges is None:
            rank = self.alphabets.edge_index
            self._sorted_edges = tuple(
                sorted(self._edges, key=lambda t: (node_sort_key(t[0]), rank[t[1]], node_sort_key(t[2])))
            )
        return self._sorted_edges

    def label(self, node: NodeId) -> str:
        return self._labels[node]

    def __len__(self) -> int:
        return len(self._labels)

    def __contains__(self, node: object) -> bool:
        return node in self._labels

    def has_edge(self, source: NodeId, label: str, target: NodeId) -> bool:
        return (source, label, target) in self._edges

    def _adjacency(self, forward: bool) -> dict:
        groups: dict[tuple[str, str], list[str]] = {}
        for s, e, t in self._edges:
            key, other = ((s, e), t) if forward else ((t, e), s)
            if key in groups:
                groups[key].append(other)
            else:
                groups[key] = [other]
        rank = self.node_rank().__getitem__
        for v in groups.values():
            if len(v) > 1:
                v.sort(key=rank)
        return groups

    def successors(self, node: NodeId, label: str) -> list[NodeId]:
        """Targets of ``label``-edges leaving ``node``, in id order."""
        if self._out is None:
            self._out = self._adjacency(True)
        return self._out.get((node, label), _EMPTY)

    def predecessors(self, node: NodeId, label: str) -> list[NodeId]:
        if self._in is None:
            self._in = self._adjacency(False)
        return self._in.get((node, label), _EMPTY)

    def _with_edges(self, edges: frozenset) -> "Graph":
        # same node map, so the label-derived caches can be shared
        g = Graph(self._labels, edges, self.alphabets, self.labels_hash)
        g._by_label = self._by_label
        g._rank = self._rank
        return g

    def nodes_by_label(self) -> dict[str, list[NodeId]]:
        if self._by_label is None:
            groups: dict[str, list[NodeId]] = {}
            for n, lab in self._labels.items():
                groups.setdefault(lab, []).append(n)
            self._by_label = groups
        return self._by_label

    def node_rank(self) -> dict[NodeId, int]:
        """Position of each node in canonical id order."""
        if self._rank is None:
            self._rank = {n: i for i, n in enumerate(self._labels)}
        return self._rank

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._edges == other._edges and self._labels == other._labels

    @property
    def labels_hash(self) -> int:
        # node maps are kept in id order, so the item tuple is canonical
        if self._lhash is None:
            self._lhash = hash(tuple(self._labels.items()))
        return self._lhash

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.labels_hash, self._edges))
        return self._hash

    def __repr__(self) -> str:
        return f"Graph(nodes={len(self._labels)}, edges={len(self._edges)})"


_EMPTY: list = []


def make_graph(
    nodes: Iterable[tuple[NodeId, str]],
    edges: Iterable[Edge],
    alphabets: Alphabets,
) -> Graph:
    """Validate and build a graph.  Repeated edge triples collapse to one."""
    labels: dict[NodeId, str] = {}
    node_labels = alphabets.node_index
    edge_labels = alphabets.edge_index
    for node, label in nodes:
        node = str(node)
        if node in labels:
            raise DuplicateNodeId(f"node {node!r} declared twice")
        if label not in node_labels:
            raise UnknownLabel(f"node label {label!r} of {node!r} is not in the node alphabet")
        labels[node] = label
    edge_set = set()
    for source, label, target in edges:
        source, target = str(source), str(target)
        if label not in edge_labels:
            raise UnknownLabel(f"edge label {label!r} is not in the edge alphabet")
        for end in (source, target):
            if end not in labels:
                raise DanglingEdge(f"edge {source} -{label}-> {target}: node {end!r} not declared")
        edge_set.add((source, label, target))
    ordered = {n: labels[n] for n in sorted(labels, key=node_sort_key)}
    return Graph(ordered, frozenset(edge_set), alphabets)


def empty_graph(alphabets: Alphabets) -> Graph:
    return Graph({}, frozenset(), alphabets)


def canonical_key(g: Graph) -> bytes:
    """Exact-identity key: equal iff node-label maps and edge sets are equal."""
    if g._key is None:
        # node maps are stored in id order; edges only need some fixed order.
        # repr of nested str tuples round-trips through literal_eval, hence injective.
        g._key = repr((tuple(g._labels.items()), sorted(g._edges))).encode()
    return g._key


@dataclass(frozen=True)
class NodeDecomposition:
    pattern_image: frozenset
    crown: frozenset
    context: frozenset


@dataclass(frozen=True)
class EdgeDecomposition:
    pattern_edges: frozenset
    crown_edges: frozenset
    context_edges: frozenset
    glued_edges: frozenset


def decompose(
    g: Graph, image: Iterable[NodeId], pattern_edges: Iterable[Edge] = ()
) -> tuple[NodeDecomposition, EdgeDecomposition]:
    """Split nodes into image/crown/context and edges into the four edge classes.

    ``pattern_edges`` are the images of the pattern's edges under the matching;
    without it every edge between image nodes is counted as glued.
    """
    image = frozenset(image)
    for n in image:
        if n not in g:
            raise NodeNotInGraph(f"node {n!r} is not in the graph")
    pattern_edges = frozenset(pattern_edges)
    stray = pattern_edges - g.edge_set
    if stray:
        raise ValueError(f"pattern edges not in graph: {sorted(stray)}")
    crown = set()
    for s, _, t in g.edge_set:
        if s in image and t not in image:
            crown.add(t)
        elif t in image and s not in image:
            crown.add(s)
    context = frozenset(g.nodes) - image - crown
    glued, crown_edges, context_edges = set(), set(), set()
    for edge in g.edge_set:
        s, _, t = edge
        if s in image and t in image:
            if edge not in pattern_edges:
                glued.add(edge)
        elif s in image or t in image:
            crown_edges.add(edge)
        else:
            context_edges.add(edge)
    for edge in pattern_edges:
        if not (edge[0] in image and edge[2] in image):
            raise ValueError(f"pattern edge {edge} leaves the image")
    return (
        NodeDecomposition(image, frozenset(crown), context),
        EdgeDecomposition(pattern_edges, frozenset(crown_edges), frozenset(context_edges), frozenset(glued)),
    )
