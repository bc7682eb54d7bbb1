"""Per-query n-gram graph construction.

Vertices are token phrases, edges mean "the source phrase is followed by
the target phrase somewhere in the corpus". A graph is grown bottom-up from
the keywords (each vertex receives its ``k`` most frequent parent n-grams,
for ``h`` extra hops) and then densified top-down by linking any two
vertices whose joined boundary phrase occurs at least ``x`` times.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Sequence, TextIO

from .corpus import START, Gram, NGramIndex
from .exceptions import GraphEmptyError

KEYWORD = "keyword"
PARENT = "parent-phrase"

BOTTOM_UP = "bottom-up"
TOP_DOWN = "top-down"


@dataclass(frozen=True)
class Vertex:
    id: int
    label: Gram
    kind: str
    depth: int = 0  # bottom-up hop distance from the nearest keyword

    @property
    def text(self) -> str:
        return " ".join(self.label)

    @property
    def is_start(self) -> bool:
        return self.label[0] == START


@dataclass(frozen=True)
class Edge:
    source: int
    target: int
    support: int
    origin: str


@dataclass
class NGramGraph:
    """Directed phrase graph for one keyword query."""

    n: int
    h: int = 0
    k: int = 1
    x: int = 1
    vertices: list[Vertex] = field(default_factory=list)
    edges: dict[tuple[int, int], Edge] = field(default_factory=dict)
    keyword_ids: list[int] = field(default_factory=list)

    def __post_init__(self):
        self._by_label: dict[Gram, int] = {v.label: v.id for v in self.vertices}
        self._children: dict[int, list[int]] = defaultdict(list)
        self._parents: dict[int, list[int]] = defaultdict(list)
        for (u, v) in self.edges:
            self._children[u].append(v)
            self._parents[v].append(u)

    @property
    def params(self) -> dict:
        return {"n": self.n, "h": self.h, "k": self.k, "x": self.x}

    def vertex_id(self, label: Sequence[str]) -> int | None:
        return self._by_label.get(tuple(label))

    def add_vertex(self, label: Sequence[str], kind: str, depth: int = 0) -> int:
        """Add a vertex, or return the id of the one already carrying ``label``."""
        label = tuple(label)
        if not label:
            raise ValueError("vertex label must be non-empty")
        vid = self._by_label.get(label)
        if vid is not None:
            old = self.vertices[vid]
            if kind == KEYWORD and old.kind != KEYWORD:
                self.vertices[vid] = Vertex(vid, label, KEYWORD, 0)
            return vid
        vid = len(self.vertices)
        self.vertices.append(Vertex(vid, label, kind, depth))
        self._by_label[label] = vid
        return vid

    def add_edge(self, source: int, target: int, support: int, origin: str) -> bool:
        if source == target or (source, target) in self.edges:
            return False
        self.edges[(source, target)] = Edge(source, target, support, origin)
        self._children[source].append(target)
        self._parents[target].append(source)
        return True

    def children(self, vid: int) -> list[int]:
        return sorted(self._children.get(vid, ()))

    def parents(self, vid: int) -> list[int]:
        return sorted(self._parents.get(vid, ()))

    def label(self, vid: int) -> Gram:
        return self.vertices[vid].label

    def __len__(self):
        return len(self.vertices)

    def copy(self) -> "NGramGraph":
        return NGramGraph(self.n, self.h, self.k, self.x, list(self.vertices),
                          dict(self.edges), list(self.keyword_ids))

    def dump(self, fh: TextIO) -> None:
        """Write one ``from ⇒ to ⇒ support`` line per edge, in edge-id order."""
        for (u, v) in sorted(self.edges):
            edge = self.edges[(u, v)]
            fh.write(f"{self.vertices[u].text} ⇒ {self.vertices[v].text} ⇒ {edge.support}\n")

    def to_networkx(self):
        """Export as a ``networkx.DiGraph`` (networkx imported lazily)."""
        import networkx as nx

        g = nx.DiGraph()
        for v in self.vertices:
            g.add_node(v.id, label=v.text, kind=v.kind)
        for e in self.edges.values():
            g.add_edge(e.source, e.target, support=e.support, origin=e.origin)
        return g


def bottom_up_expand(index: NGramIndex, keywords: Iterable[Sequence[str]], n: int,
                     h: int, k: int) -> NGramGraph:
    """Attach top-``k`` parent n-grams to every keyword, then to parents, for ``h`` hops.

    A parent n-gram ``g`` of vertex ``v`` ends with ``v``'s first token; the
    new vertex is labelled ``g[:-1]`` so labels concatenate without overlap.
    Vertices whose label starts with the start pad are never expanded.
    """
    if h < 0 or k < 1:
        raise ValueError("need h >= 0 and k >= 1")
    graph = NGramGraph(n=n, h=h, k=k)
    frontier = []
    for kw in keywords:
        vid = graph.add_vertex(kw, KEYWORD)
        if vid not in graph.keyword_ids:
            graph.keyword_ids.append(vid)
            frontier.append(vid)
    expanded: set[int] = set()
    for level in range(h + 1):
        next_frontier = []
        for vid in frontier:
            if vid in expanded:
                continue
            expanded.add(vid)
            label = graph.label(vid)
            if label[0] == START:
                continue
            for gram, count in index.top_parents(label[0], n, k):
                pid = graph.add_vertex(gram[:-1], PARENT, depth=level + 1)
                if graph.add_edge(pid, vid, count, BOTTOM_UP):
                    next_frontier.append(pid)
        frontier = next_frontier
    return graph


def boundary_phrase(u: Sequence[str], v: Sequence[str], n: int) -> Gram:
    """Last ``n-1`` tokens of ``u`` joined to the first ``n-1`` tokens of ``v``."""
    w = n - 1
    return tuple(u[-w:]) + tuple(v[:w])


def top_down_link(index: NGramIndex, graph: NGramGraph, n: int, x: int) -> NGramGraph:
    """Return a copy of ``graph`` with edges between compatible unlinked vertices.

    ``u -> v`` is added when the boundary phrase of the two labels occurs at
    least ``x`` times. Existing edges are kept as they are.
    """
    if x < 1:
        raise ValueError("x must be >= 1")
    out = graph.copy()
    out.x = x
    by_first: dict[str, list[int]] = defaultdict(list)
    for v in out.vertices:
        by_first[v.label[0]].append(v.id)
    bigrams = index.table(2)
    for u in out.vertices:
        last = u.label[-1]
        candidates = []
        for first, vids in by_first.items():
            # cheap reject: the junction bigram has to be frequent enough already
            if bigrams.get((last, first), 0) >= x:
                candidates.extend(vids)
        for vid in sorted(candidates):
            if vid == u.id or (u.id, vid) in out.edges:
                continue
            support = index.phrase_count(boundary_phrase(u.label, out.label(vid), n))
            if support >= x:
                out.add_edge(u.id, vid, support, TOP_DOWN)
    return out


def build_graph(index: NGramIndex, keywords: Iterable[Sequence[str]], n: int = 3,
                h: int = 1, k: int = 5, x: int = 5) -> NGramGraph:
    """Bottom-up expansion followed by top-down linking.

    Raises :class:`GraphEmptyError` when no keyword has any parent in the corpus.
    """
    keywords = [tuple(kw) for kw in keywords]
    if not keywords:
        raise ValueError("keywords must be non-empty")
    if n > index.max_order:
        raise ValueError(f"graph order {n} exceeds index order {index.max_order}")
    partial = bottom_up_expand(index, keywords, n, h, k)
    if not partial.edges:
        words = [" ".join(kw) for kw in keywords]
        raise GraphEmptyError(f"no keyword of {words} occurs in the corpus")
    return top_down_link(index, partial, n, x)


def replay_edge(index: NGramIndex, graph: NGramGraph, edge: Edge) -> bool:
    """Re-derive ``edge`` from the index; True when it is still justified."""
    u, v = graph.label(edge.source), graph.label(edge.target)
    if edge.origin == BOTTOM_UP:
        gram = u + (v[0],)
        return (edge.support >= 1 and index.phrase_count(gram) == edge.support
                and (gram, edge.support) in index.top_parents(v[0], graph.n, graph.k))
    return index.phrase_count(boundary_phrase(u, v, graph.n)) >= graph.x


__all__ = ["Vertex", "Edge", "NGramGraph", "bottom_up_expand", "top_down_link",
           "build_graph", "boundary_phrase", "replay_edge", "KEYWORD", "PARENT",
           "BOTTOM_UP", "TOP_DOWN"]
