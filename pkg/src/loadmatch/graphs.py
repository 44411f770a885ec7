"""Simple undirected graphs with canonical edge storage.

Vertices are 0-indexed integers. Every edge is stored once as a (min, max)
pair, so two graphs are equal iff their vertex counts and edge sets agree.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence, Tuple

from .errors import SelfLoopError, VertexRangeError

Edge = Tuple[int, int]
VertexSet = Tuple[int, ...]


def vertex_set(members: Iterable[int], n: int | None = None) -> VertexSet:
    """Normalize an iterable of vertex ids to a sorted, deduplicated tuple."""
    out = tuple(sorted(set(int(v) for v in members)))
    if out and out[0] < 0:
        raise VertexRangeError(f"negative vertex id {out[0]}")
    if n is not None and out and out[-1] >= n:
        raise VertexRangeError(f"vertex {out[-1]} out of range [0, {n})")
    return out


def canonical_edge(i: int, j: int) -> Edge:
    if i == j:
        raise SelfLoopError(f"self-loop at vertex {i}")
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class Graph:
    """Immutable simple graph on vertices 0..n-1."""

    n: int
    edges: frozenset

    def __post_init__(self):
        if self.n < 0:
            raise VertexRangeError("vertex count must be non-negative")
        for (i, j) in self.edges:
            if i == j:
                raise SelfLoopError(f"self-loop at vertex {i}")
            if not (0 <= i < j < self.n):
                raise VertexRangeError(f"edge ({i}, {j}) not canonical within [0, {self.n})")

    @cached_property
    def adjacency(self) -> Tuple[Tuple[int, ...], ...]:
        adj = [[] for _ in range(self.n)]
        for (i, j) in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        return tuple(tuple(sorted(a)) for a in adj)

    @cached_property
    def sorted_edges(self) -> Tuple[Edge, ...]:
        return tuple(sorted(self.edges))

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def has_edge(self, i: int, j: int) -> bool:
        if i == j:
            return False
        return ((i, j) if i < j else (j, i)) in self.edges

    def vertices(self) -> VertexSet:
        return tuple(range(self.n))

    @staticmethod
    def build(n: int, pairs: Iterable[Sequence[int]]) -> "Graph":
        """Construct a graph, silently dropping duplicate pairs."""
        g, _ = graph_from_edges(n, pairs)
        return g


def graph_from_edges(n: int, pairs: Iterable[Sequence[int]]):
    """Build a Graph from a pair list.

    Returns (graph, dedup_count) where dedup_count is the number of input
    pairs dropped because the same undirected edge appeared earlier.
    """
    if n < 0:
        raise VertexRangeError("vertex count must be non-negative")
    edges = set()
    dups = 0
    for (i, j) in pairs:
        i, j = int(i), int(j)
        if i == j:
            raise SelfLoopError(f"self-loop at vertex {i}")
        if not (0 <= i < n and 0 <= j < n):
            raise VertexRangeError(f"edge ({i}, {j}) out of range [0, {n})")
        e = (i, j) if i < j else (j, i)
        if e in edges:
            dups += 1
        else:
            edges.add(e)
    return Graph(n, frozenset(edges)), dups


def induced_subgraph(g: Graph, members: Iterable[int]):
    """Induced subgraph on a vertex subset, relabeled to 0..|U|-1.

    Vertices are relabeled in ascending order of their original ids; the
    returned map is the tuple of original ids, so map[new_id] = old_id.
    """
    u = vertex_set(members, g.n)
    index = {old: new for new, old in enumerate(u)}
    edges = set()
    for (i, j) in g.edges:
        if i in index and j in index:
            a, b = index[i], index[j]
            edges.add((a, b) if a < b else (b, a))
    return Graph(len(u), frozenset(edges)), u


def connected_components(g: Graph) -> Tuple[VertexSet, ...]:
    """Connected components as sorted vertex tuples, ordered by smallest member."""
    seen = [False] * g.n
    comps = []
    for start in range(g.n):
        if seen[start]:
            continue
        stack = [start]
        seen[start] = True
        comp = []
        while stack:
            v = stack.pop()
            comp.append(v)
            for w in g.adjacency[v]:
                if not seen[w]:
                    seen[w] = True
                    stack.append(w)
        comps.append(tuple(sorted(comp)))
    return tuple(comps)


def _component_edge_count(g: Graph, comp: VertexSet) -> int:
    members = set(comp)
    return sum(1 for (i, j) in g.edges if i in members)  # canonical order: i in comp implies j is too


def tree_components(g: Graph) -> VertexSet:
    """Union of vertex sets of components with |E| = |V| - 1 (trees).

    Isolated vertices count as single-vertex trees.
    """
    out = []
    for comp in connected_components(g):
        inside = set(comp)
        m = sum(1 for (i, j) in g.edges if i in inside and j in inside)
        if m == len(comp) - 1:
            out.extend(comp)
    return tuple(sorted(out))


def two_cores_of_nonsimple_components(g: Graph) -> VertexSet:
    """Union of the maximal 2-cores of components with |E| > |V|.

    Computed by iterative degree-1 peeling restricted to each qualifying
    component.
    """
    out = []
    for comp in connected_components(g):
        inside = set(comp)
        m = sum(1 for (i, j) in g.edges if i in inside and j in inside)
        if m <= len(comp):
            continue
        deg = {v: g.degree(v) for v in comp}
        queue = [v for v in comp if deg[v] <= 1]
        alive = set(comp)
        while queue:
            v = queue.pop()
            if v not in alive:
                continue
            alive.discard(v)
            for w in g.adjacency[v]:
                if w in alive:
                    deg[w] -= 1
                    if deg[w] <= 1:
                        queue.append(w)
        out.extend(alive)
    return tuple(sorted(out))


def parse_edge_list(text: str):
    """Parse the plain edge-list format: first line "n m", then m lines "i j".

    Rejects self-loops; duplicate pairs are deduplicated and counted.
    """
    lines = [ln for ln in (raw.strip() for raw in text.splitlines()) if ln]
    if not lines:
        raise ValueError("empty edge-list input")
    head = lines[0].split()
    if len(head) != 2:
        raise ValueError(f"expected header 'n m', got {lines[0]!r}")
    n, m = int(head[0]), int(head[1])
    if len(lines) - 1 != m:
        raise ValueError(f"header declares {m} edges, found {len(lines) - 1}")
    pairs = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise ValueError(f"bad edge line {ln!r}")
        pairs.append((int(parts[0]), int(parts[1])))
    return graph_from_edges(n, pairs)


def format_edge_list(g: Graph) -> str:
    lines = [f"{g.n} {g.num_edges}"]
    lines.extend(f"{i} {j}" for (i, j) in g.sorted_edges)
    return "\n".join(lines) + "\n"
