"""Exact balanced loads via flow-based density decomposition.

The load of a vertex is the total edge mass it receives under any
balanced allocation (an assignment of each edge's unit mass to its two
endpoints in which no mass flows toward a strictly heavier endpoint).
The induced load function is unique and piecewise constant on the blocks
of the density decomposition: the level set {load >= 1/t} is the
maximum-cardinality maximizer of f_t(U) = t|E(U)| - |U|, which this
module extracts from the maximal source side of a min cut.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Tuple

from .errors import (
    DomainMismatchError,
    InvariantViolationError,
    NonPositiveEpsilonError,
    NonPositiveThresholdError,
    ThresholdOrderError,
)
from .farey import largest_satisfying_fraction
from .flow import UNBOUNDED, FlowNetwork, solve_max_flow
from .graphs import Graph, VertexSet, connected_components, vertex_set

DirectedEdge = Tuple[int, int]


@dataclass(frozen=True)
class LoadProfile:
    """Per-vertex loads plus the blocks of the density decomposition."""

    loads: Tuple[Fraction, ...]
    blocks: Tuple[Tuple[Fraction, VertexSet], ...]

    def validate(self, g: Graph) -> None:
        if len(self.loads) != g.n:
            raise InvariantViolationError("load vector length mismatch")
        if sum(self.loads, Fraction(0)) != g.num_edges:
            raise InvariantViolationError("loads do not sum to the edge count")
        seen: set = set()
        prev: Optional[Fraction] = None
        for density, members in self.blocks:
            if prev is not None and density >= prev:
                raise InvariantViolationError("block densities must strictly decrease")
            prev = density
            for v in members:
                if v in seen:
                    raise InvariantViolationError(f"vertex {v} in two blocks")
                seen.add(v)
                if self.loads[v] != density:
                    raise InvariantViolationError(f"vertex {v} load differs from block density")
            if density.denominator > max(g.n, 1):
                raise InvariantViolationError("block denominator exceeds vertex count")
        if len(seen) != g.n:
            raise InvariantViolationError("blocks do not cover all vertices")

    def max_load(self) -> Fraction:
        return self.blocks[0][0] if self.blocks else Fraction(0)


@dataclass(frozen=True)
class Allocation:
    """Split of each edge's unit mass between its endpoints.

    theta[(x, y)] is the share pushed from x toward y; the two directions
    of every edge sum to one.
    """

    theta: Dict[DirectedEdge, Fraction]

    def load(self, v: int) -> Fraction:
        return sum((q for (x, y), q in self.theta.items() if y == v), Fraction(0))


def ft_value(g: Graph, t: Fraction, members: Iterable[int]) -> Fraction:
    """t * |E(U)| - |U| for the induced subgraph on U."""
    t = Fraction(t)
    if t <= 0:
        raise NonPositiveThresholdError("t must be positive")
    u = vertex_set(members, g.n)
    inside = set(u)
    m_u = sum(1 for (i, j) in g.edges if i in inside and j in inside)
    return t * m_u - len(u)


def _edge_gadget_level_set(g: Graph, t: Fraction) -> VertexSet:
    """Maximum-cardinality maximizer of f_t via one max-flow solve.

    Network: source -> edge node (capacity a), edge node -> both endpoint
    nodes (unbounded), vertex node -> sink (capacity b), where t = a/b in
    lowest terms. The vertex nodes on the maximal source side of a min cut
    form the desired set.
    """
    a, b = t.numerator, t.denominator
    m = g.num_edges
    if m == 0:
        return ()
    source = 0
    sink = m + g.n + 1
    arcs: List[Tuple[int, int, object]] = []
    for k, (i, j) in enumerate(g.sorted_edges):
        node = 1 + k
        arcs.append((source, node, a))
        arcs.append((node, 1 + m + i, UNBOUNDED))
        arcs.append((node, 1 + m + j, UNBOUNDED))
    for v in range(g.n):
        arcs.append((1 + m + v, sink, b))
    cut = solve_max_flow(FlowNetwork(m + g.n + 2, source, sink, tuple(arcs)))
    return tuple(sorted(v for v in range(g.n) if (1 + m + v) in cut.source_side_max))


def ft_max_set(g: Graph, t: Fraction) -> VertexSet:
    """The maximizer of f_t over all vertex subsets, largest one on ties.

    Equals the load level set {x : load(x) >= 1/t}.
    """
    t = Fraction(t)
    if t <= 0:
        raise NonPositiveThresholdError("t must be positive")
    return _edge_gadget_level_set(g, t)


def _component_blocks(g: Graph, comp: VertexSet) -> List[Tuple[Fraction, VertexSet]]:
    """Blocks of one connected component, densest first, in original labels."""
    from .graphs import induced_subgraph

    sub, labels = induced_subgraph(g, comp)
    n_c, m_c = sub.n, sub.num_edges
    if m_c == 0:
        return [(Fraction(0), comp)]

    blocks: List[Tuple[Fraction, VertexSet]] = []
    covered: set = set()
    upper: Optional[Fraction] = None
    while len(covered) < n_c:
        need = len(covered)
        bound = upper

        def bigger_level_set(a: int, b: int) -> bool:
            rho = Fraction(a, b)
            if bound is not None and rho >= bound:
                return False
            if rho == 0:
                return True
            return len(_edge_gadget_level_set(sub, 1 / rho)) > need

        rho = largest_satisfying_fraction(bigger_level_set, n_c, max_num=m_c)
        if rho == 0:
            raise InvariantViolationError("zero density inside a component with edges")
        level = _edge_gadget_level_set(sub, 1 / rho)
        fresh = tuple(sorted(set(level) - covered))
        if not fresh:
            raise InvariantViolationError("density search produced no new vertices")
        blocks.append((rho, tuple(labels[v] for v in fresh)))
        covered.update(level)
        upper = rho
    return blocks


def _search_profile(g: Graph) -> LoadProfile:
    """Ground-up exact profile: monotone fraction search per component.

    Repeatedly locates the largest remaining density (a fraction with
    denominator at most the component size) by Stern-Brocot search over
    the level-set oracle, peels off its level set, and continues below
    it. Blocks of equal density from different components are merged.
    """
    per_density: Dict[Fraction, List[int]] = {}
    for comp in connected_components(g):
        for density, members in _component_blocks(g, comp):
            per_density.setdefault(density, []).extend(members)

    loads: List[Fraction] = [Fraction(0)] * g.n
    blocks: List[Tuple[Fraction, VertexSet]] = []
    for density in sorted(per_density, reverse=True):
        members = tuple(sorted(per_density[density]))
        blocks.append((density, members))
        for v in members:
            loads[v] = density
    profile = LoadProfile(tuple(loads), tuple(blocks))
    profile.validate(g)
    return profile


_CERTIFY_MIN_N = 64
_CERTIFY_SWEEP_TOL = 1e-11


def _certified_profile(g: Graph) -> Optional[LoadProfile]:
    """Propose the profile from tight relaxation sweeps, then certify it.

    Certification is exact: each distinct proposed density must reproduce
    its level set through the flow oracle (which proves every vertex of
    the set has at least that load), and the proposed loads must add up
    to the edge count (which forces equality vertex by vertex). On any
    mismatch the caller falls back to the ground-up search.
    """
    import numpy as np

    from .errors import NonConvergenceError
    from .sweeps import approx_loads, snap_loads

    if g.num_edges == 0:
        if g.n == 0:
            return LoadProfile((), ())
        zero = Fraction(0)
        return LoadProfile((zero,) * g.n, ((zero, tuple(range(g.n))),))
    edges = np.array(g.sorted_edges, dtype=np.int64)
    try:
        raw = approx_loads(g.n, edges, tol=_CERTIFY_SWEEP_TOL)
    except NonConvergenceError:
        return None
    proposal = snap_loads(raw, g.n, tol=1e-6)
    if any(not isinstance(x, Fraction) for x in proposal):
        return None
    grouped: Dict[Fraction, List[int]] = {}
    for v, q in enumerate(proposal):
        grouped.setdefault(q, []).append(v)
    densities = sorted(grouped, reverse=True)
    if sum((q * len(grouped[q]) for q in densities), Fraction(0)) != g.num_edges:
        return None
    level: List[int] = []
    for q in densities:
        level.extend(grouped[q])
        if q == 0:
            continue
        if _edge_gadget_level_set(g, 1 / q) != tuple(sorted(level)):
            return None
    blocks = tuple((q, tuple(sorted(grouped[q]))) for q in densities)
    profile = LoadProfile(tuple(proposal), blocks)
    profile.validate(g)
    return profile


def balanced_loads(g: Graph, method: str = "auto") -> LoadProfile:
    """Exact per-vertex balanced loads and the block decomposition.

    method "search" runs the pure monotone fraction search; "certified"
    proposes blocks from relaxation sweeps and proves them with one flow
    solve per density plus load conservation, falling back to the search
    on any mismatch; "auto" picks certified for large graphs.
    """
    if method not in ("auto", "search", "certified"):
        raise ValueError(f"unknown method {method!r}")
    if method == "search" or (method == "auto" and g.n < _CERTIFY_MIN_N):
        return _search_profile(g)
    profile = _certified_profile(g)
    if profile is None:
        profile = _search_profile(g)
    return profile


def max_balanced_load(g: Graph) -> Fraction:
    """Largest balanced load, i.e. the top block density, without the rest.

    On large graphs the candidate comes from relaxation sweeps and is
    certified by two flow solves: its level set must be nonempty and the
    level set at the next representable density must be empty.
    """
    if g.num_edges == 0:
        return Fraction(0)
    if g.n >= _CERTIFY_MIN_N:
        top = _certified_max_load(g)
        if top is not None:
            return top
    best = Fraction(0)
    from .graphs import induced_subgraph

    for comp in connected_components(g):
        sub, _ = induced_subgraph(g, comp)
        if sub.num_edges == 0:
            continue

        def nonempty(a: int, b: int, _g=sub) -> bool:
            rho = Fraction(a, b)
            if rho == 0:
                return True
            return len(_edge_gadget_level_set(_g, 1 / rho)) > 0

        rho = largest_satisfying_fraction(nonempty, sub.n, max_num=sub.num_edges)
        best = max(best, rho)
    return best


def _certified_max_load(g: Graph) -> Optional[Fraction]:
    import numpy as np

    from .errors import NonConvergenceError
    from .farey import farey_successor
    from .sweeps import approx_loads

    edges = np.array(g.sorted_edges, dtype=np.int64)
    try:
        raw = approx_loads(g.n, edges, tol=_CERTIFY_SWEEP_TOL)
    except NonConvergenceError:
        return None
    guess = Fraction(float(raw.max())).limit_denominator(g.n)
    if guess <= 0:
        return None
    if not _edge_gadget_level_set(g, 1 / guess):
        return None
    above = farey_successor(guess, g.n)
    if _edge_gadget_level_set(g, 1 / above):
        return None
    return guess


def load_level_set(profile: LoadProfile, threshold: Fraction, strict: bool = False) -> VertexSet:
    """Vertices with load >= threshold (or > threshold when strict)."""
    threshold = Fraction(threshold)
    out = []
    for density, members in profile.blocks:
        if density > threshold or (not strict and density == threshold):
            out.extend(members)
    return tuple(sorted(out))


def is_balanced(g: Graph, alloc: Allocation):
    """Check the no-flow-toward-heavier condition on every directed edge.

    Returns (True, None) or (False, witness) where the witness is the
    offending directed edge (x, y) with load(x) < load(y) but theta > 0.
    """
    dirs = set()
    for (i, j) in g.edges:
        dirs.add((i, j))
        dirs.add((j, i))
    if set(alloc.theta) != dirs:
        raise DomainMismatchError("allocation domain differs from the directed edges")
    loads = [Fraction(0)] * g.n
    for (x, y), q in alloc.theta.items():
        if q < 0 or q > 1:
            raise DomainMismatchError(f"theta({x}->{y}) = {q} outside [0, 1]")
        loads[y] += q
    for (i, j) in g.edges:
        if alloc.theta[(i, j)] + alloc.theta[(j, i)] != 1:
            raise DomainMismatchError(f"edge ({i}, {j}) mass does not sum to 1")
    for (x, y) in sorted(dirs):
        if loads[x] < loads[y] and alloc.theta[(x, y)] > 0:
            return False, (x, y)
    return True, None


def stability_delta(t: Fraction, r: Fraction, eps: Fraction) -> Fraction:
    """The slack (t - r) * eps / (2 r) from the near-maximizer stability bound."""
    t, r, eps = Fraction(t), Fraction(r), Fraction(eps)
    if not 0 < r < t:
        raise ThresholdOrderError("need 0 < r < t")
    if eps <= 0:
        raise NonPositiveEpsilonError("eps must be positive")
    return (t - r) * eps / (2 * r)


def balanced_allocation(g: Graph, profile: Optional[LoadProfile] = None) -> Allocation:
    """Reconstruct some balanced allocation realizing the load profile.

    Cross-block edges push their whole unit toward the lower-density
    endpoint. Within each block the splits are water-filled by a small
    flow problem so every vertex receives exactly the block density.
    """
    if profile is None:
        profile = balanced_loads(g)
    block_of: Dict[int, int] = {}
    for idx, (_, members) in enumerate(profile.blocks):
        for v in members:
            block_of[v] = idx

    theta: Dict[DirectedEdge, Fraction] = {}
    higher_in: Dict[int, int] = {v: 0 for v in range(g.n)}
    within: Dict[int, List[Tuple[int, int]]] = {}
    for (i, j) in g.sorted_edges:
        bi, bj = block_of[i], block_of[j]
        if bi < bj:  # i is in a denser block; push everything down to j
            theta[(i, j)] = Fraction(1)
            theta[(j, i)] = Fraction(0)
            higher_in[j] += 1
        elif bj < bi:
            theta[(j, i)] = Fraction(1)
            theta[(i, j)] = Fraction(0)
            higher_in[i] += 1
        else:
            within.setdefault(bi, []).append((i, j))

    for idx, (density, members) in enumerate(profile.blocks):
        edges = within.get(idx, [])
        a, b = density.numerator, density.denominator
        if not edges:
            continue
        index = {v: k for k, v in enumerate(members)}
        for v in members:
            if a - b * higher_in[v] < 0:
                raise InvariantViolationError("cross-edge inflow exceeds block density")
        flows = _edge_splits(len(members), edges, index, a, b, higher_in)
        for (i, j), (fi, fj) in flows.items():
            theta[(j, i)] = Fraction(fi, b)
            theta[(i, j)] = Fraction(fj, b)
    return Allocation(theta)


def _edge_splits(nv, edges, index, a, b, higher_in):
    """Integral within-block splits: edge (i, j) ships fi units to i, fj to j.

    Scaled by the density denominator b so the water-filling flow is
    integral: each edge node offers b units, vertex v absorbs exactly
    a - b * higher_in[v].
    """
    m_b = len(edges)
    source, sink = 0, 1 + m_b + nv
    head = [[] for _ in range(sink + 1)]
    to: List[int] = []
    cap: List[int] = []

    def add(u, v, c):
        head[u].append(len(to)); to.append(v); cap.append(c)
        head[v].append(len(to)); to.append(u); cap.append(0)

    edge_arc = {}
    for k, (i, j) in enumerate(edges):
        add(source, 1 + k, b)
        edge_arc[(i, j)] = len(to)
        add(1 + k, 1 + m_b + index[i], b)
        add(1 + k, 1 + m_b + index[j], b)
    members = sorted(index, key=index.get)
    for v in members:
        add(1 + m_b + index[v], sink, a - b * higher_in[v])

    # plain BFS augmentation (tiny networks, exactness is what matters)
    from collections import deque

    total = 0
    while True:
        parent_arc = [-1] * (sink + 1)
        parent_arc[source] = -2
        queue = deque([source])
        while queue and parent_arc[sink] == -1:
            u = queue.popleft()
            for eid in head[u]:
                v = to[eid]
                if cap[eid] > 0 and parent_arc[v] == -1:
                    parent_arc[v] = eid
                    queue.append(v)
        if parent_arc[sink] == -1:
            break
        push = None
        v = sink
        while v != source:
            eid = parent_arc[v]
            push = cap[eid] if push is None else min(push, cap[eid])
            v = to[eid ^ 1]
        v = sink
        while v != source:
            eid = parent_arc[v]
            cap[eid] -= push
            cap[eid ^ 1] += push
            v = to[eid ^ 1]
        total += push
    if total != b * m_b:
        raise InvariantViolationError("within-block water-filling is infeasible")
    out = {}
    for (i, j) in edges:
        base = edge_arc[(i, j)]
        fi = b - cap[base]          # shipped toward i
        fj = b - cap[base + 2]      # shipped toward j
        out[(i, j)] = (fi, fj)
    return out


def profile_to_text(profile: LoadProfile) -> str:
    """Serialize: a loads section "vertex num/den" and a block table."""
    lines = [f"loads {len(profile.loads)}"]
    for v, q in enumerate(profile.loads):
        lines.append(f"{v} {q.numerator}/{q.denominator}")
    lines.append(f"blocks {len(profile.blocks)}")
    for density, members in profile.blocks:
        cols = " ".join(str(v) for v in members)
        lines.append(f"{density.numerator}/{density.denominator} {cols}".rstrip())
    return "\n".join(lines) + "\n"


def profile_from_text(text: str) -> LoadProfile:
    lines = [ln for ln in (raw.strip() for raw in text.splitlines()) if ln]
    if not lines or not lines[0].startswith("loads "):
        raise ValueError("bad profile header")
    n = int(lines[0].split()[1])
    loads = []
    for ln in lines[1 : 1 + n]:
        v, q = ln.split()
        num, den = q.split("/")
        if int(v) != len(loads):
            raise ValueError("loads out of order")
        loads.append(Fraction(int(num), int(den)))
    bhead = lines[1 + n]
    if not bhead.startswith("blocks "):
        raise ValueError("bad block header")
    k = int(bhead.split()[1])
    blocks = []
    for ln in lines[2 + n : 2 + n + k]:
        parts = ln.split()
        num, den = parts[0].split("/")
        blocks.append((Fraction(int(num), int(den)), tuple(int(x) for x in parts[1:])))
    return LoadProfile(tuple(loads), tuple(blocks))
