"""Integer max-flow / min-cut with extremal cut extraction.

The solver reports, along with the flow value, both canonical minimum
cuts: the minimal source side (nodes reachable from the source in the
residual network) and the maximal source side (complement of the nodes
that can still reach the sink). Both sets are independent of which
maximum flow the underlying engine happens to find, so results are
deterministic even across engines.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, Sequence, Tuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_flow as _scipy_maximum_flow

from .errors import CapacityOverflowError, UnboundedFlowError

UNBOUNDED = float("inf")

_INT64_LIMIT = 2**62
# below this many nodes the pure-Python engine beats the csr construction cost
_SMALL_NET_NODES = 120


@dataclass(frozen=True)
class FlowNetwork:
    num_nodes: int
    source: int
    sink: int
    arcs: Tuple[Tuple[int, int, object], ...]

    def __post_init__(self):
        if self.source == self.sink:
            raise ValueError("source and sink must differ")
        for node in (self.source, self.sink):
            if not (0 <= node < self.num_nodes):
                raise ValueError(f"terminal {node} out of range")
        for (u, v, c) in self.arcs:
            if not (0 <= u < self.num_nodes and 0 <= v < self.num_nodes):
                raise ValueError(f"arc ({u}, {v}) out of range")
            if c != UNBOUNDED and (not isinstance(c, (int, np.integer)) or c < 0):
                raise ValueError(f"arc ({u}, {v}) has invalid capacity {c!r}")


@dataclass(frozen=True)
class CutResult:
    flow_value: int
    source_side_min: FrozenSet[int]
    source_side_max: FrozenSet[int]


def _merged_arcs(net: FlowNetwork) -> Dict[Tuple[int, int], object]:
    merged: Dict[Tuple[int, int], object] = {}
    for (u, v, c) in net.arcs:
        if u == v or c == 0:
            continue
        prev = merged.get((u, v), 0)
        merged[(u, v)] = UNBOUNDED if (c == UNBOUNDED or prev == UNBOUNDED) else prev + c
    return merged


def solve_max_flow(net: FlowNetwork) -> CutResult:
    """Exact max flow with minimal and maximal source-side min cuts."""
    merged = _merged_arcs(net)

    # an s-t path through unbounded arcs only means the value is infinite
    unbounded_adj: Dict[int, list] = {}
    for (u, v), c in merged.items():
        if c == UNBOUNDED:
            unbounded_adj.setdefault(u, []).append(v)
    seen = {net.source}
    queue = deque([net.source])
    while queue:
        u = queue.popleft()
        for v in unbounded_adj.get(u, ()):
            if v == net.sink:
                raise UnboundedFlowError("unbounded-capacity source-to-sink path")
            if v not in seen:
                seen.add(v)
                queue.append(v)

    total_finite = sum(int(c) for c in merged.values() if c != UNBOUNDED)
    if total_finite >= _INT64_LIMIT:
        raise CapacityOverflowError(f"total capacity {total_finite} exceeds the 64-bit budget")
    sentinel = total_finite + 1

    arcs = [
        (u, v, sentinel if c == UNBOUNDED else int(c))
        for (u, v), c in sorted(merged.items())
    ]
    if not arcs:
        return CutResult(
            0,
            frozenset({net.source}),
            frozenset(range(net.num_nodes)) - {net.sink},
        )
    if net.num_nodes <= _SMALL_NET_NODES:
        flow_value, residual = _dinic(net.num_nodes, net.source, net.sink, arcs)
    else:
        flow_value, residual = _scipy_flow(net.num_nodes, net.source, net.sink, arcs)

    side_min = _residual_reachable(residual, net.source)
    co_side = _residual_coreachable(residual, net.sink)
    side_max = frozenset(range(net.num_nodes)) - co_side
    return CutResult(int(flow_value), frozenset(side_min), side_max)


def cut_capacity(net: FlowNetwork, source_side: Iterable[int]) -> object:
    """Capacity of the cut (S, V \\ S); UNBOUNDED if an unbounded arc crosses."""
    side = set(source_side)
    total = 0
    for (u, v), c in _merged_arcs(net).items():
        if u in side and v not in side:
            if c == UNBOUNDED:
                return UNBOUNDED
            total += int(c)
    return total


# -- engines -----------------------------------------------------------------


def _scipy_flow(n: int, s: int, t: int, arcs: Sequence[Tuple[int, int, int]]):
    rows = np.fromiter((a[0] for a in arcs), dtype=np.int64, count=len(arcs))
    cols = np.fromiter((a[1] for a in arcs), dtype=np.int64, count=len(arcs))
    caps = np.fromiter((a[2] for a in arcs), dtype=np.int64, count=len(arcs))
    graph = csr_matrix((caps, (rows, cols)), shape=(n, n))
    result = _scipy_maximum_flow(graph, s, t)
    flow = result.flow
    residual: Dict[int, list] = {}
    # forward residual where capacity is not saturated, backward where flow runs
    fr = flow.tocoo()
    capmap = {(u, v): c for (u, v, c) in arcs}
    seen_pairs = set()
    for u, v, f in zip(fr.row, fr.col, fr.data):
        u, v, f = int(u), int(v), int(f)
        seen_pairs.add((u, v))
        c = capmap.get((u, v), 0)
        if c - f > 0:
            residual.setdefault(u, []).append(v)
    for (u, v), c in capmap.items():
        if (u, v) not in seen_pairs and c > 0:
            residual.setdefault(u, []).append(v)
    return int(result.flow_value), residual


def _dinic(n: int, s: int, t: int, arcs: Sequence[Tuple[int, int, int]]):
    head: list = [[] for _ in range(n)]
    to: list = []
    cap: list = []

    def add(u, v, c):
        head[u].append(len(to)); to.append(v); cap.append(c)
        head[v].append(len(to)); to.append(u); cap.append(0)

    for (u, v, c) in arcs:
        add(u, v, c)

    flow = 0
    while True:
        level = [-1] * n
        level[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for eid in head[u]:
                v = to[eid]
                if cap[eid] > 0 and level[v] < 0:
                    level[v] = level[u] + 1
                    queue.append(v)
        if level[t] < 0:
            break
        it = [0] * n

        def dfs(u, pushed):
            if u == t:
                return pushed
            while it[u] < len(head[u]):
                eid = head[u][it[u]]
                v = to[eid]
                if cap[eid] > 0 and level[v] == level[u] + 1:
                    got = dfs(v, min(pushed, cap[eid]))
                    if got:
                        cap[eid] -= got
                        cap[eid ^ 1] += got
                        return got
                it[u] += 1
            return 0

        while True:
            pushed = dfs(s, float("inf"))
            if not pushed:
                break
            flow += pushed

    residual: Dict[int, list] = {}
    for eid in range(len(to)):
        if cap[eid] > 0:
            residual.setdefault(to[eid ^ 1], []).append(to[eid])
    return flow, residual


def _residual_reachable(residual: Dict[int, list], s: int):
    seen = {s}
    queue = deque([s])
    while queue:
        u = queue.popleft()
        for v in residual.get(u, ()):
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return seen


def _residual_coreachable(residual: Dict[int, list], t: int):
    back: Dict[int, list] = {}
    for u, vs in residual.items():
        for v in vs:
            back.setdefault(v, []).append(u)
    seen = {t}
    queue = deque([t])
    while queue:
        u = queue.popleft()
        for v in back.get(u, ()):
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return seen
