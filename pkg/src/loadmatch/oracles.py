"""Independent reference implementations used to validate the exact solvers.

The quadratic-minimization load oracle and the subset-enumeration f_t
oracle deliberately share no code with the flow-based machinery; they are
the ground truth that every derived load value in the test suite was
computed from. The admissibility and edge-expansion checkers live here
too since they are standalone structural predicates.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

from .errors import NonConvergenceError, TooLargeError
from .graphs import Graph, VertexSet, connected_components


def loads_qp_oracle(g: Graph, tol: float = 1e-9, max_sweeps: int = 200_000) -> List[float]:
    """Balanced loads by cyclic per-edge rebalancing.

    Minimizes the sum of squared vertex loads: each visit to an edge moves
    its split so the two endpoint loads approach equality, clamped to
    [0, 1]. Stops when the largest per-edge adjustment in a sweep falls
    below tol.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if g.num_edges > 10_000:
        raise TooLargeError("QP oracle is limited to 10^4 edges")
    edges = g.sorted_edges
    share = [0.5] * len(edges)  # share of edge (u, v) handed to v
    load = [0.0] * g.n
    for (u, v), s in zip(edges, share):
        load[v] += s
        load[u] += 1 - s
    worst = math.inf
    for _ in range(max_sweeps):
        worst = 0.0
        for k, (u, v) in enumerate(edges):
            target = share[k] + (load[u] - load[v]) / 2.0
            new = 0.0 if target < 0.0 else (1.0 if target > 1.0 else target)
            delta = new - share[k]
            if delta:
                share[k] = new
                load[v] += delta
                load[u] -= delta
                if abs(delta) > worst:
                    worst = abs(delta)
        if worst < tol:
            return load
    raise NonConvergenceError(
        f"rebalancing stalled after {max_sweeps} sweeps", residual=worst
    )


def ft_bruteforce(g: Graph, t: Fraction):
    """Exhaustive maximization of f_t(U) = t|E(U)| - |U| over all subsets.

    Returns (max value, maximizer); ties resolved by maximum cardinality,
    then lexicographically smallest ascending member list.
    """
    t = Fraction(t)
    if g.n > 20:
        raise TooLargeError("subset enumeration is limited to 20 vertices")
    adj_mask = [0] * g.n
    for (i, j) in g.edges:
        adj_mask[i] |= 1 << j
        adj_mask[j] |= 1 << i
    size = 1 << g.n
    edge_count = [0] * size
    for mask in range(1, size):
        v = (mask & -mask).bit_length() - 1
        rest = mask & (mask - 1)
        edge_count[mask] = edge_count[rest] + (adj_mask[v] & rest).bit_count()

    best_val = Fraction(0)
    best_mask = 0
    for mask in range(size):
        val = t * edge_count[mask] - mask.bit_count()
        if val > best_val:
            best_val, best_mask = val, mask
        elif val == best_val:
            if mask.bit_count() > best_mask.bit_count():
                best_mask = mask
            elif mask.bit_count() == best_mask.bit_count() and _members(mask) < _members(best_mask):
                best_mask = mask
    return best_val, _members(best_mask)


def _members(mask: int) -> VertexSet:
    return tuple(i for i in range(mask.bit_length()) if (mask >> i) & 1)


@dataclass(frozen=True)
class AdmissibilityParams:
    """Thresholds for the four structural admissibility conditions.

    The defaults compute the usual logarithmic scalings from n, but every
    knob can be overridden so the conditions stay meaningful on small
    inputs where log log n collapses.
    """

    c_param: int
    max_degree_cap: float
    d_n: float
    neighborhood_radius: int
    small_subgraph_cap: int
    cycle_count_base: float
    cycle_node_budget: int = 2_000_000
    include_center: bool = True

    @staticmethod
    def defaults(n: int, c_param: int, **overrides) -> "AdmissibilityParams":
        logn = math.log(max(n, 3))
        values = dict(
            c_param=c_param,
            max_degree_cap=logn,
            d_n=logn ** (1.0 / (10 * c_param)),
            neighborhood_radius=2 * c_param + 2,
            small_subgraph_cap=max(int(math.floor(math.log(max(logn, 2.0)))), 2),
            cycle_count_base=logn,
        )
        values.update(overrides)
        return AdmissibilityParams(**values)


def choose_c_param(alpha: float, eps: float) -> int:
    """Smallest integer C with alpha * (1/alpha - eps + 1/C) < 1."""
    if not (0 < alpha <= 1) or eps <= 0:
        raise ValueError("need 0 < alpha <= 1 and eps > 0")
    c = int(math.floor(1.0 / eps)) + 1
    while alpha * (1.0 / alpha - eps + 1.0 / c) >= 1.0:
        c += 1
    return c


@dataclass(frozen=True)
class AdmissibilityResult:
    ok: bool
    first_violation: Optional[str]
    inconclusive: bool = False

    def __bool__(self) -> bool:
        return self.ok and not self.inconclusive


class _CycleBudget(Exception):
    pass


def _short_cycles(g: Graph, max_len: int, budget: List[int]) -> List[Tuple[int, ...]]:
    """All cycles with length in [3, max_len], each found once.

    DFS from each start vertex over paths whose minimum is the start.
    budget is a one-element list of remaining node expansions; exhausting
    it aborts with _CycleBudget.
    """
    cycles = []
    if max_len < 3:
        return cycles
    for start in range(g.n):
        stack = [(start, [start])]
        while stack:
            v, path = stack.pop()
            budget[0] -= 1
            if budget[0] <= 0:
                raise _CycleBudget
            for w in g.adjacency[v]:
                if w == start and len(path) >= 3:
                    if path[1] < path[-1]:  # each orientation once
                        cycles.append(tuple(path))
                elif w > start and w not in path and len(path) < max_len:
                    stack.append((w, path + [w]))
    return cycles


def _ball(g: Graph, center: int, radius: int) -> set:
    seen = {center}
    frontier = [center]
    for _ in range(radius):
        nxt = []
        for v in frontier:
            for w in g.adjacency[v]:
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        frontier = nxt
        if not frontier:
            break
    return seen


def admissibility_check(g: Graph, params: AdmissibilityParams) -> AdmissibilityResult:
    """Evaluate the four admissibility conditions with the given thresholds.

    (i) maximum degree; (ii) enough vertices whose radius-r ball only
    contains low-degree vertices; (iii) no connected subgraph below the
    small cap carries two independent cycles; (iv) at most base^k cycles
    of each length k >= 3. Cycle enumeration is budgeted; blowing the
    budget yields an inconclusive result, never a pass.
    """
    if g.n == 0:
        return AdmissibilityResult(True, None)
    # (i)
    if any(g.degree(v) > params.max_degree_cap for v in range(g.n)):
        return AdmissibilityResult(False, "max_degree")
    # (ii)
    good = 0
    for v in range(g.n):
        ball = _ball(g, v, params.neighborhood_radius)
        if not params.include_center:
            ball = ball - {v}
        if all(g.degree(w) <= params.d_n for w in ball):
            good += 1
    if good < (1.0 - math.exp(-params.d_n)) * g.n:
        return AdmissibilityResult(False, "low_degree_neighborhoods")
    # (iii) and (iv) both need short cycles
    budget = [params.cycle_node_budget]
    try:
        cap = params.small_subgraph_cap
        short = _short_cycles(g, max(cap - 1, 2), budget)
        if _two_cycles_within(g, short, cap):
            return AdmissibilityResult(False, "two_cycles_in_small_subgraph")
        max_len = max(cap, min(g.n, _iv_max_len(g, params)))
        counted = _short_cycles(g, max_len, budget)
    except _CycleBudget:
        return AdmissibilityResult(False, None, inconclusive=True)
    by_len: dict = {}
    for cyc in counted:
        by_len[len(cyc)] = by_len.get(len(cyc), 0) + 1
    for k, count in sorted(by_len.items()):
        if count > params.cycle_count_base**k:
            return AdmissibilityResult(False, f"cycle_count_len_{k}")
    return AdmissibilityResult(True, None)


def _iv_max_len(g: Graph, params: AdmissibilityParams) -> int:
    # counting all cycles of every length is exponential; check lengths up
    # to a small horizon where the base^k ceiling could still bite
    return max(8, params.small_subgraph_cap + 2)


def _two_cycles_within(g: Graph, cycles: List[Tuple[int, ...]], cap: int) -> bool:
    """Is there a connected subgraph on < cap vertices with two cycles?

    Equivalent formulation: two distinct short cycles whose vertex sets,
    plus a shortest connecting path, fit strictly below the cap.
    """
    sets = [frozenset(c) for c in cycles]
    for a in range(len(sets)):
        for b in range(a + 1, len(sets)):
            union = sets[a] | sets[b]
            if sets[a] & sets[b]:
                if len(union) < cap:
                    return True
                continue
            d, interior = _set_distance(g, sets[a], sets[b], cap)
            if d is not None and len(union) + interior < cap:
                return True
    return False


def _set_distance(g: Graph, src: frozenset, dst: frozenset, cap: int):
    """Shortest path length between two vertex sets and its interior size."""
    dist = {v: 0 for v in src}
    queue = deque(src)
    while queue:
        v = queue.popleft()
        if dist[v] > cap:
            break
        for w in g.adjacency[v]:
            if w not in dist:
                dist[w] = dist[v] + 1
                if w in dst:
                    return dist[w], max(dist[w] - 1, 0)
                queue.append(w)
    return None, 0


@dataclass(frozen=True)
class EventDResult:
    ok: bool
    sampled: bool
    witness: Optional[VertexSet] = None

    def __bool__(self) -> bool:
        return self.ok


def event_d_check(
    g: Graph,
    d_cap: float,
    delta: float,
    samples: int = 100_000,
    seed: int = 0,
) -> EventDResult:
    """Check that every U has at most d_cap |U| + delta n / 2 incident edges.

    An edge is incident to U when at least one endpoint lies in U.
    Exhaustive for n <= 20; otherwise a seeded sample of `samples` random
    subsets is tested and the result is flagged as sampled.
    """
    slack = delta * g.n / 2.0
    if g.n <= 20:
        adj_mask = [0] * g.n
        for (i, j) in g.edges:
            adj_mask[i] |= 1 << j
            adj_mask[j] |= 1 << i
        size = 1 << g.n
        inside = [0] * size  # edges with both endpoints inside the mask
        for mask in range(1, size):
            v = (mask & -mask).bit_length() - 1
            rest = mask & (mask - 1)
            inside[mask] = inside[rest] + (adj_mask[v] & rest).bit_count()
        m = g.num_edges
        full = size - 1
        for mask in range(size):
            touching = m - inside[full ^ mask]
            if touching > d_cap * mask.bit_count() + slack:
                return EventDResult(False, False, _members(mask))
        return EventDResult(True, False)

    import numpy as np

    rng = np.random.default_rng(np.random.Philox(key=seed))
    members = np.arange(g.n)
    edges = np.array(g.sorted_edges, dtype=np.int64) if g.num_edges else np.zeros((0, 2), int)
    for _ in range(samples):
        size = int(rng.integers(1, g.n + 1))
        chosen = rng.choice(members, size=size, replace=False)
        mask = np.zeros(g.n, dtype=bool)
        mask[chosen] = True
        touching = int(np.count_nonzero(mask[edges[:, 0]] | mask[edges[:, 1]])) if len(edges) else 0
        if touching > d_cap * size + slack:
            return EventDResult(False, True, tuple(sorted(int(v) for v in chosen)))
    return EventDResult(True, True)
