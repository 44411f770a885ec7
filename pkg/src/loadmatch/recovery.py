"""Iterative matching by descending load intervals, with its audit tools.

Round k of the algorithm enumerates every full matching extending the
partial matching built so far, scores each by how many vertices of its
intersection graph carry a load in the round's interval, keeps the best,
and locks in those vertices. Enumeration is factorial, so the driver is
guarded to desk-scale inputs; intersection graphs repeat heavily across
candidate matchings and their load profiles are cached.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .balance import LoadProfile, balanced_loads, ft_value
from .corrmodel import ModelParams, PosteriorTable, posterior_exact
from .errors import SizeMismatchError, TooLargeError
from .graphs import Graph, VertexSet, vertex_set
from .intersect import Matching, PartialMatching, intersection_graph

_SNAP_DEN = 10**6


def snap(x: float) -> Fraction:
    """Snap a real threshold to a fraction with denominator 10^6."""
    return Fraction(round(x * _SNAP_DEN), _SNAP_DEN)


@dataclass(frozen=True)
class AlgoConfig:
    """Interval schedule and guards for the iterative matcher."""

    alpha: float
    epsilon: float
    eta: float
    a_bound: float
    rounds: int                      # N; intervals are numbered 0..N
    intervals: Tuple[Tuple[Fraction, Optional[Fraction]], ...]  # [lo, hi), hi None = +inf
    n_max: int = 8

    @staticmethod
    def make(
        alpha: float,
        epsilon: float,
        eta: float,
        a_bound: float,
        n_max: int = 8,
    ) -> "AlgoConfig":
        if epsilon <= 0 or eta <= 0:
            raise ValueError("epsilon and eta must be positive")
        base = a_bound / eta
        floor_val = 1.0 / alpha + epsilon
        if base <= floor_val:
            raise ValueError("A/eta must exceed 1/alpha + epsilon")
        import math

        n_rounds = int(math.ceil((base - floor_val) / eta))
        endpoints = [snap(base - k * eta) for k in range(n_rounds)]
        lowest = snap(floor_val)
        if lowest >= endpoints[-1]:
            raise ValueError("interval schedule degenerated; decrease eta")
        intervals: List[Tuple[Fraction, Optional[Fraction]]] = [(endpoints[0], None)]
        for k in range(1, n_rounds):
            intervals.append((endpoints[k], endpoints[k - 1]))
        intervals.append((lowest, endpoints[-1]))
        return AlgoConfig(alpha, epsilon, eta, a_bound, n_rounds, tuple(intervals), n_max)

    @staticmethod
    def from_params(params: ModelParams, epsilon: float, eta: float, n_max: int = 8):
        return AlgoConfig.make(params.alpha, epsilon, eta, params.A, n_max)

    def contains(self, k: int, value: Fraction) -> bool:
        lo, hi = self.intervals[k]
        return value >= lo and (hi is None or value < hi)


@dataclass(frozen=True)
class RoundRecord:
    k: int
    chosen_image: Tuple[int, ...]
    fresh: VertexSet          # V_k
    matched: VertexSet        # U_k


@dataclass(frozen=True)
class RecoveryResult:
    u_n: VertexSet
    pi_tilde: PartialMatching
    trace: Tuple[RoundRecord, ...]
    diagnostics: Tuple[str, ...] = ()


class _ProfileCache:
    """Memoizes load profiles by intersection-graph edge set."""

    def __init__(self):
        self._store: Dict[frozenset, LoadProfile] = {}

    def profile(self, g: Graph) -> LoadProfile:
        key = g.edges
        hit = self._store.get(key)
        if hit is None:
            hit = balanced_loads(g)
            self._store[key] = hit
        return hit


def _extensions(n: int, fixed: Dict[int, int]):
    """All full matchings extending `fixed`, in lexicographic image order."""
    free_dom = [i for i in range(n) if i not in fixed]
    used = set(fixed.values())
    free_img = [j for j in range(n) if j not in used]
    base = [-1] * n
    for i, j in fixed.items():
        base[i] = j
    for perm in itertools.permutations(free_img):
        image = base[:]
        for i, j in zip(free_dom, perm):
            image[i] = j
        yield tuple(image)


def iterative_matching(g1: Graph, g2: Graph, cfg: AlgoConfig) -> RecoveryResult:
    """Run the full interval schedule and return the accumulated matching.

    Each round selects, among all extensions of the current partial
    matching, the one whose intersection-graph load profile puts the most
    vertices into the round's interval. Ties prefer the smaller fresh set
    (by cardinality, then lexicographic members) and then the
    lexicographically smallest image array, making the run deterministic.
    """
    n = g1.n
    if g2.n != n:
        raise SizeMismatchError("graphs must share a vertex count")
    if n > cfg.n_max:
        raise TooLargeError(f"enumeration guard: n = {n} exceeds n_max = {cfg.n_max}")
    cache = _ProfileCache()
    fixed: Dict[int, int] = {}
    matched: VertexSet = ()
    trace: List[RoundRecord] = []
    diagnostics: List[str] = []

    for k in range(cfg.rounds + 1):
        best_key = None
        best_image = None
        best_fresh: VertexSet = ()
        for image in _extensions(n, fixed):
            pi = Matching(image)
            h = intersection_graph(g1, g2, pi)
            profile = cache.profile(h)
            fresh = tuple(
                v for v in range(n) if cfg.contains(k, profile.loads[v])
            )
            key = (-len(fresh), fresh, image)
            if best_key is None or key < best_key:
                best_key = key
                best_image = image
                best_fresh = fresh
        overlap_prev = set(best_fresh) & set(matched)
        if overlap_prev:
            diagnostics.append(
                f"round {k}: fresh set intersects earlier rounds at {sorted(overlap_prev)}"
            )
        if k == 0:
            h0 = intersection_graph(g1, g2, Matching(best_image))
            bound = len(h0.edges) * cfg.eta / cfg.a_bound
            if len(best_fresh) > bound:
                diagnostics.append(
                    f"round 0: |V_0| = {len(best_fresh)} exceeds the mass bound {bound:.3f}"
                )
        fresh_new = tuple(v for v in best_fresh if v not in overlap_prev)
        matched = tuple(sorted(set(matched) | set(fresh_new)))
        for v in fresh_new:
            fixed[v] = best_image[v]
        trace.append(RoundRecord(k, best_image, fresh_new, matched))

    return RecoveryResult(
        matched,
        PartialMatching(n, tuple(sorted(fixed.items()))),
        tuple(trace),
        tuple(diagnostics),
    )


def overlap(pi1: Matching, pi2: Matching) -> int:
    """Number of coordinates where the two matchings agree."""
    if pi1.n != pi2.n:
        raise SizeMismatchError("matchings differ in size")
    return sum(1 for a, b in zip(pi1.image, pi2.image) if a == b)


def heavy_light_sets(
    pi_star: Matching, g1: Graph, g2: Graph, alpha: float, eps: float
) -> Tuple[VertexSet, VertexSet]:
    """Vertices with true-intersection load >= 1/alpha + eps, resp. <= 1/alpha - eps."""
    h = intersection_graph(g1, g2, pi_star)
    profile = balanced_loads(h)
    hi = snap(1.0 / alpha + eps)
    lo = snap(1.0 / alpha - eps)
    heavy = tuple(v for v in range(g1.n) if profile.loads[v] >= hi)
    light = tuple(v for v in range(g1.n) if profile.loads[v] <= lo)
    return heavy, light


def correct_set(result: RecoveryResult, pi_star: Matching) -> VertexSet:
    """Matched vertices whose image agrees with the true matching."""
    mapping = result.pi_tilde.as_dict()
    return tuple(sorted(v for v in result.u_n if mapping[v] == pi_star.image[v]))


def near_maximizer_gap(
    pi_star: Matching,
    g1: Graph,
    g2: Graph,
    u_cor: Sequence[int],
    u_heavy: Sequence[int],
    alpha_eps: Fraction,
) -> Fraction:
    """f(U_cor union U_heavy) - f(U_cor) at threshold alpha_eps on the true intersection.

    Non-negative whenever u_heavy is the exact load level set at
    1/alpha_eps, by the superset property of level sets.
    """
    h = intersection_graph(g1, g2, pi_star)
    t = Fraction(alpha_eps)
    both = vertex_set(tuple(u_cor) + tuple(u_heavy), g1.n)
    return ft_value(h, t, both) - ft_value(h, t, vertex_set(u_cor, g1.n))


def bayes_optimal_estimate(
    g1: Graph, g2: Graph, params: ModelParams
) -> Tuple[Matching, float]:
    """Greedy posterior-marginal matching and its expected overlap.

    Builds the matrix of posterior marginals M[i][j] = Pr(pi(i) = j),
    solves a maximum-weight assignment on it, and reports the attained
    sum of marginals, which is the expected overlap with the hidden
    matching.
    """
    import numpy as np
    from scipy.optimize import linear_sum_assignment

    table = posterior_exact(g1, g2, params)
    n = g1.n
    marginal = np.zeros((n, n))
    for image, w in table.weights.items():
        for i, j in enumerate(image):
            marginal[i, j] += w
    rows, cols = linear_sum_assignment(marginal, maximize=True)
    image = [0] * n
    for i, j in zip(rows, cols):
        image[int(i)] = int(j)
    expected = float(sum(marginal[i, image[i]] for i in range(n)))
    return Matching(tuple(image)), expected


def marginal_matrix(table: PosteriorTable, n: int):
    import numpy as np

    marginal = np.zeros((n, n))
    for image, w in table.weights.items():
        for i, j in enumerate(image):
            marginal[i, j] += w
    return marginal
