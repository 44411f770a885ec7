"""Orbits of vertex pairs under the alignment permutation of two matchings.

Given the true matching and a candidate, the alignment permutation
sigma sends i to the preimage (under the true matching) of the
candidate's image of i; pairs (i, j) then move by coordinatewise
application. Pair orbits are cycles on the full pair universe; on a
restricted universe they break into chains. Edge counts bucketed by
orbit class have exponential moments computable by a 2x2 transfer
matrix, implemented here both as exact dynamic programming and in
two-term closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .errors import (
    NestingViolationError,
    SizeMismatchError,
    UniverseMismatchError,
)
from .graphs import Edge, Graph, VertexSet, vertex_set
from .intersect import Matching, PartialMatching

KIND_CYCLE = "cycle"
KIND_SPECIAL = "special_cycle"
KIND_FREE_CHAIN = "free_chain"
KIND_CONFINED_CHAIN = "confined_chain"


@dataclass(frozen=True)
class Orbit:
    kind: str
    pairs: Tuple[Edge, ...]

    @property
    def length(self) -> int:
        return len(self.pairs)


@dataclass(frozen=True, eq=False)
class OrbitDecomposition:
    n: int
    orbits: Tuple[Orbit, ...]
    census: Dict[int, int]  # complete sigma-cycle length -> vertex count
    universe_size: int

    def pairs_covered(self) -> int:
        return sum(len(o.pairs) for o in self.orbits)


def _sigma_forward(pi_star: Matching, mapping: Dict[int, int]) -> Dict[int, int]:
    inv_star = {j: i for i, j in enumerate(pi_star.image)}
    return {i: inv_star[j] for i, j in mapping.items()}


def _canon(i: int, j: int) -> Edge:
    return (i, j) if i < j else (j, i)


def decompose_orbits(pi_star: Matching, pi: Matching) -> OrbitDecomposition:
    """Decompose the full pair universe into cycles.

    A cycle is special when its two defining vertices sit half a turn
    apart on one even vertex cycle; such orbits are half as long as the
    vertex cycle instead of the usual lcm of the two cycle lengths.
    """
    if pi_star.n != pi.n:
        raise SizeMismatchError("matchings must have equal size")
    n = pi.n
    full = PartialMatching(n, tuple((i, pi.image[i]) for i in range(n)))
    return decompose_orbits_restricted(pi_star, full, (), frozenset(), tuple(range(n)))


def decompose_orbits_restricted(
    pi_star: Matching,
    pi_check: PartialMatching,
    u_prev: Iterable[int],
    e_prev: Iterable[Edge],
    u: Iterable[int],
) -> OrbitDecomposition:
    """Decompose the pairs within u but not within u_prev.

    Cycles fully inside the universe survive; all other orbits become
    chains. A chain is free when neither the image of its last pair nor
    the preimage of its first pair is an edge of e_prev, confined
    otherwise. The result is independent of how pi_check would be
    extended to a full matching.
    """
    n = pi_star.n
    if pi_check.n != n:
        raise SizeMismatchError("partial matching size differs from the matching")
    u = vertex_set(u, n)
    u_prev = vertex_set(u_prev, n)
    dom = set(pi_check.domain)
    if not set(u_prev) <= set(u):
        raise NestingViolationError("u_prev must be contained in u")
    if not set(u) <= dom:
        raise NestingViolationError("u must be contained in the matching domain")
    e_prev = frozenset(_canon(i, j) for (i, j) in e_prev)
    prev_inside = set(u_prev)
    for (i, j) in e_prev:
        if i not in prev_inside or j not in prev_inside:
            raise NestingViolationError("e_prev must consist of pairs within u_prev")

    mapping = pi_check.as_dict()
    sigma = _sigma_forward(pi_star, mapping)          # defined on the domain
    image_positions = {j: i for i, j in mapping.items()}

    def sigma_inv(i: int) -> Optional[int]:
        return image_positions.get(pi_star.image[i])

    inside_u = set(u)
    universe = set()
    for a_idx in range(len(u)):
        for b_idx in range(a_idx + 1, len(u)):
            e = (u[a_idx], u[b_idx])
            if e[0] in prev_inside and e[1] in prev_inside:
                continue
            universe.add(e)

    def succ_raw(e: Edge) -> Edge:
        return _canon(sigma[e[0]], sigma[e[1]])

    def pred_raw(e: Edge) -> Optional[Edge]:
        a, b = sigma_inv(e[0]), sigma_inv(e[1])
        if a is None or b is None:
            return None
        return _canon(a, b)

    def in_universe(e: Optional[Edge]) -> bool:
        return e is not None and e in universe

    orbits: List[Orbit] = []
    visited = set()

    # chains start where the predecessor leaves the universe
    for e in sorted(universe):
        if e in visited:
            continue
        p = pred_raw(e)
        if in_universe(p):
            continue
        chain = [e]
        visited.add(e)
        cur = e
        while True:
            s = succ_raw(cur)
            if not in_universe(s) or s in visited:
                break
            chain.append(s)
            visited.add(s)
            cur = s
        tail_image = succ_raw(chain[-1])
        head_preimage = pred_raw(chain[0])
        confined = (tail_image in e_prev) or (head_preimage is not None and head_preimage in e_prev)
        orbits.append(Orbit(KIND_CONFINED_CHAIN if confined else KIND_FREE_CHAIN, tuple(chain)))

    # what remains are complete cycles
    vertex_cycle = _vertex_cycles(sigma, inside_u)
    for e in sorted(universe):
        if e in visited:
            continue
        cyc = [e]
        visited.add(e)
        cur = succ_raw(e)
        while cur != e:
            cyc.append(cur)
            visited.add(cur)
            cur = succ_raw(cur)
        orbits.append(Orbit(_cycle_kind(e, vertex_cycle), tuple(cyc)))

    census: Dict[int, int] = {}
    fresh = inside_u - prev_inside
    counted = set()
    for v in fresh:
        info = vertex_cycle.get(v)
        if info is None:
            continue
        root, length, _ = info
        census[length] = census.get(length, 0) + 1
    return OrbitDecomposition(n, tuple(orbits), census, len(universe))


def _vertex_cycles(sigma: Dict[int, int], inside_u: set):
    """Complete sigma-cycles inside u: vertex -> (root, length, position)."""
    out: Dict[int, Tuple[int, int, int]] = {}
    seen = set()
    for start in sorted(inside_u):
        if start in seen:
            continue
        walk = [start]
        cur = sigma[start]
        complete = True
        while cur != start:
            if cur not in inside_u:
                complete = False
                break
            walk.append(cur)
            cur = sigma[cur]
        if complete:
            for pos, v in enumerate(walk):
                out[v] = (start, len(walk), pos)
        seen.update(walk)
    return out


def _cycle_kind(e: Edge, vertex_cycle) -> str:
    x, y = e
    ix = vertex_cycle.get(x)
    iy = vertex_cycle.get(y)
    if ix is None or iy is None:
        return KIND_CYCLE
    if ix[0] == iy[0]:
        length = ix[1]
        if length % 2 == 0 and (iy[2] - ix[2]) % length == length // 2:
            return KIND_SPECIAL
    return KIND_CYCLE


@dataclass(frozen=True)
class OrbitCounts:
    """Edge counts of an intersection graph bucketed by orbit class."""

    e_special: int
    e_k: Tuple[int, ...]  # index t-1 holds cycles of length t, t = 1..L
    e_gt_l: int
    e_chain_free: int
    e_chain_confined: int

    @property
    def total(self) -> int:
        return (
            self.e_special + sum(self.e_k) + self.e_gt_l
            + self.e_chain_free + self.e_chain_confined
        )


def orbit_edge_counts(decomp: OrbitDecomposition, h: Graph, depth: int) -> OrbitCounts:
    """Count h-edges in each orbit class, cycle lengths bucketed up to depth."""
    if h.n != decomp.n:
        raise UniverseMismatchError("graph and decomposition disagree on n")
    if depth < 1:
        raise ValueError("depth must be >= 1")
    e_special = 0
    e_k = [0] * depth
    e_gt = 0
    free = 0
    confined = 0
    hedges = h.edges
    for orbit in decomp.orbits:
        hits = sum(1 for e in orbit.pairs if e in hedges)
        if not hits:
            continue
        if orbit.kind == KIND_SPECIAL:
            e_special += hits
        elif orbit.kind == KIND_FREE_CHAIN:
            free += hits
        elif orbit.kind == KIND_CONFINED_CHAIN:
            confined += hits
        elif orbit.length <= depth:
            e_k[orbit.length - 1] += hits
        else:
            e_gt += hits
    return OrbitCounts(e_special, tuple(e_k), e_gt, free, confined)


def constraint_check_Ek(
    counts: OrbitCounts, census: Dict[int, int], u_k_density: Fraction
) -> bool:
    """Running-sum constraint: sum_{t<=k} E_t <= u_k * sum_{t<=k} N_t for all k."""
    u_k = Fraction(u_k_density) if not isinstance(u_k_density, float) else u_k_density
    run_e = 0
    run_n = 0
    for k in range(1, len(counts.e_k) + 1):
        run_e += counts.e_k[k - 1]
        run_n += census.get(k, 0)
        if run_e > u_k * run_n:
            return False
    return True


# -- exponential moments ------------------------------------------------------


def truncation_depth(alpha: float, eps: float) -> int:
    """Cycle-length truncation: floor(1/(1-alpha)), or ceil((2+2eps)/eps) at alpha = 1."""
    if not (0 < alpha <= 1):
        raise ValueError("alpha must lie in (0, 1]")
    if alpha < 1.0:
        return int(math.floor(1.0 / (1.0 - alpha)))
    if eps <= 0:
        raise ValueError("eps must be positive when alpha = 1")
    return int(math.ceil((2.0 + 2.0 * eps) / eps))


def alpha_ladder(alpha: float, depth: int) -> Tuple[float, ...]:
    """Decay exponents: (k-1)/k for k <= depth, then min(alpha, depth/(depth+1))."""
    out = [(k - 1.0) / k for k in range(1, depth + 1)]
    out.append(min(alpha, depth / (depth + 1.0)))
    return tuple(out)


@dataclass(frozen=True)
class MomentParams:
    """Inputs for the transfer-matrix moment of one orbit's edge count."""

    p: float
    s: float
    theta: float
    nu: float
    mu1: float
    mu2: float
    depth: int
    ladder: Tuple[float, ...]

    @staticmethod
    def make(
        p: float,
        s: float,
        theta: float,
        alpha: Optional[float] = None,
        eps: Optional[float] = None,
        depth: Optional[int] = None,
    ) -> "MomentParams":
        if not (0 < p < 1) or not (0 < s <= 1):
            raise ValueError("need 0 < p < 1 and 0 < s <= 1")
        if theta <= 0:
            raise ValueError("theta must be positive")
        nu = math.expm1(theta)
        tr = 1.0 + p * s * s * nu
        det = p * (1.0 - p) * s * s * nu
        disc = tr * tr - 4.0 * det
        root = math.sqrt(disc)
        mu1 = (tr + root) / 2.0
        mu2 = (tr - root) / 2.0
        if depth is None:
            if alpha is None:
                depth = 1
            else:
                depth = truncation_depth(alpha, eps if eps is not None else 0.1)
        ladder = alpha_ladder(alpha if alpha is not None else 1.0, depth)
        params = MomentParams(p, s, theta, nu, mu1, mu2, depth, ladder)
        assert params.mu1 > params.mu2 > 0.0
        assert abs(params.mu1 + params.mu2 - tr) < 1e-9 * tr
        assert abs(params.mu1 * params.mu2 - det) < 1e-9 * max(det, 1e-300)
        return params


def _log_matrix(params: MomentParams):
    p, s, nu = params.p, params.s, params.nu
    return [
        [math.log(1.0 - p), math.log(p)],
        [math.log(1.0 - p), math.log(p) + math.log1p(s * s * nu)],
    ]


def _log_add(a: float, b: float) -> float:
    if a < b:
        a, b = b, a
    if b == -math.inf:
        return a
    return a + math.log1p(math.exp(b - a))


def _log_matmul(a, b):
    out = [[-math.inf] * 2 for _ in range(2)]
    for i in range(2):
        for j in range(2):
            out[i][j] = _log_add(a[i][0] + b[0][j], a[i][1] + b[1][j])
    return out


def _log_matpow(m, k: int):
    result = None
    base = m
    while k:
        if k & 1:
            result = base if result is None else _log_matmul(result, base)
        base = _log_matmul(base, base)
        k >>= 1
    return result


def exact_dp_log_moment(kind: str, k: int, params: MomentParams) -> float:
    """log E[exp(theta * edge count)] for one orbit of length k.

    Transfer matrix T[a][b] = Pr(I = b) (1 + a b s^2 nu), propagated in the
    log domain: trace for cycles, full marginalization for free chains,
    both latent endpoints pinned to one for confined chains.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    logm = _log_matrix(params)
    s2nu = math.log1p(params.s * params.s * params.nu)
    if kind == "cycle":
        mk = _log_matpow(logm, k)
        return _log_add(mk[0][0], mk[1][1])
    if kind == "free_chain":
        mk = _log_matpow(logm, k)
        row0 = _log_add(mk[0][0], mk[0][1])
        row1 = _log_add(mk[1][0], mk[1][1])
        return _log_add(math.log(1.0 - params.p) + row0, math.log(params.p) + row1)
    if kind == "confined_chain":
        if k == 1:
            return s2nu
        mk = _log_matpow(logm, k - 1)
        return _log_add(mk[1][0], mk[1][1] + s2nu)
    raise ValueError(f"unknown orbit kind {kind!r}")


def exact_dp_moment(kind: str, k: int, params: MomentParams) -> float:
    """E[exp(theta * edge count)]; theta = 0 would give exactly 1."""
    return math.exp(exact_dp_log_moment(kind, k, params))


def closed_form_moment(kind: str, k: int, params: MomentParams) -> float:
    """Two-term closed form c1 mu1^k + c2 mu2^k.

    For cycles the coefficients are both one (the trace identity). For
    chains they are solved from the exact values at k = 1 and 2. Falls
    back to the dynamic program when mu1 and mu2 nearly coincide.
    """
    mu1, mu2 = params.mu1, params.mu2
    if kind == "cycle":
        return mu1**k + mu2**k
    if abs(mu1 - mu2) < 1e-12 * mu1:
        return exact_dp_moment(kind, k, params)
    c1, c2 = chain_coefficients(kind, params)
    return c1 * mu1**k + c2 * mu2**k


def chain_coefficients(kind: str, params: MomentParams) -> Tuple[float, float]:
    """The (c1, c2) pair used by the closed form for a chain kind.

    Solved from the exact values at k = 1 and 2 by Cramer's rule on
    [[mu1, mu2], [mu1^2, mu2^2]].
    """
    mu1, mu2 = params.mu1, params.mu2
    a1 = exact_dp_moment(kind, 1, params)
    a2 = exact_dp_moment(kind, 2, params)
    det = mu1 * mu2 * (mu2 - mu1)
    c1 = (a1 * mu2 * mu2 - a2 * mu2) / det
    c2 = (a2 * mu1 - a1 * mu1 * mu1) / det
    return c1, c2


def decomposition_to_text(decomp: OrbitDecomposition) -> str:
    lines = []
    for orbit in decomp.orbits:
        pairs = " ".join(f"({i},{j})" for (i, j) in orbit.pairs)
        lines.append(f"{orbit.kind}:{orbit.length}: {pairs}")
    return "\n".join(lines) + "\n"
