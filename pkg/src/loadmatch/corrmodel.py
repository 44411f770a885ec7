"""Correlated graph-pair model: parameters, sampling, exact posterior.

Two graphs are produced from one latent parent: each potential edge of
the parent appears with probability p, survives into the first graph
with probability s, and survives independently into the second graph
(after relabeling by a hidden uniform permutation) with probability s.
All randomness is drawn from counter-based Philox streams keyed by
(root seed, stream id), so sampling is reproducible and independent of
evaluation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np

from .errors import DegenerateSError, SOutOfRangeError, TooLargeError
from .graphs import Graph, format_edge_list, parse_edge_list
from .intersect import Matching

_STREAM_PERM = 1
_STREAM_I = 2
_STREAM_J1 = 3
_STREAM_J2 = 4

_POSTERIOR_MAX_N = 10


@dataclass(frozen=True)
class ModelParams:
    """Model constants: n, alpha, lambda and everything derived from them."""

    n: int
    alpha: float
    lam: float
    p: float
    s: float
    P: float
    Q: float
    R: float
    gamma: float
    A: float
    varrho_hat: float

    def validate(self) -> None:
        assert self.n >= 2
        assert abs(self.p - self.n ** (-self.alpha)) <= 1e-12 * self.p
        assert abs(self.n * self.p * self.s**2 - self.lam) <= 1e-12 * max(self.lam, 1.0)
        assert 1.0 - self.gamma * (self.A - self.varrho_hat - 1.0) < 0.0


def _pqr(p: float, s: float) -> Tuple[float, float, float]:
    if s >= 1.0:
        raise DegenerateSError("s = 1 makes the edge likelihood ratio undefined")
    if p * s >= 1.0:
        raise DegenerateSError("ps = 1 makes the edge likelihood ratio undefined")
    base = 1.0 - 2.0 * p * s + p * s * s
    big_p = base / (p * (1.0 - s) ** 2)
    big_q = (1.0 - s) * (1.0 - p * s) / base
    big_r = base / (1.0 - p * s) ** 2
    return big_p, big_q, big_r


def default_varrho_hat(lam: float, seed: int = 0) -> float:
    """Quick Monte Carlo estimate of the limiting maximal subgraph density."""
    from .limitdist import rho_lambda

    return rho_lambda(600, lam, trials=3, seed=seed)


def derive_params(
    n: int,
    alpha: float,
    lam: float,
    varrho_hat: Optional[float] = None,
    a_bound: Optional[float] = None,
    seed: int = 0,
) -> ModelParams:
    """Instantiate the model at finite n with p = n^-alpha and n p s^2 = lam.

    The recovery bound constant A defaults to varrho_hat + 1 + 1/gamma
    plus a unit safety margin, the smallest shape that satisfies the
    strict inequality 1 - gamma (A - varrho_hat - 1) < 0 with room to
    spare.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if not (0 < alpha <= 1):
        raise ValueError("alpha must lie in (0, 1]")
    if lam <= 0:
        raise ValueError("lambda must be positive")
    p = float(n) ** (-alpha)
    s_sq = lam / (n * p)
    if s_sq > 1.0:
        raise SOutOfRangeError(f"s^2 = {s_sq} exceeds 1; lambda too large for (n, alpha)")
    s = math.sqrt(s_sq)
    if s == 1.0:
        raise DegenerateSError("s = 1 exactly")
    big_p, big_q, big_r = _pqr(p, s)
    gamma = min(alpha, 0.5)
    if varrho_hat is None:
        varrho_hat = default_varrho_hat(lam, seed=seed)
    if a_bound is None:
        a_bound = varrho_hat + 1.0 + 1.0 / gamma + 1.0
    params = ModelParams(
        n=n, alpha=alpha, lam=lam, p=p, s=s,
        P=big_p, Q=big_q, R=big_r, gamma=gamma, A=a_bound, varrho_hat=varrho_hat,
    )
    params.validate()
    return params


def forced_params(n: int, p: float, s: float, varrho_hat: float = 2.0) -> ModelParams:
    """Build params directly from (p, s), for tests that pin those values.

    alpha is recovered as -log_n p and lambda as n p s^2, so the derived
    invariants still hold.
    """
    if not (0 < p <= 1) or not (0 < s <= 1):
        raise ValueError("p and s must lie in (0, 1]")
    alpha = -math.log(p) / math.log(n) if p < 1.0 else 1e-9
    lam = n * p * s * s
    if s < 1.0 and p * s < 1.0:
        big_p, big_q, big_r = _pqr(p, s)
    else:
        big_p = big_q = big_r = float("nan")
    gamma = min(alpha, 0.5) if alpha > 0 else 0.5
    a_bound = varrho_hat + 1.0 + 1.0 / gamma + 1.0
    return ModelParams(
        n=n, alpha=alpha, lam=lam, p=p, s=s,
        P=big_p, Q=big_q, R=big_r, gamma=gamma, A=a_bound, varrho_hat=varrho_hat,
    )


@dataclass(frozen=True)
class CorrelatedPair:
    pi_star: Matching
    g1: Graph
    g2: Graph
    indicators: Optional[Tuple[np.ndarray, np.ndarray, np.ndarray]] = None


def _pair_arrays(n: int):
    rows, cols = np.triu_indices(n, k=1)
    return rows.astype(np.int64), cols.astype(np.int64)


def _pair_index(i: np.ndarray, j: np.ndarray, n: int) -> np.ndarray:
    """Index of pair (i, j), i < j, in row-major upper-triangle order."""
    return i * (2 * n - i - 1) // 2 + (j - i - 1)


def _stream(seed: int, stream_id: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=[seed & (2**64 - 1), stream_id]))


def sample_correlated_pair(
    params: ModelParams, seed: int, keep_indicators: bool = False
) -> CorrelatedPair:
    """Draw (pi_star, g1, g2); identical seeds reproduce identical output."""
    n = params.n
    rows, cols = _pair_arrays(n)
    ind_i = _stream(seed, _STREAM_I).random(len(rows)) < params.p
    ind_j1 = _stream(seed, _STREAM_J1).random(len(rows)) < params.s
    ind_j2 = _stream(seed, _STREAM_J2).random(len(rows)) < params.s
    perm = _stream(seed, _STREAM_PERM).permutation(n)
    pi_star = Matching(tuple(int(x) for x in perm))

    e1 = ind_i & ind_j1
    g1 = Graph(n, frozenset(zip(rows[e1].tolist(), cols[e1].tolist())))

    # second graph: pair (a, b) is an edge iff the parent pair mapped back
    # through pi_star carries the latent edge and the second survival bit
    inv = np.empty(n, dtype=np.int64)
    inv[perm] = np.arange(n)
    pa, pb = inv[rows], inv[cols]
    lo, hi = np.minimum(pa, pb), np.maximum(pa, pb)
    parent_idx = _pair_index(lo, hi, n)
    e2 = ind_i[parent_idx] & ind_j2
    g2 = Graph(n, frozenset(zip(rows[e2].tolist(), cols[e2].tolist())))

    indicators = (ind_i, ind_j1, ind_j2) if keep_indicators else None
    return CorrelatedPair(pi_star, g1, g2, indicators)


@dataclass(frozen=True)
class PosteriorTable:
    """Exact posterior over permutations at enumeration scale."""

    weights: Dict[Tuple[int, ...], float]
    log_weights: Dict[Tuple[int, ...], float]
    log_z: float
    edge_counts: Dict[Tuple[int, ...], int]

    def weight(self, image: Tuple[int, ...]) -> float:
        return self.weights[tuple(image)]


def posterior_exact(g1: Graph, g2: Graph, params: ModelParams) -> PosteriorTable:
    """Posterior proportional to P^{|edges of the intersection through pi|}.

    Enumerates all n! permutations, so n is capped at 10. Accumulation is
    done in the log domain; weights are normalized at the end.
    """
    import itertools

    n = g1.n
    if n > _POSTERIOR_MAX_N:
        raise TooLargeError(f"posterior enumeration capped at n = {_POSTERIOR_MAX_N}")
    if g2.n != n:
        raise ValueError("graphs must share a vertex count")
    log_p = math.log(params.P)
    edges1 = g1.sorted_edges
    counts: Dict[Tuple[int, ...], int] = {}
    for image in itertools.permutations(range(n)):
        c = 0
        for (i, j) in edges1:
            if g2.has_edge(image[i], image[j]):
                c += 1
        counts[image] = c
    log_weights = {im: c * log_p for im, c in counts.items()}
    peak = max(log_weights.values())
    log_z = peak + math.log(sum(math.exp(lw - peak) for lw in log_weights.values()))
    weights = {im: math.exp(lw - log_z) for im, lw in log_weights.items()}
    return PosteriorTable(weights, log_weights, log_z, counts)


def pair_ratio_identity(a: int, b: int, params: ModelParams) -> Tuple[float, float]:
    """Both sides of the per-pair likelihood-ratio identity.

    Left: P^(a b) Q^(a + b) R. Right: the joint-over-product probability
    ratio of observing presence bits (a, b) for one pair under the
    correlated model versus independent edges of rate ps.
    """
    if a not in (0, 1) or b not in (0, 1):
        raise ValueError("bits must be 0 or 1")
    p, s = params.p, params.s
    if s >= 1.0 or p * s >= 1.0:
        raise DegenerateSError("identity undefined at s = 1 or ps = 1")
    lhs = params.P ** (a * b) * params.Q ** (a + b) * params.R
    if a == 1 and b == 1:
        rhs = 1.0 / p
    elif a != b:
        rhs = (1.0 - s) / (1.0 - p * s)
    else:
        rhs = (1.0 - 2.0 * p * s + p * s * s) / (1.0 - p * s) ** 2
    return lhs, rhs


def params_to_text(params: ModelParams) -> str:
    fields = [
        ("n", params.n), ("alpha", params.alpha), ("lambda", params.lam),
        ("p", params.p), ("s", params.s), ("P", params.P), ("Q", params.Q),
        ("R", params.R), ("gamma", params.gamma), ("A", params.A),
        ("varrho_hat", params.varrho_hat),
    ]
    return "\n".join(f"{k} {v!r}" for k, v in fields) + "\n"


def params_from_text(text: str) -> ModelParams:
    kv = {}
    for ln in text.splitlines():
        ln = ln.strip()
        if not ln:
            continue
        key, val = ln.split(None, 1)
        kv[key] = val
    return ModelParams(
        n=int(kv["n"]), alpha=float(kv["alpha"]), lam=float(kv["lambda"]),
        p=float(kv["p"]), s=float(kv["s"]), P=float(kv["P"]), Q=float(kv["Q"]),
        R=float(kv["R"]), gamma=float(kv["gamma"]), A=float(kv["A"]),
        varrho_hat=float(kv["varrho_hat"]),
    )


def pair_to_text(pair: CorrelatedPair) -> str:
    parts = [
        "graph1",
        format_edge_list(pair.g1).rstrip("\n"),
        "graph2",
        format_edge_list(pair.g2).rstrip("\n"),
        "pi_star: " + " ".join(str(x) for x in pair.pi_star.image),
    ]
    return "\n".join(parts) + "\n"


def pair_from_text(text: str) -> CorrelatedPair:
    lines = text.splitlines()
    try:
        i1 = lines.index("graph1")
        i2 = lines.index("graph2")
    except ValueError as exc:
        raise ValueError("missing graph sections") from exc
    perm_line = next(ln for ln in lines if ln.startswith("pi_star:"))
    g1, _ = parse_edge_list("\n".join(lines[i1 + 1 : i2]))
    g2, _ = parse_edge_list("\n".join(lines[i2 + 1 : lines.index(perm_line)]))
    image = tuple(int(x) for x in perm_line.split(":", 1)[1].split())
    return CorrelatedPair(Matching(image), g1, g2)
