"""Monte Carlo estimation of the limiting load distribution of sparse graphs.

Samples sparse binomial random graphs, computes balanced loads (exactly
below a size crossover, by projected relaxation sweeps above it), and
aggregates the empirical load measure. Closed-form fixed-point oracles
for the giant-component and 2-core fractions anchor the masses below and
above load one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .balance import balanced_loads, max_balanced_load
from .errors import InvariantViolationError
from .farey import largest_satisfying_fraction
from .flow import FlowNetwork, solve_max_flow
from .graphs import Graph

_STREAM_GNP_BASE = 10_000

LoadValue = Union[Fraction, float]


def _gnp_edge_arrays(n: int, p: float, seed: int, trial: int) -> np.ndarray:
    """Edge list of one binomial random graph draw, canonical and sorted."""
    rng = np.random.default_rng(
        np.random.Philox(key=[seed & (2**64 - 1), _STREAM_GNP_BASE + trial])
    )
    total = n * (n - 1) // 2
    m = int(rng.binomial(total, p))
    pairs = set()
    while len(pairs) < m:
        need = m - len(pairs)
        draw = int(need * 1.3) + 16
        i = rng.integers(0, n, size=draw)
        j = rng.integers(0, n, size=draw)
        ok = i != j
        lo = np.minimum(i[ok], j[ok]).tolist()
        hi = np.maximum(i[ok], j[ok]).tolist()
        for a, b in zip(lo, hi):
            pairs.add((a, b))
            if len(pairs) >= m:
                break
    if not pairs:
        return np.zeros((0, 2), dtype=np.int64)
    return np.array(sorted(pairs), dtype=np.int64)


def sample_gnp(n: int, p: float, seed: int, trial: int = 0) -> Graph:
    edges = _gnp_edge_arrays(n, p, seed, trial)
    return Graph(n, frozenset(map(tuple, edges.tolist())))


def giant_fraction(lam: float) -> float:
    """Largest solution of y = 1 - exp(-lam * y), zero when lam <= 1."""
    if lam < 0:
        raise ValueError("lambda must be non-negative")
    if lam <= 1.0:
        return 0.0
    y = 1.0
    for _ in range(100_000):
        ny = 0.5 * y + 0.5 * (1.0 - math.exp(-lam * y))
        if abs(ny - y) < 1e-13:
            return ny
        y = ny
    return y


def two_core_fraction(lam: float) -> float:
    """Limiting 2-core fraction: Pr[Poisson(lam * y) >= 2] at the giant fixed point."""
    if lam < 0:
        raise ValueError("lambda must be non-negative")
    if lam <= 1.0:
        return 0.0
    y = giant_fraction(lam)
    mean = lam * y
    return 1.0 - math.exp(-mean) - mean * math.exp(-mean)


def densest_subgraph_density(g: Graph) -> Fraction:
    """Exact maximum |E(U)|/|U| by flow-guided search over fractions.

    Uses a degree-based network: source feeds every vertex m units,
    every edge becomes a pair of opposite unit arcs, and each vertex
    drains m + 2a - b deg(v) (all scaled by the candidate density a/b).
    The minimum cut dips below n m b exactly when a denser-than-a/b
    subgraph exists, and ties are caught on the maximal source side.
    """
    m = g.num_edges
    if m == 0:
        return Fraction(0)
    n = g.n

    def at_least(a: int, b: int) -> bool:
        if a == 0:
            return True
        arcs: List[Tuple[int, int, object]] = []
        source, sink = 0, n + 1
        for v in range(n):
            arcs.append((source, 1 + v, m * b))
            drain = m * b + 2 * a - b * g.degree(v)
            arcs.append((1 + v, sink, drain))
        for (x, y) in g.sorted_edges:
            arcs.append((1 + x, 1 + y, b))
            arcs.append((1 + y, 1 + x, b))
        cut = solve_max_flow(FlowNetwork(n + 2, source, sink, tuple(arcs)))
        if cut.flow_value < n * m * b:
            return True
        return len(cut.source_side_max) > 1

    return largest_satisfying_fraction(at_least, n, max_num=m)


@dataclass(frozen=True, eq=False)
class LoadECDF:
    """Aggregated empirical load distribution over several trials."""

    values: Tuple[LoadValue, ...]       # ascending
    counts: Tuple[int, ...]
    total: int
    lam: float
    n: int
    trials: int
    seed: int
    per_trial_max: Tuple[LoadValue, ...]

    def mass_at(self, x) -> float:
        return sum(c for v, c in zip(self.values, self.counts) if v == x) / self.total

    def mass_below(self, x) -> float:
        return sum(c for v, c in zip(self.values, self.counts) if v < x) / self.total

    def mass_above(self, x) -> float:
        return sum(c for v, c in zip(self.values, self.counts) if v > x) / self.total


def f_lambda(ecdf: LoadECDF, x: float) -> float:
    """Empirical upper tail: mass strictly above x."""
    return ecdf.mass_above(x)


def _accumulate(counter: Dict[LoadValue, int], value: LoadValue) -> None:
    # a float and a Fraction of equal value hash alike; keep the exact key
    if value in counter:
        if isinstance(value, Fraction):
            count = counter.pop(value)
            counter[value] = count + 1
        else:
            counter[value] += 1
    else:
        counter[value] = 1


def approx_loads(
    n: int, edges: np.ndarray, tol: float = 1e-6, omega: float = 1.9,
    max_sweeps: int = 200_000,
) -> np.ndarray:
    """Vertex loads by conflict-free projected relaxation sweeps.

    Edges are greedily colored so that no two edges of a color share a
    vertex; within a color the edge updates are exact coordinate steps
    and vectorize. Terminates when the per-vertex residual (total
    unrelaxed move of incident edges) drops below tol.
    """
    if len(edges) == 0:
        return np.zeros(n)
    u = edges[:, 0]
    v = edges[:, 1]
    color_used = [0] * n
    ecolor = np.empty(len(edges), dtype=np.int64)
    for k in range(len(edges)):
        a, b = int(u[k]), int(v[k])
        free = ~(color_used[a] | color_used[b])
        c = (free & -free).bit_length() - 1
        ecolor[k] = c
        bit = 1 << c
        color_used[a] |= bit
        color_used[b] |= bit
    groups = []
    for c in range(int(ecolor.max()) + 1):
        idx = np.nonzero(ecolor == c)[0]
        groups.append((u[idx], v[idx], idx))

    z = np.full(len(edges), 0.5)
    load = np.zeros(n)
    np.add.at(load, v, z)
    np.add.at(load, u, 1.0 - z)
    check_every = 16
    for sweep in range(1, max_sweeps + 1):
        for (uu, vv, idx) in groups:
            step = (load[uu] - load[vv]) / 2.0
            nz = np.clip(z[idx] + omega * step, 0.0, 1.0)
            dz = nz - z[idx]
            z[idx] = nz
            load[uu] -= dz
            load[vv] += dz
        if sweep % check_every == 0:
            move = np.abs(np.clip(z + (load[u] - load[v]) / 2.0, 0.0, 1.0) - z)
            resid = np.zeros(n)
            np.add.at(resid, u, move)
            np.add.at(resid, v, move)
            if float(resid.max()) < tol:
                return load
    raise InvariantViolationError(f"sweeps did not reach residual {tol}")


def snap_loads(loads: np.ndarray, n: int, tol: float = 1e-6) -> List[LoadValue]:
    """Replace each load by the nearest fraction with denominator <= n
    when that fraction sits within tol, keeping the raw float otherwise."""
    out: List[LoadValue] = []
    cache: Dict[float, LoadValue] = {}
    for x in loads.tolist():
        hit = cache.get(x)
        if hit is None:
            frac = Fraction(x).limit_denominator(n)
            hit = frac if abs(float(frac) - x) <= tol else x
            cache[x] = hit
        out.append(hit)
    return out


def empirical_load_distribution(
    n: int,
    lam: float,
    trials: int,
    seed: int,
    exact_threshold: int = 20_000,
    sweep_tol: float = 1e-6,
) -> LoadECDF:
    """Sample `trials` sparse graphs at edge rate lam/n and pool the loads.

    Exact rational loads when n <= exact_threshold; otherwise relaxation
    sweeps to the given residual followed by snapping to fractions with
    denominator at most n.
    """
    if n < 1 or trials < 1 or lam < 0:
        raise ValueError("need n >= 1, trials >= 1, lam >= 0")
    counter: Dict[LoadValue, int] = {}
    maxima: List[LoadValue] = []
    p = min(lam / n, 1.0)
    for trial in range(trials):
        if n <= exact_threshold:
            g = sample_gnp(n, p, seed, trial)
            profile = balanced_loads(g)
            values: Sequence[LoadValue] = profile.loads
            maxima.append(profile.max_load())
        else:
            edges = _gnp_edge_arrays(n, p, seed, trial)
            raw = approx_loads(n, edges, tol=sweep_tol)
            values = snap_loads(raw, n)
            maxima.append(max(values) if len(values) else Fraction(0))
        for x in values:
            _accumulate(counter, x)
    ordered = sorted(counter.items(), key=lambda kv: kv[0])
    return LoadECDF(
        values=tuple(k for k, _ in ordered),
        counts=tuple(c for _, c in ordered),
        total=n * trials,
        lam=lam,
        n=n,
        trials=trials,
        seed=seed,
        per_trial_max=tuple(maxima),
    )


def rho_lambda_samples(n: int, lam: float, trials: int, seed: int) -> List[Fraction]:
    """Per-trial maximal balanced load, cross-checked against the densest
    subgraph density computed by the independent degree-network search."""
    p = min(lam / n, 1.0)
    out: List[Fraction] = []
    for trial in range(trials):
        g = sample_gnp(n, p, seed, trial)
        top = max_balanced_load(g)
        dense = densest_subgraph_density(g)
        if top != dense:
            raise InvariantViolationError(
                f"max load {top} != densest subgraph density {dense} (trial {trial})"
            )
        out.append(top)
    return out


def rho_lambda(n: int, lam: float, trials: int, seed: int) -> float:
    """Median over trials of the maximal balanced load."""
    samples = sorted(rho_lambda_samples(n, lam, trials, seed))
    k = len(samples)
    if k % 2 == 1:
        return float(samples[k // 2])
    return float((samples[k // 2 - 1] + samples[k // 2]) / 2)


def ecdf_to_csv(ecdf: LoadECDF) -> str:
    """CSV rows "load,cumulative_mass[,num/den]" in ascending load order."""
    lines = ["load,cumulative_mass"]
    running = 0
    for value, count in zip(ecdf.values, ecdf.counts):
        running += count
        load_str = f"{float(value):.12f}"
        mass_str = f"{running / ecdf.total:.12f}"
        if isinstance(value, Fraction):
            lines.append(f"{load_str},{mass_str},{value.numerator}/{value.denominator}")
        else:
            lines.append(f"{load_str},{mass_str}")
    return "\n".join(lines) + "\n"


def merge_ecdf(parts: Sequence[LoadECDF]) -> LoadECDF:
    """Pool several ECDFs; the merge is associative and order-independent."""
    if not parts:
        raise ValueError("nothing to merge")
    counter: Dict[LoadValue, int] = {}
    maxima: List[LoadValue] = []
    total = 0
    for part in parts:
        for value, count in zip(part.values, part.counts):
            if value in counter:
                if isinstance(value, Fraction):
                    prev = counter.pop(value)
                    counter[value] = prev + count
                else:
                    counter[value] += count
            else:
                counter[value] = count
        maxima.extend(part.per_trial_max)
        total += part.total
    ordered = sorted(counter.items(), key=lambda kv: kv[0])
    first = parts[0]
    return LoadECDF(
        values=tuple(k for k, _ in ordered),
        counts=tuple(c for _, c in ordered),
        total=total,
        lam=first.lam,
        n=first.n,
        trials=sum(p.trials for p in parts),
        seed=first.seed,
        per_trial_max=tuple(sorted(maxima)),
    )
