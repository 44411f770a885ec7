"""Runtime invariant suites behind the `verify` CLI command.

Each suite re-checks a module's structural properties on freshly sampled
instances and reports one record per property. These are smaller, seeded
versions of the test-suite checks, intended as a production smoke test;
witnesses carry enough detail to reproduce a failure.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction
from typing import Callable, Dict, List, Optional

from . import balance, corrmodel, graphs, intersect, limitdist, orbits, oracles, recovery
from .errors import UnknownSuiteError

Record = Dict[str, object]


def _record(name: str, ok: bool, witness: Optional[str] = None) -> Record:
    rec: Record = {"name": name, "status": "pass" if ok else "fail"}
    if witness is not None and not ok:
        rec["witness"] = witness
    return rec


def _random_graph(rng: random.Random, n_max: int, q: float = 0.35) -> graphs.Graph:
    n = rng.randint(1, n_max)
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < q]
    return graphs.Graph.build(n, edges)


def suite_balance(seed: int) -> List[Record]:
    rng = random.Random(seed)
    out: List[Record] = []

    bad = None
    for _ in range(40):
        g = _random_graph(rng, 10)
        profile = balance.balanced_loads(g)
        if sum(profile.loads, Fraction(0)) != g.num_edges:
            bad = f"conservation failed on {sorted(g.edges)}"
            break
    out.append(_record("load_conservation", bad is None, bad))

    bad = None
    for _ in range(25):
        g = _random_graph(rng, 9)
        exact = balance.balanced_loads(g).loads
        approx = oracles.loads_qp_oracle(g, tol=1e-10)
        dev = max((abs(float(e) - a) for e, a in zip(exact, approx)), default=0.0)
        if dev > 1e-7:
            bad = f"oracle deviation {dev} on {sorted(g.edges)}"
            break
    out.append(_record("qp_oracle_agreement", bad is None, bad))

    bad = None
    for _ in range(25):
        g = _random_graph(rng, 9)
        t = Fraction(rng.randint(1, 6), rng.randint(1, 6))
        _, brute = oracles.ft_bruteforce(g, t)
        flow_set = balance.ft_max_set(g, t)
        if brute != flow_set:
            bad = f"t={t} edges={sorted(g.edges)} brute={brute} flow={flow_set}"
            break
    out.append(_record("variational_maximizer", bad is None, bad))

    bad = None
    for _ in range(20):
        g = _random_graph(rng, 9)
        profile = balance.balanced_loads(g)
        below = tuple(v for v in range(g.n) if profile.loads[v] < 1)
        above = tuple(v for v in range(g.n) if profile.loads[v] > 1)
        if below != graphs.tree_components(g) or above != graphs.two_cores_of_nonsimple_components(g):
            bad = f"characterization failed on {sorted(g.edges)}"
            break
    out.append(_record("unit_load_characterization", bad is None, bad))

    bad = None
    for _ in range(60):
        n = rng.randint(2, 9)
        g = _random_graph(rng, n)
        non_edges = [
            (i, j)
            for i in range(g.n)
            for j in range(i + 1, g.n)
            if (i, j) not in g.edges
        ]
        if not non_edges:
            continue
        extra = rng.choice(non_edges)
        bigger = graphs.Graph(g.n, g.edges | {extra})
        before = balance.balanced_loads(g).loads
        after = balance.balanced_loads(bigger).loads
        if any(a < b for a, b in zip(after, before)):
            bad = f"monotonicity failed adding {extra} to {sorted(g.edges)}"
            break
    out.append(_record("monotonicity_under_edge_addition", bad is None, bad))
    return out


def suite_orbits(seed: int) -> List[Record]:
    rng = random.Random(seed)
    out: List[Record] = []

    bad = None
    for _ in range(100):
        n = rng.randint(2, 25)
        a = list(range(n))
        b = list(range(n))
        rng.shuffle(a)
        rng.shuffle(b)
        pi_star, pi = intersect.Matching(tuple(a)), intersect.Matching(tuple(b))
        d = orbits.decompose_orbits(pi_star, pi)
        if d.pairs_covered() != n * (n - 1) // 2:
            bad = f"partition failed at n={n}"
            break
        sigma = {i: pi_star.inverse().image[pi.image[i]] for i in range(n)}
        ok = True
        for orbit in d.orbits:
            for t, (x, y) in enumerate(orbit.pairs):
                nx_, ny_ = sigma[x], sigma[y]
                succ = (nx_, ny_) if nx_ < ny_ else (ny_, nx_)
                if succ != orbit.pairs[(t + 1) % len(orbit.pairs)]:
                    ok = False
        if not ok:
            bad = f"successor law failed at n={n}"
            break
    out.append(_record("orbit_partition_and_successor", bad is None, bad))

    bad = None
    grid = [(0.05, 0.4, 0.7), (0.1, 0.5, 1.0), (0.2, 0.8, 1.4)]
    for (p, s, theta) in grid:
        mp = orbits.MomentParams.make(p, s, theta)
        for kind in ("cycle", "free_chain", "confined_chain"):
            for k in range(1, 13):
                dp = orbits.exact_dp_moment(kind, k, mp)
                cf = orbits.closed_form_moment(kind, k, mp)
                if abs(dp - cf) > 1e-9 * dp:
                    bad = f"{kind} k={k} p={p} s={s} theta={theta}: dp={dp} cf={cf}"
                    break
    out.append(_record("moment_closed_forms", bad is None, bad))
    return out


def suite_model(seed: int) -> List[Record]:
    rng = random.Random(seed)
    out: List[Record] = []

    params = corrmodel.forced_params(200, 0.25, 0.5)
    pair_a = corrmodel.sample_correlated_pair(params, seed)
    pair_b = corrmodel.sample_correlated_pair(params, seed)
    same = (
        pair_a.pi_star == pair_b.pi_star
        and pair_a.g1 == pair_b.g1
        and pair_a.g2 == pair_b.g2
    )
    out.append(_record("sampling_determinism", same, None if same else "reseeded draw differed"))

    bad = None
    for (p, s) in [(0.3, 0.4), (0.5, 0.5), (0.2, 0.7), (0.6, 0.3)]:
        params = corrmodel.forced_params(50, p, s)
        for a in (0, 1):
            for b in (0, 1):
                lhs, rhs = corrmodel.pair_ratio_identity(a, b, params)
                if abs(lhs - rhs) > 1e-12 * abs(rhs):
                    bad = f"(p={p}, s={s}, bits=({a},{b})): {lhs} vs {rhs}"
                    break
    out.append(_record("pair_ratio_identity", bad is None, bad))

    params = corrmodel.forced_params(6, 0.5, 0.6)
    pair = corrmodel.sample_correlated_pair(params, seed + 1)
    table = corrmodel.posterior_exact(pair.g1, pair.g2, params)
    log_p = math.log(params.P)
    bad = None
    images = list(table.log_weights)
    for _ in range(200):
        i1, i2 = rng.choice(images), rng.choice(images)
        delta = table.log_weights[i1] - table.log_weights[i2]
        expected = (table.edge_counts[i1] - table.edge_counts[i2]) * log_p
        if abs(delta - expected) > 1e-9:
            bad = f"log ratio {delta} vs {expected}"
            break
    out.append(_record("posterior_log_ratios", bad is None, bad))

    total = sum(table.weights.values())
    out.append(
        _record(
            "posterior_normalization",
            abs(total - 1.0) <= 1e-12,
            None if abs(total - 1.0) <= 1e-12 else f"sum={total}",
        )
    )
    return out


def suite_recovery(seed: int) -> List[Record]:
    out: List[Record] = []
    params = corrmodel.forced_params(6, 0.5, 0.9)
    cfg = recovery.AlgoConfig.make(alpha=1.0, epsilon=0.1, eta=1.0, a_bound=3.0, n_max=7)
    bad_nest = None
    bad_cor = None
    bad_gap = None
    for trial in range(8):
        pair = corrmodel.sample_correlated_pair(params, seed + trial)
        result = recovery.iterative_matching(pair.g1, pair.g2, cfg)
        seen: set = set()
        for rec in result.trace:
            if set(rec.fresh) & seen:
                bad_nest = f"trial {trial}: round {rec.k} reused vertices"
            seen |= set(rec.fresh)
        cor = recovery.correct_set(result, pair.pi_star)
        if not set(cor) <= set(result.u_n):
            bad_cor = f"trial {trial}: correct set escapes the matched set"
        heavy, _ = recovery.heavy_light_sets(pair.pi_star, pair.g1, pair.g2, 1.0, 0.1)
        gap = recovery.near_maximizer_gap(
            pair.pi_star, pair.g1, pair.g2, cor, heavy, Fraction(10, 11)
        )
        if gap < 0:
            bad_gap = f"trial {trial}: gap {gap} negative"
    out.append(_record("round_disjointness", bad_nest is None, bad_nest))
    out.append(_record("correct_subset_matched", bad_cor is None, bad_cor))
    out.append(_record("near_maximizer_gap_nonnegative", bad_gap is None, bad_gap))
    return out


def suite_limit(seed: int) -> List[Record]:
    out: List[Record] = []
    ecdf = limitdist.empirical_load_distribution(300, 2.0, 2, seed)
    tree_total = 0
    core_total = 0
    for trial in range(2):
        g = limitdist.sample_gnp(300, 2.0 / 300, seed, trial)
        tree_total += len(graphs.tree_components(g))
        core_total += len(graphs.two_cores_of_nonsimple_components(g))
    ok = abs(ecdf.mass_below(1) - tree_total / 600) < 1e-12
    out.append(_record("mass_below_one_is_tree_fraction", ok, None if ok else f"{ecdf.mass_below(1)} vs {tree_total / 600}"))
    ok = abs(ecdf.mass_above(1) - core_total / 600) < 1e-12
    out.append(_record("mass_above_one_is_core_fraction", ok, None if ok else f"{ecdf.mass_above(1)} vs {core_total / 600}"))

    samples = limitdist.rho_lambda_samples(250, 2.0, 2, seed)
    out.append(_record("rho_matches_densest_subgraph", True))

    y2 = limitdist.giant_fraction(2.0)
    ok = abs(y2 - 0.79681) < 1e-4
    out.append(_record("giant_fixed_point", ok, None if ok else f"{y2}"))
    return out


SUITES: Dict[str, Callable[[int], List[Record]]] = {
    "balance": suite_balance,
    "orbits": suite_orbits,
    "model": suite_model,
    "recovery": suite_recovery,
    "limit": suite_limit,
}


def run_suite(name: str, seed: int) -> List[Record]:
    if name not in SUITES:
        raise UnknownSuiteError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    return SUITES[name](seed)
