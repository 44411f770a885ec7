"""Vectorized load rebalancing sweeps shared by the fast solver paths.

Edges are greedily colored so no two edges of one color share a vertex;
within a color the projected coordinate steps commute, so a whole color
class updates in one vectorized operation. Over-relaxation sharply cuts
the sweep count; the stopping rule measures the unrelaxed per-vertex
residual.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, List, Union

import numpy as np

from .errors import NonConvergenceError

LoadValue = Union[Fraction, float]


def approx_loads(
    n: int,
    edges: np.ndarray,
    tol: float = 1e-6,
    omega: float = 1.9,
    max_sweeps: int = 500_000,
) -> np.ndarray:
    """Vertex loads by conflict-free projected relaxation sweeps.

    Stops once the per-vertex residual (total magnitude of the plain,
    unrelaxed move of every incident edge) falls below tol.
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
    resid = np.inf
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
            per_vertex = np.zeros(n)
            np.add.at(per_vertex, u, move)
            np.add.at(per_vertex, v, move)
            resid = float(per_vertex.max())
            if resid < tol:
                return load
    raise NonConvergenceError(f"sweeps stalled above {tol}", residual=resid)


def snap_loads(loads: np.ndarray, max_den: int, tol: float = 1e-6) -> List[LoadValue]:
    """Nearest fraction with denominator <= max_den when within tol, else the float."""
    out: List[LoadValue] = []
    cache: Dict[float, LoadValue] = {}
    for x in loads.tolist():
        hit = cache.get(x)
        if hit is None:
            frac = Fraction(x).limit_denominator(max_den)
            hit = frac if abs(float(frac) - x) <= tol else x
            cache[x] = hit
        out.append(hit)
    return out
