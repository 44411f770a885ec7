"""Matchings, partial matchings, and intersection graphs of a graph pair.

A matching here is a candidate vertex correspondence between two graphs
on the same label set: vertex i of the first graph is paired with
pi(i) in the second. The intersection graph through pi keeps exactly the
pairs that are edges on both sides of the correspondence.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Optional, Tuple, Union

from .errors import DomainMismatchError, SizeMismatchError
from .graphs import Graph, VertexSet, vertex_set


@dataclass(frozen=True)
class Matching:
    """A permutation of 0..n-1 stored as its image array."""

    image: Tuple[int, ...]

    def __post_init__(self):
        n = len(self.image)
        if sorted(self.image) != list(range(n)):
            raise DomainMismatchError("image is not a permutation")

    @property
    def n(self) -> int:
        return len(self.image)

    def apply(self, i: int) -> int:
        return self.image[i]

    def inverse(self) -> "Matching":
        inv = [0] * self.n
        for i, j in enumerate(self.image):
            inv[j] = i
        return Matching(tuple(inv))

    def compose(self, other: "Matching") -> "Matching":
        """self after other: (self . other)(i) = self(other(i))."""
        if self.n != other.n:
            raise SizeMismatchError("composing permutations of different sizes")
        return Matching(tuple(self.image[j] for j in other.image))

    @staticmethod
    def identity(n: int) -> "Matching":
        return Matching(tuple(range(n)))


@dataclass(frozen=True)
class PartialMatching:
    """An injection from a vertex subset into 0..n-1."""

    n: int
    mapping: Tuple[Tuple[int, int], ...]  # sorted (i, pi(i)) pairs

    def __post_init__(self):
        dom = [i for i, _ in self.mapping]
        img = [j for _, j in self.mapping]
        if dom != sorted(set(dom)):
            raise DomainMismatchError("domain must be sorted and duplicate-free")
        if len(set(img)) != len(img):
            raise DomainMismatchError("image values must be distinct")
        for i, j in self.mapping:
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise DomainMismatchError("mapping entry out of range")

    @staticmethod
    def from_dict(n: int, mapping: Dict[int, int]) -> "PartialMatching":
        return PartialMatching(n, tuple(sorted(mapping.items())))

    @property
    def domain(self) -> VertexSet:
        return tuple(i for i, _ in self.mapping)

    @property
    def image_set(self) -> VertexSet:
        return tuple(sorted(j for _, j in self.mapping))

    def as_dict(self) -> Dict[int, int]:
        return dict(self.mapping)

    def apply(self, i: int) -> int:
        d = self.as_dict()
        if i not in d:
            raise DomainMismatchError(f"{i} not in the matching domain")
        return d[i]

    def extensions_exist(self) -> bool:
        return True

    def any_extension(self) -> Matching:
        """Extend to a full permutation, free points mapped in sorted order."""
        used = set(j for _, j in self.mapping)
        free_targets = [j for j in range(self.n) if j not in used]
        image = [-1] * self.n
        for i, j in self.mapping:
            image[i] = j
        it = iter(free_targets)
        for i in range(self.n):
            if image[i] < 0:
                image[i] = next(it)
        return Matching(tuple(image))


MatchingLike = Union[Matching, PartialMatching]


def _as_map(pi: MatchingLike) -> Dict[int, int]:
    if isinstance(pi, Matching):
        return {i: j for i, j in enumerate(pi.image)}
    return pi.as_dict()


def intersection_graph(
    g1: Graph,
    g2: Graph,
    pi: MatchingLike,
    domain: Optional[Iterable[int]] = None,
    map_inverse: bool = False,
) -> Graph:
    """Graph of pairs that are edges of g1 and, mapped through pi, of g2.

    The edge rule is (i, j) in E(g1) and (pi(i), pi(j)) in E(g2), applied
    to pairs with both endpoints in `domain` (defaults to the matching's
    domain). For a partial matching the result does not depend on how pi
    would be extended. map_inverse=True applies the rule with pi's inverse
    instead, for cross-checking the direction convention.
    """
    if g1.n != g2.n:
        raise SizeMismatchError("graphs must share a vertex count")
    pmap = _as_map(pi)
    if isinstance(pi, Matching):
        if pi.n != g1.n:
            raise SizeMismatchError("matching size differs from the graphs")
        if map_inverse:
            pmap = {j: i for i, j in pmap.items()}
    else:
        if pi.n != g1.n:
            raise SizeMismatchError("matching size differs from the graphs")
        if map_inverse:
            pmap = {j: i for i, j in pmap.items()}
    if domain is None:
        dom = vertex_set(pmap.keys(), g1.n)
    else:
        dom = vertex_set(domain, g1.n)
        missing = set(dom) - set(pmap.keys())
        if missing:
            raise DomainMismatchError(f"domain vertices {sorted(missing)} not matched")
    inside = set(dom)
    edges = set()
    for (i, j) in g1.edges:
        if i in inside and j in inside:
            a, b = pmap[i], pmap[j]
            if g2.has_edge(a, b):
                edges.add((i, j))
    return Graph(g1.n, frozenset(edges))


def ft_pi(
    g1: Graph,
    g2: Graph,
    pi: MatchingLike,
    t: Fraction,
    members: Iterable[int],
) -> Fraction:
    """f_t evaluated on the intersection graph through pi."""
    from .balance import ft_value

    u = vertex_set(members, g1.n)
    h = intersection_graph(g1, g2, pi, domain=u)
    return ft_value(h, t, u)
