"""Poset-filtered simplicial pairs.

A :class:`FilteredPair` records, for every simplex, the minimal index
elements at which it is present.  On chains and products of chains each
simplex has a single entry; on general posets (graph families) the set of
indices where an edge is present can have several minimal elements.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .poset import FinitePoset, PosetError, chain_poset, product_poset
from .simplicial import EMPTY, Pair, SimplicialComplex

__all__ = [
    "FilteredPair",
    "WeightedPointCloud",
    "DatasetMorphism",
    "GraphFamily",
    "MorphismError",
    "VRContainmentError",
    "CyclicBase",
    "sublevel_complex",
    "sublevel_filtration",
    "vr_complex",
    "vr_bifiltration",
    "vr_filtration",
    "induced_vr_map",
    "VRMap",
    "graph_sublevel_family",
    "critical_values",
    "sqdist",
]


def sqdist(p: Sequence, q: Sequence) -> Fraction:
    return sum(((a - b) ** 2 for a, b in zip(p, q)), Fraction(0))


class FilteredPair:
    """Simplicial pair with a monotone index-valued filtration.

    ``births[s]`` is the tuple of minimal index elements at which simplex
    ``s`` is present.  ``sub_pair(i)`` is the pair of simplices present at
    ``i``.
    """

    def __init__(self, pair: Pair, index: FinitePoset, births: Mapping, check: bool = True):
        self.pair = pair
        self.index = index
        self.births = {s: tuple(b) for s, b in births.items()}
        missing = pair.x.all_simplices - set(self.births)
        if missing:
            raise ValueError(f"no entry for simplex {min(missing)!r}")
        for s, bs in self.births.items():
            for b in bs:
                index.index(b)
        self._cache: dict = {}
        if check:
            self.check_monotone()

    @classmethod
    def from_entries(cls, pair: Pair, index: FinitePoset, entry: Mapping, check: bool = True) -> "FilteredPair":
        return cls(pair, index, {s: (e,) for s, e in entry.items()}, check=check)

    @property
    def entry(self) -> dict:
        """Single entry index per simplex (only when every simplex has one)."""
        out = {}
        for s, bs in self.births.items():
            if len(bs) != 1:
                raise ValueError(f"simplex {s!r} has {len(bs)} minimal entries")
            out[s] = bs[0]
        return out

    def present(self, s, i) -> bool:
        le = self.index.le
        return any(le(b, i) for b in self.births[s])

    def check_monotone(self):
        for s, bs in self.births.items():
            if len(s) < 2:
                continue
            for b in bs:
                for pos in range(len(s)):
                    f = s[:pos] + s[pos + 1:]
                    if not self.present(f, b):
                        raise ValueError(f"face {f!r} of {s!r} absent at {b!r}")

    def sub_pair(self, i) -> Pair:
        got = self._cache.get(i)
        if got is None:
            self.index.index(i)
            keep = [s for s in self.pair.x if self.present(s, i)]
            x = SimplicialComplex(keep, close=False)
            y = SimplicialComplex([s for s in keep if s in self.pair.y], close=False)
            got = self._cache[i] = Pair(x, y)
        return got

    def sub_pair_at_value(self, t) -> Pair:
        """Sub-pair at a real value ``t`` for a chain index with rational ids."""
        keep = [s for s in self.pair.x if any(b <= t for b in self.births[s])]
        x = SimplicialComplex(keep, close=False)
        return Pair(x, SimplicialComplex([s for s in keep if s in self.pair.y], close=False))

    def __repr__(self):
        return f"FilteredPair({self.pair.x!r}, |index|={len(self.index)})"


def sublevel_complex(x: SimplicialComplex, f: Mapping, s, index: FinitePoset) -> SimplicialComplex:
    """Full subcomplex on ``{v : f(v) <= s}``."""
    index.index(s)
    keep = {v for v in x.vertices if index.le(f[v], s)}
    return x.induced(keep)


def sublevel_filtration(x: SimplicialComplex, f: Mapping, index: FinitePoset, y: SimplicialComplex | None = None
                        ) -> FilteredPair:
    """Vertex-function filtration: a simplex enters once all its vertices have."""
    y = EMPTY if y is None else y
    births = {}
    ups = {v: index.up(f[v]) for v in x.vertices}
    for s in x:
        common = set(ups[s[0]])
        for v in s[1:]:
            common &= ups[v]
        births[s] = tuple(index.minimal(common))
    return FilteredPair(Pair(x, y), index, births)


def critical_values(fp: FilteredPair) -> list:
    """Sorted labels at which the sub-pair changes (chain index only)."""
    if not fp.index.is_chain():
        raise PosetError("critical values need a chain index")
    labels = fp.index.labels
    seen = {labels[b] for bs in fp.births.values() for b in bs}
    return sorted(seen)


# -- weighted point clouds and Vietoris-Rips -----------------------------------


@dataclass(frozen=True)
class WeightedPointCloud:
    points: tuple
    probs: tuple

    def __post_init__(self):
        pts = tuple(tuple(Fraction(c) for c in p) for p in self.points)
        probs = tuple(Fraction(q) for q in self.probs)
        if not pts:
            raise ValueError("empty point cloud")
        d = len(pts[0])
        if any(len(p) != d for p in pts):
            raise ValueError("points have different dimensions")
        if len(probs) != len(pts):
            raise ValueError("one probability per point required")
        if any(not 0 <= q <= 1 for q in probs):
            raise ValueError("probabilities must lie in [0, 1]")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "probs", probs)

    def __len__(self):
        return len(self.points)

    @property
    def dim(self) -> int:
        return len(self.points[0])

    def sqdist(self, i: int, j: int) -> Fraction:
        return sqdist(self.points[i], self.points[j])

    def diameter2(self, s: Sequence[int]) -> Fraction:
        return max((self.sqdist(a, b) for a, b in combinations(s, 2)), default=Fraction(0))


def vr_complex(cloud: WeightedPointCloud, t2, lam, max_dim: int) -> SimplicialComplex:
    """Rips complex at squared scale ``t2`` on points with probability >= ``lam``."""
    t2, lam = Fraction(t2), Fraction(lam)
    if t2 < 0 or not 0 <= lam <= 1:
        raise ValueError("need t2 >= 0 and 0 <= lam <= 1")
    verts = [i for i, q in enumerate(cloud.probs) if q >= lam]
    simplices = [(v,) for v in verts]
    for k in range(1, max_dim + 1):
        for s in combinations(verts, k + 1):
            if cloud.diameter2(s) <= t2:
                simplices.append(s)
    return SimplicialComplex(simplices, close=False)


def _all_vr_simplices(cloud, max_dim, vertices=None):
    verts = range(len(cloud)) if vertices is None else sorted(vertices)
    out = []
    for k in range(0, max_dim + 1):
        out.extend(combinations(verts, k + 1))
    return out


def vr_bifiltration(cloud: WeightedPointCloud, max_dim: int, marked: Iterable[int] | None = None) -> FilteredPair:
    """Rips bifiltration over (squared scale) x (probability, reversed).

    A simplex enters at (max pairwise squared distance, min probability).
    ``marked`` selects a vertex subset whose induced Rips filtration is the
    subcomplex Y.
    """
    n = len(cloud)
    d2 = sorted({Fraction(0)} | {cloud.sqdist(i, j) for i, j in combinations(range(n), 2)})
    probs = sorted(set(cloud.probs), reverse=True)
    index = product_poset(chain_poset(d2), chain_poset(probs))
    simplices = _all_vr_simplices(cloud, max_dim)
    entry = {s: (cloud.diameter2(s), min(cloud.probs[v] for v in s)) for s in simplices}
    x = SimplicialComplex(simplices, close=False)
    if marked is None:
        y = EMPTY
    else:
        m = set(marked)
        y = SimplicialComplex([s for s in simplices if m.issuperset(s)], close=False)
    return FilteredPair.from_entries(Pair(x, y), index, entry, check=False)


def vr_filtration(cloud: WeightedPointCloud, max_dim: int, lam=0, marked: Iterable[int] | None = None
                  ) -> FilteredPair:
    """One-parameter Rips filtration by squared scale at a fixed probability cutoff."""
    lam = Fraction(lam)
    keep = [i for i, q in enumerate(cloud.probs) if q >= lam]
    if not keep:
        return FilteredPair(Pair(EMPTY), chain_poset([Fraction(0)]), {})
    d2 = sorted({Fraction(0)} | {cloud.sqdist(i, j) for i, j in combinations(keep, 2)})
    simplices = _all_vr_simplices(cloud, max_dim, keep)
    entry = {s: cloud.diameter2(s) for s in simplices}
    x = SimplicialComplex(simplices, close=False)
    y = EMPTY
    if marked is not None:
        m = set(marked)
        y = SimplicialComplex([s for s in simplices if m.issuperset(s)], close=False)
    return FilteredPair.from_entries(Pair(x, y), chain_poset(d2), entry, check=False)


# -- dataset morphisms --------------------------------------------------------


class MorphismError(ValueError):
    pass


class VRContainmentError(ValueError):
    def __init__(self, vertex, image, prob, threshold):
        super().__init__(
            f"source vertex {vertex} maps to {image} with probability {prob} < {threshold}"
        )
        self.witness = vertex


@dataclass(frozen=True)
class DatasetMorphism:
    """Vertex map with a declared Lipschitz constant ``lipschitz_k``."""

    vertex_map: tuple
    lipschitz_k: Fraction

    def __post_init__(self):
        object.__setattr__(self, "vertex_map", tuple(int(v) for v in self.vertex_map))
        k = Fraction(self.lipschitz_k)
        if k <= 0:
            raise MorphismError("Lipschitz constant must be positive")
        object.__setattr__(self, "lipschitz_k", k)

    def verify(self, source: WeightedPointCloud, target: WeightedPointCloud):
        phi = self.vertex_map
        if len(phi) != len(source) or any(not 0 <= y < len(target) for y in phi):
            raise MorphismError("vertex map does not match the clouds")
        push = [Fraction(0)] * len(target)
        for x, y in enumerate(phi):
            push[y] += source.probs[x]
        for y, (a, b) in enumerate(zip(push, target.probs)):
            if a != b:
                raise MorphismError(f"pushforward mass {a} != target probability {b} at {y}")
        k2 = self.lipschitz_k ** 2
        for a, b in combinations(range(len(source)), 2):
            if target.sqdist(phi[a], phi[b]) > k2 * source.sqdist(a, b):
                raise MorphismError(f"Lipschitz bound fails on pair {(a, b)}")

    def compose(self, other: "DatasetMorphism") -> "DatasetMorphism":
        """``other`` after ``self``."""
        return DatasetMorphism(tuple(other.vertex_map[y] for y in self.vertex_map),
                               self.lipschitz_k * other.lipschitz_k)

    def min_fiber(self) -> int:
        counts: dict = {}
        for y in self.vertex_map:
            counts[y] = counts.get(y, 0) + 1
        return min(counts.values())


@dataclass(frozen=True)
class VRMap:
    vertex_map: dict
    t2: Fraction
    lam: Fraction


def induced_vr_map(m: DatasetMorphism, source: WeightedPointCloud, target: WeightedPointCloud, t2, lam,
                   paper_mode: bool = False) -> VRMap:
    """Simplicial map ``VR(source; t2, lam) -> VR(target; K^2 t2, lam_out)``.

    ``lam_out`` is ``lam`` by default.  With ``paper_mode`` it is
    ``m * lam`` for ``m`` the smallest fiber size; a retained vertex whose
    image falls below that cutoff raises :class:`VRContainmentError`.
    """
    m.verify(source, target)
    t2, lam = Fraction(t2), Fraction(lam)
    lam_out = lam * m.min_fiber() if paper_mode else lam
    kept = [i for i, q in enumerate(source.probs) if q >= lam]
    vmap = {i: m.vertex_map[i] for i in kept}
    for i in kept:
        y = vmap[i]
        if target.probs[y] < lam_out:
            raise VRContainmentError(i, y, target.probs[y], lam_out)
    return VRMap(vmap, m.lipschitz_k ** 2 * t2, lam_out)


# -- graph families -----------------------------------------------------------


class CyclicBase(PosetError):
    def __init__(self, cycle):
        super().__init__(f"base graph reachability is not antisymmetric: {cycle!r}")
        self.witness = tuple(cycle)


@dataclass(frozen=True)
class GraphFamily:
    """Directed graph ``g`` labelled by the vertices of a base graph ``h``."""

    g_vertices: tuple
    g_edges: tuple
    h_vertices: tuple
    h_edges: tuple
    label: Mapping

    def __post_init__(self):
        for w in self.g_vertices:
            if w not in self.label:
                raise ValueError(f"vertex {w!r} of g has no label")
            if self.label[w] not in self.h_vertices:
                raise ValueError(f"label of {w!r} is not a vertex of h")
        gv, hv = set(self.g_vertices), set(self.h_vertices)
        for a, b in self.g_edges:
            if a not in gv or b not in gv:
                raise ValueError(f"edge {(a, b)!r} of g has an unknown end")
        for a, b in self.h_edges:
            if a not in hv or b not in hv:
                raise ValueError(f"edge {(a, b)!r} of h has an unknown end")

    def undirected_edges(self) -> list:
        """Distinct unordered non-loop edges of ``g``."""
        return sorted({tuple(sorted(e)) for e in self.g_edges if e[0] != e[1]})


def _reachability(vertices, edges):
    succ = {v: [] for v in vertices}
    for a, b in edges:
        succ[a].append(b)
    reach = {}
    for v in vertices:
        seen = {v}
        stack = [v]
        while stack:
            x = stack.pop()
            for y in succ[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        reach[v] = seen
    return reach


def graph_sublevel_family(fam: GraphFamily) -> FilteredPair:
    """Induced subgraphs ``G_v`` of vertices whose label reaches ``v`` in ``h``.

    The index is the reachability order of ``h``; cycles in ``h`` raise
    :class:`CyclicBase`.
    """
    hv = list(fam.h_vertices)
    reach = _reachability(hv, fam.h_edges)
    for i, u in enumerate(hv):
        for v in hv[i + 1:]:
            if v in reach[u] and u in reach[v]:
                raise CyclicBase((u, v))
    rel = {(u, v) for u in hv for v in reach[u]}
    index = FinitePoset(hv, rel)
    x = SimplicialComplex([(w,) for w in fam.g_vertices] + fam.undirected_edges(), close=False)
    births = {}
    for s in x:
        common = set(index.up(fam.label[s[0]]))
        for w in s[1:]:
            common &= index.up(fam.label[w])
        births[s] = tuple(index.minimal(common))
    return FilteredPair(Pair(x), index, births)


def sqrt_approx(x: Fraction, digits: int = 6) -> str:
    """Decimal string for the square root of a non-negative rational."""
    scale = 10 ** digits
    r = math.isqrt(x.numerator * scale * scale // x.denominator)
    return f"{r // scale}.{r % scale:0{digits}d}"
