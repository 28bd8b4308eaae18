"""Diagrams, their linear representations and endomorphism (commutant) rings.

A diagram is a directed multigraph with optional identity loops.  A
representation puts a vector space on every vertex and a matrix on every
edge; ``end_ring`` solves for all vertex-indexed tuples of matrices that
commute with every edge map.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .filtration import FilteredPair
from .linalg import FieldSpec, Matrix, Q, SubspaceCoordinates, image_basis, nullspace_basis
from .persistence import (
    ModuleMorphism,
    PersistenceModule,
    constant_module,
    range_module,
    resample,
    snap_down,
    tensor_product,
)
from .poset import chain_poset, covers, linear_extension
from .simplicial import check_simplicial, connecting_map, homology_basis, induced_map, inclusion_map

__all__ = [
    "Diagram",
    "DiagramRep",
    "EndRing",
    "RestrictionHom",
    "SpectralCheck",
    "PersistenceVertex",
    "GradedStructure",
    "DiagramError",
    "IncompatibleMorphism",
    "end_ring",
    "restrict_end_ring",
    "build_spectral_page",
    "validate_spectral_rep",
    "build_persistence_diagram",
    "evaluate_representation",
    "commutant_poset_rep",
    "graded_product",
    "vertex_module",
    "swap_map",
]


class DiagramError(ValueError):
    pass


class IncompatibleMorphism(DiagramError):
    def __init__(self, simplex, image):
        super().__init__(f"image {image!r} of {simplex!r} enters the target filtration too late")
        self.witness = simplex


@dataclass
class Diagram:
    """Vertices, edges ``id -> (source, target)``, and optional identity edges."""

    vertices: tuple
    edges: dict
    identities: dict = field(default_factory=dict)
    payload: dict = field(default_factory=dict)
    kinds: dict = field(default_factory=dict)

    def __post_init__(self):
        self.vertices = tuple(self.vertices)
        vs = set(self.vertices)
        if len(vs) != len(self.vertices):
            raise DiagramError("duplicate vertex")
        for e, (s, t) in self.edges.items():
            if s not in vs or t not in vs:
                raise DiagramError(f"edge {e!r} has an endpoint outside the diagram")
        if self.identities:
            if set(self.identities) != vs:
                raise DiagramError("identities must be given for every vertex")
            for v, e in self.identities.items():
                if self.edges.get(e) != (v, v):
                    raise DiagramError(f"identity {e!r} is not a loop at {v!r}")

    @classmethod
    def with_identities(cls, vertices, edges, payload=None, kinds=None) -> "Diagram":
        edges = dict(edges)
        ids = {}
        kinds = dict(kinds or {})
        for v in vertices:
            e = ("id", v)
            edges[e] = (v, v)
            ids[v] = e
            kinds[e] = "id"
        return cls(tuple(vertices), edges, ids, dict(payload or {}), kinds)

    def source(self, e):
        return self.edges[e][0]

    def target(self, e):
        return self.edges[e][1]

    def non_identity_edges(self) -> list:
        ids = set(self.identities.values())
        return [e for e in self.edges if e not in ids]

    def subdiagram(self, vertices: Sequence, edges: Sequence | None = None) -> "Diagram":
        """Full (or edge-restricted) subdiagram on the given vertices."""
        vs = set(vertices)
        keep = [e for e, (s, t) in self.edges.items() if s in vs and t in vs]
        if edges is not None:
            allowed = set(edges) | {self.identities.get(v) for v in vs}
            keep = [e for e in keep if e in allowed]
        ids = {v: e for v, e in self.identities.items() if v in vs}
        return Diagram(tuple(v for v in self.vertices if v in vs), {e: self.edges[e] for e in keep}, ids,
                       {v: p for v, p in self.payload.items() if v in vs},
                       {e: k for e, k in self.kinds.items() if e in keep})

    def is_subdiagram_of(self, other: "Diagram") -> bool:
        if not set(self.vertices) <= set(other.vertices):
            return False
        return all(other.edges.get(e) == st for e, st in self.edges.items())

    def edge_counts(self) -> dict:
        out: dict = {}
        for e in self.edges:
            k = self.kinds.get(e, "edge")
            out[k] = out.get(k, 0) + 1
        return out


@dataclass
class DiagramRep:
    """Spaces (dimensions) on vertices and matrices on edges."""

    diagram: Diagram
    spaces: dict
    edge_maps: dict
    field: FieldSpec = Q

    def __post_init__(self):
        d = self.diagram
        for v in d.vertices:
            if v not in self.spaces:
                raise DiagramError(f"no space on vertex {v!r}")
        for e, (s, t) in d.edges.items():
            m = self.edge_maps.get(e)
            if m is None:
                if e in d.identities.values():
                    m = Matrix.identity(self.spaces[s], self.field)
                    self.edge_maps[e] = m
                else:
                    raise DiagramError(f"no map on edge {e!r}")
            if m.shape != (self.spaces[t], self.spaces[s]):
                raise DiagramError(f"map on {e!r} has shape {m.shape}, expected {(self.spaces[t], self.spaces[s])}")
            if m.field != self.field:
                raise DiagramError("field mismatch")
        for v, e in d.identities.items():
            if self.edge_maps[e] != Matrix.identity(self.spaces[v], self.field):
                raise DiagramError(f"identity edge {e!r} is not sent to the identity")

    def restrict(self, sub: Diagram) -> "DiagramRep":
        if not sub.is_subdiagram_of(self.diagram):
            raise DiagramError("not a subdiagram")
        return DiagramRep(sub, {v: self.spaces[v] for v in sub.vertices},
                          {e: self.edge_maps[e] for e in sub.edges}, self.field)


@dataclass
class EndRing:
    """Basis of the commutant: each element is a dict vertex -> square matrix."""

    vertices: tuple
    spaces: dict
    basis: list
    field: FieldSpec = Q

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def flatten(self, elem: Mapping) -> tuple:
        out = []
        for v in self.vertices:
            for row in elem[v].rows:
                out.extend(row)
        return tuple(out)

    def _coords(self):
        if not hasattr(self, "_sc"):
            n = sum(self.spaces[v] ** 2 for v in self.vertices)
            self._sc = SubspaceCoordinates([self.flatten(b) for b in self.basis], n, self.field)
        return self._sc

    def contains(self, elem: Mapping) -> bool:
        return self._coords().contains(self.flatten(elem))

    def coords(self, elem: Mapping) -> tuple:
        return self._coords().coords(self.flatten(elem))

    def identity(self) -> dict:
        return {v: Matrix.identity(self.spaces[v], self.field) for v in self.vertices}

    @staticmethod
    def multiply(a: Mapping, b: Mapping) -> dict:
        return {v: a[v] @ b[v] for v in a}

    def is_closed(self) -> bool:
        return all(self.contains(self.multiply(a, b)) for a in self.basis for b in self.basis)


def _commutation_system(rep: DiagramRep):
    d = rep.diagram
    f = rep.field
    offs = {}
    n = 0
    for v in d.vertices:
        offs[v] = n
        n += rep.spaces[v] ** 2
    rows = []
    for e, (s, t) in d.edges.items():
        if s == t and e in d.identities.values():
            continue
        T = rep.edge_maps[e]
        ns, nt = rep.spaces[s], rep.spaces[t]
        for a in range(nt):
            for b in range(ns):
                row: dict = {}
                # (phi_t T)[a][b] - (T phi_s)[a][b]
                for c in range(nt):
                    x = T.rows[c][b]
                    if x:
                        i = offs[t] + a * nt + c
                        row[i] = f.add(row.get(i, f.zero), x)
                for c in range(ns):
                    x = T.rows[a][c]
                    if x:
                        i = offs[s] + c * ns + b
                        row[i] = f.sub(row.get(i, f.zero), x)
                row = {i: x for i, x in row.items() if x}
                if row:
                    rows.append(row)
    mat = Matrix.from_sparse({(r, i): x for r, row in enumerate(rows) for i, x in row.items()}, len(rows), n, f)
    return mat, offs


def end_ring(d: Diagram, rep: DiagramRep) -> EndRing:
    """All tuples ``(phi_v)`` with ``phi_t T(e) = T(e) phi_s`` for every edge ``e: s -> t``."""
    if rep.diagram is not d and rep.diagram != d:
        raise DiagramError("representation is over a different diagram")
    mat, offs = _commutation_system(rep)
    basis = []
    for vec in nullspace_basis(mat):
        elem = {}
        for v in d.vertices:
            k = rep.spaces[v]
            o = offs[v]
            elem[v] = Matrix([vec[o + a * k:o + (a + 1) * k] for a in range(k)], rep.field, ncols=k)
        basis.append(elem)
    return EndRing(d.vertices, dict(rep.spaces), basis, rep.field)


@dataclass
class RestrictionHom:
    """Projection ``End(T_big) -> End(T_small)`` as a matrix in the two bases."""

    matrix: Matrix
    source: EndRing
    target: EndRing

    def apply(self, elem: Mapping) -> dict:
        return {v: elem[v] for v in self.target.vertices}


def restrict_end_ring(d1: Diagram, d2: Diagram, rep2: DiagramRep) -> RestrictionHom:
    if not d1.is_subdiagram_of(d2):
        raise DiagramError("first diagram is not a subdiagram of the second")
    rep1 = rep2.restrict(d1)
    big = end_ring(d2, rep2)
    small = end_ring(d1, rep1)
    cols = []
    for b in big.basis:
        proj = {v: b[v] for v in d1.vertices}
        if not small.contains(proj):
            raise RuntimeError("projection left the smaller commutant")
        cols.append(small.coords(proj))
    return RestrictionHom(Matrix.from_columns(cols, small.dimension, rep2.field), big, small)


# -- spectral pages -------------------------------------------------------------


def build_spectral_page(r: int, p_range: Sequence[int], q_range: Sequence[int]) -> Diagram:
    """Vertices ``(p, q, r)`` and differentials ``(p, q, r) -> (p + r, q - r + 1, r)``."""
    if r < 1:
        raise ValueError("page number must be >= 1")
    ps, qs = sorted(set(p_range)), sorted(set(q_range))
    verts = [(p, q, r) for p in ps for q in qs]
    vs = set(verts)
    edges, kinds = {}, {}
    for p, q, _ in verts:
        tgt = (p + r, q - r + 1, r)
        if tgt in vs:
            e = ("d", p, q)
            edges[e] = ((p, q, r), tgt)
            kinds[e] = "d"
    return Diagram.with_identities(verts, edges, kinds=kinds)


@dataclass
class SpectralCheck:
    valid: bool
    witnesses: list


def validate_spectral_rep(d: Diagram, rep: DiagramRep) -> SpectralCheck:
    """Every composable pair of differentials must compose to zero."""
    out_edge = {}
    for e in d.non_identity_edges():
        out_edge[d.source(e)] = e
    bad = []
    for e in d.non_identity_edges():
        nxt = out_edge.get(d.target(e))
        if nxt is None:
            continue
        if not (rep.edge_maps[nxt] @ rep.edge_maps[e]).is_zero():
            p, q, _ = d.source(e)
            bad.append((p, q))
    return SpectralCheck(not bad, sorted(bad))


# -- the persistence diagram ----------------------------------------------------


@dataclass(frozen=True)
class PersistenceVertex:
    """A filtered pair in degree ``degree`` at shift ``shift``; ``filtration=None`` is the unit."""

    filtration: object
    degree: int
    shift: Fraction = Fraction(0)
    symbol: object = None

    def __post_init__(self):
        object.__setattr__(self, "shift", Fraction(self.shift))
        if self.degree < 0 or self.shift < 0:
            raise ValueError("degree and shift must be non-negative")

    @property
    def is_unit(self) -> bool:
        return self.filtration is None and self.symbol == "unit"


def _check_morphism(phi: Mapping, src: FilteredPair, tgt: FilteredPair):
    if src.index != tgt.index:
        raise DiagramError("morphism between filtrations over different indices")
    check_simplicial(phi, src.pair, tgt.pair)
    for s in src.pair.x:
        img = tuple(sorted(set(phi[v] for v in s)))
        for b in src.births[s]:
            if not tgt.present(img, b):
                raise IncompatibleMorphism(s, img)


def _check_triple(outer: FilteredPair, inner: FilteredPair):
    if outer.index != inner.index:
        raise DiagramError("triple over different indices")
    if inner.pair.x != outer.pair.y:
        raise DiagramError("inner pair must start at the outer subcomplex")
    for s in inner.pair.x:
        if set(inner.births[s]) != set(outer.births[s]):
            raise DiagramError(f"filtrations disagree on {s!r}")


def build_persistence_diagram(pairs: Sequence[FilteredPair], degrees: Sequence[int], shifts: Sequence,
                              morphisms: Sequence = (), triples: Sequence = ()) -> Diagram:
    """Persistence diagram on the given filtered pairs.

    Vertices are ``("v", pair, i, lam)``.  Edges: ``("phi", m, i, lam)`` for
    each morphism ``(src, tgt, vertex_map)``; ``("delta", t, i, lam)`` from
    ``(outer, i)`` to ``(inner, i - 1)`` for each triple ``(outer, inner)``;
    ``("shift", pair, i, lam, lam2)`` for ``lam < lam2``; identities.
    """
    degrees = sorted(set(degrees))
    shifts = sorted({Fraction(x) for x in shifts})
    for m_src, m_tgt, phi in morphisms:
        _check_morphism(phi, pairs[m_src], pairs[m_tgt])
    for outer, inner in triples:
        _check_triple(pairs[outer], pairs[inner])
    verts, payload = [], {}
    for p in range(len(pairs)):
        for i in degrees:
            for lam in shifts:
                v = ("v", p, i, lam)
                verts.append(v)
                payload[v] = PersistenceVertex(pairs[p], i, lam)
    edges, kinds = {}, {}
    for mi, (a, b, _) in enumerate(morphisms):
        for i in degrees:
            for lam in shifts:
                e = ("phi", mi, i, lam)
                edges[e] = (("v", a, i, lam), ("v", b, i, lam))
                kinds[e] = "phi"
    for ti, (outer, inner) in enumerate(triples):
        for i in degrees:
            if i - 1 not in degrees:
                continue
            for lam in shifts:
                e = ("delta", ti, i, lam)
                edges[e] = (("v", outer, i, lam), ("v", inner, i - 1, lam))
                kinds[e] = "delta"
    for p in range(len(pairs)):
        for i in degrees:
            for x, lam in enumerate(shifts):
                for lam2 in shifts[x + 1:]:
                    e = ("shift", p, i, lam, lam2)
                    edges[e] = (("v", p, i, lam), ("v", p, i, lam2))
                    kinds[e] = "shift"
    return Diagram.with_identities(verts, edges, payload, kinds)


def evaluate_representation(d: Diagram, t, field: FieldSpec = Q, morphisms: Sequence = (),
                            triples: Sequence = ()) -> DiagramRep:
    """Representation at grid value ``t``: ranges of ``H_i(X_t) -> H_i(X_{t+lam})``.

    ``morphisms`` and ``triples`` are the ones the diagram was built from.
    Shift edges ``lam -> lam2`` are induced by ``X_{t+lam} ⊆ X_{t+lam2}``.
    """
    info = {}
    for v in d.vertices:
        pv = d.payload[v]
        fp = pv.filtration
        order = linear_extension(fp.index)
        labels = [fp.index.labels[e] for e in order]
        by_label = dict(zip(labels, order))
        if t not in by_label:
            raise DiagramError(f"{t} is not a grid value of vertex {v!r}")
        lvl = by_label[snap_down(labels, t + pv.shift)]
        amb_pair = fp.sub_pair(lvl)
        rng = image_basis(inclusion_map(fp.sub_pair(by_label[t]), amb_pair, pv.degree, field))
        amb_dim = homology_basis(amb_pair, pv.degree, field).rank
        info[v] = (fp, lvl, rng, amb_dim)
    spaces = {v: len(info[v][2]) for v in d.vertices}

    def restrict(amb: Matrix, v, w) -> Matrix:
        tgt = SubspaceCoordinates(info[w][2], info[w][3], field)
        cols = []
        for vec in info[v][2]:
            img = amb.apply(vec)
            if not tgt.contains(img):
                raise RuntimeError(f"edge {v!r} -> {w!r} leaves the range")
            cols.append(tgt.coords(img))
        return Matrix.from_columns(cols, spaces[w], field)

    maps = {}
    for e, (v, w) in d.edges.items():
        kind = d.kinds.get(e)
        if kind == "id":
            maps[e] = Matrix.identity(spaces[v], field)
            continue
        fv, lv, _, _ = info[v]
        fw, lw, _, _ = info[w]
        if kind == "phi":
            phi = morphisms[e[1]][2]
            amb = induced_map(phi, fv.sub_pair(lv), fw.sub_pair(lw), d.payload[v].degree, field)
        elif kind == "delta":
            outer = fv.sub_pair(lv)
            inner = fw.sub_pair(lw)
            amb = connecting_map(outer.x, outer.y, inner.y, d.payload[v].degree, field)
        elif kind == "shift":
            amb = inclusion_map(fv.sub_pair(lv), fv.sub_pair(lw), d.payload[v].degree, field)
        else:
            raise DiagramError(f"unknown edge kind {kind!r}")
        maps[e] = restrict(amb, v, w)
    return DiagramRep(d, spaces, maps, field)


def commutant_poset_rep(d: Diagram, modules: Mapping, edge_maps: Mapping | None = None) -> EndRing:
    """Natural endomorphisms of a diagram of persistence modules.

    Flattens to one vertex per (diagram vertex, index element) with edges for
    the diagram edges (``edge_maps[e][s]``) and for every cover of the index.
    """
    edge_maps = edge_maps or {}
    mods = [modules[v] for v in d.vertices]
    if not mods:
        return EndRing((), {}, [], Q)
    index, fld = mods[0].index, mods[0].field
    for m in mods:
        if m.index != index or m.field != fld:
            raise DiagramError("modules over different indices or fields")
    verts, spaces, edges, maps = [], {}, {}, {}
    for v in d.vertices:
        for s in index.elements:
            verts.append((v, s))
            spaces[(v, s)] = modules[v].dims[s]
        for a, b in covers(index):
            e = ("cover", v, a, b)
            edges[e] = ((v, a), (v, b))
            maps[e] = modules[v].maps[(a, b)]
    for e in d.non_identity_edges():
        v, w = d.edges[e]
        for s in index.elements:
            ee = ("edge", e, s)
            edges[ee] = ((v, s), (w, s))
            maps[ee] = edge_maps[e][s]
    big = Diagram(tuple(verts), edges)
    return end_ring(big, DiagramRep(big, spaces, maps, fld))


# -- graded structure -----------------------------------------------------------


@dataclass
class GradedStructure:
    """Parity grading, symbolic products and the unit on persistence vertices."""

    def deg(self, v: PersistenceVertex) -> int:
        return v.degree % 2

    def unit(self) -> PersistenceVertex:
        return PersistenceVertex(None, 0, Fraction(0), "unit")

    def product(self, v: PersistenceVertex, w: PersistenceVertex) -> PersistenceVertex:
        if v.is_unit:
            return w
        if w.is_unit:
            return v
        sym = ("x", v.symbol or id(v.filtration), w.symbol or id(w.filtration))
        return PersistenceVertex((v, w), v.degree + w.degree, v.shift + w.shift, sym)

    def alpha(self, v: PersistenceVertex, w: PersistenceVertex) -> tuple:
        """Edge descriptor for the commutativity isomorphism ``v x w -> w x v``."""
        return ("alpha", self.product(v, w), self.product(w, v))

    def beta(self, u, v, w) -> tuple:
        """Edge descriptor for the associativity isomorphism."""
        return ("beta", self.product(self.product(u, v), w), self.product(u, self.product(v, w)))


def _grid(v: PersistenceVertex) -> list:
    if v.is_unit:
        return []
    if isinstance(v.filtration, tuple):
        a, b = v.filtration
        return sorted(set(_grid(a)) | set(_grid(b)))
    fp = v.filtration
    return sorted(fp.index.labels[e] for e in fp.index.elements)


def vertex_module(v: PersistenceVertex, grid: Sequence, field: FieldSpec = Q) -> PersistenceModule:
    """Module assigned to a vertex, sampled on ``grid``.

    Unit: rank-one constant.  Product vertices: tensor product of the
    factors' modules.
    """
    grid = sorted(set(grid))
    if v.is_unit:
        return constant_module(chain_poset(grid), 1, field)
    if isinstance(v.filtration, tuple):
        a, b = v.filtration
        return tensor_product(vertex_module(a, grid, field), vertex_module(b, grid, field))
    return resample(range_module(v.filtration, v.degree, v.shift, field), grid)


def graded_product(g: GradedStructure, v: PersistenceVertex, w: PersistenceVertex, field: FieldSpec = Q,
                   grid: Sequence | None = None) -> tuple[PersistenceVertex, PersistenceModule]:
    """Product vertex (degrees and shifts add) with its tensor-product module."""
    prod = g.product(v, w)
    if grid is None:
        grid = sorted(set(_grid(v)) | set(_grid(w))) or [Fraction(0)]
    return prod, vertex_module(prod, grid, field)


def swap_map(m: PersistenceModule, n: PersistenceModule, deg_m: int, deg_n: int) -> ModuleMorphism:
    """Signed swap ``m ⊗ n -> n ⊗ m`` with sign ``(-1)^(deg_m * deg_n)``."""
    mn, nm = tensor_product(m, n), tensor_product(n, m)
    f = m.field
    sign = f.element(-1 if (deg_m * deg_n) % 2 else 1)
    comps = {}
    for s in m.index.elements:
        a, b = m.dims[s], n.dims[s]
        entries = {(j * a + i, i * b + j): sign for i in range(a) for j in range(b)}
        comps[s] = Matrix.from_sparse(entries, a * b, a * b, f)
    return ModuleMorphism(mn, nm, comps)
