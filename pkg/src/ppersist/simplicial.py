"""Simplicial complexes, pairs and their homology over a field.

Simplices are strictly increasing vertex tuples.  Chains are dicts
``{simplex: coefficient}``.  Homology classes are represented by explicit
cycle representatives so that induced and connecting maps can be written as
matrices in fixed bases.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .linalg import FieldSpec, Matrix, Q, SubspaceCoordinates, image_basis, nullspace_basis, rank, rref

__all__ = [
    "SimplicialComplex",
    "Pair",
    "ChainComplex",
    "HomologyResult",
    "HomologyBasis",
    "NotSimplicial",
    "PairViolation",
    "SubcomplexError",
    "boundary_matrix",
    "homology",
    "relative_homology",
    "homology_basis",
    "induced_map",
    "connecting_map",
    "skeletal_chain_complex",
    "push_chain",
    "inclusion_map",
]


class SubcomplexError(ValueError):
    pass


class NotSimplicial(ValueError):
    def __init__(self, simplex, image):
        super().__init__(f"image {image!r} of simplex {simplex!r} is not a simplex of the target")
        self.witness = simplex


class PairViolation(ValueError):
    def __init__(self, witness):
        super().__init__(f"{witness!r} of the source subcomplex leaves the target subcomplex")
        self.witness = witness


def _faces(s: tuple):
    return [s[:i] + s[i + 1:] for i in range(len(s))]


class SimplicialComplex:
    """Finite abstract simplicial complex.

    With ``close=True`` (default) the given simplices are closed under faces;
    otherwise closure is verified and a missing face raises ``ValueError``.
    """

    __slots__ = ("_all", "simplices", "vertices", "_hash")

    def __init__(self, simplices: Iterable[Sequence] = (), close: bool = True):
        given = set()
        for s in simplices:
            t = tuple(sorted(s))
            if len(set(t)) != len(t):
                raise ValueError(f"repeated vertex in {s!r}")
            if t:
                given.add(t)
        if close:
            allset = set()
            for t in given:
                for r in range(1, len(t) + 1):
                    allset.update(combinations(t, r))
        else:
            allset = given
            for t in given:
                if len(t) > 1:
                    for f in _faces(t):
                        if f not in given:
                            raise SubcomplexError(f"face {f!r} of {t!r} missing")
        self._all = frozenset(allset)
        bydim: dict[int, list] = {}
        for t in allset:
            bydim.setdefault(len(t) - 1, []).append(t)
        self.simplices = {k: tuple(sorted(v)) for k, v in sorted(bydim.items())}
        self.vertices = tuple(t[0] for t in self.simplices.get(0, ()))
        self._hash = None

    @property
    def dimension(self) -> int:
        return max(self.simplices) if self.simplices else -1

    def __len__(self):
        return len(self._all)

    def __iter__(self):
        for k in sorted(self.simplices):
            yield from self.simplices[k]

    def __contains__(self, s) -> bool:
        return tuple(s) in self._all

    def __eq__(self, other):
        return isinstance(other, SimplicialComplex) and self._all == other._all

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self._all)
        return self._hash

    def __le__(self, other: "SimplicialComplex") -> bool:
        return self._all <= other._all

    def __repr__(self):
        counts = [len(self.simplices[k]) for k in sorted(self.simplices)]
        return f"SimplicialComplex(f-vector={counts})"

    def of_dim(self, k: int) -> tuple:
        return self.simplices.get(k, ())

    def skeleton(self, j: int) -> "SimplicialComplex":
        return SimplicialComplex([s for s in self._all if len(s) <= j + 1], close=False)

    def induced(self, vertices: Iterable) -> "SimplicialComplex":
        """Full subcomplex on a vertex subset."""
        vs = set(vertices)
        return SimplicialComplex([s for s in self._all if vs.issuperset(s)], close=False)

    def restrict(self, keep) -> "SimplicialComplex":
        """Subcomplex of the simplices satisfying ``keep`` (must be face-closed)."""
        return SimplicialComplex([s for s in self._all if keep(s)], close=False)

    @property
    def all_simplices(self) -> frozenset:
        return self._all


EMPTY = SimplicialComplex()


@dataclass(frozen=True)
class Pair:
    """``(x, y)`` with ``y`` a subcomplex of ``x``."""

    x: SimplicialComplex
    y: SimplicialComplex = EMPTY

    def __post_init__(self):
        if not self.y <= self.x:
            bad = min(self.y.all_simplices - self.x.all_simplices)
            raise SubcomplexError(f"simplex {bad!r} of y is not in x")

    def relative_simplices(self, k: int) -> tuple:
        ys = self.y.all_simplices
        return tuple(s for s in self.x.of_dim(k) if s not in ys)


@dataclass
class ChainComplex:
    """``boundaries[k]`` is the matrix of C_k -> C_{k-1} (shape dims[k-1] x dims[k])."""

    dims: tuple
    boundaries: dict
    field: FieldSpec = Q

    def __post_init__(self):
        for k, d in self.boundaries.items():
            if d.shape != (self.dims[k - 1], self.dims[k]):
                raise ValueError(f"boundary {k} has shape {d.shape}")

    def boundary(self, k: int) -> Matrix:
        if k in self.boundaries:
            return self.boundaries[k]
        rows = self.dims[k - 1] if 0 <= k - 1 < len(self.dims) else 0
        cols = self.dims[k] if 0 <= k < len(self.dims) else 0
        return Matrix.zeros(rows, cols, self.field)

    def is_complex(self) -> bool:
        return all((self.boundary(k) @ self.boundary(k + 1)).is_zero() for k in range(1, len(self.dims)))

    def betti(self, k: int) -> int:
        if not 0 <= k < len(self.dims):
            return 0
        return self.dims[k] - rank(self.boundary(k)) - rank(self.boundary(k + 1))


@dataclass
class HomologyResult:
    degree: int
    rank: int
    cycle_basis: list = field(default_factory=list)


def _sign_matrix(rows: Sequence, cols: Sequence, field: FieldSpec) -> Matrix:
    ridx = {s: i for i, s in enumerate(rows)}
    entries = {}
    one, neg_one = field.one, field.neg(field.one)
    for j, s in enumerate(cols):
        for pos, f in enumerate(_faces(s)):
            i = ridx.get(f)
            if i is not None:
                entries[(i, j)] = one if pos % 2 == 0 else neg_one
    return Matrix.from_sparse(entries, len(rows), len(cols), field)


def boundary_matrix(x: SimplicialComplex, k: int, field: FieldSpec = Q) -> Matrix:
    """Simplicial boundary ``C_k -> C_{k-1}`` in lexicographic simplex order.

    Entry (face, simplex) is ``(-1)**i`` where the face omits vertex ``i``.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    return _sign_matrix(x.of_dim(k - 1), x.of_dim(k), field)


def _relative_boundary(p: Pair, k: int, field: FieldSpec) -> Matrix:
    return _sign_matrix(p.relative_simplices(k - 1), p.relative_simplices(k), field)


class HomologyBasis:
    """A basis of ``H_k(X, Y)`` by cycle representatives.

    Representatives are the cycles picked greedily (in nullspace order) to
    extend a basis of the boundaries.
    """

    def __init__(self, pair: Pair, k: int, field: FieldSpec = Q):
        self.pair = pair
        self.degree = k
        self.field = field
        self.simplices = pair.relative_simplices(k)
        self.index = {s: i for i, s in enumerate(self.simplices)}
        n = len(self.simplices)
        if k == 0:
            cycles = [tuple(field.one if i == j else field.zero for i in range(n)) for j in range(n)]
        else:
            cycles = nullspace_basis(_relative_boundary(pair, k, field)) if n else []
        up = _relative_boundary(pair, k + 1, field) if n else None
        bounds = image_basis(up) if up is not None and up.ncols else []
        reps = []
        if cycles:
            M = Matrix.from_columns(bounds + cycles, n, field)
            _, piv = rref(M)
            nb = len(bounds)
            reps = [cycles[j - nb] for j in piv if j >= nb]
        self.boundaries = bounds
        self.reps = reps
        self.rank = len(reps)
        self._coords = SubspaceCoordinates(bounds + reps, n, field) if n else None

    def vector(self, chain: Mapping) -> tuple:
        """Coefficient vector of a relative chain (simplices in Y are dropped)."""
        f = self.field
        v = [f.zero] * len(self.simplices)
        for s, c in chain.items():
            i = self.index.get(s)
            if i is not None:
                v[i] = f.add(v[i], f.element(c))
            elif s not in self.pair.y:
                raise KeyError(f"{s!r} is not a simplex of the pair")
        return tuple(v)

    def chain(self, vec: Sequence) -> dict:
        return {s: c for s, c in zip(self.simplices, vec) if c}

    def coords(self, chain: Mapping) -> tuple:
        """Homology coordinates of a relative cycle."""
        if self.rank == 0:
            return ()
        c = self._coords.coords(self.vector(chain))
        return tuple(c[len(self.boundaries):])

    def rep_chains(self) -> list[dict]:
        return [self.chain(r) for r in self.reps]

    def result(self) -> HomologyResult:
        return HomologyResult(self.degree, self.rank, self.rep_chains())


@lru_cache(maxsize=8192)
def homology_basis(pair: Pair, k: int, field: FieldSpec = Q) -> HomologyBasis:
    return HomologyBasis(pair, k, field)


def homology(x: SimplicialComplex, k: int, field: FieldSpec = Q) -> HomologyResult:
    """Unreduced ``H_k(X)``."""
    return homology_basis(Pair(x), k, field).result()


def relative_homology(p: Pair, k: int, field: FieldSpec = Q) -> HomologyResult:
    """``H_k`` of the quotient complex ``C(X)/C(Y)``."""
    return homology_basis(p, k, field).result()


def _perm_sign(seq: Sequence) -> int:
    sign = 1
    seq = list(seq)
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


def push_chain(phi: Mapping, chain: Mapping, field: FieldSpec) -> dict:
    """Chain-level image under a vertex map; degenerate images vanish."""
    out: dict = {}
    for s, c in chain.items():
        img = [phi[v] for v in s]
        if len(set(img)) < len(img):
            continue
        t = tuple(sorted(img))
        c = field.element(c)
        if _perm_sign(img) < 0:
            c = field.neg(c)
        out[t] = field.add(out.get(t, field.zero), c)
    return {s: c for s, c in out.items() if c}


def check_simplicial(phi: Mapping, source: Pair, target: Pair):
    for s in source.x:
        for v in s:
            if v not in phi:
                raise NotSimplicial(s, None)
        img = tuple(sorted(set(phi[v] for v in s)))
        if img not in target.x:
            raise NotSimplicial(s, img)
    for s in source.y:
        img = tuple(sorted(set(phi[v] for v in s)))
        if img not in target.y:
            bad = next(((v,) for v in s if (phi[v],) not in target.y), s)
            raise PairViolation(bad[0] if len(bad) == 1 else bad)


def induced_map(phi: Mapping, source: Pair, target: Pair, k: int, field: FieldSpec = Q) -> Matrix:
    """Matrix of ``H_k(X, Y) -> H_k(X', Y')`` in the representative bases."""
    check_simplicial(phi, source, target)
    hs = homology_basis(source, k, field)
    ht = homology_basis(target, k, field)
    ys = target.y.all_simplices
    cols = []
    for rep in hs.rep_chains():
        img = {s: c for s, c in push_chain(phi, rep, field).items() if s not in ys}
        cols.append(ht.coords(img))
    return Matrix.from_columns(cols, ht.rank, field)


def inclusion_map(source: Pair, target: Pair, k: int, field: FieldSpec = Q) -> Matrix:
    """Map induced by inclusion of pairs (identity on vertices)."""
    ident = {v: v for v in source.x.vertices}
    return induced_map(ident, source, target, k, field)


def _chain_boundary(chain: Mapping, field: FieldSpec) -> dict:
    out: dict = {}
    for s, c in chain.items():
        if len(s) < 2:
            continue
        for pos, f in enumerate(_faces(s)):
            v = c if pos % 2 == 0 else field.neg(c)
            out[f] = field.add(out.get(f, field.zero), v)
    return {s: c for s, c in out.items() if c}


def connecting_map(x: SimplicialComplex, y: SimplicialComplex, z: SimplicialComplex, k: int,
                   field: FieldSpec = Q) -> Matrix:
    """Connecting map ``H_k(X, Y) -> H_{k-1}(Y, Z)`` for ``Z ⊆ Y ⊆ X``.

    Lift a relative cycle to X, take its boundary (which lies in Y) and
    reduce modulo Z.
    """
    if not z <= y:
        raise SubcomplexError("Z is not a subcomplex of Y")
    if not y <= x:
        raise SubcomplexError("Y is not a subcomplex of X")
    src = homology_basis(Pair(x, y), k, field)
    if k == 0:
        return Matrix.zeros(0, src.rank, field)
    tgt = homology_basis(Pair(y, z), k - 1, field)
    zs = z.all_simplices
    cols = []
    for rep in src.rep_chains():
        bd = _chain_boundary(rep, field)
        if any(s not in y for s in bd):
            raise RuntimeError("relative cycle has boundary outside Y")
        cols.append(tgt.coords({s: c for s, c in bd.items() if s not in zs}))
    return Matrix.from_columns(cols, tgt.rank, field)


def skeletal_chain_complex(x: SimplicialComplex, field: FieldSpec = Q) -> ChainComplex:
    """Complex with ``H_j(X^(j), X^(j-1))`` in degree j and connecting maps as differentials."""
    top = x.dimension
    skel = {j: x.skeleton(j) for j in range(top + 1)}
    skel[-1] = EMPTY
    skel[-2] = EMPTY
    dims = tuple(homology_basis(Pair(skel[j], skel[j - 1]), j, field).rank for j in range(top + 1))
    bds = {}
    for j in range(1, top + 1):
        bds[j] = connecting_map(skel[j], skel[j - 1], skel[j - 2], j, field)
    return ChainComplex(dims, bds, field)
