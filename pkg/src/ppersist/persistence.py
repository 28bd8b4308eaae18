"""Persistence modules over finite posets and their one-parameter invariants.

Modules over a labelled chain are read as step functions on the line: the
space at a real value ``t`` is the space at the largest label ``<= t``, and
zero below the first label.  Barcodes use half-open bars ``[birth, death)``
with ``death = math.inf`` for classes that never die.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .filtration import FilteredPair
from .linalg import FieldSpec, Matrix, Q, SubspaceCoordinates, image_basis, inverse, rank, solve
from .poset import FinitePoset, PosetError, chain_poset, covers, linear_extension
from .simplicial import HomologyResult, homology_basis, inclusion_map

__all__ = [
    "INF",
    "PersistenceModule",
    "ModuleMorphism",
    "RankInvariant",
    "Barcode",
    "BarcodeComparison",
    "IncomparableIndices",
    "NotFiniteType",
    "BarcodeMismatch",
    "module_from_filtration",
    "persistent_range",
    "rank_invariant",
    "barcode_1d",
    "filtration_barcode",
    "module_criticals",
    "is_finite_type_and_tame",
    "discretize_Z",
    "discretize_morphism",
    "direct_discretization",
    "reconstruct_R",
    "resample",
    "interval_basis",
    "find_isomorphism",
    "interval_module",
    "constant_module",
    "direct_sum",
    "tensor_product",
    "range_module",
    "is_good_vertex",
    "compare_barcodes",
    "snap_down",
]

INF = math.inf


class IncomparableIndices(PosetError):
    def __init__(self, s, t):
        super().__init__(f"{s!r} is not <= {t!r}")
        self.witness = (s, t)


class NotFiniteType(ValueError):
    pass


class BarcodeMismatch(ValueError):
    pass


class PersistenceModule:
    """Functor from a finite poset to vector spaces, stored on cover relations.

    ``maps[(a, b)]`` is the ``dims[b] x dims[a]`` matrix for each cover
    ``a < b``; missing covers between zero spaces are filled in.
    """

    def __init__(self, index: FinitePoset, dims: Mapping, maps: Mapping, field: FieldSpec = Q):
        self.index = index
        self.field = field
        self.dims = {s: int(dims.get(s, 0)) for s in index.elements}
        self.maps = {}
        for a, b in covers(index):
            m = maps.get((a, b))
            if m is None:
                if self.dims[a] and self.dims[b]:
                    raise ValueError(f"missing structure map on cover {(a, b)!r}")
                m = Matrix.zeros(self.dims[b], self.dims[a], field)
            if m.shape != (self.dims[b], self.dims[a]):
                raise ValueError(f"map on {(a, b)!r} has shape {m.shape}, expected {(self.dims[b], self.dims[a])}")
            if m.field != field:
                raise ValueError("field mismatch")
            self.maps[(a, b)] = m
        self._order = None
        self._comp: dict = {}

    def __repr__(self):
        return f"PersistenceModule(|index|={len(self.index)}, total dim={sum(self.dims.values())})"

    @property
    def order(self) -> list:
        if self._order is None:
            self._order = linear_extension(self.index)
        return self._order

    def is_chain(self) -> bool:
        return self.index.is_chain()

    def labels(self) -> list:
        return [self.index.labels[e] for e in self.order]

    def identity(self, s) -> Matrix:
        return Matrix.identity(self.dims[s], self.field)

    def composite(self, s, t) -> Matrix:
        """Structure map ``s -> t`` along one cover path (``s <= t``)."""
        if not self.index.le(s, t):
            raise IncomparableIndices(s, t)
        if s == t:
            return self.identity(s)
        key = (s, t)
        got = self._comp.get(key)
        if got is not None:
            return got
        # step down from t through a lower cover that stays above s
        for u, v in self._lower_covers(t):
            if self.index.le(s, u):
                got = self.maps[(u, v)] @ self.composite(s, u)
                break
        self._comp[key] = got
        return got

    def _lower_covers(self, t):
        if not hasattr(self, "_lc"):
            lc: dict = {}
            for a, b in self.maps:
                lc.setdefault(b, []).append((a, b))
            self._lc = lc
        return self._lc.get(t, [])

    def check_path_independence(self) -> bool:
        """All cover-path composites between two fixed elements agree."""
        for t in self.order:
            lcs = self._lower_covers(t)
            if len(lcs) < 2:
                continue
            for s in self.index.down(t):
                if s == t:
                    continue
                vals = {self.maps[(u, t)] @ self.composite(s, u) for u, _ in lcs if self.index.le(s, u)}
                if len(vals) > 1:
                    return False
        return True

    def is_zero(self) -> bool:
        return not any(self.dims.values())

    def restrict(self, elements: Sequence) -> "PersistenceModule":
        """Restriction to a chain of elements listed in order (composites on consecutive pairs)."""
        els = list(elements)
        idx = chain_poset(els)
        idx.labels = {e: self.index.labels[e] for e in els}
        maps = {(a, b): self.composite(a, b) for a, b in zip(els, els[1:])}
        return PersistenceModule(idx, {e: self.dims[e] for e in els}, maps, self.field)


@dataclass
class ModuleMorphism:
    source: PersistenceModule
    target: PersistenceModule
    components: dict

    def __post_init__(self):
        for s in self.source.index.elements:
            c = self.components.get(s)
            if c is None:
                c = Matrix.zeros(self.target.dims[s], self.source.dims[s], self.source.field)
                self.components[s] = c
            if c.shape != (self.target.dims[s], self.source.dims[s]):
                raise ValueError(f"component at {s!r} has the wrong shape")

    def is_natural(self) -> bool:
        for (a, b), m in self.source.maps.items():
            if self.target.maps[(a, b)] @ self.components[a] != self.components[b] @ m:
                return False
        return True

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components.values())

    def compose(self, after: "ModuleMorphism") -> "ModuleMorphism":
        return ModuleMorphism(self.source, after.target,
                              {s: after.components[s] @ self.components[s] for s in self.components})


@dataclass
class RankInvariant:
    ranks: dict

    def __getitem__(self, st):
        return self.ranks[st]

    def __eq__(self, other):
        return isinstance(other, RankInvariant) and self.ranks == other.ranks

    def check(self, index: FinitePoset, dims: Mapping) -> bool:
        for s in index.elements:
            if self.ranks[(s, s)] != dims[s]:
                return False
        for (a, c), r in self.ranks.items():
            for b in index.up(a):
                if index.le(b, c) and r > min(self.ranks[(a, b)], self.ranks[(b, c)]):
                    return False
        return True


def _fmt(x) -> str:
    if x == INF:
        return "inf"
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class Barcode:
    """Multiset of half-open bars, kept sorted by ``(birth, death)``."""

    degree: int
    bars: tuple = ()

    def __post_init__(self):
        bars = []
        for b, d in self.bars:
            b = Fraction(b)
            d = INF if d == INF or d is None else Fraction(d)
            if not b <= d:
                raise ValueError(f"bar ({b}, {d}) has birth after death")
            bars.append((b, d))
        object.__setattr__(self, "bars", tuple(sorted(bars)))

    def __len__(self):
        return len(self.bars)

    def nontrivial(self) -> "Barcode":
        return Barcode(self.degree, tuple(b for b in self.bars if b[0] < b[1]))

    def count_containing(self, s, t) -> int:
        """Bars alive on all of ``[s, t]``."""
        return sum(1 for b, d in self.bars if b <= s and t < d)

    def endpoints(self) -> list:
        pts = {b for b, _ in self.bars} | {d for _, d in self.bars if d != INF}
        return sorted(pts)

    def __str__(self):
        return "{" + ", ".join(f"[{_fmt(b)}, {_fmt(d)})" for b, d in self.bars) + "}"


@dataclass(frozen=True)
class BarcodeComparison:
    equal: bool
    bottleneck: object


# -- modules from filtrations ---------------------------------------------------


def module_from_filtration(fp: FilteredPair, k: int, field: FieldSpec = Q, threads: int | None = None
                           ) -> PersistenceModule:
    """``s -> H_k(X_s, Y_s)`` with maps induced by inclusion on covers."""
    elements = list(fp.index.elements)

    def basis(s):
        return homology_basis(fp.sub_pair(s), k, field)

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            bases = list(ex.map(basis, elements))
    else:
        bases = [basis(s) for s in elements]
    dims = {s: b.rank for s, b in zip(elements, bases)}
    maps = {}
    for a, b in covers(fp.index):
        maps[(a, b)] = inclusion_map(fp.sub_pair(a), fp.sub_pair(b), k, field)
    m = PersistenceModule(fp.index, dims, maps, field)
    return m


def persistent_range(fp: FilteredPair, k: int, s, t, field: FieldSpec = Q) -> HomologyResult:
    """Image of ``H_k(X_s, Y_s) -> H_k(X_t, Y_t)`` with cycle representatives in ``X_t``."""
    if not fp.index.le(s, t):
        raise IncomparableIndices(s, t)
    src, tgt = fp.sub_pair(s), fp.sub_pair(t)
    m = inclusion_map(src, tgt, k, field)
    hb = homology_basis(tgt, k, field)
    cols = image_basis(m)
    reps = hb.rep_chains()
    chains = []
    for c in cols:
        chain: dict = {}
        for coef, rep in zip(c, reps):
            if coef:
                for sx, v in rep.items():
                    chain[sx] = field.add(chain.get(sx, field.zero), field.mul(coef, v))
        chains.append({sx: v for sx, v in chain.items() if v})
    return HomologyResult(k, len(cols), chains)


def rank_invariant(m: PersistenceModule) -> RankInvariant:
    ranks = {}
    for s in m.order:
        for t in m.index.up(s):
            ranks[(s, t)] = rank(m.composite(s, t))
    return RankInvariant(ranks)


# -- one-parameter structure -----------------------------------------------------


def _chain_order(m: PersistenceModule) -> list:
    if not m.is_chain():
        raise PosetError("operation needs a chain index")
    return m.order


def barcode_1d(m: PersistenceModule, unbounded_above: bool = True, degree: int = 0) -> Barcode:
    """Interval decomposition of a chain module from its rank invariant.

    The multiplicity of ``[l_i, l_j)`` is the inclusion-exclusion
    ``r(i, j-1) - r(i-1, j-1) - r(i, j) + r(i-1, j)``.  Bars alive at the
    last label get death ``inf``; with ``unbounded_above=False`` such bars
    are an error.
    """
    order = _chain_order(m)
    labels = [m.index.labels[e] for e in order]
    n = len(order)
    r = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            r[i][j] = rank(m.composite(order[i], order[j]))

    def R(i, j):
        if i < 0 or j >= n:
            return 0
        return r[i][j]

    bars = []
    for i in range(n):
        for j in range(i + 1, n + 1):
            mult = R(i, j - 1) - R(i - 1, j - 1) - R(i, j) + R(i - 1, j)
            if mult < 0:
                raise RuntimeError("negative interval multiplicity")
            if mult and j == n and not unbounded_above:
                raise ValueError(f"{mult} bar(s) born at {labels[i]} survive the last label")
            death = labels[j] if j < n else INF
            bars.extend([(labels[i], death)] * mult)
    return Barcode(degree, tuple(bars))


def filtration_barcode(fp: FilteredPair, k: int, field: FieldSpec = Q) -> Barcode:
    """Barcode of an absolute one-parameter filtration by column reduction.

    Simplices are ordered by (entry, dimension, lexicographic); zero-length
    bars are dropped.
    """
    if len(fp.pair.y):
        raise ValueError("column reduction is implemented for absolute filtrations")
    entry = fp.entry
    labels = fp.index.labels
    simplices = sorted(fp.pair.x, key=lambda s: (labels[entry[s]], len(s), s))
    pos = {s: i for i, s in enumerate(simplices)}
    cols = []
    for s in simplices:
        col = {}
        if len(s) > 1:
            for p in range(len(s)):
                f = s[:p] + s[p + 1:]
                col[pos[f]] = field.one if p % 2 == 0 else field.neg(field.one)
        cols.append(col)
    low_of: dict = {}
    pairs = {}
    for j, col in enumerate(cols):
        while col:
            low = max(col)
            i = low_of.get(low)
            if i is None:
                break
            other = cols[i]
            c = field.mul(col[low], field.inv(other[low]))
            for r, v in other.items():
                nv = field.sub(col.get(r, field.zero), field.mul(c, v))
                if nv:
                    col[r] = nv
                else:
                    col.pop(r, None)
        if col:
            low = max(col)
            low_of[low] = j
            pairs[low] = j
    paired = set(pairs) | set(pairs.values())
    bars = []
    for i, s in enumerate(simplices):
        if len(s) - 1 != k:
            continue
        b = labels[entry[s]]
        if i in pairs:
            d = labels[entry[simplices[pairs[i]]]]
            if b < d:
                bars.append((b, d))
        elif i not in paired:
            bars.append((b, INF))
    return Barcode(k, tuple(bars))


def _is_iso(m: Matrix) -> bool:
    return m.nrows == m.ncols and rank(m) == m.nrows


def module_criticals(m: PersistenceModule) -> list:
    """Labels where the step function changes (first label if nonzero there)."""
    order = _chain_order(m)
    out = []
    for i, e in enumerate(order):
        if i == 0:
            if m.dims[e]:
                out.append(m.index.labels[e])
        elif not _is_iso(m.maps[(order[i - 1], e)]):
            out.append(m.index.labels[e])
    return out


def is_finite_type_and_tame(m: PersistenceModule) -> tuple[bool, list]:
    """Check the interval decomposition reproduces dims and ranks; return the criticals."""
    bc = barcode_1d(m)
    order = _chain_order(m)
    labels = [m.index.labels[e] for e in order]
    ok = True
    for i, e in enumerate(order):
        for j in range(i, len(order)):
            if bc.count_containing(labels[i], labels[j]) != rank(m.composite(e, order[j])):
                ok = False
    crit = module_criticals(m)
    if sorted(crit) != bc.endpoints():
        ok = False
    return ok, crit


def _int_chain(M: int) -> FinitePoset:
    return chain_poset(list(range(-1, M + 1)))


def discretize_Z(m: PersistenceModule, criticals: Sequence | None = None) -> PersistenceModule:
    """Integer-indexed module sampling the open intervals between criticals.

    Index ``-1`` stands for every ``n < 0`` (values below the first
    critical), index ``M`` for every ``n >= M``.  A supplied ``criticals``
    list must refine the module's own.
    """
    order = _chain_order(m)
    lab = {m.index.labels[e]: e for e in order}
    own = module_criticals(m)
    crit = list(own) if criticals is None else sorted(criticals)
    missing = set(own) - set(crit)
    if missing:
        raise NotFiniteType(f"module changes at {sorted(missing)} outside the given criticals")
    if not set(crit) <= set(lab):
        raise NotFiniteType("criticals must be labels of the module")
    M = len(crit) - 1
    els = [lab[c] for c in crit]
    dims = {-1: 0}
    maps = {}
    for n, e in enumerate(els):
        dims[n] = m.dims[e]
    if M >= 0:
        maps[(-1, 0)] = Matrix.zeros(dims[0], 0, m.field)
    for n in range(M):
        maps[(n, n + 1)] = m.composite(els[n], els[n + 1])
    return PersistenceModule(_int_chain(M), dims, maps, m.field)


def discretize_morphism(f: ModuleMorphism, criticals: Sequence) -> ModuleMorphism:
    """Apply the discretization to a morphism on a common critical grid."""
    src = discretize_Z(f.source, criticals)
    tgt = discretize_Z(f.target, criticals)
    lab = {f.source.index.labels[e]: e for e in f.source.order}
    comps = {n: f.components[lab[c]] for n, c in enumerate(sorted(criticals))}
    return ModuleMorphism(src, tgt, comps)


def direct_discretization(fp: FilteredPair, k: int, criticals: Sequence, field: FieldSpec = Q
                          ) -> PersistenceModule:
    """Integer module read off the filtration at one sample per intercritical interval."""
    crit = sorted(Fraction(c) for c in criticals)
    M = len(crit) - 1
    if M < 0:
        samples = [Fraction(0)]
    else:
        samples = [crit[0] - 1]
        samples += [(a + b) / 2 for a, b in zip(crit, crit[1:])]
        samples.append(crit[-1] + 1)
    pairs = [fp.sub_pair_at_value(t) for t in samples]
    dims = {n - 1: homology_basis(p, k, field).rank for n, p in enumerate(pairs)}
    maps = {(n - 2, n - 1): inclusion_map(pairs[n - 1], pairs[n], k, field) for n in range(1, len(pairs))}
    return PersistenceModule(_int_chain(M), dims, maps, field)


def reconstruct_R(fz: PersistenceModule, barcode: Barcode) -> PersistenceModule:
    """Module over the critical labels rebuilt from the integer module and the bars."""
    crit = barcode.endpoints()
    order = _chain_order(fz)
    if order != list(range(-1, len(crit))):
        raise BarcodeMismatch(f"integer window {order[0]}..{order[-1]} does not fit {len(crit)} criticals")
    if fz.dims[-1] != 0:
        raise BarcodeMismatch("nonzero space below the first critical value")
    for n, c in enumerate(crit):
        if fz.dims[n] != barcode.count_containing(c, c):
            raise BarcodeMismatch(f"dimension {fz.dims[n]} at n={n} but {barcode.count_containing(c, c)} bars")
        for n2 in range(n + 1, len(crit)):
            if rank(fz.composite(n, n2)) != barcode.count_containing(c, crit[n2]):
                raise BarcodeMismatch(f"rank of {n}->{n2} disagrees with the bars")
    idx = chain_poset(crit)
    dims = {c: fz.dims[n] for n, c in enumerate(crit)}
    maps = {(a, b): fz.maps[(n, n + 1)] for n, (a, b) in enumerate(zip(crit, crit[1:]))}
    return PersistenceModule(idx, dims, maps, fz.field)


def snap_down(labels: Sequence, t):
    """Largest label ``<= t`` or ``None``."""
    best = None
    for x in labels:
        if x <= t and (best is None or x > best):
            best = x
    return best


def resample(m: PersistenceModule, labels: Sequence) -> PersistenceModule:
    """Evaluate the step function of a chain module on new labels."""
    order = _chain_order(m)
    by_label = {m.index.labels[e]: e for e in order}
    own = sorted(by_label)
    new = sorted(set(labels))
    src = {t: (by_label[snap_down(own, t)] if snap_down(own, t) is not None else None) for t in new}
    dims = {t: (m.dims[src[t]] if src[t] is not None else 0) for t in new}
    maps = {}
    for a, b in zip(new, new[1:]):
        if src[a] is None:
            maps[(a, b)] = Matrix.zeros(dims[b], 0, m.field)
        else:
            maps[(a, b)] = m.composite(src[a], src[b])
    return PersistenceModule(chain_poset(new), dims, maps, m.field)


@dataclass
class IntervalGenerator:
    birth: int
    death: int
    vectors: dict = field(default_factory=dict)


def interval_basis(m: PersistenceModule) -> list[IntervalGenerator]:
    """Basis of a chain module adapted to its interval decomposition.

    Positions are indices along the chain; ``death == len(chain)`` means the
    generator never dies.  When pushed images become dependent the youngest
    generator dies and its history is corrected so that it maps to zero.
    """
    order = _chain_order(m)
    f = m.field
    gens: list[IntervalGenerator] = []
    alive: list[int] = []
    for i, e in enumerate(order):
        dim = m.dims[e]
        survivors: list[int] = []
        images: list[tuple] = []
        if i > 0:
            A = m.maps[(order[i - 1], e)]
            for g in alive:
                w = A.apply(gens[g].vectors[i - 1])
                coeffs = None
                if images:
                    coeffs = solve(Matrix.from_columns(images, dim, f), w)
                elif not any(w):
                    coeffs = ()
                if coeffs is None:
                    survivors.append(g)
                    images.append(w)
                    gens[g].vectors[i] = w
                    continue
                gen = gens[g]
                for q in range(gen.birth, i):
                    v = list(gen.vectors[q])
                    for c, h in zip(coeffs, survivors):
                        if c:
                            hv = gens[h].vectors[q]
                            v = [f.sub(a, f.mul(c, b)) for a, b in zip(v, hv)]
                    gen.vectors[q] = tuple(v)
                gen.death = i
        basis = list(images)
        cur = rank(Matrix.from_columns(basis, dim, f)) if basis else 0
        for j in range(dim):
            if cur == dim:
                break
            ej = tuple(f.one if t == j else f.zero for t in range(dim))
            trial = basis + [ej]
            if rank(Matrix.from_columns(trial, dim, f)) > cur:
                basis = trial
                cur += 1
                gens.append(IntervalGenerator(i, len(order), {i: ej}))
                survivors.append(len(gens) - 1)
        alive = survivors
    return gens


def find_isomorphism(m: PersistenceModule, n: PersistenceModule) -> dict | None:
    """Pointwise-invertible natural transformation ``m -> n`` between chain modules, or None.

    Built by matching interval bases; the result is verified (invertible
    components, commuting squares) before it is returned.
    """
    if list(m.order) != list(n.order) or m.field != n.field:
        return None
    if m.dims != n.dims:
        return None
    gm, gn = interval_basis(m), interval_basis(n)
    key = lambda g: (g.birth, g.death)
    if sorted(map(key, gm)) != sorted(map(key, gn)):
        return None
    gm.sort(key=key)
    gn.sort(key=key)
    f = m.field
    alpha = {}
    for i, e in enumerate(m.order):
        d = m.dims[e]
        cm = [g.vectors[i] for g in gm if g.birth <= i < g.death]
        cn = [g.vectors[i] for g in gn if g.birth <= i < g.death]
        if d == 0:
            alpha[e] = Matrix.zeros(0, 0, f)
            continue
        Bm = Matrix.from_columns(cm, d, f)
        Bn = Matrix.from_columns(cn, d, f)
        alpha[e] = Bn @ inverse(Bm)
    for e in m.order:
        if not _is_iso(alpha[e]):
            return None
    if not ModuleMorphism(m, n, dict(alpha)).is_natural():
        return None
    return alpha


# -- constructions ------------------------------------------------------------


def interval_module(labels: Sequence, birth, death, field: FieldSpec = Q) -> PersistenceModule:
    """``[birth, death)`` sampled on a chain of labels (identity inside)."""
    idx = chain_poset(list(labels))
    inside = {t: (birth <= t < death) for t in labels}
    dims = {t: int(v) for t, v in inside.items()}
    maps = {}
    for a, b in zip(labels, labels[1:]):
        if inside[a] and inside[b]:
            maps[(a, b)] = Matrix.identity(1, field)
    return PersistenceModule(idx, dims, maps, field)


def constant_module(index: FinitePoset, dim: int, field: FieldSpec = Q) -> PersistenceModule:
    maps = {c: Matrix.identity(dim, field) for c in covers(index)}
    return PersistenceModule(index, {s: dim for s in index.elements}, maps, field)


def _block_diag(a: Matrix, b: Matrix) -> Matrix:
    f = a.field
    top = a.hstack(Matrix.zeros(a.nrows, b.ncols, f))
    bot = Matrix.zeros(b.nrows, a.ncols, f).hstack(b)
    return top.vstack(bot)


def direct_sum(m: PersistenceModule, n: PersistenceModule) -> PersistenceModule:
    if m.index != n.index or m.field != n.field:
        raise ValueError("modules live on different indices")
    dims = {s: m.dims[s] + n.dims[s] for s in m.index.elements}
    maps = {c: _block_diag(m.maps[c], n.maps[c]) for c in m.maps}
    return PersistenceModule(m.index, dims, maps, m.field)


def tensor_product(m: PersistenceModule, n: PersistenceModule) -> PersistenceModule:
    """Pointwise tensor product; structure maps are Kronecker products."""
    if m.index != n.index or m.field != n.field:
        raise ValueError("modules live on different indices")
    dims = {s: m.dims[s] * n.dims[s] for s in m.index.elements}
    maps = {c: m.maps[c].kron(n.maps[c]) for c in m.maps}
    return PersistenceModule(m.index, dims, maps, m.field)


def _chain_labels(fp: FilteredPair) -> list:
    if not fp.index.is_chain():
        raise PosetError("needs a chain index")
    order = linear_extension(fp.index)
    return order


def _range_basis(fp, k, s, t, field):
    """Range of H_k(X_s) -> H_k(X_t) as coordinate vectors in the basis at t."""
    return image_basis(inclusion_map(fp.sub_pair(s), fp.sub_pair(t), k, field))


def range_module(fp: FilteredPair, k: int, lam=0, field: FieldSpec = Q) -> PersistenceModule:
    """``t -> Range(H_k(X_t) -> H_k(X_{t+lam}))`` on a labelled chain.

    ``t + lam`` is snapped down to the grid; structure maps are induced by
    inclusion and restricted to the ranges.
    """
    order = _chain_labels(fp)
    labels = [fp.index.labels[e] for e in order]
    shifted = {e: order[labels.index(snap_down(labels, fp.index.labels[e] + lam))] for e in order}
    ranges = {e: _range_basis(fp, k, e, shifted[e], field) for e in order}
    dims = {e: len(ranges[e]) for e in order}
    maps = {}
    for a, b in zip(order, order[1:]):
        amb = inclusion_map(fp.sub_pair(shifted[a]), fp.sub_pair(shifted[b]), k, field)
        tgt = SubspaceCoordinates(ranges[b], amb.nrows, field)
        cols = [tgt.coords(amb.apply(v)) for v in ranges[a]]
        maps[(a, b)] = Matrix.from_columns(cols, dims[b], field)
    return PersistenceModule(fp.index, dims, maps, field)


def is_good_vertex(fp: FilteredPair, k: int, lam=0, field: FieldSpec = Q, max_degree: int | None = None) -> bool:
    """Persistent homology at shift ``lam`` vanishes in every degree but ``k``."""
    order = _chain_labels(fp)
    labels = [fp.index.labels[e] for e in order]
    top = fp.pair.x.dimension if max_degree is None else max_degree
    for e in order:
        t = fp.index.labels[e]
        e2 = order[labels.index(snap_down(labels, t + lam))]
        for j in range(0, top + 1):
            if j != k and _range_basis(fp, j, e, e2, field):
                return False
    return True


# -- barcode comparison -------------------------------------------------------


def compare_barcodes(a: Barcode, b: Barcode) -> BarcodeComparison:
    """Multiset equality and exact bottleneck distance (diagonal padding)."""
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import maximum_bipartite_matching

    equal = a.bars == b.bars
    fin_a = [x for x in a.bars if x[1] != INF]
    fin_b = [x for x in b.bars if x[1] != INF]
    inf_a = sorted(x[0] for x in a.bars if x[1] == INF)
    inf_b = sorted(x[0] for x in b.bars if x[1] == INF)
    if len(inf_a) != len(inf_b):
        return BarcodeComparison(equal, INF)
    # essential bars match in sorted birth order
    floor = max((abs(x - y) for x, y in zip(inf_a, inf_b)), default=Fraction(0))

    def dist(p, q):
        return max(abs(p[0] - q[0]), abs(p[1] - q[1]))

    def diag(p):
        return (p[1] - p[0]) / 2

    na, nb = len(fin_a), len(fin_b)
    cands = {Fraction(0), floor}
    cands.update(dist(p, q) for p in fin_a for q in fin_b)
    cands.update(diag(p) for p in fin_a)
    cands.update(diag(q) for q in fin_b)
    cands = sorted(c for c in cands if c >= floor)

    def feasible(delta):
        n = na + nb
        rows, cols = [], []
        for i, p in enumerate(fin_a):
            for j, q in enumerate(fin_b):
                if dist(p, q) <= delta:
                    rows.append(i)
                    cols.append(j)
            if diag(p) <= delta:
                rows.append(i)
                cols.append(nb + i)
        for j, q in enumerate(fin_b):
            if diag(q) <= delta:
                rows.append(na + j)
                cols.append(j)
            for i in range(na):
                rows.append(na + j)
                cols.append(nb + i)
        if n == 0:
            return True
        g = csr_matrix(([1] * len(rows), (rows, cols)), shape=(n, n))
        match = maximum_bipartite_matching(g, perm_type="column")
        return bool((match >= 0).all())

    lo, hi = 0, len(cands) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if feasible(cands[mid]):
            hi = mid
        else:
            lo = mid + 1
    return BarcodeComparison(equal, cands[lo])
