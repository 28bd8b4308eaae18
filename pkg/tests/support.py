"""Random fixtures and independent oracles shared by the test modules.

The oracles deliberately avoid the package's own elimination code: ranks go
through sympy's DomainMatrix, boundary matrices are rebuilt from simplex
lists here, components come from a union-find, and commutants over F2 are
counted by brute force.
"""

from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction

from sympy import GF, QQ
from sympy.polys.matrices import DomainMatrix

from ppersist.filtration import GraphFamily, WeightedPointCloud
from ppersist.linalg import FieldSpec, Matrix, Q
from ppersist.simplicial import Pair, SimplicialComplex, connecting_map, induced_map


# -- rank oracle ------------------------------------------------------------------


def oracle_rank(rows, ncols: int, field: FieldSpec = Q) -> int:
    rows = [list(r) for r in rows]
    if not rows or ncols == 0:
        return 0
    if field.kind == "Q":
        dom = QQ
        conv = lambda x: QQ(Fraction(x).numerator, Fraction(x).denominator)
    else:
        dom = GF(field.modulus)
        conv = lambda x: dom(int(x))
    return DomainMatrix([[conv(x) for x in r] for r in rows], (len(rows), ncols), dom).rank()


def matrix_rank(m: Matrix) -> int:
    return oracle_rank(m.rows, m.ncols, m.field)


def random_matrix(rng: random.Random, nrows: int, ncols: int, field: FieldSpec = Q, density: float = 0.5,
                  lo: int = -3, hi: int = 3) -> Matrix:
    rows = []
    for _ in range(nrows):
        row = []
        for _ in range(ncols):
            if rng.random() < density:
                row.append(field.element(rng.randint(lo, hi)))
            else:
                row.append(field.zero)
        rows.append(row)
    return Matrix(rows, field, ncols=ncols)


# -- homology oracle -------------------------------------------------------------


def _bd_rows(faces, simplices, field):
    idx = {f: i for i, f in enumerate(faces)}
    rows = [[field.zero] * len(simplices) for _ in faces]
    for j, s in enumerate(simplices):
        for pos in range(len(s)):
            f = s[:pos] + s[pos + 1:]
            if f in idx:
                rows[idx[f]][j] = field.element(-1 if pos % 2 else 1)
    return rows


def oracle_betti(x: SimplicialComplex, k: int, field: FieldSpec = Q, y: SimplicialComplex | None = None) -> int:
    """Relative Betti number from ranks of quotient boundary matrices."""
    ys = set(y) if y is not None else set()

    def cells(d):
        return sorted(s for s in x if len(s) == d + 1 and s not in ys)

    ck, ckm, ckp = cells(k), cells(k - 1) if k > 0 else [], cells(k + 1)
    r_k = oracle_rank(_bd_rows(ckm, ck, field), len(ck), field) if k > 0 and ckm else 0
    r_kp = oracle_rank(_bd_rows(ck, ckp, field), len(ckp), field) if ck and ckp else 0
    return len(ck) - r_k - r_kp


def random_complex(rng: random.Random, nverts: int | None = None, max_dim: int = 3, nfacets: int | None = None
                   ) -> SimplicialComplex:
    n = nverts or rng.randint(1, 8)
    facets = [(v,) for v in range(n)]
    for _ in range(nfacets if nfacets is not None else rng.randint(1, 2 * n)):
        d = rng.randint(1, min(max_dim, n - 1)) if n > 1 else 0
        facets.append(tuple(sorted(rng.sample(range(n), d + 1))))
    return SimplicialComplex(facets)


def random_subcomplex(rng: random.Random, x: SimplicialComplex, keep: float = 0.5) -> SimplicialComplex:
    tops = [s for s in x if rng.random() < keep and len(s) <= 2]
    return SimplicialComplex(tops)


# -- union-find -----------------------------------------------------------------


class UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[max(ra, rb)] = min(ra, rb)
        return True

    def count(self) -> int:
        return len({self.find(x) for x in self.parent})


def graph_components(vertices, edges) -> int:
    uf = UnionFind(vertices)
    for a, b in edges:
        uf.union(a, b)
    return uf.count()


def kruskal_h0_bars(cloud: WeightedPointCloud) -> list:
    """Zero-dimensional Rips bars in squared scale via the elder rule."""
    n = len(cloud)
    edges = sorted((cloud.sqdist(i, j), i, j) for i in range(n) for j in range(i + 1, n))
    uf = UnionFind(range(n))
    bars = []
    for d2, i, j in edges:
        if uf.union(i, j):
            bars.append((Fraction(0), d2))
    bars.append((Fraction(0), math.inf))
    return sorted(bars)


# -- generators -----------------------------------------------------------------


def random_cloud(rng: random.Random, n: int | None = None, d: int | None = None, probs=None) -> WeightedPointCloud:
    n = n or rng.randint(1, 8)
    d = d or rng.randint(1, 3)
    pts = set()
    while len(pts) < n:
        pts.add(tuple(Fraction(rng.randint(0, 6), rng.choice([1, 2])) for _ in range(d)))
    pts = sorted(pts)
    rng.shuffle(pts)
    if probs is None:
        probs = [rng.choice([Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1)]) for _ in range(n)]
    return WeightedPointCloud(tuple(pts), tuple(probs))


def random_graph_family(rng: random.Random, max_g: int = 10, max_h: int = 5) -> GraphFamily:
    nh = rng.randint(1, max_h)
    hv = tuple(f"h{i}" for i in range(nh))
    # edges only go forward in a shuffled order, so h is a DAG
    perm = list(hv)
    rng.shuffle(perm)
    he = tuple((perm[i], perm[j]) for i in range(nh) for j in range(i + 1, nh) if rng.random() < 0.4)
    ng = rng.randint(1, max_g)
    gv = tuple(range(ng))
    ge = tuple((rng.randrange(ng), rng.randrange(ng)) for _ in range(rng.randint(0, 2 * ng)))
    label = {w: rng.choice(hv) for w in gv}
    return GraphFamily(gv, ge, hv, he, label)


def random_dag_reachability(fam: GraphFamily) -> dict:
    """``v -> set of vertices reachable from v`` computed by naive iteration."""
    reach = {v: {v} for v in fam.h_vertices}
    changed = True
    while changed:
        changed = False
        for a, b in fam.h_edges:
            for v in fam.h_vertices:
                if a in reach[v] and b not in reach[v]:
                    reach[v].add(b)
                    changed = True
    return reach


# -- brute-force commutant over F2 ----------------------------------------------------


def brute_force_end_dim_f2(vertices, edges: dict, dims: dict, maps: dict) -> int:
    """log2 of the number of block tuples commuting with every edge matrix."""
    blocks = [(v, dims[v]) for v in vertices]
    nvars = sum(n * n for _, n in blocks)
    plain = {e: [[int(x) for x in row] for row in maps[e].rows] for e in edges}

    def mult(a, b, n, m, p):
        return [[sum(a[i][k] * b[k][j] for k in range(m)) % 2 for j in range(p)] for i in range(n)]

    count = 0
    for bits in itertools.product((0, 1), repeat=nvars):
        phi, pos = {}, 0
        for v, n in blocks:
            phi[v] = [list(bits[pos + i * n:pos + (i + 1) * n]) for i in range(n)]
            pos += n * n
        ok = True
        for e, (s, t) in edges.items():
            T = plain[e]
            ns, nt = dims[s], dims[t]
            if ns == 0 or nt == 0:
                continue
            if mult(phi[t], T, nt, nt, ns) != mult(T, phi[s], nt, ns, ns):
                ok = False
                break
        if ok:
            count += 1
    dim = count.bit_length() - 1
    assert 1 << dim == count
    return dim


# -- long exact sequence --------------------------------------------------------------


def les_ranks(x, y, z, field: FieldSpec = Q):
    """Check exactness of the long exact sequence of the triple at every node."""
    top = x.dimension
    mats = []
    for k in range(top, -1, -1):
        mats.append(induced_map({v: v for v in y.vertices}, Pair(y, z), Pair(x, z), k, field))
        mats.append(induced_map({v: v for v in x.vertices}, Pair(x, z), Pair(x, y), k, field))
        mats.append(connecting_map(x, y, z, k, field))
    for f, g in zip(mats, mats[1:]):
        assert (g @ f).is_zero()
        assert matrix_rank(f) + matrix_rank(g) == f.nrows


# -- acceptance bookkeeping ---------------------------------------------------------

# criterion number -> (title, passed, seconds, limit, detail); printed by conftest
ACCEPTANCE: dict = {}
