"""Finite semigroups given by multiplication tables, and their natural orders.

Elements are the integers ``0..n-1`` and ``table[i][j]`` is the product
``i*j``.  Orders are returned as :class:`SemigroupOrder`, a poset that also
remembers which order it is and a witness pair for every relation.
"""

from __future__ import annotations

from itertools import product
from typing import Sequence

from .poset import FinitePoset, PosetError, validate_poset

__all__ = [
    "AssociativityError",
    "NotAPartialOrder",
    "SublevelConsistencyError",
    "FiniteSemigroup",
    "SemigroupOrder",
    "idempotents",
    "adjoin_unit",
    "mitsch_order",
    "nambooripad_order",
    "semigroup_sublevel",
    "sublevel_preimage",
    "fiber_union",
    "enumerate_semigroups",
    "transformation_semigroup",
]


class AssociativityError(ValueError):
    def __init__(self, i, j, k):
        super().__init__(f"(({i}*{j})*{k}) != ({i}*({j}*{k}))")
        self.witness = (i, j, k)


class NotAPartialOrder(ValueError):
    def __init__(self, cause: PosetError):
        super().__init__(f"idempotent-witnessed relation is not a partial order: {cause}")
        self.witness = cause.witness
        self.cause = cause


class SublevelConsistencyError(RuntimeError):
    """Downset and the idempotent product formula disagree (internal error)."""


class FiniteSemigroup:
    def __init__(self, table: Sequence[Sequence[int]], check: bool = True):
        self.table = tuple(tuple(int(x) for x in row) for row in table)
        self.n = n = len(self.table)
        for row in self.table:
            if len(row) != n or any(not 0 <= x < n for x in row):
                raise ValueError("table must be n x n with entries in 0..n-1")
        if check:
            self.check_associative()
        self.unit = self._find_unit()

    @property
    def has_unit(self) -> bool:
        return self.unit is not None

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def check_associative(self):
        t = self.table
        r = range(self.n)
        for i in r:
            ti = t[i]
            for j in r:
                tij = t[ti[j]]
                tj = t[j]
                for k in r:
                    if tij[k] != ti[tj[k]]:
                        raise AssociativityError(i, j, k)

    def _find_unit(self):
        r = range(self.n)
        for e in r:
            if all(self.table[e][x] == x == self.table[x][e] for x in r):
                return e
        return None

    def is_commutative(self) -> bool:
        t = self.table
        return all(t[i][j] == t[j][i] for i in range(self.n) for j in range(i))

    def __repr__(self):
        return f"FiniteSemigroup(n={self.n}, unit={self.unit})"

    def __eq__(self, other):
        return isinstance(other, FiniteSemigroup) and self.table == other.table

    def __hash__(self):
        return hash(self.table)


class SemigroupOrder(FinitePoset):
    """Poset on semigroup elements tagged with ``kind`` and per-pair witnesses."""

    def __init__(self, poset: FinitePoset, kind: str, witnesses: dict):
        super().__init__(poset.elements, poset.leq, poset.labels)
        self.kind = kind
        self.witnesses = witnesses


def idempotents(s: FiniteSemigroup) -> frozenset:
    return frozenset(e for e in range(s.n) if s.table[e][e] == e)


def adjoin_unit(s: FiniteSemigroup) -> FiniteSemigroup:
    """``s`` itself when it has a unit, else ``s`` plus a new identity ``n``."""
    if s.has_unit:
        return s
    n = s.n
    rows = [list(row) + [i] for i, row in enumerate(s.table)]
    rows.append(list(range(n + 1)))
    return FiniteSemigroup(rows, check=False)


def mitsch_order(s: FiniteSemigroup) -> SemigroupOrder:
    """``a <= b`` iff ``a = x b = b y`` and ``x a = a`` for some ``x, y`` in the unitized semigroup."""
    hat = adjoin_unit(s)
    t = hat.table
    r = range(hat.n)
    rel = set()
    wit = {}
    for a in range(s.n):
        for b in range(s.n):
            xs = [x for x in r if t[x][b] == a and t[x][a] == a]
            if not xs:
                continue
            y = next((y for y in r if t[b][y] == a), None)
            if y is None:
                continue
            rel.add((a, b))
            wit[(a, b)] = (xs[0], y)
    try:
        p = validate_poset(range(s.n), rel)
    except PosetError as exc:  # pragma: no cover - would contradict the theorem
        raise RuntimeError(f"natural order failed validation: {exc}") from exc
    return SemigroupOrder(p, "mitsch", wit)


def nambooripad_order(s: FiniteSemigroup) -> SemigroupOrder:
    """``a <= b`` iff ``a = e b = b f`` for idempotents ``e, f`` of ``s``.

    Only a partial order under extra hypotheses (e.g. regular semigroups);
    otherwise :class:`NotAPartialOrder` carries the failing axiom's witness.
    """
    E = sorted(idempotents(s))
    t = s.table
    rel = set()
    wit = {}
    for a in range(s.n):
        for b in range(s.n):
            e = next((e for e in E if t[e][b] == a), None)
            if e is None:
                continue
            f = next((f for f in E if t[b][f] == a), None)
            if f is None:
                continue
            rel.add((a, b))
            wit[(a, b)] = (e, f)
    try:
        p = validate_poset(range(s.n), rel)
    except PosetError as exc:
        raise NotAPartialOrder(exc) from exc
    return SemigroupOrder(p, "nambooripad", wit)


def semigroup_sublevel(s: FiniteSemigroup, elem: int, order: FinitePoset) -> frozenset:
    """Elements below ``elem``.

    For the idempotent-witnessed order this is cross-checked against
    ``E*elem ∩ elem*E``.
    """
    down = order.down(elem)
    if getattr(order, "kind", None) == "nambooripad":
        E = idempotents(s)
        left = {s.table[e][elem] for e in E}
        right = {s.table[elem][e] for e in E}
        formula = frozenset(left & right)
        if formula != down:
            raise SublevelConsistencyError(
                f"downset {sorted(down)} != E*s ∩ s*E {sorted(formula)} at s={elem}"
            )
    return down


def sublevel_preimage(f: dict, order: FinitePoset, elem) -> frozenset:
    """``{x : f(x) <= elem}`` scanning the points directly."""
    return frozenset(x for x, v in f.items() if order.le(v, elem))


def fiber_union(f: dict, targets) -> frozenset:
    """Union of the fibers ``f^{-1}(a)`` over ``a`` in ``targets``."""
    targets = set(targets)
    return frozenset(x for x, v in f.items() if v in targets)


def enumerate_semigroups(n: int):
    """Every associative ``n x n`` table (no isomorphism reduction)."""
    r = range(n)
    for flat in product(r, repeat=n * n):
        table = [flat[i * n:(i + 1) * n] for i in r]
        ok = True
        for i in r:
            for j in r:
                ij = table[i][j]
                for k in r:
                    if table[ij][k] != table[i][table[j][k]]:
                        ok = False
                        break
                if not ok:
                    break
            if not ok:
                break
        if ok:
            yield FiniteSemigroup(table, check=False)


def transformation_semigroup(generators: Sequence[Sequence[int]], limit: int = 64) -> FiniteSemigroup:
    """Semigroup of maps on ``{0..k-1}`` generated under composition.

    The product ``a*b`` is "apply ``a`` then ``b``".  Raises if the closure
    exceeds ``limit`` elements.
    """
    gens = [tuple(g) for g in generators]
    elems = list(dict.fromkeys(gens))
    idx = {e: i for i, e in enumerate(elems)}
    frontier = list(elems)
    while frontier:
        new = []
        for a in frontier:
            for g in gens:
                c = tuple(g[a[x]] for x in range(len(a)))
                if c not in idx:
                    idx[c] = len(elems)
                    elems.append(c)
                    new.append(c)
                    if len(elems) > limit:
                        raise ValueError("semigroup closure exceeds limit")
        frontier = new
    table = [[idx[tuple(b[a[x]] for x in range(len(a)))] for b in elems] for a in elems]
    return FiniteSemigroup(table, check=False)
