"""Finite posets viewed as thin categories."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Iterable, Sequence

__all__ = [
    "PosetError",
    "ReflexivityError",
    "AntisymmetryError",
    "TransitivityError",
    "FinitePoset",
    "GridAxis",
    "validate_poset",
    "product_poset",
    "chain_poset",
    "axis_poset",
    "downset",
    "upset",
    "covers",
    "linear_extension",
    "transitive_closure",
]


class PosetError(ValueError):
    pass


class ReflexivityError(PosetError):
    def __init__(self, s):
        super().__init__(f"not reflexive at {s!r}")
        self.witness = (s,)


class AntisymmetryError(PosetError):
    def __init__(self, s, t):
        super().__init__(f"{s!r} <= {t!r} and {t!r} <= {s!r} but they differ")
        self.witness = (s, t)


class TransitivityError(PosetError):
    def __init__(self, a, b, c):
        super().__init__(f"{a!r} <= {b!r} <= {c!r} but not {a!r} <= {c!r}")
        self.witness = (a, b, c)


class FinitePoset:
    """Elements plus the full ``<=`` relation as a set of pairs.

    Construction does not check the axioms; use :func:`validate_poset`.
    ``labels`` maps elements to display values (defaults to the element).
    """

    def __init__(self, elements: Sequence[Hashable], leq: Iterable[tuple], labels: dict | None = None,
                 _covers: list | None = None):
        self.elements = tuple(elements)
        self.leq = frozenset(leq)
        self.labels = dict(labels) if labels else {e: e for e in self.elements}
        self._index = {e: i for i, e in enumerate(self.elements)}
        if len(self._index) != len(self.elements):
            raise PosetError("duplicate element ids")
        self._covers = _covers
        self._down = None
        self._up = None

    def __len__(self):
        return len(self.elements)

    def __contains__(self, x):
        return x in self._index

    def __iter__(self):
        return iter(self.elements)

    def __eq__(self, other):
        if not isinstance(other, FinitePoset):
            return NotImplemented
        return set(self.elements) == set(other.elements) and self.leq == other.leq

    def __hash__(self):
        return hash((frozenset(self.elements), self.leq))

    def __repr__(self):
        return f"FinitePoset({len(self.elements)} elements, {len(self.leq)} relations)"

    def le(self, a, b) -> bool:
        return (a, b) in self.leq

    def lt(self, a, b) -> bool:
        return a != b and (a, b) in self.leq

    def index(self, x) -> int:
        try:
            return self._index[x]
        except KeyError:
            raise KeyError(f"unknown element {x!r}") from None

    def _build_sets(self):
        down = {e: set() for e in self.elements}
        up = {e: set() for e in self.elements}
        for a, b in self.leq:
            down[b].add(a)
            up[a].add(b)
        self._down = {e: frozenset(v) for e, v in down.items()}
        self._up = {e: frozenset(v) for e, v in up.items()}

    def down(self, s) -> frozenset:
        if self._down is None:
            self._build_sets()
        self.index(s)
        return self._down[s]

    def up(self, s) -> frozenset:
        if self._up is None:
            self._build_sets()
        self.index(s)
        return self._up[s]

    def is_chain(self) -> bool:
        els = self.elements
        return all(self.le(a, b) or self.le(b, a) for i, a in enumerate(els) for b in els[i + 1:])

    def minimal(self, subset: Iterable) -> list:
        """Minimal elements of ``subset``, in element order."""
        sub = set(subset)
        return [a for a in self.elements if a in sub and not any(self.lt(b, a) for b in sub)]

    def reversed(self) -> "FinitePoset":
        return FinitePoset(self.elements, {(b, a) for a, b in self.leq}, self.labels)


@dataclass(frozen=True)
class GridAxis:
    """Strictly increasing rational values; ``reversed`` flips the order."""

    values: tuple
    reversed: bool = False

    def __post_init__(self):
        vals = tuple(Fraction(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise PosetError("axis values must be strictly increasing")

    def le(self, a, b) -> bool:
        return b <= a if self.reversed else a <= b


def validate_poset(elements: Sequence, relation, labels: dict | None = None) -> FinitePoset:
    """Check reflexivity, antisymmetry, transitivity (in that order).

    ``relation`` is either a callable ``(a, b) -> bool`` or a collection of
    pairs.  Raises the error for the first violated axiom with its witness.
    """
    elements = list(elements)
    if callable(relation):
        rel = {(a, b) for a in elements for b in elements if relation(a, b)}
    else:
        rel = set(relation)
        known = set(elements)
        for a, b in rel:
            if a not in known or b not in known:
                raise PosetError(f"relation mentions unknown element in {(a, b)!r}")
    for s in elements:
        if (s, s) not in rel:
            raise ReflexivityError(s)
    for i, s in enumerate(elements):
        for t in elements[i + 1:]:
            if (s, t) in rel and (t, s) in rel:
                raise AntisymmetryError(s, t)
    up = {e: [] for e in elements}
    for a, b in rel:
        if a != b:
            up[a].append(b)
    order = {e: i for i, e in enumerate(elements)}
    for a in elements:
        for b in sorted(up[a], key=order.__getitem__):
            for c in sorted(up[b], key=order.__getitem__):
                if (a, c) not in rel:
                    raise TransitivityError(a, b, c)
    return FinitePoset(elements, rel, labels)


def chain_poset(labels: Sequence) -> FinitePoset:
    """Chain on the given values in the given order (ids are the values)."""
    labels = list(labels)
    rel = {(a, b) for i, a in enumerate(labels) for b in labels[i:]}
    cov = list(zip(labels, labels[1:]))
    return FinitePoset(labels, rel, _covers=cov)


def axis_poset(axis: GridAxis) -> FinitePoset:
    vals = list(axis.values)
    ordered = vals[::-1] if axis.reversed else vals
    return chain_poset(ordered)


def product_poset(p: FinitePoset, q: FinitePoset) -> FinitePoset:
    """Product order on pairs ``(a, b)``; reverse an axis beforehand if needed."""
    elements = [(a, b) for a in p.elements for b in q.elements]
    rel = {((a, b), (c, d)) for (a, c) in p.leq for (b, d) in q.leq}
    labels = {(a, b): (p.labels[a], q.labels[b]) for a, b in elements}
    cov = [((a, b), (c, b)) for (a, c) in covers(p) for b in q.elements]
    cov += [((a, b), (a, d)) for a in p.elements for (b, d) in covers(q)]
    pos = {e: i for i, e in enumerate(elements)}
    cov.sort(key=lambda ab: (pos[ab[0]], pos[ab[1]]))
    return FinitePoset(elements, rel, labels, _covers=cov)


def downset(p: FinitePoset, s) -> frozenset:
    """``{a : a <= s}``."""
    return p.down(s)


def upset(p: FinitePoset, s) -> frozenset:
    return p.up(s)


def covers(p: FinitePoset) -> list[tuple]:
    """Pairs ``(a, b)`` with ``a < b`` and nothing strictly between."""
    if p._covers is None:
        out = []
        for a in p.elements:
            above = [b for b in p.up(a) if b != a]
            for b in above:
                if not any(c != b and p.le(c, b) for c in above):
                    out.append((a, b))
        out.sort(key=lambda ab: (p.index(ab[0]), p.index(ab[1])))
        p._covers = out
    return list(p._covers)


def linear_extension(p: FinitePoset) -> list:
    """Deterministic topological order (ties broken by element order)."""
    import heapq

    indeg = {e: 0 for e in p.elements}
    succ = {e: [] for e in p.elements}
    for a, b in covers(p):
        indeg[b] += 1
        succ[a].append(b)
    heap = [p.index(e) for e in p.elements if indeg[e] == 0]
    heapq.heapify(heap)
    out = []
    while heap:
        e = p.elements[heapq.heappop(heap)]
        out.append(e)
        for b in succ[e]:
            indeg[b] -= 1
            if indeg[b] == 0:
                heapq.heappush(heap, p.index(b))
    if len(out) != len(p.elements):
        raise PosetError("relation has a cycle")
    return out


def transitive_closure(elements: Sequence, pairs: Iterable[tuple]) -> set:
    """Reflexive-transitive closure of a relation (used to rebuild ``<=`` from covers)."""
    succ: dict = {e: set() for e in elements}
    for a, b in pairs:
        succ[a].add(b)
    closure = set()
    for a in elements:
        seen = {a}
        stack = [a]
        while stack:
            x = stack.pop()
            for y in succ[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        closure.update((a, y) for y in seen)
    return closure
