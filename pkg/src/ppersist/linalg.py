"""Exact linear algebra over the rationals and prime fields.

Every rank decision elsewhere in the package goes through this module, so
nothing here touches floating point.  Rational scalars are ``Fraction``
instances; residues mod ``p`` are plain ints in ``[0, p)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

__all__ = [
    "FieldSpec",
    "Q",
    "F2",
    "Matrix",
    "rank",
    "rref",
    "image_basis",
    "nullspace_basis",
    "solve",
    "inverse",
    "SPARSE_DENSITY",
]

SPARSE_DENSITY = 0.25


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class FieldSpec:
    """Coefficient field: ``FieldSpec("Q")`` or ``FieldSpec("Fp", p)``."""

    kind: str = "Q"
    modulus: int | None = None

    def __post_init__(self):
        if self.kind == "Q":
            if self.modulus is not None:
                raise ValueError("the rationals take no modulus")
        elif self.kind == "Fp":
            if self.modulus is None or not _is_prime(self.modulus):
                raise ValueError(f"modulus must be prime, got {self.modulus!r}")
        else:
            raise ValueError(f"unknown field kind {self.kind!r}")

    @classmethod
    def prime(cls, p: int) -> "FieldSpec":
        return cls("Fp", p)

    @classmethod
    def parse(cls, text: str) -> "FieldSpec":
        """Parse ``q``, ``f2`` or ``fp:<prime>``."""
        t = text.strip().lower()
        if t in ("q", "rationals"):
            return cls("Q")
        if t == "f2":
            return cls("Fp", 2)
        if t.startswith("fp:"):
            return cls("Fp", int(t[3:]))
        raise ValueError(f"cannot parse field {text!r}")

    @property
    def is_prime_field(self) -> bool:
        return self.kind == "Fp"

    def __str__(self):
        return "q" if self.kind == "Q" else f"fp:{self.modulus}"

    @property
    def zero(self):
        return Fraction(0) if self.kind == "Q" else 0

    @property
    def one(self):
        return Fraction(1) if self.kind == "Q" else 1

    def element(self, x):
        """Canonical field element for an int, Fraction, or ``"a/b"`` string."""
        if isinstance(x, str):
            x = Fraction(x.strip())
        if self.kind == "Q":
            return Fraction(x)
        p = self.modulus
        if isinstance(x, Fraction):
            if x.denominator % p == 0:
                raise ZeroDivisionError(f"{x} has no image in F_{p}")
            return x.numerator * pow(x.denominator, -1, p) % p
        return int(x) % p

    def add(self, a, b):
        return a + b if self.kind == "Q" else (a + b) % self.modulus

    def sub(self, a, b):
        return a - b if self.kind == "Q" else (a - b) % self.modulus

    def mul(self, a, b):
        return a * b if self.kind == "Q" else (a * b) % self.modulus

    def neg(self, a):
        return -a if self.kind == "Q" else (-a) % self.modulus

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / a if self.kind == "Q" else pow(a, -1, self.modulus)

    def to_str(self, a) -> str:
        a = self.element(a)
        if self.kind == "Q" and a.denominator != 1:
            return f"{a.numerator}/{a.denominator}"
        return str(int(a))


Q = FieldSpec("Q")
F2 = FieldSpec("Fp", 2)


class Matrix:
    """Immutable dense matrix over a ``FieldSpec``.

    ``rows`` is a tuple of row tuples.  A zero-row matrix still carries its
    column count.
    """

    __slots__ = ("rows", "nrows", "ncols", "field", "_hash")

    def __init__(self, rows: Iterable[Iterable], field: FieldSpec = Q, ncols: int | None = None):
        el = field.element
        data = tuple(tuple(el(x) for x in r) for r in rows)
        if ncols is None:
            if not data:
                raise ValueError("ncols required for a matrix with no rows")
            ncols = len(data[0])
        for r in data:
            if len(r) != ncols:
                raise ValueError("ragged rows")
        self.rows = data
        self.nrows = len(data)
        self.ncols = ncols
        self.field = field
        self._hash = None

    @classmethod
    def _raw(cls, rows, field, ncols):
        m = cls.__new__(cls)
        m.rows = rows
        m.nrows = len(rows)
        m.ncols = ncols
        m.field = field
        m._hash = None
        return m

    @classmethod
    def zeros(cls, nrows: int, ncols: int, field: FieldSpec = Q) -> "Matrix":
        z = field.zero
        return cls._raw(tuple((z,) * ncols for _ in range(nrows)), field, ncols)

    @classmethod
    def identity(cls, n: int, field: FieldSpec = Q) -> "Matrix":
        z, o = field.zero, field.one
        return cls._raw(tuple(tuple(o if i == j else z for j in range(n)) for i in range(n)), field, n)

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence], nrows: int, field: FieldSpec = Q) -> "Matrix":
        if not cols:
            return cls.zeros(nrows, 0, field)
        return cls([[c[i] for c in cols] for i in range(nrows)], field, ncols=len(cols))

    @classmethod
    def from_sparse(cls, entries: dict, nrows: int, ncols: int, field: FieldSpec = Q) -> "Matrix":
        data = [[field.zero] * ncols for _ in range(nrows)]
        for (i, j), v in entries.items():
            data[i][j] = field.element(v)
        return cls._raw(tuple(tuple(r) for r in data), field, ncols)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self.field == other.field and self.rows == other.rows

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.rows, self.ncols, self.field))
        return self._hash

    def __repr__(self):
        body = "; ".join(" ".join(self.field.to_str(x) for x in r) for r in self.rows)
        return f"Matrix({self.nrows}x{self.ncols} over {self.field}: [{body}])"

    def column(self, j: int) -> tuple:
        return tuple(r[j] for r in self.rows)

    def columns(self) -> list[tuple]:
        return [self.column(j) for j in range(self.ncols)]

    @property
    def T(self) -> "Matrix":
        if self.nrows == 0:
            return Matrix.zeros(self.ncols, 0, self.field)
        return Matrix._raw(tuple(zip(*self.rows)), self.field, self.nrows)

    def _check(self, other):
        if self.field != other.field:
            raise ValueError("field mismatch")

    def __matmul__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        f = self.field
        cols = other.T.rows if other.nrows else tuple(() for _ in range(other.ncols))
        out = []
        p = f.modulus
        for r in self.rows:
            nz = [(k, x) for k, x in enumerate(r) if x]
            row = []
            for c in cols:
                s = sum(x * c[k] for k, x in nz)
                row.append(s % p if p else Fraction(s))
            out.append(tuple(row))
        return Matrix._raw(tuple(out), f, other.ncols)

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        add = self.field.add
        return Matrix._raw(
            tuple(tuple(add(a, b) for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)),
            self.field,
            self.ncols,
        )

    def __neg__(self) -> "Matrix":
        neg = self.field.neg
        return Matrix._raw(tuple(tuple(neg(a) for a in r) for r in self.rows), self.field, self.ncols)

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + (-other)

    def scale(self, c) -> "Matrix":
        c = self.field.element(c)
        mul = self.field.mul
        return Matrix._raw(tuple(tuple(mul(c, a) for a in r) for r in self.rows), self.field, self.ncols)

    def apply(self, v: Sequence) -> tuple:
        """Matrix-vector product."""
        p = self.field.modulus
        out = []
        for r in self.rows:
            s = sum(a * b for a, b in zip(r, v) if a)
            out.append(s % p if p else Fraction(s))
        return tuple(out)

    def kron(self, other: "Matrix") -> "Matrix":
        self._check(other)
        mul = self.field.mul
        rows = []
        for r in self.rows:
            for s in other.rows:
                rows.append(tuple(mul(a, b) for a in r for b in s))
        return Matrix._raw(tuple(rows), self.field, self.ncols * other.ncols)

    def hstack(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.nrows != other.nrows:
            raise ValueError("row count mismatch")
        return Matrix._raw(tuple(a + b for a, b in zip(self.rows, other.rows)), self.field, self.ncols + other.ncols)

    def vstack(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.ncols != other.ncols:
            raise ValueError("column count mismatch")
        return Matrix._raw(self.rows + other.rows, self.field, self.ncols)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "Matrix":
        return Matrix._raw(tuple(tuple(self.rows[i][j] for j in cols) for i in rows), self.field, len(cols))

    def is_zero(self) -> bool:
        return not any(any(r) for r in self.rows)

    def nnz(self) -> int:
        return sum(1 for r in self.rows for x in r if x)

    def density(self) -> float:
        n = self.nrows * self.ncols
        return self.nnz() / n if n else 0.0

    def to_sparse(self) -> dict:
        """Dict-of-keys view ``{(i, j): value}`` of the nonzero entries."""
        return {(i, j): x for i, r in enumerate(self.rows) for j, x in enumerate(r) if x}


# -- elimination kernels ----------------------------------------------------


def _rref_rows(rows: list[list], field: FieldSpec, ncols: int):
    """Reduced row echelon form in place; returns pivot columns."""
    p = field.modulus
    pivots = []
    r = 0
    nrows = len(rows)
    for c in range(ncols):
        if r == nrows:
            break
        piv = None
        best = None
        # sparsest pivot row bounds fill-in
        for i in range(r, nrows):
            if rows[i][c]:
                w = sum(1 for x in rows[i] if x)
                if best is None or w < best:
                    piv, best = i, w
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        prow = rows[r]
        inv = field.inv(prow[c])
        if p:
            prow = [x * inv % p for x in prow]
        else:
            prow = [x * inv for x in prow]
        rows[r] = prow
        nzc = [j for j in range(c, ncols) if prow[j]]
        for i in range(nrows):
            if i != r:
                row = rows[i]
                f = row[c]
                if f:
                    if p:
                        for j in nzc:
                            row[j] = (row[j] - f * prow[j]) % p
                    else:
                        for j in nzc:
                            row[j] = row[j] - f * prow[j]
        pivots.append(c)
        r += 1
    return pivots


def _bareiss_rank(rows: list[list]) -> int:
    """Fraction-free elimination rank over Q (rows of Fractions)."""
    from math import lcm

    ints = []
    for r in rows:
        d = 1
        for x in r:
            if x:
                d = lcm(d, x.denominator)
        ints.append([int(x * d) for x in r])
    nrows = len(ints)
    if nrows == 0:
        return 0
    ncols = len(ints[0])
    rk = 0
    prev = 1
    for c in range(ncols):
        if rk == nrows:
            break
        piv = None
        best = None
        for i in range(rk, nrows):
            if ints[i][c]:
                w = sum(1 for x in ints[i] if x)
                if best is None or w < best:
                    piv, best = i, w
        if piv is None:
            continue
        ints[rk], ints[piv] = ints[piv], ints[rk]
        pr = ints[rk]
        a = pr[c]
        for i in range(rk + 1, nrows):
            row = ints[i]
            b = row[c]
            for j in range(c, ncols):
                row[j] = (a * row[j] - b * pr[j]) // prev
        prev = a
        rk += 1
    return rk


def _sparse_rank(m: Matrix) -> int:
    """Rank by elimination on dict-of-rows storage."""
    field = m.field
    p = field.modulus
    rows = []
    for r in m.rows:
        d = {j: x for j, x in enumerate(r) if x}
        if d:
            rows.append(d)
    pivot_rows: dict[int, dict] = {}
    for row in rows:
        row = dict(row)
        while row:
            c = min(row)
            prow = pivot_rows.get(c)
            if prow is None:
                inv = field.inv(row[c])
                if p:
                    pivot_rows[c] = {j: x * inv % p for j, x in row.items()}
                else:
                    pivot_rows[c] = {j: x * inv for j, x in row.items()}
                break
            f = row[c]
            for j, x in prow.items():
                v = row.get(j, 0) - f * x
                if p:
                    v %= p
                if v:
                    row[j] = v
                else:
                    row.pop(j, None)
    return len(pivot_rows)


def rank(m: Matrix, method: str = "auto") -> int:
    """Dimension of the column space.

    ``method`` is ``"dense"``, ``"sparse"`` or ``"auto"`` (sparse below 25%
    density).  Dense rank over Q uses fraction-free elimination.
    """
    if m.nrows == 0 or m.ncols == 0:
        return 0
    if method == "auto":
        method = "sparse" if m.density() < SPARSE_DENSITY else "dense"
    if method == "sparse":
        return _sparse_rank(m)
    if method != "dense":
        raise ValueError(f"unknown method {method!r}")
    if m.field.kind == "Q":
        return _bareiss_rank([list(r) for r in m.rows])
    rows = [list(r) for r in m.rows]
    return len(_rref_rows(rows, m.field, m.ncols))


def rref(m: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form (zero rows dropped) and pivot columns."""
    rows = [list(r) for r in m.rows]
    pivots = _rref_rows(rows, m.field, m.ncols)
    return Matrix._raw(tuple(tuple(r) for r in rows[: len(pivots)]), m.field, m.ncols), pivots


def image_basis(m: Matrix) -> list[tuple]:
    """Columns of ``m`` at pivot positions: an independent spanning set of the image."""
    if m.ncols == 0:
        return []
    _, pivots = rref(m)
    return [m.column(j) for j in pivots]


def nullspace_basis(m: Matrix) -> list[tuple]:
    """Basis of ``{v : m v = 0}``, one vector per free column."""
    f = m.field
    R, pivots = rref(m)
    pset = set(pivots)
    basis = []
    for free in range(m.ncols):
        if free in pset:
            continue
        v = [f.zero] * m.ncols
        v[free] = f.one
        for i, pc in enumerate(pivots):
            v[pc] = f.neg(R.rows[i][free])
        basis.append(tuple(v))
    return basis


def solve(m: Matrix, b: Sequence) -> tuple | None:
    """Some ``x`` with ``m x = b``, or ``None`` when inconsistent."""
    f = m.field
    aug = [list(r) + [f.element(bi)] for r, bi in zip(m.rows, b)]
    pivots = _rref_rows(aug, f, m.ncols + 1)
    if pivots and pivots[-1] == m.ncols:
        return None
    x = [f.zero] * m.ncols
    for i, pc in enumerate(pivots):
        x[pc] = aug[i][m.ncols]
    return tuple(x)


def inverse(m: Matrix) -> Matrix:
    if m.nrows != m.ncols:
        raise ValueError("inverse of a non-square matrix")
    n = m.nrows
    f = m.field
    aug = [list(r) + [f.one if i == j else f.zero for j in range(n)] for i, r in enumerate(m.rows)]
    pivots = _rref_rows(aug, f, 2 * n)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return Matrix._raw(tuple(tuple(r[n:]) for r in aug), f, n)


class SubspaceCoordinates:
    """Coordinates with respect to a fixed list of independent vectors.

    ``coords(v)`` assumes ``v`` lies in the span; ``contains(v)`` checks it.
    """

    def __init__(self, basis: Sequence[Sequence], dim: int, field: FieldSpec):
        self.basis = [tuple(field.element(x) for x in b) for b in basis]
        self.dim = dim
        self.field = field
        k = len(self.basis)
        if k == 0:
            self._rows = []
            self._inv = None
            return
        M = Matrix.from_columns(self.basis, dim, field)
        _, rows = rref(M.T)
        if len(rows) != k:
            raise ValueError("basis vectors are dependent")
        self._rows = rows
        self._inv = inverse(M.submatrix(rows, range(k)))

    def coords(self, v: Sequence) -> tuple:
        if self._inv is None:
            return ()
        return self._inv.apply([v[i] for i in self._rows])

    def contains(self, v: Sequence) -> bool:
        c = self.coords(v)
        f = self.field
        recon = [f.zero] * self.dim
        for ci, b in zip(c, self.basis):
            if ci:
                for i, x in enumerate(b):
                    if x:
                        recon[i] = f.add(recon[i], f.mul(ci, x))
        return tuple(recon) == tuple(f.element(x) for x in v)
