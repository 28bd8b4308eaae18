import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ppersist.linalg import (
    F2,
    FieldSpec,
    Matrix,
    Q,
    SubspaceCoordinates,
    image_basis,
    inverse,
    nullspace_basis,
    rank,
    rref,
    solve,
)
from support import matrix_rank, oracle_rank, random_matrix

F5 = FieldSpec.prime(5)


def test_field_parse_and_validation():
    assert FieldSpec.parse("q") == Q
    assert FieldSpec.parse("F2") == F2
    assert FieldSpec.parse("fp:7") == FieldSpec("Fp", 7)
    with pytest.raises(ValueError):
        FieldSpec.parse("fp:9")
    with pytest.raises(ValueError):
        FieldSpec("Fp", 1)
    with pytest.raises(ValueError):
        FieldSpec.parse("reals")


def test_scalar_canonical_forms():
    assert Q.element("6/4") == Fraction(3, 2)
    assert Q.element("0.25") == Fraction(1, 4)
    assert F5.element(-1) == 4
    assert F5.element(Fraction(1, 2)) == 3
    assert F5.to_str(7) == "2"
    assert Q.to_str(Fraction(-2, 4)) == "-1/2"
    with pytest.raises(ZeroDivisionError):
        F5.element(Fraction(1, 5))


@pytest.mark.parametrize("field", [Q, F2, F5, FieldSpec.prime(7)])
def test_field_axioms_on_random_triples(field):
    rng = random.Random(11)
    vals = [field.element(rng.randint(-9, 9)) for _ in range(30)]
    if field is Q:
        vals += [Fraction(rng.randint(-9, 9), rng.randint(1, 9)) for _ in range(30)]
    for a, b, c in zip(vals, vals[1:], vals[2:]):
        assert field.add(field.add(a, b), c) == field.add(a, field.add(b, c))
        assert field.mul(field.mul(a, b), c) == field.mul(a, field.mul(b, c))
        assert field.mul(a, field.add(b, c)) == field.add(field.mul(a, b), field.mul(a, c))
        assert field.add(a, field.neg(a)) == field.zero
        if a != field.zero:
            assert field.mul(a, field.inv(a)) == field.one


def test_rank_examples():
    assert rank(Matrix.identity(3)) == 3
    assert rank(Matrix.zeros(2, 5)) == 0
    assert rank(Matrix([[1, 2], [2, 4]])) == 1


def test_rank_of_singular_pair_matches_minors():
    # the only 2x2 minor of [[1,2],[2,4]] vanishes while some entry does not
    m = Matrix([[1, 2], [2, 4]])
    assert m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0] == 0
    assert rank(m) == 1


def test_image_basis_examples():
    cols = image_basis(Matrix.identity(2))
    assert cols == [(1, 0), (0, 1)]
    assert image_basis(Matrix.zeros(3, 2)) == []
    cols = image_basis(Matrix([[1, 1], [1, 1]]))
    assert len(cols) == 1
    assert cols[0][0] == cols[0][1] != 0


def test_nullspace_examples():
    assert nullspace_basis(Matrix.identity(4)) == []
    assert len(nullspace_basis(Matrix.zeros(1, 3))) == 3
    m = Matrix([[1, 2, 3]], F5)
    basis = nullspace_basis(m)
    assert len(basis) == 2
    for v in basis:
        assert m.apply(v) == (0,)
    # exhaustive: the kernel over F5^3 has exactly 25 vectors, all spanned
    kernel = [v for v in itertools.product(range(5), repeat=3) if (v[0] + 2 * v[1] + 3 * v[2]) % 5 == 0]
    assert len(kernel) == 25
    span = {tuple((a * x + b * y) % 5 for x, y in zip(*basis)) for a in range(5) for b in range(5)}
    assert span == set(kernel)


@pytest.mark.parametrize("field", [Q, F2, F5])
def test_rank_nullity_against_oracle(field):
    rng = random.Random(3)
    for _ in range(60):
        r, c = rng.randint(0, 7), rng.randint(0, 7)
        m = random_matrix(rng, r, c, field, density=rng.choice([0.1, 0.4, 0.9]))
        rk = rank(m)
        assert rk == matrix_rank(m)
        assert rk <= min(r, c)
        ns = nullspace_basis(m)
        assert rk + len(ns) == c
        for v in ns:
            assert not any(m.apply(v))
        if ns:
            assert rank(Matrix.from_columns(ns, c, field)) == len(ns)
        img = image_basis(m)
        assert len(img) == rk
        if img:
            assert rank(Matrix.from_columns(img, r, field)) == rk
            assert rank(m.hstack(Matrix.from_columns(img, r, field))) == rk


def test_dense_and_sparse_rank_agree():
    rng = random.Random(5)
    for field in (Q, F2, F5):
        for _ in range(40):
            m = random_matrix(rng, rng.randint(1, 12), rng.randint(1, 12), field, density=rng.random() * 0.4)
            assert rank(m, method="dense") == rank(m, method="sparse") == rank(m)


def test_rank_invariant_under_permutation():
    rng = random.Random(8)
    for _ in range(30):
        m = random_matrix(rng, 5, 6, Q, density=0.6)
        rows = list(m.rows)
        rng.shuffle(rows)
        perm = list(range(6))
        rng.shuffle(perm)
        p = Matrix([[r[j] for j in perm] for r in rows], Q, ncols=6)
        assert rank(p) == rank(m)


def test_rank_of_product_bounded():
    rng = random.Random(9)
    for _ in range(30):
        a = random_matrix(rng, 4, 5, Q, density=0.5)
        b = random_matrix(rng, 5, 3, Q, density=0.5)
        assert rank(a @ b) <= min(rank(a), rank(b))


def test_rref_and_solve_and_inverse():
    m = Matrix([[2, 4, 0], [1, 2, 1]])
    r, piv = rref(m)
    assert piv == [0, 2]
    assert r.rows[0] == (1, 2, 0)
    x = solve(m, (2, 2))
    assert m.apply(x) == (2, 2)
    assert solve(Matrix([[1, 1], [1, 1]]), (1, 2)) is None
    a = Matrix([[2, 1], [1, 1]])
    assert a @ inverse(a) == Matrix.identity(2)
    with pytest.raises(ZeroDivisionError):
        inverse(Matrix([[1, 2], [2, 4]]))


def test_subspace_coordinates():
    sc = SubspaceCoordinates([(1, 1, 0), (0, 1, 1)], 3, Q)
    assert sc.coords((1, 3, 2)) == (1, 2)
    assert sc.contains((2, 2, 0))
    assert not sc.contains((1, 0, 0))


def test_matrix_algebra():
    a = Matrix([[1, 2], [3, 4]])
    assert a.T.rows == ((1, 3), (2, 4))
    assert (a - a).is_zero()
    assert a.kron(Matrix.identity(1)) == a
    assert a.kron(Matrix.identity(2)).shape == (4, 4)
    assert Matrix.from_sparse({(0, 1): 5}, 2, 2).to_sparse() == {(0, 1): 5}
    with pytest.raises(ValueError):
        a @ Matrix.zeros(3, 1)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(st.integers(-4, 4), min_size=3, max_size=3), min_size=1, max_size=5))
def test_property_rank_matches_oracle(rows):
    m = Matrix(rows, Q)
    assert rank(m) == oracle_rank(rows, 3)
    assert rank(m.T) == rank(m)
