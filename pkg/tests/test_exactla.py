from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from doubleore.exactla import (QQ, DimensionMismatch, Echelon, ExactMatrix, FieldError, Fp,
                               PrimeField, field_from_name, inverse, kernel_basis, rank, rref,
                               solve)


def M(rows, F=QQ):
    return ExactMatrix.from_rows(F, rows)


def test_rref_identity_and_zero():
    r, piv, red = rref(ExactMatrix.identity(QQ, 3))
    assert (r, piv) == (3, [0, 1, 2])
    r, piv, _ = rref(ExactMatrix(QQ, 2, 4))
    assert (r, piv) == (0, [])


def test_rank_deficient():
    assert rank(M([[1, 2], [2, 4]])) == 1


def test_rref_is_reduced():
    _, piv, red = rref(M([[0, 2, 4], [1, 1, 1], [1, 3, 5]]))
    assert piv == [0, 1]
    assert [[red[i, j] for j in range(3)] for i in range(3)] == [[1, 0, -1], [0, 1, 2], [0, 0, 0]]


def test_solve_examples():
    assert solve(ExactMatrix.identity(QQ, 2), [3, 4]) == [3, 4]
    assert solve(M([[0]]), [1]) is None
    assert solve(M([[2, 0], [0, 3]]), [1, 1]) == [Fraction(1, 2), Fraction(1, 3)]


def test_solve_free_variables_zero():
    # x + y = 2: pivot x, free y -> (2, 0)
    assert solve(M([[1, 1]]), [2]) == [2, 0]


def test_solve_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        solve(M([[1, 0]]), [1, 2])


def test_kernel_examples():
    assert kernel_basis(ExactMatrix.identity(QQ, 3)) == []
    assert len(kernel_basis(ExactMatrix(QQ, 2, 3))) == 3
    assert kernel_basis(M([[1, 1]])) == [[-1, 1]]


def test_inverse_singular():
    assert inverse(M([[1, 2], [2, 4]])) is None


def test_prime_field_arithmetic():
    F = PrimeField(7)
    a = F(3)
    assert a * F(5) == F(1)
    assert 1 / a == F(5)
    assert -a == F(4)
    assert F(Fraction(1, 2)) == F(4)
    assert F.literal(1, 2) == F(4)
    assert int(F(-1)) == 6
    with pytest.raises(FieldError):
        F.literal(1, 7)
    with pytest.raises(FieldError):
        PrimeField(8)


def test_field_names():
    assert field_from_name("q") is QQ
    assert field_from_name("fp:5") == PrimeField(5)
    with pytest.raises(FieldError):
        field_from_name("fp:x")
    with pytest.raises(FieldError):
        field_from_name("r")


def test_echelon():
    e = Echelon(QQ)
    assert e.add({0: 1, 1: 1})
    assert e.add({1: 2})
    assert not e.add({0: 3, 1: 5})
    assert len(e) == 2
    assert e.contains({0: 1})


small = st.integers(-4, 4)


def matrices(max_n=4):
    return st.integers(1, max_n).flatmap(
        lambda r: st.integers(1, max_n).flatmap(
            lambda c: st.lists(st.lists(small, min_size=c, max_size=c), min_size=r, max_size=r)))


@settings(max_examples=60, deadline=None)
@given(matrices(), st.sampled_from([None, 5, 7]))
def test_rank_transpose(rows, p):
    F = QQ if p is None else PrimeField(p)
    m = M(rows, F)
    assert rank(m) == rank(m.transpose()) <= min(m.rows, m.cols)


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_kernel_vectors_annihilate(rows):
    m = M(rows)
    ker = kernel_basis(m)
    assert len(ker) == m.cols - rank(m)
    for v in ker:
        assert all(x == 0 for x in m.apply(v))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4).flatmap(lambda n: st.lists(st.lists(small, min_size=n, max_size=n),
                                                    min_size=n, max_size=n)))
def test_inverse_is_exact(rows):
    m = M(rows)
    inv = inverse(m)
    if rank(m) < m.rows:
        assert inv is None
    else:
        assert m @ inv == ExactMatrix.identity(QQ, m.rows)


@settings(max_examples=60, deadline=None)
@given(matrices(), st.lists(small, min_size=4, max_size=4))
def test_solve_round_trip(rows, b):
    m = M(rows)
    x = solve(m, b[:m.rows])
    if x is not None:
        assert m.apply(x) == [QQ(v) for v in b[:m.rows]]


def test_fp_values_in_range():
    F = PrimeField(5)
    assert all(0 <= int(F(v)) < 5 for v in range(-12, 12))
    assert isinstance(F(3), Fp)
