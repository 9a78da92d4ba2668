import random
from fractions import Fraction

import pytest

from quasident.errors import AmbientMismatch
from quasident.exactla import QMatrix, Subspace, nullspace, nullspace_of_rows, rank, rref


def random_matrix(rng, rows, cols, bound=6):
    return QMatrix(
        [[Fraction(rng.randint(-bound, bound)) for _ in range(cols)] for _ in range(rows)]
    )


def test_rref_identity():
    m = QMatrix.identity(3)
    reduced, r, pivots = rref(m)
    assert r == 3 and pivots == [0, 1, 2] and reduced == m


def test_rref_rank_one():
    _, r, _ = rref(QMatrix([[1, 2], [2, 4]]))
    assert r == 1


def test_rank_equals_transpose_rank():
    rng = random.Random(0)
    for _ in range(100):
        m = random_matrix(rng, rng.randint(1, 5), rng.randint(1, 5))
        assert rank(m) == rank(m.transpose())


def test_rref_idempotent():
    rng = random.Random(1)
    for _ in range(100):
        m = random_matrix(rng, rng.randint(1, 4), rng.randint(1, 5))
        reduced, _, _ = rref(m)
        again, _, _ = rref(reduced)
        assert reduced == again


def test_nullspace_zero_matrix():
    assert nullspace(QMatrix.zeros(2, 3)).dim() == 3


def test_nullspace_identity():
    assert nullspace(QMatrix.identity(4)).dim() == 0


def test_nullspace_one_equation():
    space = nullspace(QMatrix([[1, 1]]))
    assert space.dim() == 1
    assert space.contains_vector([1, -1])


def test_nullspace_vectors_annihilate():
    rng = random.Random(2)
    for _ in range(100):
        m = random_matrix(rng, rng.randint(1, 4), rng.randint(1, 6))
        space = nullspace(m)
        assert space.dim() == m.cols - rank(m)
        for v in space.basis:
            assert all(x == 0 for x in m.matvec(v))


def test_sparse_nullspace_matches_dense():
    rng = random.Random(3)
    for _ in range(60):
        m = random_matrix(rng, rng.randint(1, 5), rng.randint(1, 6))
        rows = [{j: x for j, x in enumerate(row) if x} for row in m.data]
        sparse = Subspace.from_vectors(m.cols, nullspace_of_rows(rows, m.cols))
        assert sparse == nullspace(m)


def test_subspace_canonical_equality():
    a = Subspace(3, [[1, 0, 1], [0, 1, 1]])
    b = Subspace(3, [[1, 1, 2], [1, -1, 0]])
    assert a == b
    assert a.contains(b) and b.contains(a)


def test_subspace_self_intersection():
    rng = random.Random(4)
    for _ in range(50):
        vecs = [[rng.randint(-3, 3) for _ in range(4)] for _ in range(2)]
        a = Subspace.from_vectors(4, vecs)
        assert a.intersect(a) == a


def test_subspace_axes():
    e1 = Subspace(2, [[1, 0]])
    e2 = Subspace(2, [[0, 1]])
    assert e1.intersect(e2).dim() == 0
    assert e1.sum(e2).dim() == 2


def test_dimension_formula():
    rng = random.Random(5)
    for _ in range(100):
        ambient = rng.randint(1, 6)
        a = Subspace.from_vectors(
            ambient,
            [[rng.randint(-3, 3) for _ in range(ambient)] for _ in range(rng.randint(0, 3))],
        )
        b = Subspace.from_vectors(
            ambient,
            [[rng.randint(-3, 3) for _ in range(ambient)] for _ in range(rng.randint(0, 3))],
        )
        assert a.dim() + b.dim() == a.sum(b).dim() + a.intersect(b).dim()


def test_ambient_mismatch():
    with pytest.raises(AmbientMismatch):
        Subspace(2, [[1, 0]]).sum(Subspace(3, [[1, 0, 0]]))


def test_matrix_product_and_inverse():
    rng = random.Random(6)
    seen = 0
    while seen < 30:
        m = random_matrix(rng, 3, 3)
        try:
            inv = m.inverse()
        except ValueError:
            continue
        seen += 1
        assert m * inv == QMatrix.identity(3)


def test_singular_inverse_raises():
    with pytest.raises(ValueError):
        QMatrix([[-4, 0], [3, 0]]).inverse()


def test_trace_and_matvec():
    m = QMatrix([[1, 2], [3, 4]])
    assert m.trace() == 5
    assert m.matvec([1, 1]) == (3, 7)
