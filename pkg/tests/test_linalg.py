from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from qbundles.errors import DimensionMismatch, NotInvertible
from qbundles.linalg import (
    GradedDirectSum,
    Matrix,
    Subspace,
    glued_subspace,
    graded_block_map,
    intersect,
    kernel,
    preimage,
    quotient,
    scalar,
    subspace_sum,
)


def matrices(max_rows=4, max_cols=4):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(st.integers(-3, 3), min_size=c, max_size=c), min_size=r, max_size=r)))


def subspaces(n):
    return st.lists(st.lists(st.integers(-2, 2), min_size=n, max_size=n), max_size=n).map(lambda vs: Subspace(n, vs))


def test_scalar_parsing():
    assert scalar("3/4") == Fraction(3, 4)
    assert scalar(" -2 ") == -2
    with pytest.raises(TypeError):
        scalar(0.5)
    with pytest.raises(TypeError):
        scalar(True)


def test_ragged_rows_rejected():
    with pytest.raises(DimensionMismatch):
        Matrix([[1, 2], [3]])


@given(matrices())
def test_rank_matches_sympy(rows):
    assert Matrix(rows).rank() == sympy.Matrix(rows).rank()


@given(matrices())
def test_kernel_is_annihilated_and_has_right_dim(rows):
    m = Matrix(rows)
    k = kernel(m)
    assert k.dim == m.ncols - sympy.Matrix(rows).rank()
    assert all(not any(m.apply(v)) for v in k.basis)


@given(matrices(4, 4))
def test_inverse(rows):
    m = Matrix(rows)
    if len(rows) != len(rows[0]) or m.rank() < m.nrows:
        with pytest.raises((NotInvertible, DimensionMismatch)):
            m.inverse()
        return
    inv = m.inverse()
    assert m @ inv == Matrix.identity(m.nrows)
    assert inv == Matrix([[Fraction(int(x.p), int(x.q)) for x in row] for row in sympy.Matrix(rows).inv().tolist()])


@given(matrices(4, 3), st.lists(st.integers(-3, 3), min_size=4, max_size=4))
def test_solve(rows, rhs):
    m = Matrix(rows)
    b = rhs[: m.nrows]
    x = m.solve(b)
    solvable = sympy.Matrix(rows).rank() == sympy.Matrix(rows).row_join(sympy.Matrix(b)).rank()
    assert (x is not None) == solvable
    if x is not None:
        assert list(m.apply(x)) == b


@given(subspaces(4), subspaces(4))
def test_dimension_formula(a, b):
    assert subspace_sum(a, b).dim + intersect(a, b).dim == a.dim + b.dim
    assert intersect(a, b) <= a and a <= subspace_sum(a, b)


@given(subspaces(4))
def test_subspace_basis_is_canonical(a):
    shuffled = Subspace(4, list(reversed(a.basis)) + [tuple(2 * x for x in v) for v in a.basis])
    assert shuffled == a and hash(shuffled) == hash(a)


@given(subspaces(4))
def test_quotient(s):
    q = quotient(4, s)
    assert q.dim == 4 - s.dim
    assert kernel(q.projection) == s
    assert q.projection @ q.section == Matrix.identity(q.dim)


@given(matrices(3, 4), subspaces(3))
def test_preimage(rows, w):
    m = Matrix(rows)
    if m.nrows != 3:
        return
    p = preimage(m, w)
    assert all(w.contains(m.apply(v)) for v in p.basis)
    assert p.dim == kernel(m).dim + (m.image() & w).dim


def test_coordinates_matrix_rejects_outside_columns():
    s = Subspace(2, [[1, 0]])
    with pytest.raises(ValueError):
        s.coordinates_matrix(Matrix([[0], [1]]))


def test_glued_subspace_matches_hand_count():
    # x in Q^2, y in Q^2 with x[1] == y[0]
    s = glued_subspace([2, 2], [(0, 1, Matrix([[0, 1]]), Matrix([[1, 0]]))])
    assert s.dim == 3
    assert s.contains([5, 7, 7, 1]) and not s.contains([5, 7, 6, 1])


def test_graded_direct_sum_layout():
    layout = GradedDirectSum([[0, 0, 1], [0, 1, 1]])
    assert layout.global_degrees == (0, 0, 0, 1, 1, 1)
    assert layout.position[(1, 0)] == 2
    emb = layout.embedding(1)
    assert layout.component(1) @ emb == Matrix.identity(3)
    blocks = [Matrix.identity(3) * 2, Matrix.identity(3) * 3]
    assert layout.assemble(blocks) @ emb == emb * 3
    dst = GradedDirectSum([[0, 1], [0, 1, 1]])
    proj = [Matrix([[1, 0, 0], [0, 0, 1]]), Matrix.identity(3)]
    m = graded_block_map(layout, dst, proj)
    assert m.shape == (5, 6)
    assert dst.component(0) @ m == proj[0] @ layout.component(0)
