import pytest
from hypothesis import given, strategies as st

from qbundles.algebra import (
    Algebra,
    AlgebraCovering,
    AlgebraMorphism,
    Ideal,
    check_algebra,
    covering_completion_algebra,
    function_algebra,
    group_algebra_of,
    is_complete_covering_algebra,
    matrix_algebra,
    quotient_algebra,
    square_zero_algebra,
    tensor_algebra,
    upper_triangular_algebra,
)
from qbundles.errors import NotACovering, NotAnIdeal
from qbundles.fixtures import SMALL_ALGEBRAS, b3_covering, c4_covering, incomplete_covering, points_ideal
from qbundles.hopf import cyclic_group_table
from qbundles.linalg import Matrix, Subspace


@pytest.mark.parametrize("make", SMALL_ALGEBRAS)
def test_small_algebras_satisfy_axioms(make):
    assert check_algebra(make()) == []


def test_tensor_algebra_axioms():
    assert check_algebra(tensor_algebra(upper_triangular_algebra(), function_algebra(2))) == []


def test_non_associative_table_is_reported():
    # x * x = 1 + x, but (x * x) * x differs from x * (x * x) after breaking one entry
    table = [[[1, 0], [0, 1]], [[0, 1], [1, 1]]]
    assert check_algebra(Algebra.from_table(table, [1, 0])) == []
    bad = [[[1, 0], [0, 1]], [[0, 2], [1, 1]]]
    assert check_algebra(Algebra.from_table(bad, [1, 0]))


def test_matrix_algebra_is_simple():
    m2 = matrix_algebra(2)
    assert Ideal.generated_by(m2, [[0, 1, 0, 0]]).space.is_full()


def test_one_sided_ideal_rejected():
    t2 = upper_triangular_algebra()
    # span{E11} is neither a left nor a right ideal; span{E11, E12} is two-sided
    with pytest.raises(NotAnIdeal):
        Ideal.spanned_by(t2, [[1, 0, 0]])
    assert Ideal.spanned_by(t2, [[1, 0, 0], [0, 1, 0]]).space.dim == 2


def test_quotient_of_upper_triangular_is_commutative():
    b, pi = quotient_algebra(upper_triangular_algebra(), Subspace(3, [[0, 1, 0]]))
    assert b.dim == 2
    assert all(b.mul(b.basis(i), b.basis(j)) == b.mul(b.basis(j), b.basis(i)) for i in range(2) for j in range(2))
    assert pi.violations() == []


def test_non_covering_rejected():
    with pytest.raises(NotACovering):
        AlgebraCovering(function_algebra(3), [points_ideal(3, [0, 1]), points_ideal(3, [1])])


def test_fixture_coverings_chart_and_overlap_dims():
    # charts are the complements of the ideal supports
    b3, c4 = b3_covering(), c4_covering()
    assert [c.dim for c in b3.charts] == [2, 2] and b3.overlap(0, 1).algebra.dim == 1
    assert [c.dim for c in c4.charts] == [3, 3] and c4.overlap(0, 1).algebra.dim == 2


def test_overlap_swap_and_identity():
    cov = c4_covering()
    ov, vo = cov.overlap(0, 1), cov.overlap(1, 0)
    assert ov.from_left == vo.from_right and ov.from_right == vo.from_left
    assert cov.overlap(1, 1).from_left == Matrix.identity(3)


def test_projections_are_algebra_maps():
    cov = c4_covering()
    for i in range(2):
        assert cov.pi(i).violations() == []
    ov = cov.overlap(0, 1)
    assert AlgebraMorphism(cov.charts[0], ov.algebra, ov.from_left).violations() == []
    # B -> B_i -> B_ij equals B -> B_ij
    assert ov.from_left @ cov.projection(0) == ov.from_base


def test_fixture_completions():
    assert covering_completion_algebra(function_algebra(3), b3_covering()).algebra.dim == 3
    assert is_complete_covering_algebra(function_algebra(3), b3_covering())
    assert is_complete_covering_algebra(function_algebra(4), c4_covering())


def test_incomplete_fixture():
    # [DERIVED] hand count: three charts Q + W/L_i of dim 2 (6 in total); the three overlaps are Q and
    # impose only two independent conditions, so dim B_c = 6 - 2 = 4 > 3 = dim B
    cov = incomplete_covering()
    comp = covering_completion_algebra(cov.algebra, cov)
    assert comp.algebra.dim == 4
    assert comp.canonical.is_injective() and not comp.canonical.is_surjective()
    assert not is_complete_covering_algebra(cov.algebra, cov)


def test_group_algebra_covering_by_isotypic_ideals():
    a = group_algebra_of(cyclic_group_table(3))
    triv = Ideal.generated_by(a, [[1, 1, 1]])
    aug = Ideal.generated_by(a, [[1, -1, 0]])
    assert (triv.space.dim, aug.space.dim) == (1, 2)
    assert is_complete_covering_algebra(a, [triv, aug])


def test_square_zero_two_lines_is_complete():
    # two lines in W already give a complete covering; a third is what breaks completeness
    b = square_zero_algebra(2)
    assert is_complete_covering_algebra(b, [Subspace(3, [[0, 1, 0]]), Subspace(3, [[0, 0, 1]])])


@st.composite
def point_covers(draw):
    n = draw(st.integers(1, 5))
    k = draw(st.integers(1, 3))
    charts = [draw(st.sets(st.integers(0, n - 1), min_size=1)) for _ in range(k)]
    missing = set(range(n)) - set().union(*charts)
    charts[0] = charts[0] | missing
    return n, charts


@given(point_covers())
def test_classical_covers_are_complete(data):
    # [DERIVED] classical oracle: functions on a union of charts glue uniquely
    n, charts = data
    ideals = [points_ideal(n, [p for p in range(n) if p not in c]) for c in charts]
    cov = AlgebraCovering(function_algebra(n), ideals)
    assert [c.dim for c in cov.charts] == [len(c) for c in charts]
    for i, j in cov.pairs():
        assert cov.overlap(i, j).algebra.dim == len(charts[i] & charts[j])
    comp = covering_completion_algebra(cov.algebra, cov)
    assert comp.algebra.dim == n
    assert comp.canonical.is_bijective()
    assert comp.canonical.violations() == []


def test_covering_with_zero_member_is_complete():
    # the strict upper triangle together with the zero ideal: the zero chart sees everything
    a = upper_triangular_algebra()
    assert is_complete_covering_algebra(a, AlgebraCovering(a, [Subspace(3, [[0, 1, 0]]), Subspace.zero(3)]))
