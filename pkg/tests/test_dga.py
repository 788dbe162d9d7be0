from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from qbundles.algebra import AlgebraCovering, function_algebra, truncated_polynomial_algebra, upper_triangular_algebra
from qbundles.dga import (
    DGA,
    GradedIdealCovering,
    calculi_from_graded_covering,
    check_dga,
    dga_from_algebra,
    differential_ideal,
    morphism_violations,
    universal_calculi,
    universal_dga,
    universal_dga_map,
)
from qbundles.errors import NotACovering, NotAnIdeal
from qbundles.fixtures import b3_covering, c4_covering, points_ideal
from qbundles.linalg import Matrix, Subspace


def bar_dims(n, bound):
    # [DERIVED] Omega^k is B (x) (B/Q)^(x)k for the universal calculus: n (n - 1)^k
    return tuple(n * (n - 1) ** k for k in range(bound + 1))


def paths(points, k):
    """Sequences of k+1 points of ``points`` with distinct neighbours: the classical basis of Omega^k."""
    return [p for p in product(sorted(points), repeat=k + 1) if all(a != b for a, b in zip(p, p[1:]))]


@pytest.mark.parametrize("make", [lambda: function_algebra(2), lambda: function_algebra(3), upper_triangular_algebra,
                                  lambda: truncated_polynomial_algebra(3)])
def test_universal_dims_and_axioms(make):
    b = make()
    g = universal_dga(b, 2)
    assert g.graded_dims == bar_dims(b.dim, 2)
    assert check_dga(g) == []
    assert g.degree_zero() == b


def test_function_algebra_forms_count_paths():
    g = universal_dga(function_algebra(3), 2)
    assert g.graded_dims == tuple(len(paths(range(3), k)) for k in range(3)) == (3, 6, 12)


def test_degree_zero_dga():
    assert check_dga(dga_from_algebra(upper_triangular_algebra())) == []


def test_broken_differential_detected():
    g = universal_dga(function_algebra(2), 2)
    # doubling d on 1-forms only breaks d(a db) = da db
    scale = Matrix([[2 if i == j and g.degrees[i] == 1 else int(i == j) for j in range(g.dim)] for i in range(g.dim)])
    broken = DGA(g.algebra, g.degrees, g.differential @ scale, g.bound)
    assert any("Leibniz" in r for r in check_dga(broken))
    assert check_dga(DGA(g.algebra, g.degrees, g.differential * 2, g.bound)) == []  # scalar multiples stay derivations
    shifted = DGA(g.algebra, g.degrees, Matrix.identity(g.dim), g.bound)
    assert any("raise degree" in r for r in check_dga(shifted))


def test_induced_maps_are_dga_morphisms():
    cov = c4_covering()
    src = universal_dga(cov.algebra, 2)
    for i in range(2):
        tgt = universal_dga(cov.charts[i], 2)
        f = universal_dga_map(cov.projection(i), src, tgt)
        assert morphism_violations(f, src, tgt) == []


def test_differential_ideal_is_closed():
    g = universal_dga(function_algebra(3), 2)
    s = differential_ideal(g, [[0, 0, 1] + [0] * (g.dim - 3)])
    assert all(s.contains(g.diff(v)) for v in s.basis)
    with pytest.raises(NotAnIdeal):
        GradedIdealCovering(g, [Subspace(g.dim, [[0, 0, 1] + [0] * (g.dim - 3)])])


def test_generated_graded_covering_overlaps_above_degree_zero():
    cov = c4_covering()
    g = universal_dga(cov.algebra, 1)
    base = [j.space for j in cov.ideals]
    with pytest.raises(NotACovering):
        GradedIdealCovering.generated(g, base, strict=True)
    loose = GradedIdealCovering.generated(g, base)
    assert loose.violations() == ["graded ideals intersect nontrivially in degree 1"]


def test_global_route_matches_chartwise_universal_calculi():
    cov = c4_covering()
    g = universal_dga(cov.algebra, 1)
    gc = GradedIdealCovering.generated(g, [j.space for j in cov.ideals])
    via_global = calculi_from_graded_covering(cov, gc)
    chartwise = universal_calculi(cov, 1)
    assert [c.graded_dims for c in via_global.charts] == [c.graded_dims for c in chartwise.charts]
    assert via_global.overlap(0, 1)[0].graded_dims == chartwise.overlap(0, 1)[0].graded_dims
    assert via_global.violations() == []
    glued = via_global.completion()
    assert glued.from_global().shape == (glued.dga.dim, g.dim)


def test_b3_glued_calculus():
    cal = universal_calculi(b3_covering(), 2)
    # a single shared point carries no forms of positive degree
    assert cal.overlap(0, 1)[0].graded_dims == (1, 0, 0)
    assert cal.completion().dga.graded_dims == (3, 4, 4)
    assert cal.violations(full=True) == []


def test_overlap_order():
    cal = universal_calculi(c4_covering(), 1)
    g, a, b = cal.overlap(0, 1)
    g2, b2, a2 = cal.overlap(1, 0)
    assert g is g2 and a == a2 and b == b2


@st.composite
def two_chart_covers(draw):
    n = draw(st.integers(2, 3))
    u = draw(st.sets(st.integers(0, n - 1), min_size=1, max_size=n))
    v = draw(st.sets(st.integers(0, n - 1), min_size=1, max_size=n)) | (set(range(n)) - u)
    return n, u, v


@settings(max_examples=15)
@given(two_chart_covers())
def test_glued_calculus_counts_paths(data):
    # [DERIVED] classical oracle: glued forms are pairs of path functions agreeing on paths inside the overlap
    n, u, v = data
    cov = AlgebraCovering(function_algebra(n), [points_ideal(n, sorted(set(range(n)) - u)),
                                                points_ideal(n, sorted(set(range(n)) - v))])
    glued = universal_calculi(cov, 2).completion().dga
    expected = tuple(len(paths(u, k)) + len(paths(v, k)) - len(paths(u & v, k)) for k in range(3))
    assert glued.graded_dims == expected
    assert check_dga(glued, check_associativity=False) == []
