import pytest
from hypothesis import given, settings, strategies as st

from qbundles.algebra import AlgebraCovering, function_algebra
from qbundles.errors import GluingError, InvalidData, NotInvertible
from qbundles.fixtures import b3_covering, c4_covering, incomplete_covering, mobius_calculi, mobius_transitions, points_ideal
from qbundles.linalg import Matrix, Subspace, kernel
from qbundles.qvb import (
    QVB,
    TransitionMaps,
    build_forms_qvb,
    build_qvb,
    discrete_classical_bundle,
    forms_gluing_violations,
    glue_section,
    transitions_from_trivializations,
    verify_qvb,
)


def axiom_names(report):
    return {line.split(":")[0] for line in report}


def test_mobius_bundle():
    q = build_qvb(mobius_transitions())
    # [DERIVED] classical oracle: a line bundle over four points has four independent sections
    assert q.dim == 4
    assert verify_qvb(q) == []
    assert q.space == discrete_classical_bundle(4, [[0, 1, 2], [0, 2, 3]], {(0, 1): {0: [[1]], 2: [[-1]]}}, 1).space


def test_mobius_gluing():
    q = build_qvb(mobius_transitions())
    # chart 0 sees points (0, 1, 2), chart 1 sees (0, 2, 3); on the overlap {0, 2} the twist is (1, -1)
    flat = glue_section(q, [[1, 1, 1], [1, -1, 5]])
    assert q.space.contains(flat)
    with pytest.raises(GluingError) as err:
        glue_section(q, [[1, 1, 1], [1, 0, -1]])
    assert err.value.pairs == [(0, 1)]


def test_trivial_bundles():
    for cov, dim in ((b3_covering(), 3), (c4_covering(), 4)):
        for r in (1, 2):
            q = build_qvb(TransitionMaps.identity(cov, r))
            assert q.dim == dim * r
            assert verify_qvb(q) == []


def test_rank_two_classical_bundle_on_three_points():
    def g(p):
        return [[1, p], [0, 1]]  # a unipotent twist, different at each point

    q = discrete_classical_bundle(3, [[0, 1], [1, 2]], {(0, 1): g}, 2)
    assert q.dim == 6
    assert verify_qvb(q) == []


def test_non_invertible_transition_rejected():
    with pytest.raises(NotInvertible):
        TransitionMaps.from_functions(c4_covering(), 1, {(0, 1): [[[1, 0]]]})


def test_cocycle_violation_reported():
    cov = AlgebraCovering(function_algebra(2), [Subspace.zero(2)] * 3)
    with pytest.raises(InvalidData) as err:
        TransitionMaps.from_functions(cov, 1, {(0, 1): [[[2, 2]]], (1, 2): [[[1, 1]]], (0, 2): [[[1, 1]]]})
    assert err.value.violations == ["cocycle condition fails on triple (0, 1, 2)"]


def test_broken_variants_name_the_axiom():
    t = mobius_transitions()
    cov = t.covering
    good = build_qvb(t)

    # every compatible-or-not tuple: trivialization kernels no longer sum correctly
    full = QVB.from_total(cov, 1, Subspace.full(6), t)
    assert "kernel-sums" in axiom_names(verify_qvb(full))

    # sections vanishing at point 3: the chart-1 trivialization misses it and e_3 acts by zero
    dead = good.space & kernel(Matrix([[0, 0, 0, 0, 0, 1]]))
    names = axiom_names(verify_qvb(QVB.from_total(cov, 1, dead, t)))
    assert {"surjective", "faithful"} <= names

    # swap points 0 and 1 inside the chart-0 trivialization
    swap = Matrix([[0, 1, 0], [1, 0, 0], [0, 0, 1]])
    twisted = QVB(cov, 1, good.module, [swap @ good.zetas[0], good.zetas[1]], good.space, t)
    assert "linearity" in axiom_names(verify_qvb(twisted))

    bad_base = build_qvb(TransitionMaps.identity(incomplete_covering(), 1))
    assert "complete-base" in axiom_names(verify_qvb(bad_base))


def test_non_invariant_total_space_rejected():
    t = mobius_transitions()
    with pytest.raises(InvalidData):
        QVB.from_total(t.covering, 1, Subspace(6, [[1, 1, 0, 0, 0, 0]]), t)


def test_round_trip_on_fixtures():
    fixtures = [
        TransitionMaps.identity(b3_covering(), 1),
        mobius_transitions(),
        TransitionMaps.from_functions(c4_covering(), 2, {(0, 1): [[[1, 1], [0, 0]], [[0, 0], [1, -1]]]}),
    ]
    for t in fixtures:
        q = build_qvb(t)
        assert transitions_from_trivializations(q.module, q.zetas, t.covering, t.fibre_dim) == t


@st.composite
def classical_transitions(draw):
    """Coboundary data ``g_ij = h_i h_j^-1`` with random invertible ``h_i(x)``: always a cocycle."""
    n = draw(st.integers(2, 4))
    k = draw(st.integers(2, 3))
    r = draw(st.integers(1, 2))
    charts = [draw(st.sets(st.integers(0, n - 1), min_size=1)) for _ in range(k)]
    charts[0] |= set(range(n)) - set().union(*charts)
    entry = st.integers(-2, 2)
    h = {}
    for i in range(k):
        for p in charts[i]:
            m = draw(st.lists(st.lists(entry, min_size=r, max_size=r), min_size=r, max_size=r)
                     .filter(lambda rows: Matrix(rows).rank() == r))
            h[(i, p)] = Matrix(m)
    return n, [sorted(c) for c in charts], r, h


@settings(max_examples=25)
@given(classical_transitions())
def test_classical_round_trip(data):
    n, charts, r, h = data
    ideals = [points_ideal(n, [p for p in range(n) if p not in c]) for c in charts]
    cov = AlgebraCovering(function_algebra(n), ideals)
    g = {}
    for i, j in cov.pairs():
        pts = sorted(set(charts[i]) & set(charts[j]))
        mats = [h[(i, p)] @ h[(j, p)].inverse() for p in pts]
        g[(i, j)] = [[[m.rows[l][kk] for m in mats] for kk in range(r)] for l in range(r)]
    t = TransitionMaps.from_functions(cov, r, g)
    q = build_qvb(t)
    # [DERIVED] classical oracle: rank-r bundle over n points has r*n dimensional sections
    assert q.dim == r * n
    assert verify_qvb(q) == []
    assert transitions_from_trivializations(q.module, q.zetas, cov, r) == t


def test_forms_valued_mobius_bundle():
    f = build_forms_qvb(mobius_transitions(), mobius_calculi(2))
    # [DERIVED] path count: 4, 6 + 6 - 2, 12 + 12 - 2 for a line bundle over the c4 charts
    assert f.graded_dims == (4, 10, 22)
    assert forms_gluing_violations(f) == []
    assert f.degree_zero_slice() == build_qvb(mobius_transitions()).space


def test_forms_valued_trivial_b3():
    from qbundles.dga import universal_calculi

    f = build_forms_qvb(TransitionMaps.identity(b3_covering(), 1), universal_calculi(b3_covering(), 1))
    assert f.graded_dims == (3, 4)
    assert forms_gluing_violations(f) == []
