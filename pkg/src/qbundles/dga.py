"""Truncated differential graded algebras and coverings by graded ideals.

A :class:`DGA` is stored as one finite-dimensional algebra on the direct
sum of its homogeneous pieces (basis ordered by degree), a degree label
per basis element and the differential as a single matrix.  Products of
total degree above the bound are zero, which makes the truncation an
honest associative algebra.
"""

from __future__ import annotations

from itertools import product
from typing import Sequence

from .algebra import (
    Algebra,
    AlgebraCovering,
    AlgebraMorphism,
    _quotient_algebra,
    check_algebra,
    is_two_sided_ideal,
)
from .errors import DimensionMismatch, InvalidData, NotACovering, NotAnIdeal
from .linalg import (
    ZERO,
    GradedDirectSum,
    Matrix,
    Subspace,
    intersect_all,
    kernel,
    kron,
    quotient,
    unit_vector,
)


class DGA:
    def __init__(self, algebra: Algebra, degrees: Sequence[int], d: Matrix, bound: int, name: str = ""):
        self.algebra = algebra
        self.degrees = tuple(degrees)
        self.differential = d
        self.bound = bound
        self.name = name
        if len(self.degrees) != algebra.dim:
            raise DimensionMismatch("need one degree per basis element")
        if list(self.degrees) != sorted(self.degrees):
            raise InvalidData("basis must be ordered by degree")
        if d.shape != (algebra.dim, algebra.dim):
            raise DimensionMismatch("differential must be a square matrix on the total space")

    def __repr__(self) -> str:
        return f"<DGA {self.name} dims={self.graded_dims}>"

    @property
    def dim(self) -> int:
        return self.algebra.dim

    @property
    def graded_dims(self) -> tuple:
        return tuple(self.degrees.count(n) for n in range(self.bound + 1))

    def indices(self, n: int) -> range:
        start = sum(1 for x in self.degrees if x < n)
        return range(start, start + self.degrees.count(n))

    def mul(self, x, y):
        return self.algebra.mul(x, y)

    def diff(self, x):
        return self.differential.apply(x)

    def degree_zero(self) -> Algebra:
        idx = list(self.indices(0))
        left = [self.algebra.left[i].select(rows=idx, cols=idx) for i in idx]
        return Algebra(left, [self.algebra.unit[i] for i in idx], name=self.name)

    def sign(self, i: int) -> int:
        return -1 if self.degrees[i] % 2 else 1


def dga_from_algebra(b: Algebra) -> DGA:
    """``b`` concentrated in degree 0 with zero differential."""
    return DGA(b, [0] * b.dim, Matrix.zeros(b.dim, b.dim), 0, name=b.name)


def _support_degrees(g: DGA, v) -> set:
    return {g.degrees[k] for k, x in enumerate(v) if x}


def check_dga(g: DGA, check_associativity: bool = True) -> list[str]:
    """Violated DGA axioms within the truncation."""
    report = []
    n = g.dim
    if any(not (0 <= x <= g.bound) for x in g.degrees):
        report.append("basis degrees outside 0..bound")
    if _support_degrees(g, g.algebra.unit) - {0}:
        report.append("unit is not of degree 0")
    if check_associativity:
        report.extend(f"algebra: {r}" for r in check_algebra(g.algebra))
    for i, j in product(range(n), repeat=2):
        p, q = g.degrees[i], g.degrees[j]
        sup = _support_degrees(g, g.algebra.structure(i, j))
        if p + q > g.bound and sup:
            report.append(f"product of basis ({i}, {j}) exceeds the truncation but is nonzero")
        elif sup - {p + q}:
            report.append(f"product of basis ({i}, {j}) is not of degree {p + q}")
    for i in range(n):
        sup = _support_degrees(g, g.differential.column(i))
        if sup - {g.degrees[i] + 1}:
            report.append(f"d does not raise degree by one on basis {i} (degree {g.degrees[i]})")
    dd = g.differential @ g.differential
    for i in range(n):
        if any(dd.column(i)):
            report.append(f"d^2 != 0 on basis element {i} of degree {g.degrees[i]}")
    for i, j in product(range(n), repeat=2):
        p, q = g.degrees[i], g.degrees[j]
        if p + q > g.bound - 1:
            continue
        a, b = g.algebra.basis(i), g.algebra.basis(j)
        lhs = g.diff(g.algebra.structure(i, j))
        da, db = g.diff(a), g.diff(b)
        rhs = tuple(x + (-1) ** p * y for x, y in zip(g.mul(da, b), g.mul(a, db)))
        if lhs != rhs:
            report.append(f"graded Leibniz rule fails on basis ({i}, {j}) of degrees ({p}, {q})")
    return report


class UniversalDGA(DGA):
    """Universal calculus: ``Omega^n`` inside ``B^(n+1)`` as the joint kernel
    of the adjacent multiplications, ``d a = 1 (x) a - a (x) 1`` extended by
    the alternating insertion of ``1``."""

    def __init__(self, base: Algebra, forms: Sequence[Subspace], algebra, degrees, d, bound):
        super().__init__(algebra, degrees, d, bound, name=f"Omega({base.name})")
        self.base = base
        self.forms = tuple(forms)

    def offset(self, n: int) -> int:
        return sum(f.dim for f in self.forms[:n])


def _adjacent_mult(b: Algebra, n: int, k: int) -> Matrix:
    """Multiply tensor factors ``k`` and ``k+1`` of ``B^(n+1)``."""
    d = b.dim
    return kron(Matrix.identity(d ** k), b.mult_matrix, Matrix.identity(d ** (n - 1 - k)))


def _sparse(v):
    return [(idx, c) for idx, c in enumerate(v) if c]


def universal_dga(b: Algebra, bound: int = 2) -> UniversalDGA:
    if bound < 0:
        raise ValueError("degree bound must be nonnegative")
    d = b.dim
    forms = [Subspace.full(d)]
    for n in range(1, bound + 1):
        cond = [_adjacent_mult(b, n, k) for k in range(n)]
        rows = [r for m in cond for r in m.rows]
        forms.append(kernel(Matrix(rows, d ** (n + 1))) if rows else Subspace.full(d ** (n + 1)))
    offs = [sum(f.dim for f in forms[:n]) for n in range(bound + 2)]
    total = offs[-1]
    degrees = [n for n, f in enumerate(forms) for _ in range(f.dim)]
    basis = [(n, v) for n, f in enumerate(forms) for v in f.basis]
    mu = [[_sparse(b.structure(i, j)) for j in range(d)] for i in range(d)]

    def coords(n, amb):
        f = forms[n]
        return [amb[p] for p in f.pivots]

    left_cols = [[None] * total for _ in range(total)]
    for a_idx, (p, u) in enumerate(basis):
        su = _sparse(u)
        for b_idx, (q, v) in enumerate(basis):
            out = [ZERO] * total
            if p + q <= bound:
                amb = [ZERO] * d ** (p + q + 1)
                sv = _sparse(v)
                scale = d ** q
                for iu, cu in su:
                    pre, ap = divmod(iu, d)
                    for iv, cv in sv:
                        b0, suf = divmod(iv, scale)
                        for k, cm in mu[ap][b0]:
                            amb[(pre * d + k) * scale + suf] += cu * cv * cm
                c = coords(p + q, amb)
                out[offs[p + q]:offs[p + q] + len(c)] = c
            left_cols[a_idx][b_idx] = tuple(out)
    left = [Matrix.from_columns(cols, total) for cols in left_cols]

    unit = _sparse(b.unit)
    dcols = []
    for p, u in basis:
        out = [ZERO] * total
        if p < bound:
            amb = [ZERO] * d ** (p + 2)
            for iu, cu in _sparse(u):
                digits = []
                x = iu
                for _ in range(p + 1):
                    x, r = divmod(x, d)
                    digits.append(r)
                digits.reverse()
                for pos in range(p + 2):
                    sign = -1 if pos % 2 else 1
                    for k, ck in unit:
                        new = digits[:pos] + [k] + digits[pos:]
                        idx = 0
                        for t in new:
                            idx = idx * d + t
                        amb[idx] += sign * cu * ck
            c = coords(p + 1, amb)
            out[offs[p + 1]:offs[p + 1] + len(c)] = c
        dcols.append(out)
    dmat = Matrix.from_columns(dcols, total)
    unit_total = list(b.unit) + [ZERO] * (total - d)
    alg = Algebra(left, unit_total, name=f"Omega({b.name})")
    return UniversalDGA(b, forms, alg, degrees, dmat, bound)


def universal_dga_map(f: AlgebraMorphism | Matrix, source: UniversalDGA, target: UniversalDGA) -> Matrix:
    """DGA morphism ``Omega(B) -> Omega(B')`` induced by an algebra map, ``a0 da1 ... -> f(a0) df(a1) ...``."""
    fm = f.map if isinstance(f, AlgebraMorphism) else f
    if source.bound != target.bound:
        raise DimensionMismatch("universal calculi truncated at different degrees")
    d, e = source.base.dim, target.base.dim
    fcols = [_sparse(fm.column(k)) for k in range(d)]
    cols = []
    for n, form in enumerate(source.forms):
        for v in form.basis:
            amb = [ZERO] * e ** (n + 1)
            for idx, c in _sparse(v):
                digits = []
                x = idx
                for _ in range(n + 1):
                    x, r = divmod(x, d)
                    digits.append(r)
                digits.reverse()
                terms = [(0, c)]
                for t in digits:
                    terms = [(acc * e + k, cc * ck) for acc, cc in terms for k, ck in fcols[t]]
                for pos, cc in terms:
                    amb[pos] += cc
            out = [ZERO] * target.dim
            off = target.offset(n)
            tf = target.forms[n]
            for r, p in enumerate(tf.pivots):
                out[off + r] = amb[p]
            cols.append(out)
    return Matrix.from_columns(cols, target.dim)


def morphism_violations(f: Matrix, source: DGA, target: DGA) -> list[str]:
    """Checks that ``f`` is a degree-preserving unital multiplicative chain map."""
    out = []
    if f.shape != (target.dim, source.dim):
        return ["shape mismatch"]
    for i in range(source.dim):
        sup = _support_degrees(target, f.column(i))
        if sup - {source.degrees[i]}:
            out.append(f"basis {i} not mapped to degree {source.degrees[i]}")
    if f @ source.differential != target.differential @ f:
        out.append("not a chain map")
    if f.apply(source.algebra.unit) != target.algebra.unit:
        out.append("unit not preserved")
    for i, j in product(range(source.dim), repeat=2):
        if f.apply(source.algebra.structure(i, j)) != target.mul(f.column(i), f.column(j)):
            out.append(f"not multiplicative on ({i}, {j})")
    return out


def is_graded_subspace(g: DGA, s: Subspace) -> bool:
    parts = []
    for n in range(g.bound + 1):
        slice_ = Subspace(g.dim, [unit_vector(g.dim, k) for k in g.indices(n)])
        parts.extend((s & slice_).basis)
    return Subspace(g.dim, parts) == s


def differential_ideal(g: DGA, vectors) -> Subspace:
    """Smallest d-closed two-sided ideal containing ``vectors``."""
    s = Subspace(g.dim, vectors)
    while True:
        new = list(s.basis)
        for v in s.basis:
            new.append(g.diff(v))
            for i in range(g.dim):
                e = g.algebra.basis(i)
                new.append(g.mul(e, v))
                new.append(g.mul(v, e))
        t = Subspace(g.dim, new)
        if t == s:
            return s
        s = t


def _check_graded_ideal(g: DGA, s: Subspace):
    if s.ambient_dim != g.dim:
        raise DimensionMismatch("ideal does not live in the DGA")
    if not is_graded_subspace(g, s):
        raise NotAnIdeal("subspace is not graded")
    if not is_two_sided_ideal(g.algebra, s):
        raise NotAnIdeal("subspace is not a two-sided ideal")
    if not all(s.contains(g.diff(v)) for v in s.basis):
        raise NotAnIdeal("ideal is not closed under d")


def quotient_dga(g: DGA, ideal, i: int | None = None) -> tuple[DGA, Matrix]:
    """``g / ideal`` and the graded projection; ``ideal`` may be a covering with chart ``i``."""
    if isinstance(ideal, GradedIdealCovering):
        ideal = ideal.ideals[i]
    _check_graded_ideal(g, ideal)
    q = quotient(g.dim, ideal)
    alg = _quotient_algebra(g.algebra, q)
    degrees = [g.degrees[c] for c in q.free_positions]
    d = q.projection @ g.differential @ q.section
    return DGA(alg, degrees, d, g.bound, name=f"{g.name}/J"), q.projection


class GradedIdealCovering:
    """Graded differential ideals ``J_iG`` of ``g`` with ``pr_0(J_iG) = J_i``."""

    def __init__(self, g: DGA, ideals: Sequence[Subspace], base_ideals: Sequence[Subspace] | None = None,
                 strict: bool = True):
        self.dga = g
        self.ideals = list(ideals)
        for s in self.ideals:
            _check_graded_ideal(g, s)
        if strict and self.violations():
            raise NotACovering("; ".join(self.violations()))
        if base_ideals is not None:
            deg0 = list(g.indices(0))
            for k, (s, j) in enumerate(zip(self.ideals, base_ideals)):
                pr0 = Subspace(len(deg0), [[v[i] for i in deg0] for v in s.basis])
                inside = Subspace(len(deg0), [[v[i] for i in deg0] for v in s.basis
                                              if not any(v[i] for i in range(g.dim) if i not in deg0)])
                if pr0 != j or inside != j:
                    raise InvalidData(f"degree-0 part of graded ideal {k} is not the prescribed ideal")

    def violations(self) -> list[str]:
        """Degrees in which the graded ideals fail to intersect to zero."""
        meet = intersect_all(self.ideals)
        bad = sorted({self.dga.degrees[p] for p in meet.pivots})
        return [f"graded ideals intersect nontrivially in degree {n}" for n in bad]

    @classmethod
    def generated(cls, g: DGA, base_ideals: Sequence[Subspace], strict: bool = False) -> GradedIdealCovering:
        """Differential ideals generated by the degree-0 ideals.

        Above degree 0 these usually overlap (``e_a de_b`` lies in both
        ideals when ``e_a`` and ``e_b`` do), hence ``strict=False``.
        """
        deg0 = list(g.indices(0))

        def lift(v):
            out = [ZERO] * g.dim
            for k, i in enumerate(deg0):
                out[i] = v[k]
            return out

        ideals = [differential_ideal(g, [lift(v) for v in j.basis]) for j in base_ideals]
        return cls(g, ideals, base_ideals, strict=strict)

    def __len__(self) -> int:
        return len(self.ideals)

    def chart(self, i: int) -> tuple[DGA, Matrix]:
        return quotient_dga(self.dga, self.ideals[i])

    def overlap(self, i: int, j: int) -> tuple[DGA, Matrix, Matrix]:
        return pairwise_quotient_dga(self.dga, self, i, j)


def pairwise_quotient_dga(g: DGA, cov: GradedIdealCovering, i: int, j: int) -> tuple[DGA, Matrix, Matrix]:
    """``Gamma(B_ij)`` with the projections from ``Gamma(B_i)`` and ``Gamma(B_j)``."""
    s = cov.ideals[i] + cov.ideals[j]
    gij, pij = quotient_dga(g, s)
    qi = quotient(g.dim, cov.ideals[i])
    qj = quotient(g.dim, cov.ideals[j])
    return gij, pij @ qi.section, pij @ qj.section


class CalculusCovering:
    """Chart calculi ``Gamma(B_i)``, overlap calculi ``Gamma(B_ij)`` and the
    projections between them, over a covering of the base algebra."""

    def __init__(self, base: AlgebraCovering, charts: Sequence[DGA], overlaps: dict,
                 global_dga: DGA | None = None, global_projections: Sequence[Matrix] | None = None):
        self.base = base
        self.charts = list(charts)
        self._overlaps = dict(overlaps)
        self.global_dga = global_dga
        self.global_projections = list(global_projections) if global_projections else None
        bounds = {c.bound for c in self.charts} | {o[0].bound for o in self._overlaps.values()}
        if len(bounds) != 1:
            raise InvalidData("calculi truncated at different degrees")
        self.bound = bounds.pop()

    def __len__(self) -> int:
        return len(self.charts)

    def overlap(self, i: int, j: int) -> tuple[DGA, Matrix, Matrix]:
        if i == j:
            eye = Matrix.identity(self.charts[i].dim)
            return self.charts[i], eye, eye
        if i > j:
            g, a, b = self.overlap(j, i)
            return g, b, a
        return self._overlaps[(i, j)]

    def violations(self, full: bool = False) -> list[str]:
        """Compatibility with the base covering; ``full`` also re-checks morphism axioms."""
        out = []
        for i, c in enumerate(self.charts):
            if c.degree_zero() != self.base.charts[i]:
                out.append(f"degree-0 part of chart calculus {i} differs from B_{i}")
        for i, j in self.base.pairs():
            g, a, b = self.overlap(i, j)
            ov = self.base.overlap(i, j)
            if g.degree_zero() != ov.algebra:
                out.append(f"degree-0 part of overlap calculus ({i}, {j}) differs from B_{i}{j}")
            z_i, z_j, z = list(self.charts[i].indices(0)), list(self.charts[j].indices(0)), list(g.indices(0))
            if a.select(z, z_i) != ov.from_left or b.select(z, z_j) != ov.from_right:
                out.append(f"overlap projections ({i}, {j}) do not restrict to the base projections")
            if full:
                out.extend(f"pi^{i}_{j}: {v}" for v in morphism_violations(a, self.charts[i], g))
                out.extend(f"pi^{j}_{i}: {v}" for v in morphism_violations(b, self.charts[j], g))
        return out

    def graded_sum(self, fibre_dims: Sequence[int] | int = 1) -> GradedDirectSum:
        """Degree-major layout of ``sum_i Gamma(B_i) (x) W`` with ``dim W`` per chart."""
        if isinstance(fibre_dims, int):
            fibre_dims = [fibre_dims] * len(self)
        return GradedDirectSum([[deg for deg in c.degrees for _ in range(w)]
                                for c, w in zip(self.charts, fibre_dims)])

    def completion(self) -> GluedCalculus:
        return GluedCalculus(self)


def universal_calculi(base: AlgebraCovering, bound: int = 2) -> CalculusCovering:
    """Universal calculi on every chart and overlap, joined by the induced maps."""
    charts = [universal_dga(b, bound) for b in base.charts]
    overlaps = {}
    for i, j in base.pairs():
        ov = base.overlap(i, j)
        g = universal_dga(ov.algebra, bound)
        overlaps[(i, j)] = (g, universal_dga_map(ov.from_left, charts[i], g),
                            universal_dga_map(ov.from_right, charts[j], g))
    return CalculusCovering(base, charts, overlaps)


def calculi_from_graded_covering(base: AlgebraCovering, cov: GradedIdealCovering) -> CalculusCovering:
    charts, projections = [], []
    for i in range(len(cov)):
        c, p = cov.chart(i)
        charts.append(c)
        projections.append(p)
    overlaps = {(i, j): cov.overlap(i, j) for i, j in base.pairs()}
    return CalculusCovering(base, charts, overlaps, cov.dga, projections)


class GluedCalculus:
    """Compatible tuples in ``sum_i Gamma(B_i)`` as a DGA.

    This is the algebra acting on forms-valued bundles; ``space`` lives
    in the degree-major layout ``layout`` and ``component(i)`` maps
    coordinates of the glued DGA to ``Gamma(B_i)``.
    """

    def __init__(self, calculi: CalculusCovering):
        self.calculi = calculi
        self.layout = calculi.graded_sum(1)
        cons = []
        for i, j in calculi.base.pairs():
            _, a, b = calculi.overlap(i, j)
            cons.append((i, j, a, b))
        self.space = self.layout.glue(cons)
        degrees = self.layout.degree_of_basis(self.space)
        inc = self.space.basis_matrix()
        self._components = [self.layout.component(i) @ inc for i in range(len(calculi))]
        n = self.space.dim
        ambient_left = []
        for k in range(n):
            blocks = [c.algebra.left_matrix(comp.column(k))
                      for c, comp in zip(calculi.charts, self._components)]
            ambient_left.append(self.layout.assemble(blocks))
        left = [self.space.coordinates_matrix(m @ inc) for m in ambient_left]
        unit_amb = [ZERO] * self.layout.dim
        for i, c in enumerate(calculi.charts):
            for k, x in enumerate(c.algebra.unit):
                unit_amb[self.layout.position[(i, k)]] += x
        unit = self.space.coordinates(unit_amb)
        d_amb = self.layout.assemble([c.differential for c in calculi.charts])
        d = self.space.coordinates_matrix(d_amb @ inc)
        self.dga = DGA(Algebra(left, unit, name="Gamma_c"), degrees, d, calculi.bound, name="Gamma_c")

    def component(self, i: int) -> Matrix:
        return self._components[i]

    def from_global(self) -> Matrix | None:
        """``Gamma(B) -> Gamma_c`` when a global calculus is known."""
        cal = self.calculi
        if cal.global_dga is None:
            return None
        stacked = Matrix.zeros(self.layout.dim, cal.global_dga.dim)
        for i, p in enumerate(cal.global_projections):
            stacked = stacked + self.layout.embedding(i) @ p
        return self.space.coordinates_matrix(stacked)
