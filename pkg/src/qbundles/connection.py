"""Connections on forms-valued bundles: local forms, gluing and curvature.

A local connection on ``Gamma(B_i) (x) V`` is fixed by its connection
form ``A[j][k]`` (a degree-1 element, the coefficient of ``v_j`` in
``nabla(1 (x) v_k)``) and extended by the graded Leibniz rule::

    nabla(g (x) v_k) = dg (x) v_k + (-1)^deg(g) g A^j_k (x) v_j
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

from .dga import DGA
from .errors import DimensionMismatch, IncompatibleConnections, InvalidData, QBundleError
from .linalg import ZERO, Matrix, kernel, unit_vector, vadd, vector, vkron
from .qvb import FormsQVB, GradedTransitionMaps, tensor_left


class TruncationError(QBundleError):
    """The degree bound is too low for the requested construction."""


def _homogeneous_degree(g: DGA, v):
    degs = {g.degrees[k] for k, x in enumerate(v) if x}
    if not degs:
        return None
    return degs.pop() if len(degs) == 1 else -1


@dataclass(eq=False)
class LocalConnection:
    chart: int
    calculus: DGA
    fibre_dim: int
    forms: tuple  # forms[j][k] = A^j_k

    def __post_init__(self):
        r = self.fibre_dim
        self.forms = tuple(tuple(vector(x) for x in row) for row in self.forms)
        if len(self.forms) != r or any(len(row) != r for row in self.forms):
            raise DimensionMismatch("connection form must be a fibre_dim x fibre_dim matrix")
        for row in self.forms:
            for x in row:
                if len(x) != self.calculus.dim:
                    raise DimensionMismatch("connection form entries do not live in the chart calculus")
                if _homogeneous_degree(self.calculus, x) not in (None, 1):
                    raise InvalidData("connection form entries must be of degree 1")

    def __eq__(self, other) -> bool:
        if not isinstance(other, LocalConnection):
            return NotImplemented
        return (self.chart, self.fibre_dim, self.forms) == (other.chart, other.fibre_dim, other.forms)

    @property
    def dim(self) -> int:
        return self.calculus.dim * self.fibre_dim

    @cached_property
    def nabla(self) -> Matrix:
        g, r = self.calculus, self.fibre_dim
        cols = []
        for c in range(g.dim):
            dg = g.differential.column(c)
            sign = g.sign(c)
            gamma = g.algebra.basis(c)
            for k in range(r):
                col = list(vkron(dg, unit_vector(r, k)))
                for j in range(r):
                    prod = g.mul(gamma, self.forms[j][k])
                    for m, x in enumerate(prod):
                        if x:
                            col[m * r + j] += sign * x
                cols.append(col)
        return Matrix.from_columns(cols, self.dim)

    def leibniz_violations(self) -> list[str]:
        """Graded Leibniz rule on ``Gamma(B_i) (x) V`` for basis pairs inside the truncation."""
        g, r = self.calculus, self.fibre_dim
        out = []
        for c in range(g.dim):
            gamma = g.algebra.basis(c)
            lg = tensor_left(g.algebra, gamma, r)
            ldg = tensor_left(g.algebra, g.differential.column(c), r)
            for m in range(self.dim):
                q = g.degrees[m // r]
                if g.degrees[c] + q > g.bound - 1:
                    continue
                x = unit_vector(self.dim, m)
                lhs = self.nabla.apply(lg.apply(x))
                rhs = vadd(ldg.apply(x), [g.sign(c) * y for y in lg.apply(self.nabla.apply(x))])
                if lhs != rhs:
                    out.append(f"Leibniz fails on chart {self.chart} for form {c} and element {m}")
        return out

    def project(self, target: DGA, proj: Matrix, chart: int | None = None) -> LocalConnection:
        """Connection on ``target (x) V`` with the projected connection form."""
        forms = [[proj.apply(x) for x in row] for row in self.forms]
        return LocalConnection(self.chart if chart is None else chart, target, self.fibre_dim, forms)


def local_connection_from_form(chart: int, calculus: DGA, forms) -> LocalConnection:
    if calculus.bound < 1:
        raise TruncationError("connections need forms of degree 1")
    forms = [list(row) for row in forms]
    return LocalConnection(chart, calculus, len(forms), forms)


def zero_connection(chart: int, calculus: DGA, fibre_dim: int) -> LocalConnection:
    z = (ZERO,) * calculus.dim
    return LocalConnection(chart, calculus, fibre_dim, [[z] * fibre_dim for _ in range(fibre_dim)])


def compatibility_residuals(locals_: Sequence[LocalConnection], t: GradedTransitionMaps) -> dict:
    """``nabla^i_ij - phi_ij nabla^j_ij phi_ji`` on every overlap."""
    out = {}
    for i, j in t.covering.pairs():
        g, a, b = t.calculi.overlap(i, j)
        ni = locals_[i].project(g, a).nabla
        nj = locals_[j].project(g, b).nabla
        out[(i, j)] = ni - t.matrix(i, j) @ nj @ t.matrix(j, i)
    return out


def check_compatibility(locals_: Sequence[LocalConnection], t: GradedTransitionMaps) -> list[str]:
    return [f"local connections {i} and {j} disagree on the overlap"
            for (i, j), res in compatibility_residuals(locals_, t).items() if not res.is_zero()]


@dataclass(eq=False)
class GlobalConnection:
    """A degree-raising map on the total space of a forms bundle."""

    bundle: FormsQVB
    nabla: Matrix
    locals: list | None = field(default=None, repr=False)

    @property
    def bound(self) -> int:
        return self.bundle.calculi.bound

    def leibniz_violations(self) -> list[str]:
        f = self.bundle
        alg = f.glued.dga
        degs = f.degrees
        out = []
        for c in range(alg.dim):
            act = f.module.action[c]
            dact = f.module.kappa(alg.differential.column(c))
            sign = alg.sign(c)
            for m in range(f.space.dim):
                if alg.degrees[c] + degs[m] > self.bound - 1:
                    continue
                e = unit_vector(f.space.dim, m)
                lhs = self.nabla.apply(act.apply(e))
                rhs = vadd(dact.apply(e), [sign * y for y in act.apply(self.nabla.apply(e))])
                if lhs != rhs:
                    out.append(f"Leibniz fails for form {c} (degree {alg.degrees[c]}) and section {m}")
        return out

    def kernel_violations(self) -> list[str]:
        out = []
        for i, z in enumerate(self.bundle.zetas):
            ker = kernel(z)
            if any(any(z.apply(self.nabla.apply(v))) for v in ker.basis):
                out.append(f"nabla does not preserve ker zeta_{i}")
        return out

    def degree_violations(self) -> list[str]:
        degs = self.bundle.degrees
        out = []
        for m in range(self.nabla.ncols):
            image = self.nabla.column(m)
            bad = {degs[p] for p, x in enumerate(image) if x} - {degs[m] + 1}
            if bad:
                out.append(f"nabla does not raise the degree of section {m} by one")
        return out

    def violations(self) -> list[str]:
        return self.leibniz_violations() + self.kernel_violations() + self.degree_violations()


def assemble_global(locals_: Sequence[LocalConnection], bundle: FormsQVB) -> GlobalConnection:
    """``nabla((e_i)) = (nabla_i(e_i))`` on compatible tuples."""
    t = bundle.transitions
    for (i, j), res in compatibility_residuals(locals_, t).items():
        if not res.is_zero():
            raise IncompatibleConnections(f"local connections {i} and {j} disagree on the overlap", (i, j), res)
    amb = bundle.layout.assemble([loc.nabla for loc in locals_])
    inc = bundle.space.basis_matrix()
    try:
        nabla = bundle.space.coordinates_matrix(amb @ inc)
    except ValueError:
        raise IncompatibleConnections("componentwise connection leaves the glued space", None, None) from None
    return GlobalConnection(bundle, nabla, list(locals_))


def localize_global(g: GlobalConnection) -> list[LocalConnection]:
    """Local connections with ``nabla_i zeta_i = zeta_i nabla``."""
    f = g.bundle
    r = f.fibre_dim
    out = []
    for i, z in enumerate(f.zetas):
        cal = f.calculi.charts[i]
        forms = [[None] * r for _ in range(r)]
        for k in range(r):
            x = z.solve(vkron(cal.algebra.unit, unit_vector(r, k)))
            if x is None:
                raise InvalidData(f"zeta_{i} does not reach 1 (x) v_{k}")
            image = z.apply(g.nabla.apply(x))
            for j in range(r):
                forms[j][k] = tuple(image[c * r + j] for c in range(cal.dim))
        loc = LocalConnection(i, cal, r, forms)
        if loc.nabla @ z != z @ g.nabla:
            raise InvalidData(f"nabla does not descend to chart {i}")
        out.append(loc)
    return out


def local_curvature_forms(loc: LocalConnection) -> tuple:
    """``F^l_k = dA^l_k - sum_j A^j_k A^l_j``, the components of ``nabla_i^2(1 (x) v_k)``."""
    g, r = loc.calculus, loc.fibre_dim
    out = [[None] * r for _ in range(r)]
    for l in range(r):
        for k in range(r):
            acc = list(g.diff(loc.forms[l][k]))
            for j in range(r):
                prod = g.mul(loc.forms[j][k], loc.forms[l][j])
                acc = [x - y for x, y in zip(acc, prod)]
            out[l][k] = tuple(acc)
    return tuple(tuple(row) for row in out)


@dataclass(eq=False)
class Curvature:
    connection: GlobalConnection
    square: Matrix
    local_squares: list
    local_forms: list

    def is_zero(self) -> bool:
        return self.square.is_zero()

    def linearity_violations(self) -> list[str]:
        """``nabla^2(g e) = g nabla^2(e)`` for basis pairs inside the truncation."""
        f = self.connection.bundle
        alg = f.glued.dga
        degs = f.degrees
        bound = self.connection.bound
        out = []
        for c in range(alg.dim):
            act = f.module.action[c]
            for m in range(f.space.dim):
                if alg.degrees[c] + degs[m] > bound - 2:
                    continue
                e = unit_vector(f.space.dim, m)
                if self.square.apply(act.apply(e)) != act.apply(self.square.apply(e)):
                    out.append(f"curvature is not left linear for form {c} and section {m}")
        return out

    def degree_violations(self) -> list[str]:
        degs = self.connection.bundle.degrees
        out = []
        for m in range(self.square.ncols):
            bad = {degs[p] for p, x in enumerate(self.square.column(m)) if x} - {degs[m] + 2}
            if bad:
                out.append(f"curvature does not raise the degree of section {m} by two")
        return out


def curvature(g: GlobalConnection) -> Curvature:
    if g.bound < 2:
        raise TruncationError("curvature needs forms up to degree 2")
    locs = g.locals if g.locals is not None else localize_global(g)
    return Curvature(g, g.nabla @ g.nabla, [loc.nabla @ loc.nabla for loc in locs],
                     [local_curvature_forms(loc) for loc in locs])


def one_chart_bundle(calculus_covering, fibre_dim: int = 1) -> FormsQVB:
    """Forms of the trivial bundle over a single chart."""
    from .qvb import TransitionMaps, build_forms_qvb

    t = TransitionMaps(calculus_covering.base, fibre_dim, {})
    return build_forms_qvb(t, calculus_covering)
