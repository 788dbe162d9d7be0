"""Associated bundles of locally trivial principal data.

The principal side is given locally: a Hopf algebra ``H``, a complete
covering of ``B`` and transition functions ``tau_ij : H -> B_ij``.  From
these we glue the right comodule ``P``, form the cotensor product
``E(P, F)`` with a left comodule ``F`` and compare it with the bundle
``E~`` glued directly from ``a (x) f -> a tau_ji(f_(-1)) (x) f_(0)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import permutations
from typing import Sequence

from .algebra import AlgebraCovering
from .connection import GlobalConnection, LocalConnection, TruncationError, assemble_global
from .dga import DGA, CalculusCovering
from .errors import DimensionMismatch, InvalidData, NotInvertible
from .hopf import (
    ConvolutionMap,
    HopfAlgebra,
    LeftComodule,
    RightComodule,
    check_left_comodule,
    convolution,
    convolution_inverse,
    convolution_unit,
    cotensor,
    is_unital,
    multiplicativity_violations,
    regular_left_comodule,
)
from .linalg import (
    ZERO,
    Matrix,
    Subspace,
    block_diag,
    glued_subspace,
    graded_block_map,
    kron,
    unit_vector,
    vector,
)
from .modules import LeftModule
from .qvb import (
    QVB,
    FormsQVB,
    TransitionMaps,
    build_forms_qvb,
    build_qvb,
    extend_transitions_to_forms,
    tensor_left,
)


class PrincipalLocalData:
    """``tau[(i, j)]`` for ``i < j``; reverse maps are convolution inverses."""

    def __init__(self, hopf: HopfAlgebra, covering: AlgebraCovering, tau: dict):
        self.hopf = hopf
        self.covering = covering
        self.given = {}
        for (i, j), m in tau.items():
            target = covering.overlap(i, j).algebra
            mm = m.map if isinstance(m, ConvolutionMap) else m
            if not isinstance(mm, Matrix):
                mm = Matrix.from_columns([vector(x) for x in m], target.dim)
            self.given[(i, j)] = ConvolutionMap(hopf, target, mm)
        self._tau = dict(self.given)

    @classmethod
    def trivial(cls, hopf: HopfAlgebra, covering: AlgebraCovering) -> PrincipalLocalData:
        return cls(hopf, covering, {(i, j): convolution_unit(hopf, covering.overlap(i, j).algebra)
                                    for i, j in covering.pairs()})

    def tau(self, i: int, j: int) -> ConvolutionMap:
        if i == j:
            return convolution_unit(self.hopf, self.covering.charts[i])
        if (i, j) not in self._tau:
            if (j, i) not in self.given:
                raise InvalidData(f"no transition function for charts ({i}, {j})")
            try:
                self._tau[(i, j)] = convolution_inverse(self.given[(j, i)])
            except NotInvertible:
                raise NotInvertible(f"tau_{j}{i} is not convolution invertible") from None
        return self._tau[(i, j)]


def check_principal_data(p: PrincipalLocalData) -> list[str]:
    out = []
    cov = p.covering
    for i, j in cov.pairs():
        for a, b in ((i, j), (j, i)):
            try:
                t = p.tau(a, b)
            except (NotInvertible, InvalidData) as exc:
                out.append(str(exc))
                continue
            if not is_unital(t):
                out.append(f"tau_{a}{b} is not unital")
            if multiplicativity_violations(t):
                out.append(f"tau_{a}{b} is not multiplicative")
        try:
            unit = convolution_unit(p.hopf, cov.overlap(i, j).algebra).map
            if convolution(p.tau(i, j), p.tau(j, i)).map != unit or convolution(p.tau(j, i), p.tau(i, j)).map != unit:
                out.append(f"tau_{i}{j} and tau_{j}{i} are not convolution inverse")
        except (NotInvertible, InvalidData):
            pass
    for tri in cov.triples():
        alg, *maps = cov.triple(*tri)
        proj = dict(zip([(tri[0], tri[1]), (tri[1], tri[2]), (tri[0], tri[2])], maps))

        def down(a, b):
            m = proj[(min(a, b), max(a, b))]
            return ConvolutionMap(p.hopf, alg, m @ p.tau(a, b).map)

        try:
            for i, j, k in permutations(tri):
                if down(i, k).map != convolution(down(i, j), down(j, k)).map:
                    out.append(f"cocycle condition tau_{i}{k} = tau_{i}{j} * tau_{j}{k} fails")
        except (NotInvertible, InvalidData):
            pass
    return out


def _require(p: PrincipalLocalData, f: LeftComodule | None = None):
    report = check_principal_data(p)
    if f is not None:
        if f.hopf != p.hopf:
            raise DimensionMismatch("comodule is over a different Hopf algebra")
        report += [f"comodule: {r}" for r in check_left_comodule(f)]
    if report:
        raise InvalidData("invalid principal data", report)


def _phi_values(p: PrincipalLocalData, f: LeftComodule, i: int, j: int) -> list:
    """``phi_ij(1 (x) f_k) = tau_ji(f_k(-1)) (x) f_k(0)``."""
    r = f.dim
    tau = p.tau(j, i).map
    n = tau.nrows
    vals = []
    for k in range(r):
        out = [ZERO] * (n * r)
        for h, l, c in f.sweedler(k):
            for m, x in enumerate(tau.column(h)):
                out[m * r + l] += c * x
        vals.append(out)
    return vals


def transitions_from_tau(p: PrincipalLocalData, f: LeftComodule) -> TransitionMaps:
    _require(p, f)
    values = {}
    for i, j in p.covering.pairs():
        values[(i, j)] = _phi_values(p, f, i, j)
        values[(j, i)] = _phi_values(p, f, j, i)
    return TransitionMaps(p.covering, f.dim, values)


def build_tilde(p: PrincipalLocalData, f: LeftComodule) -> QVB:
    """Glued local models ``B_i (x) F`` written out term by term from the gluing rule."""
    _require(p, f)
    cov = p.covering
    r = f.dim
    eye = Matrix.identity(r)
    cons = []
    for i, j in cov.pairs():
        ov = cov.overlap(i, j)
        alg = ov.algebra
        tau = p.tau(j, i).map
        # b (x) f_k  ->  sum  b tau_ji(f_k(-1)) (x) f_k(0)
        cols = []
        for b in range(alg.dim):
            for k in range(r):
                out = [ZERO] * (alg.dim * r)
                for h, l, c in f.sweedler(k):
                    prod = alg.mul(alg.basis(b), tau.column(h))
                    for m, x in enumerate(prod):
                        out[m * r + l] += c * x
                cols.append(out)
        twist = Matrix.from_columns(cols, alg.dim * r)
        cons.append((i, j, ov.from_left.kron(eye), twist @ ov.from_right.kron(eye)))
    dims = [c.dim * r for c in cov.charts]
    return QVB.from_total(cov, r, glued_subspace(dims, cons), transitions_from_tau(p, f))


@dataclass(eq=False)
class GluedPrincipal:
    """The right comodule ``P`` inside ``sum_i B_i (x) H``."""

    data: PrincipalLocalData
    transitions: TransitionMaps
    bundle: QVB
    comodule: RightComodule

    @property
    def dim(self) -> int:
        return self.bundle.dim

    @property
    def inclusion(self) -> Matrix:
        return self.bundle.space.basis_matrix()


def _coaction_on_free(alg_dim: int, h: HopfAlgebra) -> Matrix:
    return kron(Matrix.identity(alg_dim), h.coproduct)


def build_glued_principal(p: PrincipalLocalData) -> GluedPrincipal:
    h = p.hopf
    reg = regular_left_comodule(h)
    t = transitions_from_tau(p, reg)
    eye_h = Matrix.identity(h.dim)
    for (i, j) in t.values:
        alg = t.overlap_algebra(i, j)
        delta = _coaction_on_free(alg.dim, h)
        phi = t.matrix(i, j)
        if kron(phi, eye_h) @ delta != delta @ phi:
            raise InvalidData(f"gluing map ({i}, {j}) is not a comodule morphism")
    q = build_qvb(t)
    inc = q.space.basis_matrix()
    amb = block_diag(*[_coaction_on_free(c.dim, h) for c in p.covering.charts])
    image = amb @ inc
    rows = [pos * h.dim + k for pos in q.space.pivots for k in range(h.dim)]
    coaction = image.select(rows=rows)
    if kron(inc, eye_h) @ coaction != image:
        raise InvalidData("glued space is not closed under the coaction")
    return GluedPrincipal(p, t, q, RightComodule(h, q.dim, coaction))


@dataclass(eq=False)
class AssociatedBundle:
    """``E(P, F)`` with its ``B``-action; ``embedding`` maps into ``sum_i B_i (x) H (x) F``."""

    principal: GluedPrincipal
    comodule: LeftComodule
    space: Subspace
    module: LeftModule
    embedding: Matrix

    @property
    def dim(self) -> int:
        return self.space.dim


def associated_cotensor(p: PrincipalLocalData | GluedPrincipal, f: LeftComodule) -> AssociatedBundle:
    gp = p if isinstance(p, GluedPrincipal) else build_glued_principal(p)
    if f.hopf != gp.data.hopf:
        raise DimensionMismatch("comodule is over a different Hopf algebra")
    space = cotensor(gp.comodule, f)
    eye_f = Matrix.identity(f.dim)
    inc = space.basis_matrix()
    action = [space.coordinates_matrix(kron(a, eye_f) @ inc) for a in gp.bundle.module.action]
    module = LeftModule(gp.data.covering.algebra, space.dim, action)
    return AssociatedBundle(gp, f, space, module, kron(gp.inclusion, eye_f) @ inc)


@dataclass(eq=False)
class EpsilonIso:
    source: AssociatedBundle
    target: QVB
    matrix: Matrix

    def is_bijective(self) -> bool:
        return self.matrix.is_square() and self.matrix.rank() == self.matrix.nrows

    @cached_property
    def inverse(self) -> Matrix:
        return self.matrix.inverse()

    def intertwining_violations(self) -> list[str]:
        out = []
        for b, (a1, a2) in enumerate(zip(self.source.module.action, self.target.module.action)):
            if self.matrix @ a1 != a2 @ self.matrix:
                out.append(f"epsilon does not intertwine the action of basis element {b}")
        return out

    def inverse_formula_violations(self) -> list[str]:
        """The inverse must be componentwise ``id (x) rho``."""
        f = self.source.comodule
        cov = self.target.covering
        rho_amb = block_diag(*[kron(Matrix.identity(c.dim), f.coaction) for c in cov.charts])
        if self.source.embedding @ self.inverse != rho_amb @ self.target.space.basis_matrix():
            return ["inverse of epsilon is not componentwise id (x) rho"]
        return []


def epsilon_iso(p: PrincipalLocalData | GluedPrincipal, f: LeftComodule) -> EpsilonIso:
    """``(e_i) -> (id (x) eps (x) id)(e_i)`` from ``E(P, F)`` to ``E~``."""
    e = associated_cotensor(p, f)
    data = e.principal.data
    tilde = build_tilde(data, f)
    h = data.hopf
    eps_amb = block_diag(*[kron(Matrix.identity(c.dim), h.counit, Matrix.identity(f.dim))
                           for c in data.covering.charts])
    m = tilde.space.coordinates_matrix(eps_amb @ e.embedding)
    return EpsilonIso(e, tilde, m)


def build_forms_associated(p: PrincipalLocalData, f: LeftComodule, calculi: CalculusCovering) -> FormsQVB:
    return build_forms_qvb(transitions_from_tau(p, f), calculi)


@dataclass(eq=False)
class HorizontalForms:
    """Coinvariant compatible tuples in ``sum_i Gamma(B_i) (x) H (x) F``."""

    layout: object
    space: Subspace
    action: list
    forms_bundle: FormsQVB
    epsilon: Matrix = field(repr=False)
    rho_map: Matrix = field(repr=False)

    @property
    def degrees(self) -> tuple:
        return self.layout.degree_of_basis(self.space)

    @property
    def graded_dims(self) -> tuple:
        return tuple(self.degrees.count(n) for n in range(self.forms_bundle.calculi.bound + 1))

    def is_bijective(self) -> bool:
        return self.epsilon.is_square() and self.epsilon.rank() == self.epsilon.nrows

    def degree_violations(self) -> list[str]:
        src, dst = self.degrees, self.forms_bundle.degrees
        out = []
        for m in range(self.epsilon.ncols):
            bad = {dst[p] for p, x in enumerate(self.epsilon.column(m)) if x} - {src[m]}
            if bad:
                out.append(f"epsilon changes the degree of basis element {m}")
        return out

    def degreewise_ranks(self) -> dict:
        """Rank of epsilon restricted to each degree, next to both dimensions."""
        src, dst = self.degrees, self.forms_bundle.degrees
        out = {}
        for n in range(self.forms_bundle.calculi.bound + 1):
            cols = [k for k, d in enumerate(src) if d == n]
            rows = [k for k, d in enumerate(dst) if d == n]
            rank = self.epsilon.select(rows=rows, cols=cols).rank() if rows and cols else 0
            out[n] = (len(cols), len(rows), rank)
        return out

    def intertwining_violations(self) -> list[str]:
        out = []
        for k, (a1, a2) in enumerate(zip(self.action, self.forms_bundle.module.action)):
            if self.epsilon @ a1 != a2 @ self.epsilon:
                out.append(f"epsilon does not intertwine the action of form {k}")
        return out

    def inverse_formula_violations(self) -> list[str]:
        inc = self.space.basis_matrix()
        if inc @ self.epsilon.inverse() != self.rho_map @ self.forms_bundle.space.basis_matrix():
            return ["inverse of epsilon is not componentwise id (x) rho"]
        return []


def build_hor_E(p: PrincipalLocalData, f: LeftComodule, calculi: CalculusCovering) -> HorizontalForms:
    _require(p, f)
    h = p.hopf
    hf = h.dim * f.dim
    eye_f = Matrix.identity(f.dim)
    tp = extend_transitions_to_forms(transitions_from_tau(p, regular_left_comodule(h)), calculi)
    layout = calculi.graded_sum(hf)
    cons = []
    for i, j in calculi.base.pairs():
        _, a, b = calculi.overlap(i, j)
        cons.append((i, j, a.kron(Matrix.identity(hf)), kron(tp.matrix(i, j), eye_f) @ b.kron(Matrix.identity(hf))))
    for i, c in enumerate(calculi.charts):
        eye_c = Matrix.identity(c.dim)
        cons.append((i, i, kron(eye_c, h.coproduct, eye_f), kron(eye_c, Matrix.identity(h.dim), f.coaction)))
    space = layout.glue(cons)
    inc = space.basis_matrix()
    forms = build_forms_associated(p, f, calculi)
    glued = forms.glued
    action = []
    for k in range(glued.dga.dim):
        blocks = [tensor_left(c.algebra, glued.component(i).column(k), hf) for i, c in enumerate(calculi.charts)]
        action.append(space.coordinates_matrix(layout.assemble(blocks) @ inc))
    eps_map = graded_block_map(layout, forms.layout, [kron(Matrix.identity(c.dim), h.counit, eye_f)
                                                      for c in calculi.charts])
    rho_map = graded_block_map(forms.layout, layout, [kron(Matrix.identity(c.dim), f.coaction)
                                                      for c in calculi.charts])
    epsilon = forms.space.coordinates_matrix(eps_map @ inc)
    return HorizontalForms(layout, space, action, forms, epsilon, rho_map)


# gauge potentials


@dataclass(eq=False)
class GaugePotential:
    """``values[h]`` is ``A(e_h)``, a 1-form on chart ``chart``."""

    chart: int
    calculus: DGA
    hopf: HopfAlgebra
    values: tuple

    def __post_init__(self):
        self.values = tuple(vector(v) for v in self.values)
        if len(self.values) != self.hopf.dim or any(len(v) != self.calculus.dim for v in self.values):
            raise DimensionMismatch("gauge potential must give one form per Hopf basis element")
        for v in self.values:
            if {self.calculus.degrees[k] for k, x in enumerate(v) if x} - {1}:
                raise InvalidData("gauge potential must take values in 1-forms")
        if any(self(self.hopf.unit)):
            raise InvalidData("gauge potential must vanish on the unit")

    def __call__(self, x):
        out = [ZERO] * self.calculus.dim
        for h, c in enumerate(x):
            if c:
                out = [a + c * b for a, b in zip(out, self.values[h])]
        return tuple(out)

    def differential(self) -> tuple:
        return tuple(self.calculus.diff(v) for v in self.values)

    def square(self) -> tuple:
        """``(A * A)(e_h) = A(e_h(1)) A(e_h(2))``."""
        h = self.hopf
        n = h.dim
        out = []
        for k in range(n):
            acc = [ZERO] * self.calculus.dim
            for idx, c in enumerate(h.delta(unit_vector(n, k))):
                if c:
                    prod = self.calculus.mul(self.values[idx // n], self.values[idx % n])
                    acc = [a + c * b for a, b in zip(acc, prod)]
            out.append(tuple(acc))
        return tuple(out)


def gauge_connection_form(gauge: GaugePotential, f: LeftComodule) -> list:
    """``A^l_k = -sum A(f_k(-1))`` over the terms of ``rho(f_k)`` with ``f_k(0) = f_l``."""
    r = f.dim
    forms = [[(ZERO,) * gauge.calculus.dim for _ in range(r)] for _ in range(r)]
    for k in range(r):
        for h, l, c in f.sweedler(k):
            forms[l][k] = tuple(a - c * b for a, b in zip(forms[l][k], gauge.values[h]))
    return forms


def gauge_local_connection(gauge: GaugePotential, f: LeftComodule) -> LocalConnection:
    return LocalConnection(gauge.chart, gauge.calculus, f.dim, gauge_connection_form(gauge, f))


def gauge_nabla(gauge: GaugePotential, f: LeftComodule) -> Matrix:
    """``g (x) f -> dg (x) f - (-1)^n sum g A(f(-1)) (x) f(0)`` evaluated on every basis pair."""
    g, r = gauge.calculus, f.dim
    cols = []
    for c in range(g.dim):
        gamma = g.algebra.basis(c)
        for k in range(r):
            col = [ZERO] * (g.dim * r)
            for m, x in enumerate(g.differential.column(c)):
                col[m * r + k] += x
            for h, l, coef in f.sweedler(k):
                for m, x in enumerate(g.mul(gamma, gauge.values[h])):
                    col[m * r + l] -= g.sign(c) * coef * x
            cols.append(col)
    return Matrix.from_columns(cols, g.dim * r)


def connection_from_gauge(gauges: Sequence[GaugePotential], f: LeftComodule, calculi: CalculusCovering,
                          p: PrincipalLocalData) -> GlobalConnection:
    """Assemble the connection induced by chart gauge potentials; raises IncompatibleConnections."""
    bundle = build_forms_associated(p, f, calculi)
    locs = []
    for i, gauge in enumerate(sorted(gauges, key=lambda x: x.chart)):
        if gauge.chart != i or gauge.calculus.algebra != calculi.charts[i].algebra:
            raise InvalidData(f"gauge potential {i} does not live on chart {i}")
        loc = gauge_local_connection(gauge, f)
        if loc.nabla != gauge_nabla(gauge, f):
            raise InvalidData(f"local connection on chart {i} does not match the gauge formula")
        locs.append(loc)
    return assemble_global(locs, bundle)


@dataclass(eq=False)
class LocalCurvatureForm:
    """``values[h] = F(e_h)`` with ``nabla_i^2(g (x) f) = sum g F(f(-1)) (x) f(0)``."""

    gauge: GaugePotential
    comodule: LeftComodule
    values: tuple
    undetermined: tuple  # Hopf basis indices not seen by the coaction

    def formula_matrix(self) -> Matrix:
        g, r = self.gauge.calculus, self.comodule.dim
        cols = []
        for c in range(g.dim):
            gamma = g.algebra.basis(c)
            for k in range(r):
                col = [ZERO] * (g.dim * r)
                for h, l, coef in self.comodule.sweedler(k):
                    for m, x in enumerate(g.mul(gamma, self.values[h])):
                        col[m * r + l] += coef * x
                cols.append(col)
        return Matrix.from_columns(cols, g.dim * r)

    def reproduction_violations(self) -> list[str]:
        """Compare with ``nabla_i`` applied twice, on basis pairs within the truncation."""
        g, r = self.gauge.calculus, self.comodule.dim
        nab = gauge_nabla(self.gauge, self.comodule)
        sq = nab @ nab
        fm = self.formula_matrix()
        out = []
        for c in range(g.dim):
            if g.degrees[c] > g.bound - 2:
                continue
            for k in range(r):
                col = c * r + k
                if sq.column(col) != fm.column(col):
                    out.append(f"curvature formula fails for form {c} and fibre vector {k}")
        return out

    def convolution_violations(self) -> list[str]:
        """Optional comparison with ``-(dA + A * A)`` on the determined components."""
        da, aa = self.gauge.differential(), self.gauge.square()
        out = []
        for h in range(self.gauge.hopf.dim):
            if h in self.undetermined:
                continue
            expected = tuple(-(x + y) for x, y in zip(da[h], aa[h]))
            if self.values[h] != expected:
                out.append(f"F(e_{h}) != -(dA + A*A)(e_{h})")
        return out


def local_curvature_form(gauge: GaugePotential, f: LeftComodule) -> LocalCurvatureForm:
    """Solve ``nabla_i^2(1 (x) f_k) = sum F(f_k(-1)) (x) f_k(0)`` for ``F``."""
    g, r, n = gauge.calculus, f.dim, gauge.hopf.dim
    if g.bound < 2:
        raise TruncationError("curvature forms need forms up to degree 2")
    nab = gauge_nabla(gauge, f)
    sq = nab @ nab
    # unknown F(e_h) component m sits at h * dim + m
    rows, rhs = [], []
    for k in range(r):
        target = sq.apply(_unit_tensor(g, r, k))
        for m in range(g.dim):
            for l in range(r):
                row = [ZERO] * (n * g.dim)
                for h, ll, coef in f.sweedler(k):
                    if ll == l:
                        row[h * g.dim + m] += coef
                rows.append(row)
                rhs.append(target[m * r + l])
    system = Matrix(rows, n * g.dim)
    sol = system.solve(rhs)
    if sol is None:
        raise InvalidData("curvature relation has no solution")
    seen = {h for k in range(r) for h, _, _ in f.sweedler(k)}
    values = tuple(tuple(sol[h * g.dim:(h + 1) * g.dim]) for h in range(n))
    form = LocalCurvatureForm(gauge, f, values, tuple(h for h in range(n) if h not in seen))
    bad = form.reproduction_violations()
    if bad:
        raise InvalidData("curvature form does not reproduce nabla^2", bad)
    return form


def _unit_tensor(g: DGA, r: int, k: int):
    out = [ZERO] * (g.dim * r)
    for c, x in enumerate(g.algebra.unit):
        out[c * r + k] = x
    return out
