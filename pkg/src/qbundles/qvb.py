"""Locally trivial quantum vector bundles glued from transition maps.

Elements of ``B_i (x) V`` are coordinate vectors in the product basis of
the canonical quotient basis of ``B_i`` and the standard basis of ``V``:
``e_c (x) v_l`` sits at index ``c * dim V + l``.  Charts are numbered
from 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .algebra import Algebra, AlgebraCovering, is_complete_covering_algebra
from .dga import CalculusCovering, GluedCalculus
from .errors import (
    DimensionMismatch,
    GluingError,
    HypothesisError,
    InvalidData,
    NotACovering,
    NotInvertible,
    QBundleError,
)
from .linalg import (
    ZERO,
    Matrix,
    Subspace,
    block_diag,
    component_projection,
    glued_subspace,
    kernel,
    restrict,
    unit_vector,
    vector,
    vkron,
)
from .modules import LeftModule, ModuleCovering, is_complete_module_covering, is_faithful


def tensor_left(a: Algebra, x, r: int) -> Matrix:
    """Left multiplication by ``x`` on ``A (x) Q^r``."""
    return a.left_matrix(x).kron(Matrix.identity(r))


def linear_extension(a: Algebra, r: int, values) -> Matrix:
    """Left ``A``-linear map on ``A (x) Q^r`` with ``1 (x) v_k -> values[k]``."""
    n = a.dim * r
    cols = [None] * n
    for c in range(a.dim):
        lc = tensor_left(a, a.basis(c), r)
        for k in range(r):
            cols[c * r + k] = lc.apply(values[k])
    return Matrix.from_columns(cols, n) if n else Matrix.zeros(0, 0)


def values_of(a: Algebra, r: int, m: Matrix) -> tuple:
    """Images of ``1 (x) v_k`` under ``m``."""
    return tuple(m.apply(vkron(a.unit, unit_vector(r, k))) for k in range(r))


def _is_left_linear(a: Algebra, r: int, m: Matrix) -> bool:
    return all(m @ tensor_left(a, a.basis(c), r) == tensor_left(a, a.basis(c), r) @ m
               for c in range(a.dim))


class TransitionMaps:
    """Transition maps ``phi_ij`` on ``B_ij (x) V`` for every ordered pair.

    ``values[(i, j)][k]`` is ``phi_ij(1 (x) v_k)``; the full matrix is its
    left ``B_ij``-linear extension.
    """

    def __init__(self, covering: AlgebraCovering, fibre_dim: int, values: dict, check: bool = True):
        self.covering = covering
        self.fibre_dim = fibre_dim
        self.values = {k: tuple(vector(v) for v in vs) for k, vs in values.items()}
        self._matrices = {}
        for (i, j), vs in self.values.items():
            n = self.overlap_algebra(i, j).dim * fibre_dim
            if len(vs) != fibre_dim or any(len(v) != n for v in vs):
                raise DimensionMismatch(f"transition values for ({i}, {j}) have wrong shape")
        if check:
            report = self.violations()
            if report:
                raise InvalidData("invalid transition maps", report)

    @classmethod
    def from_values(cls, covering: AlgebraCovering, fibre_dim: int, values: dict, check: bool = True):
        """Fill in ``phi_ji`` as the inverse of ``phi_ij`` when only one is given."""
        obj = cls(covering, fibre_dim, values, check=False)
        for i, j in covering.pairs():
            if (i, j) in obj.values and (j, i) not in obj.values:
                obj.values[(j, i)] = obj._inverse_values(i, j)
            elif (j, i) in obj.values and (i, j) not in obj.values:
                obj.values[(i, j)] = obj._inverse_values(j, i)
            elif (i, j) not in obj.values:
                raise InvalidData(f"no transition given for charts ({i}, {j})")
        obj._matrices.clear()
        if check:
            report = obj.violations()
            if report:
                raise InvalidData("invalid transition maps", report)
        return obj

    @classmethod
    def from_functions(cls, covering: AlgebraCovering, fibre_dim: int, g: dict, check: bool = True):
        """``g[(i, j)][l][k]`` in ``B_ij`` gives ``phi_ij(1 (x) v_k) = sum_l g_lk (x) v_l``."""
        values = {}
        for key, mat in g.items():
            a = covering.overlap(*key).algebra
            vs = []
            for k in range(fibre_dim):
                out = [ZERO] * (a.dim * fibre_dim)
                for l in range(fibre_dim):
                    for c, x in enumerate(vector(mat[l][k])):
                        out[c * fibre_dim + l] += x
                vs.append(out)
            values[key] = vs
        return cls.from_values(covering, fibre_dim, values, check)

    @classmethod
    def identity(cls, covering: AlgebraCovering, fibre_dim: int):
        values = {}
        for i, j in covering.pairs():
            a = covering.overlap(i, j).algebra
            vs = [vkron(a.unit, unit_vector(fibre_dim, k)) for k in range(fibre_dim)]
            values[(i, j)] = vs
            values[(j, i)] = vs
        return cls(covering, fibre_dim, values)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TransitionMaps):
            return NotImplemented
        return self.fibre_dim == other.fibre_dim and self.values == other.values

    def __len__(self) -> int:
        return len(self.covering)

    def overlap_algebra(self, i: int, j: int) -> Algebra:
        return self.covering.overlap(i, j).algebra

    def overlap_projections(self, i: int, j: int) -> tuple[Matrix, Matrix]:
        ov = self.covering.overlap(i, j)
        return ov.from_left, ov.from_right

    def chart_dims(self) -> list[int]:
        return [c.dim for c in self.covering.charts]

    def matrix(self, i: int, j: int) -> Matrix:
        a = self.overlap_algebra(i, j)
        if i == j:
            return Matrix.identity(a.dim * self.fibre_dim)
        if (i, j) not in self._matrices:
            self._matrices[(i, j)] = linear_extension(a, self.fibre_dim, self.values[(i, j)])
        return self._matrices[(i, j)]

    def _inverse_values(self, i: int, j: int) -> tuple:
        a = self.overlap_algebra(i, j)
        try:
            inv = self.matrix(i, j).inverse()
        except NotInvertible:
            raise NotInvertible(f"phi_{i}{j} is not invertible") from None
        return values_of(a, self.fibre_dim, inv)

    def violations(self) -> list[str]:
        out = []
        r = self.fibre_dim
        for i, j in self.covering.pairs():
            if (i, j) not in self.values or (j, i) not in self.values:
                out.append(f"missing transition for charts ({i}, {j})")
                continue
            a = self.overlap_algebra(i, j)
            eye = Matrix.identity(a.dim * r)
            if self.matrix(i, j) @ self.matrix(j, i) != eye or self.matrix(j, i) @ self.matrix(i, j) != eye:
                out.append(f"phi_{i}{j} and phi_{j}{i} are not mutually inverse")
        out.extend(self.cocycle_violations())
        return out

    def cocycle_violations(self) -> list[str]:
        """``phi_ik = phi_ij phi_jk`` after projecting to ``B_ijk (x) V``."""
        out = []
        r = self.fibre_dim
        eye = Matrix.identity(r)
        for i, j, k in self.covering.triples():
            alg, p_ij, p_jk, p_ik = self.covering.triple(i, j, k)

            def down(a, b, p):
                vals = [p.kron(eye).apply(v) for v in self.values[(a, b)]]
                return linear_extension(alg, r, vals)

            if down(i, k, p_ik) != down(i, j, p_ij) @ down(j, k, p_jk):
                out.append(f"cocycle condition fails on triple ({i}, {j}, {k})")
        return out


def _module_from_space(covering: AlgebraCovering, r: int, space: Subspace) -> tuple[LeftModule, list]:
    a = covering.algebra
    dims = [c.dim * r for c in covering.charts]
    if space.ambient_dim != sum(dims):
        raise DimensionMismatch("total space does not live in the sum of the local models")
    action = []
    for b in range(a.dim):
        blocks = [tensor_left(c, covering.projection(i).column(b), r) for i, c in enumerate(covering.charts)]
        action.append(restrict(block_diag(*blocks), space))
    inc = space.basis_matrix()
    zetas = [component_projection(dims, i) @ inc for i in range(len(dims))]
    return LeftModule(a, space.dim, action), zetas


@dataclass(eq=False)
class QVB:
    """A module with trivializations ``zeta_i : E -> B_i (x) V``."""

    covering: AlgebraCovering
    fibre_dim: int
    module: LeftModule
    zetas: list
    space: Subspace | None = None
    transitions: TransitionMaps | None = None

    @classmethod
    def from_total(cls, covering: AlgebraCovering, fibre_dim: int, space: Subspace,
                   transitions: TransitionMaps | None = None) -> QVB:
        """Use an arbitrary invariant subspace of the sum of local models as total space."""
        try:
            module, zetas = _module_from_space(covering, fibre_dim, space)
        except QBundleError:
            raise
        except ValueError:
            raise InvalidData("total space is not invariant under the componentwise action") from None
        return cls(covering, fibre_dim, module, zetas, space, transitions)

    @property
    def total(self) -> Subspace | None:
        return self.space

    @property
    def dim(self) -> int:
        return self.module.dim

    def ambient_dims(self) -> list[int]:
        return [c.dim * self.fibre_dim for c in self.covering.charts]


def gluing_constraints(t: TransitionMaps) -> list:
    eye = Matrix.identity(t.fibre_dim)
    cons = []
    for i, j in t.covering.pairs():
        a, b = t.overlap_projections(i, j)
        cons.append((i, j, a.kron(eye), t.matrix(i, j) @ b.kron(eye)))
    return cons


def build_qvb(t: TransitionMaps) -> QVB:
    dims = [c.dim * t.fibre_dim for c in t.covering.charts]
    space = glued_subspace(dims, gluing_constraints(t))
    return QVB.from_total(t.covering, t.fibre_dim, space, t)


def glue_section(q: QVB, locals_) -> tuple:
    """Concatenate local sections into an element of the total space, or raise GluingError."""
    t = q.transitions
    if t is None:
        raise InvalidData("bundle carries no transition maps")
    dims = q.ambient_dims()
    locs = [vector(e) for e in locals_]
    if len(locs) != len(dims) or any(len(e) != d for e, d in zip(locs, dims)):
        raise DimensionMismatch("local sections do not match the local models")
    bad = []
    for i, j, ci, cj in gluing_constraints(t):
        if ci.apply(locs[i]) != cj.apply(locs[j]):
            bad.append((i, j))
    if bad:
        raise GluingError("local sections disagree on overlaps " + ", ".join(map(str, bad)), bad)
    flat = tuple(x for e in locs for x in e)
    if q.space is not None and not q.space.contains(flat):
        raise GluingError("tuple is not in the total space", [])
    return flat


def verify_qvb(q: QVB) -> list[str]:
    """Report of violated bundle axioms; each entry starts with the axiom's name."""
    out = []
    cov = q.covering
    r = q.fibre_dim
    m = q.module
    if not is_faithful(m):
        out.append("faithful: module is not faithful")
    try:
        if not is_complete_covering_algebra(cov.algebra, cov):
            out.append("complete-base: ideal covering of the base is not complete")
    except NotACovering as exc:
        out.append(f"complete-base: {exc}")
    for i, z in enumerate(q.zetas):
        if z.rank() != cov.charts[i].dim * r:
            out.append(f"surjective: zeta_{i} is not surjective")
    for i, z in enumerate(q.zetas):
        c = cov.charts[i]
        for b in range(cov.algebra.dim):
            if z @ m.action[b] != tensor_left(c, cov.projection(i).column(b), r) @ z:
                out.append(f"linearity: zeta_{i}(a e) != pi_{i}(a) zeta_{i}(e) for basis element a = e{b}")
    kers = [kernel(z) for z in q.zetas]
    eye = Matrix.identity(r)
    for i, j in cov.pairs():
        ov = cov.overlap(i, j)
        s = kers[i] + kers[j]
        ki = kernel(ov.from_left.kron(eye) @ q.zetas[i])
        kj = kernel(ov.from_right.kron(eye) @ q.zetas[j])
        if s != ki:
            out.append(f"kernel-sums: ker zeta_{i} + ker zeta_{j} != ker((pi^{i}_{j} (x) id) zeta_{i})")
        if s != kj:
            out.append(f"kernel-sums: ker zeta_{i} + ker zeta_{j} != ker((pi^{j}_{i} (x) id) zeta_{j})")
    try:
        mc = ModuleCovering(m, kers)
        if not is_complete_module_covering(m, mc):
            out.append("complete-covering: kernels of the trivializations are not a complete covering")
    except (NotACovering, HypothesisError) as exc:
        out.append(f"complete-covering: {exc}")
    return out


def transitions_from_trivializations(module: LeftModule, zetas: Sequence[Matrix], covering: AlgebraCovering,
                                     fibre_dim: int) -> TransitionMaps:
    """``phi_ij = zeta^i_ij o (zeta^j_ij)^-1`` computed on ``E / (ker zeta_i + ker zeta_j)``."""
    r = fibre_dim
    eye = Matrix.identity(r)
    kers = [kernel(z) for z in zetas]
    values = {}
    for i, j in covering.pairs():
        ov = covering.overlap(i, j)
        mi = ov.from_left.kron(eye) @ zetas[i]
        mj = ov.from_right.kron(eye) @ zetas[j]
        s = kers[i] + kers[j]
        if kernel(mi) != s or kernel(mj) != s:
            raise GluingError(f"kernel condition fails on charts ({i}, {j})", [(i, j)])
        for src, dst, key in ((mj, mi, (i, j)), (mi, mj, (j, i))):
            vals = []
            for k in range(r):
                x = src.solve(vkron(ov.algebra.unit, unit_vector(r, k)))
                if x is None:
                    raise GluingError(f"trivialization {key[1]} is not surjective on the overlap", [(i, j)])
                vals.append(dst.apply(x))
            values[key] = vals
    t = TransitionMaps(covering, r, values)
    for i, j in covering.pairs():
        ov = covering.overlap(i, j)
        mi = ov.from_left.kron(eye) @ zetas[i]
        mj = ov.from_right.kron(eye) @ zetas[j]
        if t.matrix(i, j) @ mj != mi:
            raise GluingError(f"induced map on charts ({i}, {j}) is not left linear", [(i, j)])
    return t


def discrete_classical_bundle(points: int, charts: Sequence[Sequence[int]], g: dict, fibre_dim: int) -> QVB:
    """Bundle over ``points`` points glued from matrix-valued functions on overlaps.

    ``g[(i, j)]`` maps each point of the overlap to an ``r x r`` matrix;
    ``phi_ij(1 (x) v)(x) = g_ij(x) v``.  Missing reverse pairs are inverted.
    """
    from .algebra import function_algebra

    b = function_algebra(points)
    sets = [sorted(set(c)) for c in charts]
    if set().union(*map(set, sets)) != set(range(points)):
        raise NotACovering("charts do not cover all points")
    ideals = [Subspace(points, [unit_vector(points, p) for p in range(points) if p not in c]) for c in sets]
    cov = AlgebraCovering(b, ideals)
    r = fibre_dim
    values = {}
    for (i, j), fn in g.items():
        overlap = sorted(set(sets[i]) & set(sets[j]))
        out = [[ZERO] * (len(overlap) * r) for _ in range(r)]
        for c, p in enumerate(overlap):
            mat = Matrix(fn[p] if not callable(fn) else fn(p), r)
            if mat.shape != (r, r):
                raise DimensionMismatch(f"g_{i}{j}({p}) is not {r}x{r}")
            if mat.rank() < r:
                raise NotInvertible(f"g_{i}{j} is not invertible at point {p}")
            for k in range(r):
                for l in range(r):
                    out[k][c * r + l] = mat.rows[l][k]
        values[(i, j)] = out
    t = TransitionMaps.from_values(cov, r, values)
    return build_qvb(t)


# forms-valued bundles


class GradedTransitionMaps(TransitionMaps):
    """Transition maps extended to ``Gamma(B_ij) (x) V`` by ``phi(g (x) v) = g phi(1 (x) v)``."""

    def __init__(self, base: TransitionMaps, calculi: CalculusCovering):
        self.base = base
        self.calculi = calculi
        r = base.fibre_dim
        values = {}
        for key, vs in base.values.items():
            n = calculi.overlap(*key)[0].dim * r
            values[key] = [tuple(v) + (ZERO,) * (n - len(v)) for v in vs]
        super().__init__(base.covering, r, values, check=False)

    def overlap_algebra(self, i: int, j: int) -> Algebra:
        return self.calculi.overlap(i, j)[0].algebra

    def overlap_projections(self, i: int, j: int) -> tuple[Matrix, Matrix]:
        _, a, b = self.calculi.overlap(i, j)
        return a, b

    def chart_dims(self) -> list[int]:
        return [c.dim for c in self.calculi.charts]

    def cocycle_violations(self) -> list[str]:
        # the graded maps are determined by their degree-0 values
        return self.base.cocycle_violations()

    def violations(self) -> list[str]:
        out = super().violations()
        for key in self.values:
            if not _is_left_linear(self.overlap_algebra(*key), self.fibre_dim, self.matrix(*key)):
                out.append(f"extension of phi_{key[0]}{key[1]} is not left linear")
        return out


def extend_transitions_to_forms(t: TransitionMaps, calculi: CalculusCovering) -> GradedTransitionMaps:
    if len(calculi) != len(t.covering) or any(
            a != b for a, b in zip(calculi.base.charts, t.covering.charts)):
        raise InvalidData("calculi are built over a different covering")
    report = calculi.violations()
    if report:
        raise InvalidData("calculi do not match the base covering", report)
    g = GradedTransitionMaps(t, calculi)
    report = g.violations()
    if report:
        raise InvalidData("extended transition maps are invalid", report)
    return g


@dataclass(eq=False)
class FormsQVB:
    """Compatible tuples in ``sum_i Gamma(B_i) (x) V`` with the action of the glued calculus."""

    transitions: GradedTransitionMaps
    glued: GluedCalculus
    layout: object
    space: Subspace
    module: LeftModule = field(repr=False)
    zetas: list = field(repr=False)

    @property
    def calculi(self) -> CalculusCovering:
        return self.transitions.calculi

    @property
    def fibre_dim(self) -> int:
        return self.transitions.fibre_dim

    @property
    def degrees(self) -> tuple:
        return self.layout.degree_of_basis(self.space)

    @property
    def graded_dims(self) -> tuple:
        return tuple(self.degrees.count(n) for n in range(self.calculi.bound + 1))

    def degree_zero_slice(self) -> Subspace:
        """Degree-0 part in the coordinates of ``sum_i B_i (x) V``."""
        n0 = self.layout.global_degrees.count(0)
        return Subspace(n0, [v[:n0] for v, d in zip(self.space.basis, self.degrees) if d == 0])

    def local_index(self, i: int, c: int, k: int) -> int:
        return self.layout.position[(i, c * self.fibre_dim + k)]


def build_forms_qvb(t: TransitionMaps, calculi: CalculusCovering) -> FormsQVB:
    g = t if isinstance(t, GradedTransitionMaps) else extend_transitions_to_forms(t, calculi)
    r = g.fibre_dim
    layout = calculi.graded_sum(r)
    space = layout.glue(gluing_constraints(g))
    glued = calculi.completion()
    inc = space.basis_matrix()
    action = []
    for k in range(glued.dga.dim):
        blocks = [tensor_left(c.algebra, glued.component(i).column(k), r)
                  for i, c in enumerate(calculi.charts)]
        action.append(space.coordinates_matrix(layout.assemble(blocks) @ inc))
    module = LeftModule(glued.dga.algebra, space.dim, action)
    zetas = [layout.component(i) @ inc for i in range(len(calculi))]
    return FormsQVB(g, glued, layout, space, module, zetas)


def forms_gluing_violations(f: FormsQVB) -> list[str]:
    """Degreewise check of the gluing condition on every basis element."""
    out = []
    for i, j, ci, cj in gluing_constraints(f.transitions):
        lhs, rhs = ci @ f.zetas[i], cj @ f.zetas[j]
        for n, (a, b) in enumerate(zip(lhs.columns(), rhs.columns())):
            if a != b:
                out.append(f"gluing fails on charts ({i}, {j}) for basis element {n} of degree {f.degrees[n]}")
    return out
