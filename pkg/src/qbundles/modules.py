"""Left modules, submodule coverings and covering completions of modules."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .algebra import (
    Algebra,
    AlgebraCovering,
    CoveringCompletion,
    Ideal,
    covering_completion_algebra,
    is_covering_ideals,
)
from .errors import DimensionMismatch, HypothesisError, NotACovering, NotASubmodule
from .linalg import (
    Matrix,
    QuotientSpace,
    Subspace,
    block_diag,
    glued_subspace,
    intersect_all,
    kernel,
    mcombine,
    quotient,
    restrict,
    vstack,
)


class LeftModule:
    """``(E, B, kappa)``: ``action[b]`` is the matrix of ``kappa(e_b)`` on ``Q^dim``."""

    def __init__(self, algebra: Algebra, dim: int, action: Sequence[Matrix]):
        self.algebra = algebra
        self.dim = dim
        self.action = tuple(action)
        if len(self.action) != algebra.dim:
            raise DimensionMismatch("need one action matrix per algebra basis element")
        for m in self.action:
            if m.shape != (dim, dim):
                raise DimensionMismatch("action matrices must be dim x dim")

    def __repr__(self) -> str:
        return f"<LeftModule dim={self.dim} over {self.algebra!r}>"

    def kappa(self, x) -> Matrix:
        return mcombine(x, self.action, self.dim, self.dim)

    def act(self, x, e):
        return self.kappa(x).apply(e)

    def kappa_matrix(self) -> Matrix:
        """The linear map ``B -> End(E)`` with endomorphisms flattened row-major."""
        cols = [[x for row in m.rows for x in row] for m in self.action]
        return Matrix.from_columns(cols, self.dim * self.dim)


def regular_module(a: Algebra) -> LeftModule:
    """``B`` acting on itself by left multiplication."""
    return LeftModule(a, a.dim, a.left)


def direct_sum_module(*ms: LeftModule) -> LeftModule:
    a = ms[0].algebra
    action = [block_diag(*[m.action[b] for m in ms]) for b in range(a.dim)]
    return LeftModule(a, sum(m.dim for m in ms), action)


def check_left_module(m: LeftModule) -> list[str]:
    """Violations of ``kappa(ab) = kappa(a) kappa(b)`` and ``kappa(1) = id``."""
    a = m.algebra
    report = []
    for i in range(a.dim):
        for j in range(a.dim):
            if m.kappa(a.structure(i, j)) != m.action[i] @ m.action[j]:
                report.append(f"kappa(e{i} e{j}) != kappa(e{i}) kappa(e{j})")
    if m.kappa(a.unit) != Matrix.identity(m.dim):
        report.append("kappa(1) is not the identity")
    return report


def is_faithful(m: LeftModule) -> bool:
    """True iff ``a -> kappa(a)`` has zero kernel."""
    if m.dim == 0:
        return m.algebra.dim == 0
    return m.kappa_matrix().rank() == m.algebra.dim


def is_submodule(m: LeftModule, space: Subspace) -> bool:
    if space.ambient_dim != m.dim:
        raise DimensionMismatch("subspace does not live in the module")
    return all(space.contains(act.apply(v)) for act in m.action for v in space.basis)


def generated_submodule(m: LeftModule, vectors) -> Subspace:
    """Smallest submodule containing ``vectors``."""
    s = Subspace(m.dim, vectors)
    while True:
        t = Subspace(m.dim, list(s.basis) + [act.apply(v) for act in m.action for v in s.basis])
        if t == s:
            return s
        s = t


def largest_submodule_in(m: LeftModule, w: Subspace) -> Subspace:
    """Largest submodule contained in the subspace ``w``."""
    s = w
    while True:
        proj = quotient(m.dim, s).projection
        cond = vstack(proj, *[proj @ act for act in m.action])
        t = kernel(cond)
        if t == s:
            return s
        s = t


def _induced_action(m: LeftModule, q: QuotientSpace) -> list[Matrix]:
    return [q.projection @ act @ q.section for act in m.action]


def quotient_module(m: LeftModule, space: Subspace) -> tuple[LeftModule, Matrix]:
    """``E / Q`` with the projection ``q`` satisfying ``kappa_Q(a) q = q kappa(a)``."""
    if not is_submodule(m, space):
        raise NotASubmodule("subspace is not invariant under the action")
    q = quotient(m.dim, space)
    return LeftModule(m.algebra, q.dim, _induced_action(m, q)), q.projection


class ModuleCovering:
    """A finite family of submodules of ``m`` intersecting to zero."""

    def __init__(self, module: LeftModule, subs: Sequence[Subspace]):
        if not subs:
            raise NotACovering("a covering needs at least one submodule")
        self.module = module
        self.subs = list(subs)
        for s in self.subs:
            if not is_submodule(module, s):
                raise NotASubmodule("covering member is not a submodule")
        if not intersect_all(self.subs).is_zero():
            raise NotACovering("submodules do not intersect to zero")
        self.quotients = [quotient(module.dim, s) for s in self.subs]
        self._pairs = {}

    def __len__(self) -> int:
        return len(self.subs)

    def projection(self, i: int) -> Matrix:
        return self.quotients[i].projection

    def chart_module(self, i: int) -> LeftModule:
        return LeftModule(self.module.algebra, self.quotients[i].dim,
                          _induced_action(self.module, self.quotients[i]))

    def pair(self, i: int, j: int):
        """``(E_ij quotient, q^i_j, q^j_i)``."""
        if i > j:
            qq, a, b = self.pair(j, i)
            return qq, b, a
        if (i, j) not in self._pairs:
            qq = quotient(self.module.dim, self.subs[i] + self.subs[j])
            self._pairs[(i, j)] = (
                qq,
                qq.projection @ self.quotients[i].section,
                qq.projection @ self.quotients[j].section,
            )
        return self._pairs[(i, j)]

    def pairs(self):
        n = len(self)
        return [(i, j) for i in range(n) for j in range(i + 1, n)]


def kernel_of_chart_action(m: LeftModule, s: Subspace) -> Subspace:
    """``ker kappa_i = {a in B : kappa(a)(E) in Q_i}``."""
    proj = quotient(m.dim, s).projection
    cols = []
    for act in m.action:
        img = proj @ act
        cols.append([x for row in img.rows for x in row])
    if not cols or not cols[0]:
        return Subspace.full(m.algebra.dim)
    return kernel(Matrix.from_columns(cols, len(cols[0])))


def induced_algebra_covering(m: LeftModule, c: ModuleCovering) -> list[Ideal]:
    """The ideals ``ker kappa_i``; they cover ``B`` when ``m`` is faithful."""
    if not is_faithful(m):
        raise HypothesisError("module is not faithful")
    return [Ideal(m.algebra, kernel_of_chart_action(m, s)) for s in c.subs]


def is_nontrivial_covering(m: LeftModule, c: ModuleCovering) -> bool:
    return all(not kernel_of_chart_action(m, s).is_zero() for s in c.subs)


@dataclass(frozen=True, eq=False)
class ModuleCompletion:
    """``E_c`` over ``B_c`` with the canonical embedding ``E -> E_c``.

    ``inclusion`` maps ``E_c`` coordinates into the direct sum of the
    chart quotients ``E_i``.
    """

    module: LeftModule
    embedding: Matrix
    inclusion: Matrix
    space: Subspace
    algebra_completion: CoveringCompletion
    covering: ModuleCovering

    def __iter__(self):
        return iter((self.module, self.embedding))


def module_covering_completion(m: LeftModule, c: ModuleCovering) -> ModuleCompletion:
    ideals = induced_algebra_covering(m, c)
    acov = AlgebraCovering(m.algebra, ideals)
    bc = covering_completion_algebra(m.algebra, acov)
    dims = [q.dim for q in c.quotients]
    constraints = []
    for i, j in c.pairs():
        _, qij, qji = c.pair(i, j)
        constraints.append((i, j, qij, qji))
    space = glued_subspace(dims, constraints)

    # kappa~_i(a_i) = q_i kappa(lift(a_i)) s_i, well defined because B_i = B / ker kappa_i
    chart_actions = [_induced_action(m, q) for q in c.quotients]
    action = []
    for k in range(bc.algebra.dim):
        v = bc.algebra.basis(k)
        blocks = []
        for i in range(len(c)):
            a_i = bc.component(i).apply(v)
            lift = acov.section(i).apply(a_i)
            blk = Matrix.zeros(dims[i], dims[i])
            for b, coef in enumerate(lift):
                if coef:
                    blk = blk + chart_actions[i][b] * coef
            blocks.append(blk)
        action.append(restrict(block_diag(*blocks), space))
    ec = LeftModule(bc.algebra, space.dim, action)
    stacked = vstack(*[c.projection(i) for i in range(len(c))])
    emb = space.coordinates_matrix(stacked)
    return ModuleCompletion(ec, emb, space.basis_matrix(), space, bc, c)


def intertwining_violations(m: LeftModule, comp: ModuleCompletion) -> list[str]:
    """Basis pairs where embedding(kappa(a) e) != kappa_c(canonical(a)) embedding(e)."""
    out = []
    canon = comp.algebra_completion.canonical.map
    emb = comp.embedding
    for b in range(m.algebra.dim):
        lhs = emb @ m.action[b]
        rhs = comp.module.kappa(canon.column(b)) @ emb
        if lhs != rhs:
            out.append(f"intertwining fails for algebra basis element {b}")
    return out


def is_complete_module_covering(m: LeftModule, c: ModuleCovering) -> bool:
    """Induced ideals form a complete covering of ``B`` and the embedding ``E -> E_c`` is a module isomorphism."""
    comp = module_covering_completion(m, c)
    if not comp.algebra_completion.canonical.is_bijective():
        return False
    if comp.embedding.rank() != m.dim or comp.module.dim != m.dim:
        return False
    return not intertwining_violations(m, comp)


def check_covering_hypotheses(m: LeftModule, c: ModuleCovering) -> list[str]:
    out = []
    if not is_faithful(m):
        out.append("module is not faithful")
    ideals = [kernel_of_chart_action(m, s) for s in c.subs]
    if not is_covering_ideals(m.algebra, ideals):
        out.append("induced kernels do not intersect to zero")
    return out
