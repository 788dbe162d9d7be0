"""Finite-dimensional unital associative algebras, ideals, quotients and
covering completions.

An algebra is stored through its left multiplication matrices:
``left[i]`` is the matrix of ``x -> e_i x``, so the structure constant
``e_i e_j`` is column ``j`` of ``left[i]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import Sequence

from .errors import DimensionMismatch, HypothesisError, NotACovering, NotAnIdeal
from .linalg import (
    ZERO,
    Matrix,
    QuotientSpace,
    Subspace,
    block_diag,
    component_projection,
    glued_subspace,
    intersect_all,
    mcombine,
    quotient,
    sum_all,
    unit_vector,
    vcombine,
    vector,
    vstack,
)


class Algebra:
    """Unital associative algebra over Q given by structure constants."""

    def __init__(self, left: Sequence[Matrix], unit: Sequence, name: str = ""):
        self.left = tuple(left)
        self.dim = len(self.left)
        self.unit = vector(unit)
        self.name = name
        if len(self.unit) != self.dim:
            raise DimensionMismatch("unit vector has wrong length")
        for m in self.left:
            if m.shape != (self.dim, self.dim):
                raise DimensionMismatch("left multiplication matrices must be dim x dim")

    @classmethod
    def from_table(cls, table, unit, name: str = "") -> Algebra:
        """``table[i][j]`` is the coordinate vector of ``e_i e_j``."""
        n = len(table)
        left = [Matrix.from_columns([table[i][j] for j in range(n)], n) for i in range(n)]
        return cls(left, unit, name)

    def __repr__(self) -> str:
        label = f" {self.name}" if self.name else ""
        return f"<Algebra{label} dim={self.dim}>"

    def __eq__(self, other) -> bool:
        if not isinstance(other, Algebra):
            return NotImplemented
        return self.left == other.left and self.unit == other.unit

    def __hash__(self) -> int:
        return hash((self.left, self.unit))

    def basis(self, i: int):
        return unit_vector(self.dim, i)

    def structure(self, i: int, j: int):
        return self.left[i].column(j)

    def mul(self, x, y):
        return vcombine(((c, self.left[i].apply(y)) for i, c in enumerate(x) if c), self.dim)

    def left_matrix(self, x) -> Matrix:
        return mcombine(x, self.left, self.dim, self.dim)

    def right_matrix(self, x) -> Matrix:
        return Matrix.from_columns([self.mul(self.basis(j), x) for j in range(self.dim)], self.dim)

    @cached_property
    def mult_matrix(self) -> Matrix:
        """Multiplication ``A (x) A -> A``; column ``i * dim + j`` holds ``e_i e_j``."""
        cols = [self.structure(i, j) for i in range(self.dim) for j in range(self.dim)]
        return Matrix.from_columns(cols, self.dim)


def check_algebra(a: Algebra) -> list[str]:
    """Violated axioms of ``a``; empty when it is a unital associative algebra."""
    report = []
    n = a.dim
    for i, j, k in product(range(n), repeat=3):
        lhs = a.mul(a.structure(i, j), a.basis(k))
        rhs = a.mul(a.basis(i), a.structure(j, k))
        if lhs != rhs:
            report.append(f"associativity fails on basis triple ({i}, {j}, {k})")
    for i in range(n):
        if a.mul(a.unit, a.basis(i)) != a.basis(i):
            report.append(f"unit is not a left unit on basis element {i}")
        if a.mul(a.basis(i), a.unit) != a.basis(i):
            report.append(f"unit is not a right unit on basis element {i}")
    return report


def function_algebra(n: int) -> Algebra:
    """Functions on ``n`` points; basis = point idempotents."""
    if n < 1:
        raise ValueError("function_algebra needs at least one point")
    table = [[unit_vector(n, i) if i == j else (ZERO,) * n for j in range(n)] for i in range(n)]
    return Algebra.from_table(table, [1] * n, name=f"C({n})")


def matrix_algebra(n: int) -> Algebra:
    """Full matrix algebra ``M_n(Q)``, basis ``E_ab`` at index ``a * n + b``."""
    d = n * n
    table = [[None] * d for _ in range(d)]
    for a, b, c, e in product(range(n), repeat=4):
        table[a * n + b][c * n + e] = unit_vector(d, a * n + e) if b == c else (ZERO,) * d
    unit = [1 if a == b else 0 for a in range(n) for b in range(n)]
    return Algebra.from_table(table, unit, name=f"M{n}")


def upper_triangular_algebra() -> Algebra:
    """Upper triangular 2x2 matrices with basis ``E11, E12, E22``."""
    z = (ZERO,) * 3
    e11, e12, e22 = unit_vector(3, 0), unit_vector(3, 1), unit_vector(3, 2)
    table = [
        [e11, e12, z],
        [z, z, e12],
        [z, z, e22],
    ]
    return Algebra.from_table(table, [1, 0, 1], name="T2")


def truncated_polynomial_algebra(k: int) -> Algebra:
    """``Q[x]/(x^k)`` with basis ``1, x, ..., x^(k-1)``."""
    table = [[unit_vector(k, i + j) if i + j < k else (ZERO,) * k for j in range(k)] for i in range(k)]
    return Algebra.from_table(table, unit_vector(k, 0), name=f"Q[x]/x^{k}")


def square_zero_algebra(m: int) -> Algebra:
    """``Q + W`` with ``W^2 = 0``, ``dim W = m``; basis ``1, w_1, ..., w_m``."""
    n = m + 1
    table = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i == 0:
                table[i][j] = unit_vector(n, j)
            elif j == 0:
                table[i][j] = unit_vector(n, i)
            else:
                table[i][j] = (ZERO,) * n
    return Algebra.from_table(table, unit_vector(n, 0), name=f"Q+W{m}")


def group_algebra_of(table: Sequence[Sequence[int]]) -> Algebra:
    """Plain algebra structure of a group ring; Hopf structure lives in :mod:`hopf`."""
    n = len(table)
    identity = next(e for e in range(n) if all(table[e][g] == g for g in range(n)))
    mult = [[unit_vector(n, table[g][h]) for h in range(n)] for g in range(n)]
    return Algebra.from_table(mult, unit_vector(n, identity), name=f"Q[G{n}]")


def direct_product(*algs: Algebra) -> Algebra:
    """Componentwise product algebra."""
    dims = [a.dim for a in algs]
    left = []
    for idx, a in enumerate(algs):
        for m in a.left:
            blocks = [m if k == idx else Matrix.zeros(d, d) for k, d in enumerate(dims)]
            left.append(block_diag(*blocks))
    unit = [x for a in algs for x in a.unit]
    return Algebra(left, unit, name=" x ".join(a.name for a in algs))


def tensor_algebra(a: Algebra, b: Algebra) -> Algebra:
    """``A (x) B`` with index ``i * dim(B) + k``."""
    left = [a.left[i].kron(b.left[k]) for i in range(a.dim) for k in range(b.dim)]
    unit = [x * y for x in a.unit for y in b.unit]
    return Algebra(left, unit, name=f"{a.name}(x){b.name}")


def is_two_sided_ideal(a: Algebra, space: Subspace) -> bool:
    if space.ambient_dim != a.dim:
        raise DimensionMismatch("subspace does not live in the algebra")
    for v in space.basis:
        for i in range(a.dim):
            e = a.basis(i)
            if not space.contains(a.mul(e, v)) or not space.contains(a.mul(v, e)):
                return False
    return True


@dataclass(frozen=True, eq=False)
class Ideal:
    algebra: Algebra
    space: Subspace

    def __post_init__(self):
        if not is_two_sided_ideal(self.algebra, self.space):
            raise NotAnIdeal("subspace is not a two-sided ideal")

    @classmethod
    def spanned_by(cls, a: Algebra, vectors) -> Ideal:
        return cls(a, Subspace(a.dim, vectors))

    @classmethod
    def generated_by(cls, a: Algebra, vectors) -> Ideal:
        """Smallest two-sided ideal containing ``vectors``."""
        s = Subspace(a.dim, vectors)
        while True:
            new = list(s.basis)
            for v in s.basis:
                for i in range(a.dim):
                    e = a.basis(i)
                    new.append(a.mul(e, v))
                    new.append(a.mul(v, e))
            t = Subspace(a.dim, new)
            if t == s:
                return cls(a, s)
            s = t

    @classmethod
    def zero(cls, a: Algebra) -> Ideal:
        return cls(a, Subspace.zero(a.dim))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Ideal):
            return NotImplemented
        return self.algebra == other.algebra and self.space == other.space

    def __hash__(self) -> int:
        return hash(self.space)


@dataclass(frozen=True, eq=False)
class AlgebraMorphism:
    source: Algebra
    target: Algebra
    map: Matrix

    def __post_init__(self):
        if self.map.shape != (self.target.dim, self.source.dim):
            raise DimensionMismatch("morphism matrix shape does not match algebras")

    def __call__(self, x):
        return self.map.apply(x)

    def violations(self) -> list[str]:
        out = []
        if self.map.apply(self.source.unit) != self.target.unit:
            out.append("unit is not mapped to unit")
        f = self.map
        for i in range(self.source.dim):
            fi = f.column(i)
            for j in range(self.source.dim):
                if f.apply(self.source.structure(i, j)) != self.target.mul(fi, f.column(j)):
                    out.append(f"not multiplicative on basis pair ({i}, {j})")
        return out

    def is_injective(self) -> bool:
        return self.map.rank() == self.source.dim

    def is_surjective(self) -> bool:
        return self.map.rank() == self.target.dim

    def is_bijective(self) -> bool:
        return self.is_injective() and self.is_surjective()

    def kernel(self) -> Subspace:
        return self.map.kernel()


def _quotient_algebra(a: Algebra, q: QuotientSpace, name: str = "") -> Algebra:
    left = []
    for k in range(q.dim):
        lift = q.section.column(k)
        left.append(q.projection @ a.left_matrix(lift) @ q.section)
    return Algebra(left, q.projection.apply(a.unit), name=name)


def quotient_algebra(a: Algebra, j: Ideal | Subspace) -> tuple[Algebra, AlgebraMorphism]:
    """``a / j`` together with the canonical projection."""
    space = j.space if isinstance(j, Ideal) else j
    if isinstance(j, Ideal) and j.algebra != a:
        raise NotAnIdeal("ideal belongs to a different algebra")
    if not is_two_sided_ideal(a, space):
        raise NotAnIdeal("subspace is not a two-sided ideal")
    q = quotient(a.dim, space)
    b = _quotient_algebra(a, q, name=f"{a.name}/J" if a.name else "")
    return b, AlgebraMorphism(a, b, q.projection)


def _spaces(js) -> list[Subspace]:
    return [j.space if isinstance(j, Ideal) else j for j in js]


def is_covering_ideals(a: Algebra, js: Sequence[Ideal]) -> bool:
    """True iff the ideals intersect to zero."""
    if not js:
        raise NotACovering("a covering needs at least one ideal")
    spaces = _spaces(js)
    for s in spaces:
        if s.ambient_dim != a.dim:
            raise DimensionMismatch("ideal does not live in the algebra")
    return intersect_all(spaces).is_zero()


@dataclass(frozen=True, eq=False)
class Overlap:
    """``B_ij = B/(J_i + J_j)`` with projections from both charts and from ``B``."""

    algebra: Algebra
    from_left: Matrix   # pi^i_j : B_i -> B_ij
    from_right: Matrix  # pi^j_i : B_j -> B_ij
    from_base: Matrix   # B -> B_ij

    def swapped(self) -> Overlap:
        return Overlap(self.algebra, self.from_right, self.from_left, self.from_base)


class AlgebraCovering:
    """An algebra with a finite family of ideals and all derived quotients.

    Charts are indexed ``0 .. n-1``.  Overlap data is computed for
    ``i < j`` and obtained for ``(j, i)`` by swapping the projections.
    """

    def __init__(self, algebra: Algebra, ideals: Sequence, check: bool = True):
        self.algebra = algebra
        self.ideals = [j if isinstance(j, Ideal) else Ideal(algebra, j) for j in ideals]
        if check and not is_covering_ideals(algebra, self.ideals):
            raise NotACovering("ideals do not intersect to zero")
        self.quotients = [quotient(algebra.dim, j.space) for j in self.ideals]
        self.charts = [_quotient_algebra(algebra, q) for q in self.quotients]
        self._overlaps = {}
        self._triples = {}

    def __len__(self) -> int:
        return len(self.ideals)

    def __repr__(self) -> str:
        return f"<AlgebraCovering of {self.algebra!r} by {len(self)} ideals>"

    def projection(self, i: int) -> Matrix:
        return self.quotients[i].projection

    def section(self, i: int) -> Matrix:
        return self.quotients[i].section

    def pi(self, i: int) -> AlgebraMorphism:
        return AlgebraMorphism(self.algebra, self.charts[i], self.projection(i))

    def _descend(self, src: int, q: QuotientSpace) -> Matrix:
        return q.projection @ self.section(src)

    def overlap(self, i: int, j: int) -> Overlap:
        if i == j:
            n = self.charts[i].dim
            eye = Matrix.identity(n)
            return Overlap(self.charts[i], eye, eye, self.projection(i))
        if i > j:
            return self.overlap(j, i).swapped()
        if (i, j) not in self._overlaps:
            s = self.ideals[i].space + self.ideals[j].space
            q = quotient(self.algebra.dim, s)
            alg = _quotient_algebra(self.algebra, q)
            self._overlaps[(i, j)] = Overlap(alg, self._descend(i, q), self._descend(j, q), q.projection)
        return self._overlaps[(i, j)]

    def triple(self, i: int, j: int, k: int):
        """``B_ijk`` and the projections ``B_ij -> B_ijk``, ``B_jk -> B_ijk``, ``B_ik -> B_ijk``."""
        key = (i, j, k)
        if key not in self._triples:
            s = sum_all([self.ideals[m].space for m in (i, j, k)])
            q = quotient(self.algebra.dim, s)
            alg = _quotient_algebra(self.algebra, q)
            maps = []
            for a, b in ((i, j), (j, k), (i, k)):
                sec = quotient(self.algebra.dim, self.ideals[a].space + self.ideals[b].space).section
                maps.append(q.projection @ sec)
            self._triples[key] = (alg, *maps)
        return self._triples[key]

    def pairs(self):
        n = len(self)
        return [(i, j) for i in range(n) for j in range(i + 1, n)]

    def triples(self):
        n = len(self)
        return [(i, j, k) for i in range(n) for j in range(i + 1, n) for k in range(j + 1, n)]


@dataclass(frozen=True, eq=False)
class CoveringCompletion:
    """``B_c`` realised inside the direct sum of the chart algebras.

    ``inclusion`` maps ``B_c`` coordinates to the direct sum and
    ``canonical`` is the morphism ``B -> B_c``, ``a -> (pi_i(a))``.
    """

    covering: AlgebraCovering
    algebra: Algebra
    canonical: AlgebraMorphism
    inclusion: Matrix
    space: Subspace

    def __iter__(self):
        return iter((self.algebra, self.canonical))

    def component(self, i: int) -> Matrix:
        """``B_c -> B_i``."""
        dims = [b.dim for b in self.covering.charts]
        return component_projection(dims, i) @ self.inclusion


def glued_algebra(charts: Sequence[Algebra], constraints) -> tuple[Algebra, Subspace]:
    """Subalgebra of compatible tuples in the product of ``charts``."""
    dims = [c.dim for c in charts]
    space = glued_subspace(dims, constraints)
    prod = direct_product(*charts)
    inc = space.basis_matrix()
    left = [space.coordinates_matrix(prod.left_matrix(v) @ inc) for v in space.basis]
    unit = space.coordinates(prod.unit)
    return Algebra(left, unit, name="B_c"), space


def covering_completion_algebra(a: Algebra, js) -> CoveringCompletion:
    cov = js if isinstance(js, AlgebraCovering) else None
    if cov is None:
        if not is_covering_ideals(a, js):
            raise NotACovering("ideals do not intersect to zero")
        cov = AlgebraCovering(a, js)
    constraints = []
    for i, j in cov.pairs():
        ov = cov.overlap(i, j)
        constraints.append((i, j, ov.from_left, ov.from_right))
    bc, space = glued_algebra(cov.charts, constraints)
    stacked = vstack(*[cov.projection(i) for i in range(len(cov))])
    k = AlgebraMorphism(a, bc, space.coordinates_matrix(stacked))
    return CoveringCompletion(cov, bc, k, space.basis_matrix(), space)


def is_complete_covering_algebra(a: Algebra, js) -> bool:
    """True iff the canonical map ``B -> B_c`` is bijective."""
    spaces = js.ideals if isinstance(js, AlgebraCovering) else js
    if not is_covering_ideals(a, spaces):
        raise NotACovering("ideals do not intersect to zero")
    return covering_completion_algebra(a, js).canonical.is_bijective()


def check_morphism(f: AlgebraMorphism) -> list[str]:
    return f.violations()


def require_covering(a: Algebra, js) -> AlgebraCovering:
    if isinstance(js, AlgebraCovering):
        return js
    if not js:
        raise HypothesisError("empty ideal family")
    return AlgebraCovering(a, js)
