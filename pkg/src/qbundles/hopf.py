"""Finite-dimensional Hopf algebras, comodules, convolution and cotensor products.

Tensor conventions: in ``X (x) Y`` the basis pair ``(x, y)`` sits at index
``x * dim(Y) + y``.  Sweedler sums are explicit sums over these coordinates:
a left coaction ``rho: F -> H (x) F`` is a ``(dim H * dim F) x dim F``
matrix whose column ``k`` lists the coefficients of ``f_k(-1) (x) f_k(0)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Sequence

from .algebra import Algebra, check_algebra, group_algebra_of, tensor_algebra
from .errors import DimensionMismatch, HypothesisError, NotInvertible
from .linalg import (
    ZERO,
    Matrix,
    Subspace,
    kernel,
    kron,
    unit_vector,
    vkron,
)


@dataclass(frozen=True)
class HopfAlgebra:
    algebra: Algebra
    coproduct: Matrix
    counit: Matrix
    antipode: Matrix
    name: str = ""

    def __post_init__(self):
        d = self.algebra.dim
        if self.coproduct.shape != (d * d, d):
            raise DimensionMismatch("coproduct must be (dim^2 x dim)")
        if self.counit.shape != (1, d):
            raise DimensionMismatch("counit must be (1 x dim)")
        if self.antipode.shape != (d, d):
            raise DimensionMismatch("antipode must be (dim x dim)")

    @property
    def dim(self) -> int:
        return self.algebra.dim

    @property
    def unit(self):
        return self.algebra.unit

    def __repr__(self) -> str:
        return f"<HopfAlgebra {self.name or ''} dim={self.dim}>"

    def delta(self, x):
        return self.coproduct.apply(x)

    def eps(self, x):
        return self.counit.apply(x)[0]

    def unit_counit(self) -> Matrix:
        """``u o eps : H -> H``."""
        return Matrix.column_vector(self.unit) @ self.counit


def check_hopf(h: HopfAlgebra) -> list[str]:
    """Every violated Hopf axiom, empty when ``h`` is a Hopf algebra."""
    report = [f"algebra: {r}" for r in check_algebra(h.algebra)]
    d = h.dim
    eye = Matrix.identity(d)
    delta, eps, s = h.coproduct, h.counit, h.antipode
    if kron(delta, eye) @ delta != kron(eye, delta) @ delta:
        report.append("coassociativity fails")
    if kron(eps, eye) @ delta != eye:
        report.append("left counit law fails")
    if kron(eye, eps) @ delta != eye:
        report.append("right counit law fails")
    hh = tensor_algebra(h.algebra, h.algebra)
    if h.delta(h.unit) != hh.unit:
        report.append("coproduct does not preserve the unit")
    if h.eps(h.unit) != 1:
        report.append("counit does not preserve the unit")
    for i, j in product(range(d), repeat=2):
        prod = h.algebra.structure(i, j)
        if h.delta(prod) != hh.mul(delta.column(i), delta.column(j)):
            report.append(f"coproduct not multiplicative on ({i}, {j})")
        if h.eps(prod) != eps[0, i] * eps[0, j]:
            report.append(f"counit not multiplicative on ({i}, {j})")
    m = h.algebra.mult_matrix
    ue = h.unit_counit()
    if m @ kron(s, eye) @ delta != ue:
        report.append("antipode law m(S (x) id)Delta = u eps fails")
    if m @ kron(eye, s) @ delta != ue:
        report.append("antipode law m(id (x) S)Delta = u eps fails")
    return report


def _check_group_table(table) -> int:
    n = len(table)
    if n == 0 or any(len(row) != n for row in table):
        raise HypothesisError("group table must be square and nonempty")
    if any(not (0 <= x < n) for row in table for x in row):
        raise HypothesisError("group table entries out of range")
    for a, b, c in product(range(n), repeat=3):
        if table[table[a][b]][c] != table[a][table[b][c]]:
            raise HypothesisError(f"group table not associative on ({a}, {b}, {c})")
    ids = [e for e in range(n) if all(table[e][g] == g == table[g][e] for g in range(n))]
    if not ids:
        raise HypothesisError("group table has no identity")
    e = ids[0]
    for g in range(n):
        if not any(table[g][h] == e for h in range(n)):
            raise HypothesisError(f"element {g} has no inverse")
    return e


def cyclic_group_table(n: int) -> list[list[int]]:
    return [[(a + b) % n for b in range(n)] for a in range(n)]


def inverse_table(table) -> list[int]:
    e = _check_group_table(table)
    n = len(table)
    return [next(h for h in range(n) if table[g][h] == e) for g in range(n)]


def group_algebra(table: Sequence[Sequence[int]]) -> HopfAlgebra:
    """``Q[G]`` with every group element group-like."""
    _check_group_table(table)
    n = len(table)
    inv = inverse_table(table)
    alg = group_algebra_of(table)
    delta = Matrix.from_columns([vkron(unit_vector(n, g), unit_vector(n, g)) for g in range(n)], n * n)
    eps = Matrix([[1] * n])
    s = Matrix.from_columns([unit_vector(n, inv[g]) for g in range(n)], n)
    return HopfAlgebra(alg, delta, eps, s, name=f"Q[G{n}]")


def function_hopf_algebra(table: Sequence[Sequence[int]]) -> HopfAlgebra:
    """Functions on a finite group: ``Delta(delta_g) = sum_{ab=g} delta_a (x) delta_b``."""
    e = _check_group_table(table)
    n = len(table)
    inv = inverse_table(table)
    table_ = [[unit_vector(n, i) if i == j else (ZERO,) * n for j in range(n)] for i in range(n)]
    alg = Algebra.from_table(table_, [1] * n, name=f"C(G{n})")
    cols = []
    for g in range(n):
        v = [ZERO] * (n * n)
        for a, b in product(range(n), repeat=2):
            if table[a][b] == g:
                v[a * n + b] += 1
        cols.append(v)
    delta = Matrix.from_columns(cols, n * n)
    eps = Matrix([[1 if g == e else 0 for g in range(n)]])
    s = Matrix.from_columns([unit_vector(n, inv[g]) for g in range(n)], n)
    return HopfAlgebra(alg, delta, eps, s, name=f"C(G{n})")


def sweedler_hopf() -> HopfAlgebra:
    """Sweedler's 4-dimensional Hopf algebra, basis ``1, g, x, gx``.

    ``g^2 = 1``, ``x^2 = 0``, ``xg = -gx``; ``g`` group-like and
    ``Delta(x) = x (x) 1 + g (x) x``.
    """
    one, g, x, gx = (unit_vector(4, k) for k in range(4))
    z = (ZERO,) * 4
    neg = lambda v: tuple(-c for c in v)  # noqa: E731
    table = [
        [one, g, x, gx],
        [g, one, gx, x],
        [x, neg(gx), z, z],
        [gx, neg(x), z, z],
    ]
    alg = Algebra.from_table(table, one, name="H4")

    def t(a, b):
        return vkron(a, b)

    def add(*vs):
        return tuple(sum(c) for c in zip(*vs))

    delta = Matrix.from_columns([
        t(one, one),
        t(g, g),
        add(t(x, one), t(g, x)),
        add(t(gx, g), t(one, gx)),
    ], 16)
    eps = Matrix([[1, 1, 0, 0]])
    s = Matrix.from_columns([one, g, neg(gx), x], 4)
    return HopfAlgebra(alg, delta, eps, s, name="H4")


@dataclass(frozen=True)
class LeftComodule:
    hopf: HopfAlgebra
    dim: int
    coaction: Matrix

    def __post_init__(self):
        if self.coaction.shape != (self.hopf.dim * self.dim, self.dim):
            raise DimensionMismatch("left coaction must be (dim H * dim F) x dim F")

    def sweedler(self, k: int):
        """Pairs ``(h_index, f_index, coefficient)`` of ``rho(f_k)``."""
        d = self.dim
        col = self.coaction.column(k)
        return [(idx // d, idx % d, c) for idx, c in enumerate(col) if c]


@dataclass(frozen=True)
class RightComodule:
    hopf: HopfAlgebra
    dim: int
    coaction: Matrix

    def __post_init__(self):
        if self.coaction.shape != (self.dim * self.hopf.dim, self.dim):
            raise DimensionMismatch("right coaction must be (dim P * dim H) x dim P")


def check_left_comodule(f: LeftComodule) -> list[str]:
    h = f.hopf
    eye_f = Matrix.identity(f.dim)
    eye_h = Matrix.identity(h.dim)
    rho = f.coaction
    out = []
    if kron(h.coproduct, eye_f) @ rho != kron(eye_h, rho) @ rho:
        out.append("left coaction is not coassociative")
    if kron(h.counit, eye_f) @ rho != eye_f:
        out.append("left coaction violates the counit law")
    return out


def check_right_comodule(p: RightComodule) -> list[str]:
    h = p.hopf
    eye_p = Matrix.identity(p.dim)
    eye_h = Matrix.identity(h.dim)
    rho = p.coaction
    out = []
    if kron(rho, eye_h) @ rho != kron(eye_p, h.coproduct) @ rho:
        out.append("right coaction is not coassociative")
    if kron(eye_p, h.counit) @ rho != eye_p:
        out.append("right coaction violates the counit law")
    return out


def trivial_comodule(h: HopfAlgebra, dim: int) -> LeftComodule:
    """``rho(f) = 1 (x) f``."""
    cols = [vkron(h.unit, unit_vector(dim, k)) for k in range(dim)]
    return LeftComodule(h, dim, Matrix.from_columns(cols, h.dim * dim))


def grouplike_comodule(h: HopfAlgebra, g) -> LeftComodule:
    """One-dimensional comodule ``rho(f) = g (x) f`` for a group-like ``g``."""
    g = unit_vector(h.dim, g) if isinstance(g, int) else tuple(g)
    return LeftComodule(h, 1, Matrix.from_columns([g], h.dim))


def regular_left_comodule(h: HopfAlgebra) -> LeftComodule:
    """``H`` coacting on itself by ``Delta``."""
    return LeftComodule(h, h.dim, h.coproduct)


def comodule_from_columns(h: HopfAlgebra, dim: int, columns) -> LeftComodule:
    return LeftComodule(h, dim, Matrix.from_columns(columns, h.dim * dim))


def free_right_comodule(h: HopfAlgebra, dim_b: int) -> RightComodule:
    """``B (x) H`` with coaction ``id (x) Delta``."""
    return RightComodule(h, dim_b * h.dim, kron(Matrix.identity(dim_b), h.coproduct))


def regular_right_comodule(h: HopfAlgebra) -> RightComodule:
    return RightComodule(h, h.dim, h.coproduct)


@dataclass(frozen=True)
class ConvolutionMap:
    """Linear map ``H -> A``; ``map`` has shape ``(dim A, dim H)``."""

    source: HopfAlgebra
    target: Algebra
    map: Matrix

    def __post_init__(self):
        if self.map.shape != (self.target.dim, self.source.dim):
            raise DimensionMismatch("convolution map has wrong shape")

    def __call__(self, x):
        return self.map.apply(x)


def convolution_unit(h: HopfAlgebra, a: Algebra) -> ConvolutionMap:
    """``u_A o eps``."""
    return ConvolutionMap(h, a, Matrix.column_vector(a.unit) @ h.counit)


def _same_ends(a: ConvolutionMap, b: ConvolutionMap):
    if a.source != b.source or a.target != b.target:
        raise DimensionMismatch("convolution needs maps with the same source and target")


def convolution(a: ConvolutionMap, b: ConvolutionMap) -> ConvolutionMap:
    """``(a * b)(h) = a(h_(1)) b(h_(2))``."""
    _same_ends(a, b)
    m = a.target.mult_matrix
    return ConvolutionMap(a.source, a.target, m @ kron(a.map, b.map) @ a.source.coproduct)


def convolution_inverse(a: ConvolutionMap) -> ConvolutionMap:
    """Two-sided convolution inverse, found by solving a linear system."""
    h, alg = a.source, a.target
    da, dh = alg.dim, h.dim
    unit = convolution_unit(h, alg).map
    cols = []
    for r in range(da):
        for c in range(dh):
            e = Matrix.zeros(da, dh)
            rows = [list(row) for row in e.rows]
            rows[r][c] = 1
            x = ConvolutionMap(h, alg, Matrix(rows, dh))
            left = convolution(a, x).map
            right = convolution(x, a).map
            cols.append([v for row in left.rows for v in row] + [v for row in right.rows for v in row])
    system = Matrix.from_columns(cols, 2 * da * dh)
    rhs = [v for row in unit.rows for v in row] * 2
    sol = system.solve(rhs)
    if sol is None:
        raise NotInvertible("map is not convolution invertible")
    inv = Matrix([sol[r * dh:(r + 1) * dh] for r in range(da)], dh)
    return ConvolutionMap(h, alg, inv)


def is_unital(a: ConvolutionMap) -> bool:
    return a(a.source.unit) == a.target.unit


def multiplicativity_violations(a: ConvolutionMap) -> list[tuple[int, int]]:
    h = a.source
    out = []
    for i, j in product(range(h.dim), repeat=2):
        if a(h.algebra.structure(i, j)) != a.target.mul(a.map.column(i), a.map.column(j)):
            out.append((i, j))
    return out


def cotensor(p: RightComodule, f: LeftComodule) -> Subspace:
    """``{e in P (x) F : (Delta_P (x) id) e = (id (x) rho) e}``."""
    if p.hopf != f.hopf:
        raise DimensionMismatch("comodules over different Hopf algebras")
    lhs = kron(p.coaction, Matrix.identity(f.dim))
    rhs = kron(Matrix.identity(p.dim), f.coaction)
    return kernel(lhs - rhs)


def coinvariants(p: RightComodule) -> Subspace:
    """``{x : Delta_P(x) = x (x) 1}``."""
    h = p.hopf
    embed = kron(Matrix.identity(p.dim), Matrix.column_vector(h.unit))
    return kernel(p.coaction - embed)
