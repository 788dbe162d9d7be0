"""Small reference bundles used by the tests, the demos and the bundled scenarios."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .algebra import (
    Algebra,
    AlgebraCovering,
    direct_product,
    function_algebra,
    group_algebra_of,
    matrix_algebra,
    square_zero_algebra,
    truncated_polynomial_algebra,
    upper_triangular_algebra,
)
from .dga import DGA, universal_calculi
from .hopf import cyclic_group_table, group_algebra, grouplike_comodule, regular_left_comodule
from .linalg import Matrix, Subspace, intersect_all, unit_vector
from .modules import (
    LeftModule,
    ModuleCovering,
    direct_sum_module,
    generated_submodule,
    is_faithful,
    quotient_module,
    regular_module,
)
from .qvb import TransitionMaps


def points_ideal(n: int, points) -> Subspace:
    """Functions on ``n`` points supported on ``points`` (the ideal of a chart's complement)."""
    return Subspace(n, [unit_vector(n, p) for p in points])


def b3_covering() -> AlgebraCovering:
    """Three points, charts ``{0, 1}`` and ``{1, 2}``."""
    return AlgebraCovering(function_algebra(3), [points_ideal(3, [2]), points_ideal(3, [0])])


def c4_covering() -> AlgebraCovering:
    """Four points, charts ``{0, 1, 2}`` and ``{0, 2, 3}``; the overlap is ``{0, 2}``."""
    return AlgebraCovering(function_algebra(4), [points_ideal(4, [3]), points_ideal(4, [1])])


MOBIUS_TWIST = (1, -1)  # t on the overlap points (0, 2)


def mobius_transitions(cov: AlgebraCovering | None = None) -> TransitionMaps:
    cov = cov or c4_covering()
    return TransitionMaps.from_functions(cov, 1, {(0, 1): [[MOBIUS_TWIST]]})


def mobius_lift(calculus: DGA, x=1) -> tuple:
    """A lift of ``t`` to chart 1 (points 0, 2, 3) with value ``x`` at point 3.

    With ``x = +-1`` the lift squares to one, so the pure-gauge form built
    from it is flat on the whole chart.
    """
    out = [0] * calculus.dim
    out[0], out[1], out[2] = 1, -1, x
    return tuple(out)


def z2_hopf():
    return group_algebra(cyclic_group_table(2))


def mobius_principal():
    """``H = Q[Z2]`` with ``tau_01(g) = t``."""
    from .associated import PrincipalLocalData

    h = z2_hopf()
    cov = c4_covering()
    # columns: tau(e), tau(g) in the overlap basis
    return PrincipalLocalData(h, cov, {(0, 1): [[1, 1], list(MOBIUS_TWIST)]})


def sign_comodule(h=None):
    """``rho(f) = g (x) f``."""
    h = h or z2_hopf()
    return grouplike_comodule(h, 1)


def rank2_comodule(h=None):
    """``F = H`` with ``rho = Delta``."""
    return regular_left_comodule(h or z2_hopf())


def mobius_gauges(calculi, x=1):
    """Gauge potentials ``A_0 = 0`` and ``A_1(g) = t dt`` for a lift of ``t``."""
    from .associated import GaugePotential

    h = z2_hopf()
    c0, c1 = calculi.charts
    t = mobius_lift(c1, x)
    zero0, zero1 = (0,) * c0.dim, (0,) * c1.dim
    return [GaugePotential(0, c0, h, [zero0, zero0]),
            GaugePotential(1, c1, h, [zero1, c1.mul(t, c1.diff(t))])]


def mobius_calculi(bound: int = 2):
    return universal_calculi(c4_covering(), bound)


def incomplete_covering() -> AlgebraCovering:
    """``Q + W`` with ``W^2 = 0``, ``dim W = 2``, covered by three lines in ``W``.

    The completion has dimension 4 > 3, so the covering is not complete.
    """
    b = square_zero_algebra(2)
    return AlgebraCovering(b, [Subspace(3, [[0, 1, 0]]), Subspace(3, [[0, 0, 1]]),
                               Subspace(3, [[0, 1, -1]])])


# random sampling


SMALL_ALGEBRAS = (
    lambda: function_algebra(1),
    lambda: function_algebra(2),
    lambda: function_algebra(3),
    upper_triangular_algebra,
    lambda: truncated_polynomial_algebra(2),
    lambda: truncated_polynomial_algebra(3),
    lambda: square_zero_algebra(2),
    lambda: group_algebra_of(cyclic_group_table(2)),
    lambda: group_algebra_of(cyclic_group_table(3)),
    lambda: matrix_algebra(2),
    lambda: direct_product(function_algebra(1), truncated_polynomial_algebra(2)),
)


def _random_invertible(rng: random.Random, n: int) -> Matrix:
    while True:
        m = Matrix([[rng.randint(-2, 2) for _ in range(n)] for _ in range(n)])
        if m.rank() == n:
            return m


def _conjugate(m: LeftModule, p: Matrix) -> LeftModule:
    q = p.inverse()
    return LeftModule(m.algebra, m.dim, [p @ a @ q for a in m.action])


@dataclass
class ModuleSample:
    module: LeftModule
    covering: ModuleCovering


def random_faithful_module(rng: random.Random, max_dim: int = 5) -> LeftModule:
    """A faithful module of dimension at most ``max_dim`` in a random basis."""
    while True:
        a = rng.choice(SMALL_ALGEBRAS)()
        if a.dim > max_dim:
            continue
        parts = [regular_module(a)]
        while rng.random() < 0.4 and sum(p.dim for p in parts) + 1 <= max_dim:
            # add a one-dimensional quotient of the regular module when it exists
            extra = _one_dim_module(a, rng)
            if extra is None:
                break
            parts.append(extra)
        m = direct_sum_module(*parts) if len(parts) > 1 else parts[0]
        if m.dim > max_dim or not is_faithful(m):
            continue
        return _conjugate(m, _random_invertible(rng, m.dim))


def _one_dim_module(a: Algebra, rng: random.Random):
    """A character of ``a`` found among its one-dimensional quotient modules."""
    reg = regular_module(a)
    for _ in range(6):
        v = [rng.randint(-1, 1) for _ in range(a.dim)]
        s = generated_submodule(reg, [v])
        if s.dim == a.dim - 1:
            q, _ = quotient_module(reg, s)
            return q
    return None


def random_module_covering(rng: random.Random, m: LeftModule, max_charts: int = 3) -> ModuleCovering | None:
    """Random submodules generated by random vectors, kept only if they intersect to zero.

    Proper nonzero submodules are preferred; zero members (which make the
    covering trivial) are only used once those have failed repeatedly.
    """
    pool = []
    for _ in range(12):
        sub = generated_submodule(m, [[rng.randint(-2, 2) for _ in range(m.dim)]])
        if 0 < sub.dim < m.dim and sub not in pool:
            pool.append(sub)
    for attempt in range(40):
        k = rng.randint(1, max_charts)
        if len(pool) >= 2 and attempt < 30:
            subs = rng.sample(pool, min(max(k, 2), len(pool)))
        else:
            subs = [rng.choice(pool) if pool and rng.random() < 0.5 else Subspace.zero(m.dim) for _ in range(k)]
        if intersect_all(subs).is_zero():
            return ModuleCovering(m, subs)
    return None


def sample_module_coverings(seed: int, count: int, max_dim: int = 5, max_charts: int = 3) -> list[ModuleSample]:
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        m = random_faithful_module(rng, max_dim)
        c = random_module_covering(rng, m, max_charts)
        if c is not None:
            out.append(ModuleSample(m, c))
    return out
