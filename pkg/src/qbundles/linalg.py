"""Exact rational linear algebra.

Everything here works over :class:`fractions.Fraction`.  Matrices follow
the column convention: column ``j`` of a matrix is the image of the
``j``-th basis vector of the domain.  Subspaces keep their basis in
reduced row echelon form, so two subspaces are equal exactly when their
basis tuples are equal, and the coordinates of a member vector are its
entries at the pivot positions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DimensionMismatch, NotInvertible

ZERO = Fraction(0)
ONE = Fraction(1)

Vector = tuple  # tuple of Fraction


def scalar(x) -> Fraction:
    """Coerce ``x`` to an exact rational.  Strings like ``"3/4"`` are accepted."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        raise TypeError(f"floating point value {x!r} is not allowed; use 'p/q' strings")
    return Fraction(x)


def vector(xs: Iterable) -> Vector:
    return tuple(scalar(x) for x in xs)


def zero_vector(n: int) -> Vector:
    return (ZERO,) * n


def unit_vector(n: int, i: int) -> Vector:
    v = [ZERO] * n
    v[i] = ONE
    return tuple(v)


def vadd(u: Sequence, v: Sequence) -> Vector:
    if len(u) != len(v):
        raise DimensionMismatch(f"vector lengths {len(u)} and {len(v)} differ")
    return tuple(a + b for a, b in zip(u, v))


def vsub(u: Sequence, v: Sequence) -> Vector:
    if len(u) != len(v):
        raise DimensionMismatch(f"vector lengths {len(u)} and {len(v)} differ")
    return tuple(a - b for a, b in zip(u, v))


def vscale(c, v: Sequence) -> Vector:
    c = scalar(c)
    return tuple(c * a for a in v)


def vcombine(terms, n: int) -> Vector:
    """Linear combination ``sum(c * v for c, v in terms)`` of length-``n`` vectors."""
    out = [ZERO] * n
    for c, v in terms:
        if c:
            for k, x in enumerate(v):
                if x:
                    out[k] += c * x
    return tuple(out)


def is_zero_vector(v: Sequence) -> bool:
    return not any(v)


def vkron(u: Sequence, v: Sequence) -> Vector:
    return tuple(a * b for a in u for b in v)


def _rref(rows, ncols):
    """Gauss-Jordan elimination.  Returns (nonzero rref rows, pivot columns)."""
    m = [list(r) for r in rows]
    pivots = []
    r = 0
    nrows = len(m)
    for c in range(ncols):
        if r == nrows:
            break
        p = None
        for k in range(r, nrows):
            if m[k][c]:
                p = k
                break
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        piv = m[r][c]
        if piv != 1:
            inv = 1 / piv
            m[r] = [x * inv if x else ZERO for x in m[r]]
        nz = [(j, x) for j, x in enumerate(m[r]) if x]
        for k in range(nrows):
            if k != r:
                f = m[k][c]
                if f:
                    mk = m[k]
                    for j, x in nz:
                        mk[j] -= f * x
        pivots.append(c)
        r += 1
    return [tuple(row) for row in m[:r]], pivots


class Matrix:
    """Immutable exact rational matrix."""

    __slots__ = ("_rows", "nrows", "ncols", "_hash")

    def __init__(self, rows: Iterable[Iterable], ncols: int | None = None):
        rows = tuple(tuple(scalar(x) for x in row) for row in rows)
        if ncols is None:
            if not rows:
                raise DimensionMismatch("ncols must be given for a matrix without rows")
            ncols = len(rows[0])
        for row in rows:
            if len(row) != ncols:
                raise DimensionMismatch("ragged matrix rows")
        self._rows = rows
        self.nrows = len(rows)
        self.ncols = ncols
        self._hash = None

    @classmethod
    def _trusted(cls, rows, ncols):
        m = object.__new__(cls)
        m._rows = tuple(rows)
        m.nrows = len(m._rows)
        m.ncols = ncols
        m._hash = None
        return m

    # construction

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> Matrix:
        return cls._trusted([(ZERO,) * ncols for _ in range(nrows)], ncols)

    @classmethod
    def identity(cls, n: int) -> Matrix:
        return cls._trusted([unit_vector(n, i) for i in range(n)], n)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], nrows: int | None = None) -> Matrix:
        columns = [vector(c) for c in columns]
        if nrows is None:
            if not columns:
                raise DimensionMismatch("nrows must be given for a matrix without columns")
            nrows = len(columns[0])
        for c in columns:
            if len(c) != nrows:
                raise DimensionMismatch("ragged matrix columns")
        rows = [tuple(c[i] for c in columns) for i in range(nrows)]
        return cls._trusted(rows, len(columns))

    @classmethod
    def row_vector(cls, v: Sequence) -> Matrix:
        return cls([v])

    @classmethod
    def column_vector(cls, v: Sequence) -> Matrix:
        return cls.from_columns([v], len(v))

    # access

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    @property
    def rows(self) -> tuple:
        return self._rows

    def __getitem__(self, key):
        i, j = key
        return self._rows[i][j]

    def row(self, i: int) -> Vector:
        return self._rows[i]

    def column(self, j: int) -> Vector:
        return tuple(r[j] for r in self._rows)

    def columns(self) -> list[Vector]:
        if self.nrows == 0:
            return [() for _ in range(self.ncols)]
        return [tuple(col) for col in zip(*self._rows)]

    def select(self, rows=None, cols=None) -> Matrix:
        rows = range(self.nrows) if rows is None else list(rows)
        if cols is None:
            return Matrix._trusted([self._rows[i] for i in rows], self.ncols)
        cols = list(cols)
        return Matrix._trusted([tuple(self._rows[i][j] for j in cols) for i in rows], len(cols))

    def to_strings(self) -> list[list[str]]:
        return [[str(x) for x in row] for row in self._rows]

    # arithmetic

    @property
    def T(self) -> Matrix:
        return Matrix._trusted(self.columns(), self.nrows)

    def __matmul__(self, other):
        if isinstance(other, Matrix):
            if self.ncols != other.nrows:
                raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
            n = other.ncols
            orows = other._rows
            out = []
            for row in self._rows:
                acc = [ZERO] * n
                for k, a in enumerate(row):
                    if a:
                        for j, b in enumerate(orows[k]):
                            if b:
                                acc[j] += a * b
                out.append(tuple(acc))
            return Matrix._trusted(out, n)
        return self.apply(other)

    def apply(self, v: Sequence) -> Vector:
        if len(v) != self.ncols:
            raise DimensionMismatch(f"vector of length {len(v)} for matrix {self.shape}")
        nz = [(k, x) for k, x in enumerate(v) if x]
        return tuple(sum((row[k] * x for k, x in nz), ZERO) for row in self._rows)

    def _check_same_shape(self, other):
        if self.shape != other.shape:
            raise DimensionMismatch(f"shapes {self.shape} and {other.shape} differ")

    def __add__(self, other: Matrix) -> Matrix:
        self._check_same_shape(other)
        return Matrix._trusted(
            [tuple(a + b for a, b in zip(r, s)) for r, s in zip(self._rows, other._rows)], self.ncols)

    def __sub__(self, other: Matrix) -> Matrix:
        self._check_same_shape(other)
        return Matrix._trusted(
            [tuple(a - b for a, b in zip(r, s)) for r, s in zip(self._rows, other._rows)], self.ncols)

    def __neg__(self) -> Matrix:
        return Matrix._trusted([tuple(-a for a in r) for r in self._rows], self.ncols)

    def __mul__(self, c) -> Matrix:
        c = scalar(c)
        return Matrix._trusted([tuple(c * a for a in r) for r in self._rows], self.ncols)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self._rows == other._rows

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.nrows, self.ncols, self._rows))
        return self._hash

    def __repr__(self) -> str:
        body = "; ".join(" ".join(str(x) for x in r) for r in self._rows)
        return f"Matrix({self.nrows}x{self.ncols}: [{body}])"

    def kron(self, other: Matrix) -> Matrix:
        """Kronecker product; index ``(i, k)`` of the product space is ``i * other_dim + k``."""
        out = []
        for r in self._rows:
            for s in other._rows:
                out.append(tuple(a * b if a and b else ZERO for a in r for b in s))
        return Matrix._trusted(out, self.ncols * other.ncols)

    def is_zero(self) -> bool:
        return not any(any(r) for r in self._rows)

    def is_square(self) -> bool:
        return self.nrows == self.ncols

    # elimination

    def rref(self):
        return _rref(self._rows, self.ncols)

    def rank(self) -> int:
        return len(_rref(self._rows, self.ncols)[1])

    def kernel(self) -> Subspace:
        return kernel(self)

    def image(self) -> Subspace:
        return Subspace(self.nrows, self.columns())

    def inverse(self) -> Matrix:
        if not self.is_square():
            raise NotInvertible(f"matrix of shape {self.shape} is not square")
        n = self.nrows
        aug = [r + unit_vector(n, i) for i, r in enumerate(self._rows)]
        rows, pivots = _rref(aug, 2 * n)
        if pivots[:n] != list(range(n)) or len(rows) < n:
            raise NotInvertible("matrix is singular")
        return Matrix._trusted([r[n:] for r in rows[:n]], n)

    def solve(self, b: Sequence):
        """One solution ``x`` of ``self @ x == b`` (free variables set to 0), or None."""
        if len(b) != self.nrows:
            raise DimensionMismatch("right-hand side has wrong length")
        aug = [r + (scalar(x),) for r, x in zip(self._rows, b)]
        rows, pivots = _rref(aug, self.ncols + 1)
        if pivots and pivots[-1] == self.ncols:
            return None
        x = [ZERO] * self.ncols
        for row, p in zip(rows, pivots):
            x[p] = row[-1]
        return tuple(x)


def hstack(*ms: Matrix) -> Matrix:
    if not ms:
        raise DimensionMismatch("nothing to stack")
    n = ms[0].nrows
    for m in ms:
        if m.nrows != n:
            raise DimensionMismatch("hstack needs equal row counts")
    rows = [sum((m._rows[i] for m in ms), ()) for i in range(n)]
    return Matrix._trusted(rows, sum(m.ncols for m in ms))


def vstack(*ms: Matrix) -> Matrix:
    if not ms:
        raise DimensionMismatch("nothing to stack")
    n = ms[0].ncols
    for m in ms:
        if m.ncols != n:
            raise DimensionMismatch("vstack needs equal column counts")
    return Matrix._trusted([r for m in ms for r in m._rows], n)


def mcombine(coeffs: Sequence, mats: Sequence[Matrix], nrows: int, ncols: int) -> Matrix:
    """``sum(c * m)`` over paired coefficients and matrices, skipping zeros."""
    if len(coeffs) != len(mats):
        raise DimensionMismatch(f"{len(coeffs)} coefficients for {len(mats)} matrices")
    terms = [(scalar(c), m) for c, m in zip(coeffs, mats) if c]
    if len(terms) == 1 and terms[0][0] == 1:
        return terms[0][1]
    acc = [[ZERO] * ncols for _ in range(nrows)]
    for c, m in terms:
        for out, row in zip(acc, m._rows):
            for j, a in enumerate(row):
                if a:
                    out[j] += c * a
    return Matrix._trusted([tuple(r) for r in acc], ncols)


def block_diag(*ms: Matrix) -> Matrix:
    ncols = sum(m.ncols for m in ms)
    rows = []
    before = 0
    for m in ms:
        after = ncols - before - m.ncols
        for r in m._rows:
            rows.append((ZERO,) * before + r + (ZERO,) * after)
        before += m.ncols
    return Matrix._trusted(rows, ncols)


def kron(*ms: Matrix) -> Matrix:
    out = ms[0]
    for m in ms[1:]:
        out = out.kron(m)
    return out


class Subspace:
    """A linear subspace of ``Q^ambient_dim`` with a canonical RREF basis."""

    __slots__ = ("ambient_dim", "basis", "pivots", "_hash")

    def __init__(self, ambient_dim: int, vectors: Iterable[Sequence] = ()):
        vecs = [vector(v) for v in vectors]
        for v in vecs:
            if len(v) != ambient_dim:
                raise DimensionMismatch(f"vector of length {len(v)} in ambient dimension {ambient_dim}")
        rows, pivots = _rref(vecs, ambient_dim)
        self.ambient_dim = ambient_dim
        self.basis = tuple(rows)
        self.pivots = tuple(pivots)
        self._hash = None

    @classmethod
    def zero(cls, n: int) -> Subspace:
        return cls(n)

    @classmethod
    def full(cls, n: int) -> Subspace:
        return cls(n, [unit_vector(n, i) for i in range(n)])

    @property
    def dim(self) -> int:
        return len(self.basis)

    def is_zero(self) -> bool:
        return not self.basis

    def is_full(self) -> bool:
        return self.dim == self.ambient_dim

    def basis_matrix(self) -> Matrix:
        """Inclusion map ``Q^dim -> Q^ambient`` (columns are the basis vectors)."""
        return Matrix.from_columns(self.basis, self.ambient_dim)

    def _reduce(self, v):
        v = list(v)
        for row, p in zip(self.basis, self.pivots):
            c = v[p]
            if c:
                for j, x in enumerate(row):
                    if x:
                        v[j] -= c * x
        return v

    def contains(self, v: Sequence) -> bool:
        if len(v) != self.ambient_dim:
            raise DimensionMismatch("vector length does not match ambient dimension")
        return not any(self._reduce(v))

    __contains__ = contains

    def coordinates(self, v: Sequence) -> Vector:
        """Coordinates of a member vector in the canonical basis."""
        if not self.contains(v):
            raise ValueError("vector is not in the subspace")
        return tuple(v[p] for p in self.pivots)

    def coordinates_matrix(self, m: Matrix) -> Matrix:
        """Matrix ``C`` with ``basis_matrix() @ C == m``; columns of ``m`` must lie in self."""
        if m.nrows != self.ambient_dim:
            raise DimensionMismatch("matrix rows do not match ambient dimension")
        coords = m.select(rows=self.pivots)
        if self.basis_matrix() @ coords != m:
            raise ValueError("columns do not lie in the subspace")
        return coords

    def __le__(self, other: Subspace) -> bool:
        _same_ambient(self, other)
        return all(other.contains(v) for v in self.basis)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.ambient_dim == other.ambient_dim and self.basis == other.basis

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.ambient_dim, self.basis))
        return self._hash

    def __add__(self, other: Subspace) -> Subspace:
        return subspace_sum(self, other)

    def __and__(self, other: Subspace) -> Subspace:
        return intersect(self, other)

    def __repr__(self) -> str:
        return f"Subspace(ambient={self.ambient_dim}, dim={self.dim}, basis={[list(map(str, b)) for b in self.basis]})"

    def image_under(self, m: Matrix) -> Subspace:
        return Subspace(m.nrows, [m.apply(v) for v in self.basis])


def _same_ambient(a: Subspace, b: Subspace):
    if a.ambient_dim != b.ambient_dim:
        raise DimensionMismatch(f"ambient dimensions {a.ambient_dim} and {b.ambient_dim} differ")


def kernel(m: Matrix) -> Subspace:
    rows, pivots = _rref(m.rows, m.ncols)
    free = [c for c in range(m.ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [ZERO] * m.ncols
        v[f] = ONE
        for row, p in zip(rows, pivots):
            v[p] = -row[f]
        basis.append(v)
    return Subspace(m.ncols, basis)


def subspace_sum(a: Subspace, b: Subspace) -> Subspace:
    _same_ambient(a, b)
    return Subspace(a.ambient_dim, a.basis + b.basis)


def intersect(a: Subspace, b: Subspace) -> Subspace:
    _same_ambient(a, b)
    if a.is_zero() or b.is_zero():
        return Subspace.zero(a.ambient_dim)
    inc = a.basis_matrix()
    cond = quotient(b.ambient_dim, b).projection @ inc
    return kernel(cond).image_under(inc)


def intersect_all(spaces: Sequence[Subspace]) -> Subspace:
    out = spaces[0]
    for s in spaces[1:]:
        out = intersect(out, s)
    return out


def sum_all(spaces: Sequence[Subspace]) -> Subspace:
    n = spaces[0].ambient_dim
    return Subspace(n, [v for s in spaces for v in s.basis])


@dataclass(frozen=True)
class QuotientSpace:
    """``Q^ambient_dim / subspace`` with the canonical complement basis.

    The quotient basis consists of the classes of the standard basis
    vectors at the non-pivot positions of ``subspace``.
    """

    ambient_dim: int
    subspace: Subspace
    dim: int
    projection: Matrix
    section: Matrix
    free_positions: tuple


def quotient(ambient_dim: int, s: Subspace) -> QuotientSpace:
    if s.ambient_dim != ambient_dim:
        raise DimensionMismatch(f"subspace lives in dimension {s.ambient_dim}, not {ambient_dim}")
    pivset = set(s.pivots)
    free = [c for c in range(ambient_dim) if c not in pivset]
    pos = {c: k for k, c in enumerate(free)}
    proj = [[ZERO] * ambient_dim for _ in free]
    for c in free:
        proj[pos[c]][c] = ONE
    for row, p in zip(s.basis, s.pivots):
        for c in free:
            if row[c]:
                proj[pos[c]][p] = -row[c]
    projection = Matrix._trusted([tuple(r) for r in proj], ambient_dim)
    section = Matrix.from_columns([unit_vector(ambient_dim, c) for c in free], ambient_dim)
    return QuotientSpace(ambient_dim, s, len(free), projection, section, tuple(free))


def preimage(m: Matrix, w: Subspace) -> Subspace:
    """``{v : m v in w}``."""
    if w.ambient_dim != m.nrows:
        raise DimensionMismatch("target subspace does not match matrix rows")
    return kernel(quotient(w.ambient_dim, w).projection @ m)


def restrict(m: Matrix, source: Subspace, target: Subspace | None = None) -> Matrix:
    """Matrix of ``m`` restricted to ``source`` and corestricted to ``target``.

    Raises ValueError when ``m(source)`` is not contained in ``target``.
    """
    target = source if target is None else target
    return target.coordinates_matrix(m @ source.basis_matrix())


def offsets(dims: Sequence[int]) -> list[int]:
    out, acc = [], 0
    for d in dims:
        out.append(acc)
        acc += d
    return out


def glued_subspace(dims: Sequence[int], constraints) -> Subspace:
    """Compatible tuples in a direct sum.

    ``constraints`` holds tuples ``(i, j, Ci, Cj)`` imposing
    ``Ci @ x_i == Cj @ x_j`` on the components of ``x`` in
    ``Q^dims[0] + ... + Q^dims[-1]``.
    """
    offs = offsets(dims)
    total = sum(dims)
    rows = []
    for i, j, ci, cj in constraints:
        if ci.ncols != dims[i] or cj.ncols != dims[j] or ci.nrows != cj.nrows:
            raise DimensionMismatch(f"constraint ({i}, {j}) has inconsistent shape")
        for r in range(ci.nrows):
            row = [ZERO] * total
            for c, x in enumerate(ci.row(r)):
                row[offs[i] + c] += x
            for c, x in enumerate(cj.row(r)):
                row[offs[j] + c] -= x
            rows.append(tuple(row))
    if not rows:
        return Subspace.full(total)
    return kernel(Matrix._trusted(rows, total))


def component_projection(dims: Sequence[int], i: int) -> Matrix:
    """Projection of the direct sum onto its ``i``-th summand."""
    offs = offsets(dims)
    total = sum(dims)
    return Matrix._trusted(
        [unit_vector(total, offs[i] + k) for k in range(dims[i])], total)


def matrix_of(fn, domain_dim: int, codomain_dim: int) -> Matrix:
    """Matrix of a linear function given on basis vectors."""
    cols = [fn(unit_vector(domain_dim, k)) for k in range(domain_dim)]
    return Matrix.from_columns(cols, codomain_dim)


class GradedDirectSum:
    """Direct sum of graded summands laid out degree-major.

    ``degrees[i][k]`` is the degree of local coordinate ``k`` of summand
    ``i``.  Global coordinates are sorted by ``(degree, summand, local
    index)``, so the RREF basis of any graded subspace consists of
    homogeneous vectors listed by increasing degree.
    """

    def __init__(self, degrees: Sequence[Sequence[int]]):
        self.degrees = [tuple(d) for d in degrees]
        keys = sorted(
            (deg, i, k) for i, ds in enumerate(self.degrees) for k, deg in enumerate(ds))
        self.dim = len(keys)
        self.position = {(i, k): pos for pos, (_, i, k) in enumerate(keys)}
        self.global_degrees = tuple(deg for deg, _, _ in keys)

    def __len__(self) -> int:
        return len(self.degrees)

    def local_dim(self, i: int) -> int:
        return len(self.degrees[i])

    def embedding(self, i: int) -> Matrix:
        """Summand ``i`` -> sum."""
        n = self.local_dim(i)
        rows = [[ZERO] * n for _ in range(self.dim)]
        for k in range(n):
            rows[self.position[(i, k)]][k] = ONE
        return Matrix._trusted([tuple(r) for r in rows], n)

    def component(self, i: int) -> Matrix:
        """Sum -> summand ``i``."""
        n = self.local_dim(i)
        return Matrix._trusted(
            [unit_vector(self.dim, self.position[(i, k)]) for k in range(n)], self.dim)

    def assemble(self, blocks: Sequence[Matrix]) -> Matrix:
        """Block-diagonal operator acting on each summand by ``blocks[i]``."""
        rows = [[ZERO] * self.dim for _ in range(self.dim)]
        for i, blk in enumerate(blocks):
            pos = [self.position[(i, k)] for k in range(self.local_dim(i))]
            for r, row in enumerate(blk.rows):
                target = rows[pos[r]]
                for c, x in enumerate(row):
                    if x:
                        target[pos[c]] += x
        return Matrix._trusted([tuple(r) for r in rows], self.dim)

    def glue(self, constraints) -> Subspace:
        """Tuples satisfying ``Ci @ x_i == Cj @ x_j`` for each ``(i, j, Ci, Cj)``."""
        rows = []
        for i, j, ci, cj in constraints:
            m = ci @ self.component(i) - cj @ self.component(j)
            rows.extend(m.rows)
        if not rows:
            return Subspace.full(self.dim)
        return kernel(Matrix._trusted(rows, self.dim))

    def degree_of_basis(self, s: Subspace) -> tuple:
        return tuple(self.global_degrees[p] for p in s.pivots)


def graded_block_map(src: GradedDirectSum, dst: GradedDirectSum, blocks: Sequence[Matrix]) -> Matrix:
    """Map between two graded sums acting on summand ``i`` by ``blocks[i]``."""
    rows = [[ZERO] * src.dim for _ in range(dst.dim)]
    for i, blk in enumerate(blocks):
        if blk.shape != (dst.local_dim(i), src.local_dim(i)):
            raise DimensionMismatch(f"block {i} has the wrong shape")
        for r, row in enumerate(blk.rows):
            target = rows[dst.position[(i, r)]]
            for c, x in enumerate(row):
                if x:
                    target[src.position[(i, c)]] += x
    return Matrix._trusted([tuple(r) for r in rows], src.dim)
