"""Exact rational matrices and canonical subspaces.

Scalars are exact rationals: ``int`` when integral, otherwise
:class:`fractions.Fraction`.  An ``n x n`` matrix is identified
with the coordinate vector of length ``n*n`` obtained by reading it row by
row: entry ``(i, j)`` sits at coordinate ``i*n + j``.  Every other module
relies on this vectorization.

A :class:`Subspace` is stored as the reduced row-echelon form of a basis, so
two subspaces are equal exactly when their stored bases are equal.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence

from .errors import DimensionMismatch, Singular

Q = Fraction
ZERO = 0
ONE = 1


def compact(x):
    """Integral rationals are kept as ``int`` (exact, and much faster than Fraction)."""
    if type(x) is int:
        return x
    return x.numerator if x.denominator == 1 else x


def as_rational(value):
    """Coerce ints, Fractions and strings like ``"-3/4"`` to an exact rational.

    The result is an ``int`` when the value is integral and a Fraction otherwise.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, int):
        return int(value)
    if isinstance(value, Fraction):
        return compact(value)
    if isinstance(value, str):
        try:
            return compact(Fraction(value.strip()))
        except ValueError:
            raise ValueError(f"cannot parse {value!r} as a rational") from None
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def reciprocal(x):
    if x == 1 or x == -1:
        return int(x)
    return compact(Fraction(1) / x)


def format_rational(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


class Mat:
    """Immutable dense matrix over the rationals."""

    __slots__ = ("rows", "cols", "entries", "_hash")

    def __init__(self, rows: int, cols: int, entries: Iterable):
        entries = tuple(as_rational(x) for x in entries)
        if len(entries) != rows * cols:
            raise DimensionMismatch(
                f"{rows}x{cols} matrix needs {rows * cols} entries, got {len(entries)}"
            )
        self.rows = rows
        self.cols = cols
        self.entries = entries
        self._hash = None

    @classmethod
    def _raw(cls, rows, cols, entries):
        # entries already a tuple of compact rationals
        m = cls.__new__(cls)
        m.rows, m.cols, m.entries, m._hash = rows, cols, entries, None
        return m

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "Mat":
        rows = [list(r) for r in rows]
        ncols = len(rows[0]) if rows else 0
        if any(len(r) != ncols for r in rows):
            raise DimensionMismatch("ragged rows")
        return cls(len(rows), ncols, [x for r in rows for x in r])

    @classmethod
    def zeros(cls, rows: int, cols: int | None = None) -> "Mat":
        cols = rows if cols is None else cols
        return cls._raw(rows, cols, (ZERO,) * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> "Mat":
        return cls._raw(n, n, tuple(ONE if i == j else ZERO for i in range(n) for j in range(n)))

    @classmethod
    def unit(cls, n: int, i: int, j: int) -> "Mat":
        """The matrix unit e_ij (0-based) in M_n."""
        e = [ZERO] * (n * n)
        e[i * n + j] = ONE
        return cls._raw(n, n, tuple(e))

    @classmethod
    def from_vec(cls, v: Sequence, n: int) -> "Mat":
        return cls(n, n, v)

    def vec(self) -> tuple:
        return self.entries

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i):
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def tolist(self):
        return [list(self.row(i)) for i in range(self.rows)]

    @property
    def is_square(self):
        return self.rows == self.cols

    def _check_same_shape(self, other):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatch(
                f"shape mismatch: {self.rows}x{self.cols} vs {other.rows}x{other.cols}"
            )

    def __add__(self, other: "Mat") -> "Mat":
        self._check_same_shape(other)
        return Mat._raw(self.rows, self.cols, tuple(compact(a + b) for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: "Mat") -> "Mat":
        self._check_same_shape(other)
        return Mat._raw(self.rows, self.cols, tuple(compact(a - b) for a, b in zip(self.entries, other.entries)))

    def __neg__(self) -> "Mat":
        return Mat._raw(self.rows, self.cols, tuple(-a for a in self.entries))

    def __mul__(self, scalar) -> "Mat":
        c = as_rational(scalar)
        return Mat._raw(self.rows, self.cols, tuple(compact(c * a) for a in self.entries))

    __rmul__ = __mul__

    def __matmul__(self, other: "Mat") -> "Mat":
        if self.cols != other.rows:
            raise DimensionMismatch(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        n, m, p = self.rows, self.cols, other.cols
        a, b = self.entries, other.entries
        out = [ZERO] * (n * p)
        for i in range(n):
            base = i * p
            for k in range(m):
                aik = a[i * m + k]
                if aik:
                    brow = k * p
                    for j in range(p):
                        bkj = b[brow + j]
                        if bkj:
                            out[base + j] += aik * bkj
        return Mat._raw(n, p, tuple(compact(x) for x in out))

    def __pow__(self, k: int) -> "Mat":
        if not self.is_square or k < 0:
            raise DimensionMismatch("powers need a square matrix and k >= 0")
        result = Mat.identity(self.rows)
        for _ in range(k):
            result = result @ self
        return result

    def transpose(self) -> "Mat":
        return Mat._raw(
            self.cols, self.rows,
            tuple(self.entries[i * self.cols + j] for j in range(self.cols) for i in range(self.rows)),
        )

    @property
    def T(self):
        return self.transpose()

    def trace(self) -> Fraction:
        return sum((self.entries[i * self.cols + i] for i in range(min(self.rows, self.cols))), ZERO)

    def is_zero(self) -> bool:
        return not any(self.entries)

    def support(self):
        """Set of (i, j) with a nonzero entry."""
        c = self.cols
        return {(k // c, k % c) for k, x in enumerate(self.entries) if x}

    def inverse(self) -> "Mat":
        """Gauss-Jordan inverse; raises :class:`Singular`."""
        if not self.is_square:
            raise DimensionMismatch("only square matrices are invertible")
        n = self.rows
        aug = [list(self.row(i)) + [ONE if i == j else ZERO for j in range(n)] for i in range(n)]
        for c in range(n):
            piv = next((r for r in range(c, n) if aug[r][c]), None)
            if piv is None:
                raise Singular("matrix is singular")
            aug[c], aug[piv] = aug[piv], aug[c]
            inv = reciprocal(aug[c][c])
            aug[c] = [compact(x * inv) for x in aug[c]]
            for r in range(n):
                f = aug[r][c]
                if r != c and f:
                    pr = aug[c]
                    aug[r] = [compact(x - f * y) for x, y in zip(aug[r], pr)]
        return Mat(n, n, [x for r in aug for x in r[n:]])

    def __eq__(self, other):
        if not isinstance(other, Mat):
            return NotImplemented
        return (self.rows, self.cols, self.entries) == (other.rows, other.cols, other.entries)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.rows, self.cols, self.entries))
        return self._hash

    def __repr__(self):
        body = "; ".join(" ".join(format_rational(x) for x in self.row(i)) for i in range(self.rows))
        return f"Mat[{body}]"


def rref(m: Mat) -> Mat:
    """Reduced row-echelon form, same shape, zero rows at the bottom."""
    rows = [list(m.row(i)) for i in range(m.rows)]
    r = 0
    for c in range(m.cols):
        piv = next((i for i in range(r, m.rows) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = reciprocal(rows[r][c])
        rows[r] = [compact(x * inv) for x in rows[r]]
        for i in range(m.rows):
            f = rows[i][c]
            if i != r and f:
                rows[i] = [compact(x - f * y) for x, y in zip(rows[i], rows[r])]
        r += 1
        if r == m.rows:
            break
    return Mat(m.rows, m.cols, [x for row in rows for x in row])


class Echelon:
    """Mutable RREF accumulator used to build subspaces incrementally.

    Rows are dense lists; ``_supp`` caches their nonzero columns so that
    reduction touches only nonzero entries.
    """

    def __init__(self, ambient_dim: int):
        self.ambient_dim = ambient_dim
        self._rows: dict[int, list] = {}
        self._supp: dict[int, list] = {}

    @property
    def dim(self):
        return len(self._rows)

    def reduce(self, v) -> list:
        v = list(v)
        if len(v) != self.ambient_dim:
            raise DimensionMismatch(f"vector of length {len(v)} in ambient dimension {self.ambient_dim}")
        for p, row in self._rows.items():
            c = v[p]
            if c:
                for j in self._supp[p]:
                    v[j] = compact(v[j] - c * row[j])
        return v

    def add(self, v) -> bool:
        """Adjoin ``v``; return True when the dimension grew."""
        w = self.reduce(v)
        p = next((j for j, x in enumerate(w) if x), None)
        if p is None:
            return False
        inv = reciprocal(w[p])
        w = [compact(x * inv) if x else 0 for x in w]
        supp = [j for j, x in enumerate(w) if x]
        for q, row in self._rows.items():
            c = row[p]
            if c:
                for j in supp:
                    row[j] = compact(row[j] - c * w[j])
                self._supp[q] = [j for j, x in enumerate(row) if x]
        self._rows[p] = w
        self._supp[p] = supp
        return True

    def freeze(self) -> "Subspace":
        pivots = tuple(sorted(self._rows))
        basis = tuple(tuple(self._rows[p]) for p in pivots)
        return Subspace._raw(self.ambient_dim, basis, pivots)


class Subspace:
    """A linear subspace of Q^N held as an RREF basis."""

    __slots__ = ("ambient_dim", "basis", "pivots", "_supp", "_annihilator", "_hash")

    def __init__(self, ambient_dim: int, vectors: Iterable = ()):
        ech = Echelon(ambient_dim)
        for v in vectors:
            ech.add([as_rational(x) for x in v])
        s = ech.freeze()
        self.ambient_dim, self.basis, self.pivots = s.ambient_dim, s.basis, s.pivots
        self._supp, self._annihilator, self._hash = s._supp, None, None

    @classmethod
    def _raw(cls, ambient_dim, basis, pivots):
        s = cls.__new__(cls)
        s.ambient_dim, s.basis, s.pivots = ambient_dim, basis, pivots
        s._supp = tuple(tuple(j for j, x in enumerate(b) if x) for b in basis)
        s._annihilator = None
        s._hash = None
        return s

    @classmethod
    def zero(cls, ambient_dim: int) -> "Subspace":
        return cls._raw(ambient_dim, (), ())

    @classmethod
    def full(cls, ambient_dim: int) -> "Subspace":
        basis = tuple(tuple(ONE if i == j else ZERO for j in range(ambient_dim)) for i in range(ambient_dim))
        return cls._raw(ambient_dim, basis, tuple(range(ambient_dim)))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def echelon(self) -> Echelon:
        ech = Echelon(self.ambient_dim)
        for p, b, s in zip(self.pivots, self.basis, self._supp):
            ech._rows[p] = list(b)
            ech._supp[p] = list(s)
        return ech

    def residual(self, v) -> list:
        """``v`` minus its projection along the echelon basis (zero iff v is inside)."""
        v = list(v)
        if len(v) != self.ambient_dim:
            raise DimensionMismatch(f"vector of length {len(v)} in ambient dimension {self.ambient_dim}")
        for p, row, supp in zip(self.pivots, self.basis, self._supp):
            c = v[p]
            if c:
                for j in supp:
                    v[j] = compact(v[j] - c * row[j])
        return v

    def contains(self, v) -> bool:
        return not any(self.residual(v))

    def __contains__(self, v) -> bool:
        if isinstance(v, Mat):
            v = v.entries
        return self.contains(v)

    def issubset(self, other: "Subspace") -> bool:
        _same_ambient(self, other)
        return all(other.contains(b) for b in self.basis)

    def __le__(self, other):
        return self.issubset(other)

    def __add__(self, other: "Subspace") -> "Subspace":
        return sum_spaces(self, other)

    def __and__(self, other: "Subspace") -> "Subspace":
        return intersect(self, other)

    def annihilator(self) -> tuple:
        """Integer row vectors w with ``v in self`` iff ``w . v == 0`` for all w.

        Read off the RREF: one row per free column.
        """
        if self._annihilator is None:
            pivset = set(self.pivots)
            rows = []
            for f in range(self.ambient_dim):
                if f in pivset:
                    continue
                w = [ZERO] * self.ambient_dim
                w[f] = ONE
                for p, b in zip(self.pivots, self.basis):
                    if b[f]:
                        w[p] = -b[f]
                rows.append(_primitive(w))
            self._annihilator = tuple(rows)
        return self._annihilator

    def integer_basis(self) -> list:
        return [_primitive(b) for b in self.basis]

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.ambient_dim == other.ambient_dim and self.basis == other.basis

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ambient_dim, self.basis))
        return self._hash

    def __repr__(self):
        return f"Subspace(ambient_dim={self.ambient_dim}, dim={self.dim})"

    def to_json(self) -> dict:
        return {
            "ambient_dim": self.ambient_dim,
            "basis": [[format_rational(x) for x in b] for b in self.basis],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Subspace":
        n = int(data["ambient_dim"])
        return cls(n, [[as_rational(x) for x in row] for row in data.get("basis", [])])


def _primitive(v) -> tuple:
    """Scale a rational vector to a primitive-ish integer vector (clears denominators)."""
    den = 1
    for x in v:
        if x:
            den = lcm(den, x.denominator)
    return tuple(int(x * den) for x in v)


def _same_ambient(a: Subspace, b: Subspace):
    if a.ambient_dim != b.ambient_dim:
        raise DimensionMismatch(f"ambient dimensions differ: {a.ambient_dim} vs {b.ambient_dim}")


def span(vectors: Iterable, ambient_dim: int) -> Subspace:
    vecs = [v.entries if isinstance(v, Mat) else v for v in vectors]
    for v in vecs:
        if len(v) != ambient_dim:
            raise DimensionMismatch(f"vector of length {len(v)} in ambient dimension {ambient_dim}")
    return Subspace(ambient_dim, vecs)


def contains(s: Subspace, v) -> bool:
    if isinstance(v, Mat):
        v = v.entries
    return s.contains(v)


def sum_spaces(a: Subspace, b: Subspace) -> Subspace:
    _same_ambient(a, b)
    ech = a.echelon()
    for v in b.basis:
        ech.add(v)
    return ech.freeze()


def null_space(rows: Sequence[Sequence], ncols: int) -> list:
    """Basis of {x : R x = 0} for the matrix with the given rows."""
    r = rref(Mat(len(rows), ncols, [x for row in rows for x in row])) if rows else None
    pivots = []
    reduced = []
    if r is not None:
        for i in range(r.rows):
            row = r.row(i)
            p = next((j for j, x in enumerate(row) if x), None)
            if p is None:
                break
            pivots.append(p)
            reduced.append(row)
    pivset = set(pivots)
    basis = []
    for f in range(ncols):
        if f in pivset:
            continue
        x = [ZERO] * ncols
        x[f] = ONE
        for p, row in zip(pivots, reduced):
            x[p] = -row[f]
        basis.append(tuple(x))
    return basis


def intersect(a: Subspace, b: Subspace) -> Subspace:
    """Intersection via the kernel of the stacked bases.

    A vector (alpha, beta) with sum(alpha_i a_i) - sum(beta_j b_j) = 0 yields
    the common element sum(alpha_i a_i).
    """
    _same_ambient(a, b)
    if a.dim == 0 or b.dim == 0:
        return Subspace.zero(a.ambient_dim)
    N, da, db = a.ambient_dim, a.dim, b.dim
    # columns of the stacked matrix are the basis vectors of a, then -b
    stacked = [[a.basis[i][k] for i in range(da)] + [-b.basis[j][k] for j in range(db)] for k in range(N)]
    kernel = null_space(stacked, da + db)
    ech = Echelon(N)
    for x in kernel:
        v = [ZERO] * N
        for i in range(da):
            c = x[i]
            if c:
                for k in a._supp[i]:
                    v[k] = compact(v[k] + c * a.basis[i][k])
        ech.add(v)
    return ech.freeze()


def solve(m: Mat, rhs: Sequence) -> tuple:
    """One exact solution of m x = rhs; raises Singular if inconsistent."""
    aug = Mat(m.rows, m.cols + 1, [x for i in range(m.rows) for x in (*m.row(i), as_rational(rhs[i]))])
    r = rref(aug)
    x = [ZERO] * m.cols
    for i in range(r.rows):
        row = r.row(i)
        p = next((j for j, v in enumerate(row) if v), None)
        if p is None:
            break
        if p == m.cols:
            raise Singular("inconsistent linear system")
        x[p] = row[m.cols]
    return tuple(x)
