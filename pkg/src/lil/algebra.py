"""Digraph (incidence) algebras built from 0/* patterns.

Indices are 0-based throughout the Python API; the pattern file format and
the CLI present them 1-based.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product

from .errors import NotReflexive, NotTransitive, PatternError, SupportError, DimensionMismatch
from .exactmat import Mat, Subspace, ZERO, ONE


@dataclass(frozen=True)
class Pattern:
    n: int
    entries: frozenset

    def __post_init__(self):
        object.__setattr__(self, "entries", frozenset((int(i), int(j)) for i, j in self.entries))
        for i, j in self.entries:
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise PatternError(f"entry ({i + 1},{j + 1}) outside a {self.n}x{self.n} pattern")

    @classmethod
    def from_rows(cls, rows) -> "Pattern":
        """Build from strings like ``"**."`` (``*`` = present)."""
        rows = ["".join(r.split()) for r in rows]
        n = len(rows)
        for r in rows:
            if len(r) != n or set(r) - {"*", "."}:
                raise PatternError(f"bad pattern row {r!r}")
        return cls(n, frozenset((i, j) for i, r in enumerate(rows) for j, c in enumerate(r) if c == "*"))

    @classmethod
    def upper_triangular(cls, n: int) -> "Pattern":
        return cls(n, frozenset((i, j) for i in range(n) for j in range(i, n)))

    @classmethod
    def full(cls, n: int) -> "Pattern":
        return cls(n, frozenset(product(range(n), repeat=2)))

    @classmethod
    def diagonal(cls, n: int) -> "Pattern":
        return cls(n, frozenset((i, i) for i in range(n)))

    def rows(self) -> list:
        return ["".join("*" if (i, j) in self.entries else "." for j in range(self.n)) for i in range(self.n)]

    def __contains__(self, ij):
        return ij in self.entries


@dataclass(frozen=True)
class BlockStructure:
    """Blocks (minimal central projections of the diagonal part) in canonical order.

    ``blocks[u]`` lists the original indices of block ``u``; ``order`` is the
    permutation of indices that makes the pattern block upper triangular;
    ``poset`` holds strict block pairs ``(u, v)`` with a nonzero corner,
    always ``u < v`` in canonical numbering.
    """

    blocks: tuple
    order: tuple
    poset: frozenset
    block_of: tuple = field(repr=False)

    @property
    def p(self) -> int:
        return len(self.blocks)

    def sizes(self) -> tuple:
        return tuple(len(b) for b in self.blocks)

    def to_json(self) -> dict:
        return {
            "blocks": [[i + 1 for i in b] for b in self.blocks],
            "order": [i + 1 for i in self.order],
            "poset": [[u + 1, v + 1] for u, v in sorted(self.poset)],
        }


def validate_pattern(p: Pattern) -> BlockStructure:
    """Check that ``p`` defines an algebra and compute its block structure.

    Raises NotReflexive / NotTransitive.  Blocks are the classes of the
    relation "both (i,j) and (j,i) present"; they are ordered topologically
    along the block poset, choosing among available blocks the one holding
    the smallest original index.
    """
    n, E = p.n, p.entries
    for i in range(n):
        if (i, i) not in E:
            raise NotReflexive(i)
    succ = [sorted(j for j in range(n) if (i, j) in E) for i in range(n)]
    for i in range(n):
        for j in succ[i]:
            for k in succ[j]:
                if (i, k) not in E:
                    raise NotTransitive(i, j, k)

    classes = []
    seen = set()
    for i in range(n):
        if i in seen:
            continue
        cls = tuple(j for j in range(n) if (i, j) in E and (j, i) in E)
        seen.update(cls)
        classes.append(cls)
    label = {}
    for c, cls in enumerate(classes):
        for i in cls:
            label[i] = c
    preds = {c: set() for c in range(len(classes))}
    for i, j in E:
        a, b = label[i], label[j]
        if a != b:
            preds[b].add(a)

    # Kahn's algorithm, keyed by each block's smallest index
    remaining = {c: set(s) for c, s in preds.items()}
    heap = [(classes[c][0], c) for c, s in remaining.items() if not s]
    heapq.heapify(heap)
    ordered = []
    while heap:
        _, c = heapq.heappop(heap)
        ordered.append(c)
        for d, s in remaining.items():
            if c in s:
                s.discard(c)
                if not s:
                    heapq.heappush(heap, (classes[d][0], d))
    canon = {c: u for u, c in enumerate(ordered)}
    blocks = tuple(classes[c] for c in ordered)
    block_of = [0] * n
    for u, b in enumerate(blocks):
        for i in b:
            block_of[i] = u
    poset = frozenset((canon[a], canon[b]) for b, s in preds.items() for a in s)
    order = tuple(i for b in blocks for i in b)
    return BlockStructure(blocks, order, poset, tuple(block_of))


class DigraphAlgebra:
    """The algebra of all n x n matrices supported on a valid pattern."""

    def __init__(self, pattern: Pattern):
        self.pattern = pattern
        self.structure = validate_pattern(pattern)

    @classmethod
    def from_rows(cls, rows) -> "DigraphAlgebra":
        return cls(Pattern.from_rows(rows))

    @classmethod
    def upper_triangular(cls, n: int) -> "DigraphAlgebra":
        return cls(Pattern.upper_triangular(n))

    @classmethod
    def full(cls, n: int) -> "DigraphAlgebra":
        return cls(Pattern.full(n))

    @property
    def n(self) -> int:
        return self.pattern.n

    @property
    def N(self) -> int:
        """Ambient dimension n*n."""
        return self.pattern.n ** 2

    @property
    def p(self) -> int:
        return self.structure.p

    def block_of(self, i: int) -> int:
        return self.structure.block_of[i]

    @cached_property
    def unit_pairs(self) -> tuple:
        return tuple(sorted(self.pattern.entries))

    @cached_property
    def block_relation(self) -> frozenset:
        """Reflexive block order: (u, v) present iff the (u, v) corner is nonzero."""
        return self.structure.poset | {(u, u) for u in range(self.p)}

    @cached_property
    def strict_pairs(self) -> tuple:
        return tuple(sorted(self.structure.poset))

    @property
    def is_triangular(self) -> bool:
        return all(len(b) == 1 for b in self.structure.blocks)

    def unit(self, i: int, j: int) -> Mat:
        return Mat.unit(self.n, i, j)

    def identity(self) -> Mat:
        return Mat.identity(self.n)

    def block_identity(self, u: int) -> Mat:
        e = [ZERO] * self.N
        for i in self.structure.blocks[u]:
            e[i * self.n + i] = ONE
        return Mat(self.n, self.n, e)

    @cached_property
    def subspace(self) -> Subspace:
        return _unit_span(self.n, self.unit_pairs)

    @cached_property
    def E(self) -> Subspace:
        return _unit_span(self.n, [(i, j) for i, j in self.unit_pairs if self.block_of(i) == self.block_of(j)])

    @cached_property
    def S(self) -> Subspace:
        return _unit_span(self.n, [(i, j) for i, j in self.unit_pairs if self.block_of(i) != self.block_of(j)])

    @cached_property
    def diagonal_mask(self) -> tuple:
        """Coordinates kept by the conditional expectation."""
        n, bo = self.n, self.structure.block_of
        return tuple(bo[k // n] == bo[k % n] for k in range(n * n))

    def supports(self, x) -> bool:
        v = x.entries if isinstance(x, Mat) else x
        n = self.n
        return all(not c or (k // n, k % n) in self.pattern.entries for k, c in enumerate(v))

    def check_element(self, x: Mat):
        if (x.rows, x.cols) != (self.n, self.n):
            raise DimensionMismatch(f"expected a {self.n}x{self.n} matrix, got {x.rows}x{x.cols}")
        if not self.supports(x):
            bad = sorted(ij for ij in x.support() if ij not in self.pattern.entries)[0]
            raise SupportError(f"entry ({bad[0] + 1},{bad[1] + 1}) lies outside the pattern")

    def pi_vec(self, v) -> list:
        return [c if keep else ZERO for c, keep in zip(v, self.diagonal_mask)]

    def __eq__(self, other):
        return isinstance(other, DigraphAlgebra) and self.pattern == other.pattern

    def __hash__(self):
        return hash(self.pattern)

    def __repr__(self):
        return f"DigraphAlgebra(n={self.n}, blocks={self.structure.sizes()})"


def _unit_span(n, pairs) -> Subspace:
    # units are already in RREF once sorted by coordinate
    coords = sorted(i * n + j for i, j in pairs)
    basis = tuple(tuple(ONE if k == c else ZERO for k in range(n * n)) for c in coords)
    return Subspace._raw(n * n, basis, tuple(coords))


def as_algebra(p) -> DigraphAlgebra:
    return p if isinstance(p, DigraphAlgebra) else DigraphAlgebra(p)


def matrix_units(p) -> list:
    alg = as_algebra(p)
    return [alg.unit(i, j) for i, j in alg.unit_pairs]


def diag_offdiag_split(p) -> tuple:
    alg = as_algebra(p)
    return alg.E, alg.S


def pi(p, x: Mat) -> Mat:
    """Block-diagonal compression x -> sum_u f_u x f_u.

    Defined on every n x n matrix; ``p`` may be a pattern or an algebra.
    """
    alg = as_algebra(p)
    if (x.rows, x.cols) != (alg.n, alg.n):
        raise DimensionMismatch(f"expected a {alg.n}x{alg.n} matrix")
    return Mat._raw(alg.n, alg.n, tuple(alg.pi_vec(x.entries)))


def bracket(x: Mat, y: Mat) -> Mat:
    if not (x.is_square and y.is_square and x.rows == y.rows):
        raise DimensionMismatch("bracket needs square matrices of equal size")
    return x @ y - y @ x


def unit_bracket_vec(n: int, i: int, j: int, v) -> list:
    """Coordinates of [e_ij, X] for X given by its coordinate vector.

    e_ij X has row i equal to row j of X; X e_ij has column j equal to
    column i of X.
    """
    out = [ZERO] * (n * n)
    ri, rj = i * n, j * n
    for c in range(n):
        x = v[rj + c]
        if x:
            out[ri + c] += x
    for r in range(n):
        x = v[r * n + i]
        if x:
            out[r * n + j] -= x
    return out


def unit_mul_vec(n: int, i: int, j: int, v, side: str) -> list:
    """Coordinates of e_ij X (side='left') or X e_ij (side='right')."""
    out = [ZERO] * (n * n)
    if side == "left":
        for c in range(n):
            out[i * n + c] = v[j * n + c]
    else:
        for r in range(n):
            out[r * n + j] = v[r * n + i]
    return out


def read_pattern(text: str) -> Pattern:
    """Parse the ``.pat`` format: ``n <size>`` then n rows over {*, .}; '#' comments."""
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    if not lines:
        raise PatternError("empty pattern file")
    head = lines[0].split()
    if len(head) != 2 or head[0] != "n" or not head[1].isdigit():
        raise PatternError(f"expected header 'n <size>', got {lines[0]!r}")
    n = int(head[1])
    rows = lines[1:]
    if len(rows) != n:
        raise PatternError(f"expected {n} pattern rows, got {len(rows)}")
    return Pattern.from_rows(rows)


def write_pattern(p: Pattern) -> str:
    return "\n".join([f"n {p.n}", *p.rows()]) + "\n"


def random_element(alg: DigraphAlgebra, rng, lo: int = -3, hi: int = 3, density: float = 1.0) -> Mat:
    e = [ZERO] * alg.N
    for i, j in alg.unit_pairs:
        if density >= 1.0 or rng.random() < density:
            e[i * alg.n + j] = rng.randint(lo, hi)
    return Mat._raw(alg.n, alg.n, tuple(e))
