"""Associative ideals made of full blocks.

An ideal is described by the set of block pairs ``(u, v)`` whose corner
``f_u A f_v`` it contains.  Such a set must be closed "above and to the
right": with ``(u, v)`` it contains every ``(t, s)`` with ``t <= u`` and
``v <= s`` in the block order (non-strict on both sides).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import NamedTuple

from .algebra import DigraphAlgebra, as_algebra, unit_mul_vec
from .errors import LilInputError, NotBlockIdeal, TooLarge, SupportError
from .exactmat import Mat, Subspace, ONE, ZERO, Echelon

DEFAULT_PAIR_CAP = 24


@dataclass(frozen=True)
class BlockIdeal:
    pairs: frozenset

    def __post_init__(self):
        object.__setattr__(self, "pairs", frozenset((int(u), int(v)) for u, v in self.pairs))

    @property
    def is_offdiagonal(self) -> bool:
        return all(u != v for u, v in self.pairs)

    def sorted_pairs(self) -> list:
        return sorted(self.pairs)

    def sort_key(self):
        return (len(self.pairs), self.sorted_pairs())

    def __len__(self):
        return len(self.pairs)

    def to_json(self) -> list:
        return [[u + 1, v + 1] for u, v in self.sorted_pairs()]


class Verdict(NamedTuple):
    ok: bool
    witness: tuple | None = None

    def __bool__(self):
        return self.ok


def ideal_closure(p, seed) -> BlockIdeal:
    """Smallest up-closed block set containing ``seed``.

    The block relation is transitive, so one step of closure suffices.
    """
    alg = as_algebra(p)
    R = alg.block_relation
    seed = {(int(u), int(v)) for u, v in seed}
    for pair in seed:
        if pair not in R:
            raise LilInputError(f"block pair ({pair[0] + 1},{pair[1] + 1}) is not in the block pattern")
    below = {v: [t for t in range(alg.p) if (t, v) in R] for v in range(alg.p)}
    above = {u: [s for s in range(alg.p) if (u, s) in R] for u in range(alg.p)}
    out = set()
    for u, v in seed:
        for t in below[u]:
            for s in above[v]:
                out.add((t, s))
    return BlockIdeal(frozenset(out))


def is_up_closed(alg: DigraphAlgebra, pairs) -> bool:
    return ideal_closure(alg, pairs).pairs == frozenset(pairs)


def _antichains(elements, le):
    """All antichains of a finite poset, by backtracking over a fixed order."""
    m = len(elements)
    comparable = [[le(a, b) or le(b, a) for b in elements] for a in elements]
    chosen = []

    def rec(start):
        yield tuple(chosen)
        for i in range(start, m):
            if all(not comparable[i][j] for j in chosen):
                chosen.append(i)
                yield from rec(i + 1)
                chosen.pop()

    for idx in rec(0):
        yield [elements[i] for i in idx]


def enumerate_offdiag_ideals(p, cap: int = DEFAULT_PAIR_CAP) -> list:
    """Every up-closed set of strict block pairs, sorted by (size, pair list).

    Up-sets correspond one-to-one with their antichains of minimal elements.
    """
    alg = as_algebra(p)
    strict = list(alg.strict_pairs)
    if len(strict) > cap:
        raise TooLarge(f"{len(strict)} strict block pairs exceed the enumeration cap {cap}")
    R = alg.block_relation

    def le(a, b):
        # b lies above-right of a
        return (b[0], a[0]) in R and (a[1], b[1]) in R

    ideals = set()
    for anti in _antichains(strict, le):
        k = ideal_closure(alg, anti)
        if ideal_closure(alg, k.pairs) != k:
            raise AssertionError("closure is not idempotent")
        ideals.add(k)
    return sorted(ideals, key=BlockIdeal.sort_key)


def brute_force_offdiag_ideals(p) -> list:
    """Oracle: filter all subsets of the strict pairs for up-closure."""
    alg = as_algebra(p)
    strict = list(alg.strict_pairs)
    out = []
    for r in range(len(strict) + 1):
        for subset in combinations(strict, r):
            if is_up_closed(alg, subset):
                out.append(BlockIdeal(frozenset(subset)))
    return sorted(out, key=BlockIdeal.sort_key)


def pairs_to_units(alg: DigraphAlgebra, pairs) -> list:
    blocks = alg.structure.blocks
    return sorted((i, j) for u, v in pairs for i in blocks[u] for j in blocks[v])


def to_subspace(p, k: BlockIdeal) -> Subspace:
    alg = as_algebra(p)
    n = alg.n
    coords = sorted(i * n + j for i, j in pairs_to_units(alg, k.pairs))
    basis = tuple(tuple(ONE if c == d else ZERO for c in range(alg.N)) for d in coords)
    return Subspace._raw(alg.N, basis, tuple(coords))


def block_ideal_of(p, s: Subspace) -> BlockIdeal:
    """The block set whose full-block span equals ``s``; raises NotBlockIdeal."""
    alg = as_algebra(p)
    n = alg.n
    hit = set()
    for b in s.basis:
        for c, x in enumerate(b):
            if x:
                hit.add((alg.block_of(c // n), alg.block_of(c % n)))
    k = BlockIdeal(frozenset(hit))
    if to_subspace(alg, k) != s:
        raise NotBlockIdeal("subspace is not a union of full blocks")
    return k


def _check_inside(alg: DigraphAlgebra, s: Subspace):
    if s.ambient_dim != alg.N:
        raise LilInputError(f"subspace ambient dimension {s.ambient_dim} != {alg.N}")
    if not s.issubset(alg.subspace):
        raise SupportError("subspace is not contained in the algebra")


def is_associative_ideal(p, s: Subspace) -> Verdict:
    """Two-sided ideal test over units x basis; witness is (unit, basis row, side)."""
    alg = as_algebra(p)
    _check_inside(alg, s)
    n = alg.n
    for i, j in alg.unit_pairs:
        for b in s.basis:
            for side in ("left", "right"):
                if not s.contains(unit_mul_vec(n, i, j, b, side)):
                    return Verdict(False, (alg.unit(i, j), Mat(n, n, b), side))
    return Verdict(True)


def generate_associative_ideal(p, gens) -> Subspace:
    """Oracle: multiply by units on both sides until the span stops growing."""
    alg = as_algebra(p)
    n = alg.n
    ech = Echelon(alg.N)
    frontier = []
    for g in gens:
        v = g.entries if isinstance(g, Mat) else g
        if ech.add(v):
            frontier.append(list(v))
    while frontier:
        new = []
        for v in frontier:
            for i, j in alg.unit_pairs:
                for side in ("left", "right"):
                    w = unit_mul_vec(n, i, j, v, side)
                    if ech.add(w):
                        new.append(w)
        frontier = new
    return ech.freeze()
