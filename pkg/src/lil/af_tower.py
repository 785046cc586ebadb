"""Finite towers A_1 ⊆ A_2 ⊆ ... of digraph algebras under matrix-unit embeddings.

Each embedding sends a source matrix unit to a sum of target matrix units.
All checks run in the coordinates of the top level: an element of level q
is identified with its image at the top.
"""

from __future__ import annotations

import os
import random
from dataclasses import dataclass
from fractions import Fraction

from .algebra import DigraphAlgebra, Pattern, as_algebra, pi
from .errors import LilInputError, NotBlockIdeal, NotLieIdeal, TooLarge
from .exactmat import Mat, ONE, Subspace, ZERO, span
from .ideals import BlockIdeal, block_ideal_of, is_associative_ideal, to_subspace
from .lie import decompose, is_lie_ideal, lie_generate, maximal_addend

DEFAULT_MAX_N = 12


def max_n() -> int:
    return int(os.environ.get("LIL_MAX_N", DEFAULT_MAX_N))


@dataclass(frozen=True)
class Embedding:
    source: DigraphAlgebra
    target: DigraphAlgebra
    unit_map: dict
    multiplicity: int | None = None

    def image(self, x: Mat) -> Mat:
        """Linear extension of the unit map."""
        self.source.check_element(x)
        n = self.target.n
        out = [ZERO] * self.target.N
        for (i, j) in self.source.unit_pairs:
            c = x[i, j]
            if c:
                for a, b in self.unit_map[(i, j)]:
                    out[a * n + b] += c
        return Mat(n, n, out)

    def to_json(self) -> dict:
        return {
            "multiplicity": self.multiplicity,
            "unit_map": {
                f"{i + 1},{j + 1}": [[a + 1, b + 1] for a, b in pairs]
                for (i, j), pairs in sorted(self.unit_map.items())
            },
        }


def _closure(n, pairs) -> Pattern:
    rel = set(pairs) | {(i, i) for i in range(n)}
    succ = {i: {j for a, j in rel if a == i} for i in range(n)}
    changed = True
    while changed:
        changed = False
        for i in range(n):
            extra = set()
            for j in succ[i]:
                extra |= succ[j] - succ[i]
            if extra:
                succ[i] |= extra
                changed = True
    return Pattern(n, frozenset((i, j) for i in range(n) for j in succ[i]))


def standard_embedding(source, multiplicity: int, order: str = "interleaved", target=None) -> Embedding:
    """e_ij -> sum_r e_(i,r),(j,r).

    Source indices are first placed in the source's canonical block order.
    ``order='interleaved'`` puts copy r of position q at r*n + q (whole
    copies side by side, so each copy of a block stays contiguous);
    ``order='block'`` puts it at q*m + r.  ``target`` may be a Pattern or
    algebra, ``'upper'`` (closure of the image with the strict upper
    triangle) or ``'image'`` (closure of the image alone).  By default
    'upper' is used when the source blocks form a chain, 'image' otherwise.
    """
    src = as_algebra(source)
    m = int(multiplicity)
    if m < 1:
        raise LilInputError("multiplicity must be at least 1")
    n = src.n
    tn = n * m
    if tn > max_n():
        raise TooLarge(f"target size {tn} exceeds the cap {max_n()} (set LIL_MAX_N to raise it)")
    pos = {i: q for q, i in enumerate(src.structure.order)}
    if order == "interleaved":
        tau = lambda i, r: r * n + pos[i]
    elif order == "block":
        tau = lambda i, r: pos[i] * m + r
    else:
        raise LilInputError(f"unknown refinement order {order!r}")
    unit_map = {
        (i, j): tuple(sorted((tau(i, r), tau(j, r)) for r in range(m))) for i, j in src.unit_pairs
    }
    image_pairs = {ab for pairs in unit_map.values() for ab in pairs}
    if target is None:
        chain = len(src.strict_pairs) == src.p * (src.p - 1) // 2
        target = "upper" if chain else "image"
    if target == "upper":
        tgt = DigraphAlgebra(_closure(tn, image_pairs | {(a, b) for a in range(tn) for b in range(a + 1, tn)}))
    elif target == "image":
        tgt = DigraphAlgebra(_closure(tn, image_pairs))
    else:
        tgt = as_algebra(target)
        if tgt.n != tn:
            raise LilInputError(f"target must be {tn}x{tn}")
    for ab in image_pairs:
        if ab not in tgt.pattern.entries:
            raise LilInputError("image of the source leaves the target pattern")
    return Embedding(src, tgt, unit_map, m)


def explicit_embedding(source, target, unit_map: dict) -> Embedding:
    src, tgt = as_algebra(source), as_algebra(target)
    um = {}
    for ij in src.unit_pairs:
        if ij not in unit_map:
            raise LilInputError(f"unit map misses source unit ({ij[0] + 1},{ij[1] + 1})")
        um[ij] = tuple(sorted((int(a), int(b)) for a, b in unit_map[ij]))
    return Embedding(src, tgt, um, None)


def check_embedding(emb: Embedding) -> dict:
    """Homomorphism residual (exact), unitality, injectivity and pattern containment."""
    src, tgt = emb.source, emb.target
    tn = tgt.n
    img = {}
    for ij in src.unit_pairs:
        v = [0] * tgt.N
        for a, b in emb.unit_map[ij]:
            v[a * tn + b] += 1
        img[ij] = v
    residual = 0
    for (i, j) in src.unit_pairs:
        for (k, l) in src.unit_pairs:
            prod = _int_mul(img[(i, j)], img[(k, l)], tn)
            expect = img[(i, l)] if j == k else [0] * tgt.N
            residual = max(residual, max(abs(a - b) for a, b in zip(prod, expect)))
    ident = [0] * tgt.N
    for i in range(src.n):
        ident = [a + b for a, b in zip(ident, img[(i, i)])]
    unital = ident == [1 if a == b else 0 for a in range(tn) for b in range(tn)]
    supports = [frozenset(emb.unit_map[ij]) for ij in src.unit_pairs]
    injective = all(supports) and len(set().union(*supports)) == sum(len(s) for s in supports)
    in_pattern = all(ab in tgt.pattern.entries for s in supports for ab in s)
    diag_to_diag = all(a == b for i in range(src.n) for a, b in emb.unit_map[(i, i)])
    return {
        "homomorphism_residual": residual,
        "unital": unital,
        "injective": injective,
        "in_target_pattern": in_pattern,
        "diagonal_to_diagonal": diag_to_diag,
        "ok": residual == 0 and unital and injective and in_pattern and diag_to_diag,
    }


def _int_mul(a, b, n):
    out = [0] * (n * n)
    for i in range(n):
        for k in range(n):
            x = a[i * n + k]
            if x:
                for j in range(n):
                    y = b[k * n + j]
                    if y:
                        out[i * n + j] += x * y
    return out


def pi_compatibility(emb: Embedding) -> bool:
    """π_target ∘ ι = ι ∘ π_source on every source unit (hence on everything)."""
    for i, j in emb.source.unit_pairs:
        e = emb.source.unit(i, j)
        if pi(emb.target, emb.image(e)) != emb.image(pi(emb.source, e)):
            return False
    return True


class Tower:
    """Levels A_1, ..., A_top with embeddings between consecutive levels."""

    def __init__(self, levels, embeddings):
        self.levels = [as_algebra(a) for a in levels]
        self.embeddings = list(embeddings)
        if len(self.embeddings) != len(self.levels) - 1:
            raise LilInputError("a tower with L levels needs L-1 embeddings")
        for q, emb in enumerate(self.embeddings):
            if emb.source != self.levels[q] or emb.target != self.levels[q + 1]:
                raise LilInputError(f"embedding {q + 1} does not connect levels {q + 1} and {q + 2}")
        self._top_maps = None

    @classmethod
    def from_multiplicities(cls, source, multiplicities, order="interleaved", targets=None) -> "Tower":
        levels = [as_algebra(source)]
        embs = []
        targets = targets or [None] * len(multiplicities)
        for m, tgt in zip(multiplicities, targets):
            emb = standard_embedding(levels[-1], m, order=order, target=tgt)
            embs.append(emb)
            levels.append(emb.target)
        return cls(levels, embs)

    @property
    def top(self) -> DigraphAlgebra:
        return self.levels[-1]

    @property
    def depth(self) -> int:
        return len(self.levels)

    def top_unit_map(self, q: int) -> dict:
        """Level-q unit -> tuple of top-level unit pairs (0-based level index)."""
        if self._top_maps is None:
            maps = [None] * self.depth
            maps[-1] = {ij: (ij,) for ij in self.top.unit_pairs}
            for lvl in range(self.depth - 2, -1, -1):
                emb, above = self.embeddings[lvl], maps[lvl + 1]
                maps[lvl] = {
                    ij: tuple(sorted(ab for mid in emb.unit_map[ij] for ab in above[mid]))
                    for ij in self.levels[lvl].unit_pairs
                }
            self._top_maps = maps
        if not 0 <= q < self.depth:
            raise LilInputError(f"level {q + 1} out of range 1..{self.depth}")
        return self._top_maps[q]

    def to_top(self, q: int, x: Mat) -> Mat:
        n = self.top.n
        out = [ZERO] * self.top.N
        for ij, pairs in self.top_unit_map(q).items():
            c = x[ij]
            if c:
                for a, b in pairs:
                    out[a * n + b] += c
        return Mat(n, n, out)

    def level_subspace(self, q: int) -> Subspace:
        """Image of level q inside the top algebra."""
        n = self.top.n
        vecs = []
        for pairs in self.top_unit_map(q).values():
            v = [ZERO] * self.top.N
            for a, b in pairs:
                v[a * n + b] = ONE
            vecs.append(v)
        return span(vecs, self.top.N)

    def diagonal_projections(self, q: int) -> list:
        """Top-level images of the level-q minimal diagonal projections e_ii."""
        lvl = self.levels[q]
        return [self.to_top(q, lvl.unit(i, i)) for i in range(lvl.n)]


def pi_n(tower: Tower, q: int, x: Mat) -> Mat:
    """Compression of a top-level element by the images of level-q diagonal units."""
    projs = tower.diagonal_projections(q)
    out = Mat.zeros(tower.top.n)
    for d in projs:
        out = out + d @ x @ d
    return out


def lemma_row_check(p, L: Subspace, trials: int = 0, seed: int = 0, projections=None) -> dict:
    """d_i f - d_i f d_i stays in L, and equals (1/2)([d_i,f] + sum_{j≠i}[d_i,[f,d_j]]).

    ``projections`` defaults to the diagonal units of the algebra; any family
    of diagonal projections summing to the identity (e.g. images of a lower
    level's diagonal units) may be supplied.
    """
    alg = as_algebra(p)
    verdict = is_lie_ideal(alg, L)
    if not verdict:
        raise NotLieIdeal(verdict.witness)
    ds = projections if projections is not None else [alg.unit(i, i) for i in range(alg.n)]
    total = Mat.zeros(alg.n)
    for d in ds:
        total = total + d
    if total != Mat.identity(alg.n):
        raise LilInputError("projections must sum to the identity")
    n = alg.n
    basis = [Mat(n, n, b) for b in L.basis]
    pairs = [(f, i) for f in basis for i in range(len(ds))]
    rng = random.Random(seed)
    for _ in range(trials):
        if not basis:
            break
        f = Mat.zeros(n)
        for b in basis:
            f = f + b * rng.randint(-3, 3)
        pairs.append((f, rng.randrange(len(ds))))
    membership_fail = identity_fail = 0
    for f, i in pairs:
        d = ds[i]
        lhs = d @ f - d @ f @ d
        if not L.contains(lhs.entries):
            membership_fail += 1
        acc = d @ f - f @ d
        for j, dj in enumerate(ds):
            if j != i:
                inner = f @ dj - dj @ f
                acc = acc + (d @ inner - inner @ d)
        if acc * Fraction(1, 2) != lhs:
            identity_fail += 1
    return {
        "pairs_checked": len(pairs),
        "membership_failures": membership_fail,
        "identity_failures": identity_fail,
        "ok": membership_fail == 0 and identity_fail == 0,
    }


def inductivity_check(tower: Tower, k: BlockIdeal) -> dict:
    """K ∩ (image of level q) is spanned by the level-q units it contains, and grows with q."""
    top = tower.top
    K = to_subspace(top, k)
    if not is_associative_ideal(top, K):
        raise LilInputError("K is not an associative ideal of the top algebra")
    if not k.is_offdiagonal:
        raise LilInputError("K must be off-diagonal")
    n = top.n
    levels = []
    prev = None
    ok = True
    for q in range(tower.depth):
        Kq = K & tower.level_subspace(q)
        units_in = []
        level_units = []
        for ij, pairs in tower.top_unit_map(q).items():
            v = [ZERO] * top.N
            for a, b in pairs:
                v[a * n + b] = ONE
            if K.contains(v):
                units_in.append(v)
                level_units.append(ij)
        spanned = span(units_in, top.N) == Kq
        nested = prev is None or prev.issubset(Kq)
        lvl = tower.levels[q]
        pulled = span([lvl.unit(i, j) for i, j in level_units], lvl.N)
        ideal_at_level = bool(is_associative_ideal(lvl, pulled))
        ok = ok and spanned and nested and ideal_at_level
        levels.append({
            "level": q + 1,
            "dim": Kq.dim,
            "spanned_by_units": spanned,
            "nested": nested,
            "ideal_at_level": ideal_at_level,
        })
        prev = Kq
    union_spans = prev == K
    return {"levels": levels, "union_spans_K": union_spans, "ok": ok and union_spans}


def constraint_space(p, k: BlockIdeal) -> Subspace:
    """E_K = {d diagonal : d_ii = d_jj whenever (i, j) is a strict pair outside K}.

    Only meaningful for triangular algebras, where blocks are single indices.
    """
    alg = as_algebra(p)
    if not alg.is_triangular:
        raise LilInputError("E_K is defined here for triangular algebras only")
    n = alg.n
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for u, v in set(alg.strict_pairs) - k.pairs:
        i, j = alg.structure.blocks[u][0], alg.structure.blocks[v][0]
        parent[find(i)] = find(j)
    classes = {}
    for i in range(n):
        classes.setdefault(find(i), []).append(i)
    vecs = []
    for members in classes.values():
        v = [ZERO] * alg.N
        for i in members:
            v[i * n + i] = ONE
        vecs.append(v)
    return span(vecs, alg.N)


def theorem_lieform_check(tower: Tower, generators, seed: int = 0) -> dict:
    """Generate L at the top, split it as F + K and check the structure of both parts."""
    top = tower.top
    if not top.is_triangular:
        raise LilInputError("the tower's top level must be triangular")
    L = lie_generate(top, generators)
    G, K = decompose(top, L)
    try:
        k = block_ideal_of(top, K)
        full_blocks = True
    except NotBlockIdeal:
        return {"dim_L": L.dim, "full_blocks": False, "ok": False}
    assoc = bool(is_associative_ideal(top, K))
    induct = inductivity_check(tower, k)
    EK = constraint_space(top, k)
    F_in_EK = G.issubset(EK)
    maximal_is_lie = bool(is_lie_ideal(top, EK + K))
    F_max, _ = maximal_addend(top, k)
    rng = random.Random(seed)
    sub = []
    for _ in range(rng.randint(0, EK.dim)):
        coeffs = [rng.randint(-2, 2) for _ in EK.basis]
        sub.append([sum(c * b[t] for c, b in zip(coeffs, EK.basis)) for t in range(top.N)])
    random_sub_is_lie = bool(is_lie_ideal(top, span(sub, top.N) + K))
    ok = full_blocks and assoc and induct["ok"] and F_in_EK and maximal_is_lie and random_sub_is_lie and F_max == EK
    return {
        "dim_L": L.dim,
        "dim_F": G.dim,
        "dim_K": K.dim,
        "K": k.to_json(),
        "full_blocks": full_blocks,
        "K_associative": assoc,
        "K_inductive": induct["ok"],
        "F_in_E_K": F_in_EK,
        "E_K_plus_K_is_lie": maximal_is_lie,
        "random_subspace_of_E_K_plus_K_is_lie": random_sub_is_lie,
        "E_K_equals_maximal_addend": F_max == EK,
        "ok": ok,
    }


def random_generators(tower: Tower, rng: random.Random, count: int | None = None) -> list:
    """A few sparse top-level elements, some lifted from lower levels."""
    count = count if count is not None else rng.randint(1, 3)
    out = []
    for _ in range(count):
        q = rng.randrange(tower.depth)
        lvl = tower.levels[q]
        x = [ZERO] * lvl.N
        for _ in range(rng.randint(1, 3)):
            i, j = rng.choice(lvl.unit_pairs)
            x[i * lvl.n + j] += rng.choice((-2, -1, 1, 2, 3))
        out.append(tower.to_top(q, Mat(lvl.n, lvl.n, x)))
    return out
