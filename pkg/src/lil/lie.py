"""Lie ideals of digraph algebras.

Every Lie ideal splits as ``L = G + K`` with ``K = L ∩ S`` an associative
ideal made of full off-diagonal blocks and ``G = π(L)`` a Lie addend for
``K``.  Addends are described per block by one of four kinds (zero, scalar,
trace-zero, full) plus linear relations among the block scalars.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .algebra import DigraphAlgebra, as_algebra, unit_bracket_vec
from .errors import AddendRejected, LilInputError, NotLieIdeal, SupportError
from .exactmat import Echelon, Mat, ONE, Subspace, ZERO, compact, null_space, span
from .ideals import BlockIdeal, Verdict, block_ideal_of, enumerate_offdiag_ideals, to_subspace

KINDS = ("zero", "scalar", "trace_zero", "full")


def _check_domain(alg: DigraphAlgebra, s: Subspace, ambient: bool):
    if s.ambient_dim != alg.N:
        raise LilInputError(f"subspace ambient dimension {s.ambient_dim} != {alg.N}")
    if not ambient and not s.issubset(alg.subspace):
        raise SupportError("subspace is not contained in the algebra")


def is_lie_ideal(p, s: Subspace, ambient: bool = False) -> Verdict:
    """Check [e, b] in s for every matrix unit e of the algebra and basis row b.

    Units suffice because the bracket is bilinear and units span the algebra.
    With ``ambient=True`` the subspace may be any subspace of M_n (a Lie
    subspace over the algebra inside the full matrix bimodule).
    """
    alg = as_algebra(p)
    _check_domain(alg, s, ambient)
    n = alg.n
    for i, j in alg.unit_pairs:
        for b in s.basis:
            if not s.contains(unit_bracket_vec(n, i, j, b)):
                return Verdict(False, (alg.unit(i, j), Mat(n, n, b)))
    return Verdict(True)


def lie_generate(p, gens, ambient: bool = False) -> Subspace:
    """Smallest Lie ideal (Lie subspace if ``ambient``) containing ``gens``.

    Each round brackets every unit with the vectors that entered in the
    previous round; brackets of older vectors are already in the span.
    """
    alg = as_algebra(p)
    n = alg.n
    ech = Echelon(alg.N)
    frontier = []
    for g in gens:
        if isinstance(g, Mat):
            if not ambient:
                alg.check_element(g)
            v = list(g.entries)
        else:
            v = list(g)
            if not ambient and not alg.supports(v):
                raise SupportError("generator lies outside the algebra")
        if ech.add(v):
            frontier.append(v)
    cap = alg.N if ambient else len(alg.unit_pairs)
    while frontier and ech.dim < cap:
        new = []
        for v in frontier:
            for i, j in alg.unit_pairs:
                w = unit_bracket_vec(n, i, j, v)
                if ech.add(w):
                    new.append(w)
        frontier = new
    return ech.freeze()


def decompose(p, L: Subspace) -> tuple:
    """Split a Lie ideal into (G, K) with G = π(L) and K = L ∩ S.

    Raises NotLieIdeal when ``L`` fails the bracket test.
    """
    alg = as_algebra(p)
    verdict = is_lie_ideal(alg, L)
    if not verdict:
        raise NotLieIdeal(verdict.witness)
    mask = alg.diagonal_mask
    g_ech, k_ech = Echelon(alg.N), Echelon(alg.N)
    for b in L.basis:
        g_ech.add([c if keep else ZERO for c, keep in zip(b, mask)])
        k_ech.add([ZERO if keep else c for c, keep in zip(b, mask)])
    return g_ech.freeze(), k_ech.freeze()


@dataclass(frozen=True)
class ConstraintGraph:
    """Blocks joined by strict pairs that the ideal K leaves out."""

    nodes: tuple
    edges: tuple
    components: tuple
    free_nodes: tuple

    def component_of(self, u):
        for c in self.components:
            if u in c:
                return c
        return None

    def to_json(self) -> dict:
        return {
            "edges": [[u + 1, v + 1] for u, v in self.edges],
            "components": [[u + 1 for u in c] for c in self.components],
            "free_nodes": [u + 1 for u in self.free_nodes],
        }


def constraint_graph(p, k: BlockIdeal) -> ConstraintGraph:
    alg = as_algebra(p)
    edges = tuple(sorted(set(alg.strict_pairs) - k.pairs))
    parent = list(range(alg.p))

    def find(u):
        while parent[u] != u:
            parent[u] = parent[parent[u]]
            u = parent[u]
        return u

    for u, v in edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[max(ru, rv)] = min(ru, rv)
    touched = {u for e in edges for u in e}
    groups = {}
    for u in sorted(touched):
        groups.setdefault(find(u), []).append(u)
    components = tuple(sorted(tuple(g) for g in groups.values()))
    free = tuple(u for u in range(alg.p) if u not in touched)
    return ConstraintGraph(tuple(range(alg.p)), edges, components, free)


def _traceless_block_vectors(alg: DigraphAlgebra, u: int) -> list:
    n, b = alg.n, alg.structure.blocks[u]
    out = []
    for i in b:
        for j in b:
            if i != j:
                v = [ZERO] * alg.N
                v[i * n + j] = ONE
                out.append(v)
    for i in b[1:]:
        v = [ZERO] * alg.N
        v[b[0] * n + b[0]] = ONE
        v[i * n + i] = -ONE
        out.append(v)
    return out


def _full_block_vectors(alg: DigraphAlgebra, u: int) -> list:
    n, b = alg.n, alg.structure.blocks[u]
    out = []
    for i in b:
        for j in b:
            v = [ZERO] * alg.N
            v[i * n + j] = ONE
            out.append(v)
    return out


def maximal_addend(p, k: BlockIdeal) -> tuple:
    """The largest Lie addend F for K, with the constraint graph used to build it.

    Free blocks contribute their full block algebra; each constrained
    component contributes the sum of its block identities.
    """
    alg = as_algebra(p)
    cg = constraint_graph(alg, k)
    vecs = []
    for u in cg.free_nodes:
        vecs.extend(_full_block_vectors(alg, u))
    for comp in cg.components:
        vecs.append(list(sum((alg.block_identity(u) for u in comp), Mat.zeros(alg.n)).entries))
    return span(vecs, alg.N), cg


def scalar_coordinates(alg: DigraphAlgebra, v) -> tuple:
    """Normalized block traces tr(f_u x f_u) / |B_u| of a coordinate vector."""
    n = alg.n
    return tuple(
        compact(Fraction(sum(v[i * n + i] for i in b)) / len(b)) for b in alg.structure.blocks
    )


def _compression(alg: DigraphAlgebra, u: int, G: Subspace) -> Subspace:
    n, b = alg.n, alg.structure.blocks[u]
    m = len(b)
    return span([[g[i * n + j] for i in b for j in b] for g in G.basis], m * m)


def _block_kind(comp: Subspace, m: int):
    if comp.dim == 0:
        return "zero"
    if m == 1:
        return "scalar"
    if comp.dim == 1:
        v = comp.basis[0]
        if all(v[a * m + c] == (ONE if a == c else ZERO) for a in range(m) for c in range(m)):
            return "scalar"
        return None
    if comp.dim == m * m:
        return "full"
    if comp.dim == m * m - 1 and all(sum(v[a * m + a] for a in range(m)) == 0 for v in comp.basis):
        return "trace_zero"
    return None


@dataclass(frozen=True)
class LieIdealDescriptor:
    """Symbolic form of a Lie ideal G + K.

    ``relations`` is the subspace of Q^p spanned by the realized tuples of
    block scalars (normalized traces); ``linkage`` groups scalar-carrying
    blocks whose scalars agree on all of G.
    """

    k: BlockIdeal
    kinds: tuple
    linkage: tuple
    relations: Subspace

    def addend_subspace(self, p) -> Subspace:
        alg = as_algebra(p)
        vecs = []
        for u, kind in enumerate(self.kinds):
            if kind in ("trace_zero", "full"):
                vecs.extend(_traceless_block_vectors(alg, u))
        for r in self.relations.basis:
            v = [ZERO] * alg.N
            for u, c in enumerate(r):
                if c:
                    for i in alg.structure.blocks[u]:
                        v[i * alg.n + i] = c
            vecs.append(v)
        return span(vecs, alg.N)

    def to_subspace(self, p) -> Subspace:
        alg = as_algebra(p)
        return self.addend_subspace(alg) + to_subspace(alg, self.k)

    def to_json(self) -> dict:
        from .exactmat import format_rational
        return {
            "ideal": self.k.to_json(),
            "kinds": list(self.kinds),
            "linkage": [[u + 1 for u in c] for c in self.linkage],
            "scalar_relations": [[format_rational(x) for x in r] for r in self.relations.basis],
        }


def _linkage_from_relations(kinds, relations: Subspace) -> tuple:
    carrying = [u for u, kd in enumerate(kinds) if kd in ("scalar", "full")]
    classes = {}
    for u in carrying:
        key = tuple(r[u] for r in relations.basis)
        classes.setdefault(key, []).append(u)
    return tuple(sorted(tuple(c) for c in classes.values()))


def classify_addend(p, k: BlockIdeal, G: Subspace) -> LieIdealDescriptor:
    """Classify a diagonal subspace G as a Lie addend for K or raise AddendRejected.

    Conditions: (a) every block compression is zero, scalars, trace-zero or
    full; (b) the trace-zero part of each compression lies in G; (c) across
    every constraint edge both compressions are scalar with equal scalars.
    """
    alg = as_algebra(p)
    if G.ambient_dim != alg.N or not G.issubset(alg.E):
        raise AddendRejected("domain", None, "addend must lie in the diagonal part E")
    kinds = []
    for u, b in enumerate(alg.structure.blocks):
        kind = _block_kind(_compression(alg, u, G), len(b))
        if kind is None:
            raise AddendRejected("a", u, f"compression at block {u + 1} is not one of the four Lie ideals")
        kinds.append(kind)
    for u, kind in enumerate(kinds):
        if kind in ("trace_zero", "full"):
            for v in _traceless_block_vectors(alg, u):
                if not G.contains(v):
                    raise AddendRejected("b", u, f"trace-zero part of block {u + 1} is not inside G")
    cg = constraint_graph(alg, k)
    scalars = [scalar_coordinates(alg, g) for g in G.basis]
    for u, v in cg.edges:
        if kinds[u] not in ("zero", "scalar") or kinds[v] not in ("zero", "scalar"):
            raise AddendRejected("c", (u, v), f"edge ({u + 1},{v + 1}): compressions must be scalar")
        for s in scalars:
            if s[u] != s[v]:
                raise AddendRejected(
                    "c", (u, v), f"edge ({u + 1},{v + 1}): scalars unequal ({s[u]} vs {s[v]})"
                )
    relations = span(scalars, alg.p)
    return LieIdealDescriptor(k, tuple(kinds), _linkage_from_relations(kinds, relations), relations)


def describe(p, L: Subspace) -> LieIdealDescriptor:
    """Descriptor of a Lie ideal: decompose, read off K, classify G."""
    alg = as_algebra(p)
    G, K = decompose(alg, L)
    return classify_addend(alg, block_ideal_of(alg, K), G)


def _set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        yield [[first], *part]
        for i in range(len(part)):
            yield part[:i] + [[first, *part[i]]] + part[i + 1:]


def enumerate_descriptors(p, k: BlockIdeal | None = None, cap: int = 24):
    """Descriptors with K, per-block kinds and a linkage partition.

    Scalar relations are exactly "linked blocks share a scalar"; addends
    satisfying further relations are classified by :func:`classify_addend`
    but not generated here.
    """
    alg = as_algebra(p)
    ks = [k] if k is not None else enumerate_offdiag_ideals(alg, cap=cap)
    sizes = alg.structure.sizes()
    out = []
    for K in ks:
        cg = constraint_graph(alg, K)
        units = [tuple(c) for c in cg.components] + [(u,) for u in cg.free_nodes]
        options = []
        for unit in units:
            if len(unit) == 1 and unit[0] in cg.free_nodes and sizes[unit[0]] > 1:
                options.append(KINDS)
            else:
                options.append(("zero", "scalar"))

        def choose(idx, chosen):
            if idx == len(units):
                yield list(chosen)
                return
            for kind in options[idx]:
                chosen.append(kind)
                yield from choose(idx + 1, chosen)
                chosen.pop()

        for choice in choose(0, []):
            kinds = [None] * alg.p
            for unit, kind in zip(units, choice):
                for u in unit:
                    kinds[u] = kind
            carrying = [unit for unit, kind in zip(units, choice) if kind in ("scalar", "full")]
            for part in _set_partitions(carrying):
                rel = []
                for cls in part:
                    r = [ZERO] * alg.p
                    for unit in cls:
                        for u in unit:
                            r[u] = ONE
                    rel.append(r)
                relations = span(rel, alg.p)
                out.append(
                    LieIdealDescriptor(K, tuple(kinds), _linkage_from_relations(kinds, relations), relations)
                )
    return out


def corner_commutant(p, u: int, v: int) -> Subspace:
    """All x in f_u M f_u + f_v M f_v commuting with every unit of the (u, v) corner.

    Solved as a linear system; for a nonzero corner the answer is the line
    spanned by f_u + f_v.
    """
    alg = as_algebra(p)
    n = alg.n
    blocks = alg.structure.blocks
    coords = [i * n + j for w in (u, v) for i in blocks[w] for j in blocks[w]]
    eqs = []
    for i in blocks[u]:
        for j in blocks[v]:
            # coefficient of each unknown in every coordinate of [x, e_ij]
            cols = []
            for c in coords:
                x = [ZERO] * alg.N
                x[c] = ONE
                cols.append(unit_bracket_vec(n, i, j, x))
            for r in range(alg.N):
                row = [col[r] for col in cols]
                if any(row):
                    eqs.append(row)
    sols = null_space(eqs, len(coords))
    vecs = []
    for s in sols:
        x = [ZERO] * alg.N
        for c, val in zip(coords, s):
            x[c] = val
        vecs.append(x)
    return span(vecs, alg.N)
