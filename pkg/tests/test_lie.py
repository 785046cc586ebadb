import random

import pytest
from hypothesis import given, strategies as st

from lil.af_tower import constraint_space
from lil.algebra import DigraphAlgebra, bracket, random_element
from lil.errors import AddendRejected, NotLieIdeal, SupportError
from lil.exactmat import Mat, Subspace, null_space, span
from lil.ideals import BlockIdeal, enumerate_offdiag_ideals, is_associative_ideal, to_subspace
from lil.lie import (
    classify_addend, constraint_graph, corner_commutant, decompose, describe, enumerate_descriptors,
    is_lie_ideal, lie_generate, maximal_addend,
)
from lil.suite import random_generator_set

from conftest import algebras


def E(n, i, j):
    return Mat.unit(n, i - 1, j - 1)


def sp(n, *mats):
    return span([m.entries for m in mats], n * n)


def bi(*pairs):
    return BlockIdeal(frozenset((u - 1, v - 1) for u, v in pairs))


def maximal_addend_oracle(alg, k):
    """Greatest F inside E with [A, F] contained in F + K, by shrinking from E.

    Each round keeps the g in F whose brackets with every unit land in F + K;
    this is a linear condition on the coordinates of g in a basis of F.
    """
    K = to_subspace(alg, k)
    F = alg.E
    while True:
        target = F + K
        ann = target.annihilator()
        rows = []
        for i, j in alg.unit_pairs:
            imgs = [bracket(alg.unit(i, j), Mat(alg.n, alg.n, b)).entries for b in F.basis]
            for w in ann:
                rows.append([sum(a * x for a, x in zip(w, img)) for img in imgs])
        if not F.dim:
            return F
        coeffs = null_space(rows, F.dim) if rows else [
            tuple(1 if a == b else 0 for b in range(F.dim)) for a in range(F.dim)
        ]
        G = span([[sum(c * b[t] for c, b in zip(cf, F.basis)) for t in range(alg.N)] for cf in coeffs], alg.N)
        if G == F:
            return F
        F = G


def test_lie_ideal_examples(t2, m2):
    trace_zero = sp(2, E(2, 1, 2), E(2, 2, 1), E(2, 1, 1) - E(2, 2, 2))
    assert is_lie_ideal(m2, trace_zero)
    verdict = is_lie_ideal(t2, sp(2, E(2, 1, 1)))
    assert not verdict
    assert verdict.witness == (E(2, 1, 2), E(2, 1, 1))
    assert is_lie_ideal(t2, Subspace.zero(4)) and is_lie_ideal(t2, t2.subspace)
    with pytest.raises(SupportError):
        is_lie_ideal(t2, sp(2, E(2, 2, 1)))


def test_lie_generate_examples(t2, m2):
    assert lie_generate(t2, [E(2, 1, 2)]) == sp(2, E(2, 1, 2))
    L = lie_generate(m2, [E(2, 1, 1) - E(2, 2, 2)])
    assert L.dim == 3 and all(sum(b[k * 3] for k in range(2)) == 0 for b in L.basis)
    assert lie_generate(t2, []).dim == 0
    with pytest.raises(SupportError):
        lie_generate(t2, [E(2, 2, 1)])


def test_ambient_generation_allows_full_matrix_space(t2):
    L = lie_generate(t2, [E(2, 2, 1)], ambient=True)
    assert is_lie_ideal(t2, L, ambient=True)
    assert L.contains((E(2, 1, 1) - E(2, 2, 2)).entries)


def test_decompose_examples(t2, m2, t3):
    I2 = Mat.identity(2)
    G, K = decompose(t2, sp(2, I2, E(2, 1, 2)))
    assert G == sp(2, I2) and K == sp(2, E(2, 1, 2))
    tz = sp(2, E(2, 1, 2), E(2, 2, 1), E(2, 1, 1) - E(2, 2, 2))
    assert decompose(m2, tz) == (tz, Subspace.zero(4))
    G, K = decompose(t3, t3.subspace)
    assert G == sp(3, E(3, 1, 1), E(3, 2, 2), E(3, 3, 3))
    assert K == sp(3, E(3, 1, 2), E(3, 1, 3), E(3, 2, 3))
    with pytest.raises(NotLieIdeal) as err:
        decompose(t2, sp(2, E(2, 1, 1)))
    assert err.value.witness == (E(2, 1, 2), E(2, 1, 1))


def test_maximal_addend_examples(t2, t3):
    F, cg = maximal_addend(t2, bi())
    assert cg.edges == ((0, 1),) and F == sp(2, Mat.identity(2))
    F, cg = maximal_addend(t2, bi((1, 2)))
    assert cg.edges == () and F == sp(2, E(2, 1, 1), E(2, 2, 2))
    assert F + to_subspace(t2, bi((1, 2))) == t2.subspace
    F, cg = maximal_addend(t3, bi((1, 3)))
    assert cg.edges == ((0, 1), (1, 2)) and cg.components == ((0, 1, 2),)
    assert F == sp(3, Mat.identity(3))


def test_classify_examples(m2, t2):
    tz = sp(2, E(2, 1, 2), E(2, 2, 1), E(2, 1, 1) - E(2, 2, 2))
    assert classify_addend(m2, bi(), tz).kinds == ("trace_zero",)
    with pytest.raises(AddendRejected) as err:
        classify_addend(t2, bi(), sp(2, E(2, 1, 1)))
    assert err.value.condition == "c" and err.value.where == (0, 1)
    d = classify_addend(t2, bi((1, 2)), sp(2, E(2, 1, 1)))
    assert d.kinds == ("scalar", "zero") and d.linkage == ((0,),)


def test_classify_block_and_domain_rejections():
    m2 = DigraphAlgebra.full(2)
    with pytest.raises(AddendRejected) as err:
        classify_addend(m2, bi(), sp(2, E(2, 1, 1)))
    assert err.value.condition == "a"
    m3 = DigraphAlgebra.full(3)
    with pytest.raises(AddendRejected) as err:
        classify_addend(m3, bi(), sp(3, E(3, 1, 2)))
    assert err.value.condition == "a"
    t2 = DigraphAlgebra.upper_triangular(2)
    with pytest.raises(AddendRejected) as err:
        classify_addend(t2, bi(), sp(2, E(2, 1, 2)))
    assert err.value.condition == "domain"


@pytest.mark.parametrize("n", [2, 3])
def test_full_matrix_census(n):
    alg = DigraphAlgebra.full(n)
    descs = enumerate_descriptors(alg)
    spaces = [d.to_subspace(alg) for d in descs]
    assert sorted(s.dim for s in spaces) == [0, 1, n * n - 1, n * n]
    assert all(is_lie_ideal(alg, s) for s in spaces)
    rng = random.Random(n)
    for _ in range(30):
        assert lie_generate(alg, [random_element(alg, rng, density=0.5)]) in spaces


@given(algebras(max_n=4))
def test_round_trip_for_maximal_addends(alg):
    if len(alg.strict_pairs) > 10:
        return
    for k in enumerate_offdiag_ideals(alg):
        F, _ = maximal_addend(alg, k)
        K = to_subspace(alg, k)
        assert is_lie_ideal(alg, F + K)
        assert decompose(alg, F + K) == (F, K)


@given(algebras(max_n=5))
def test_maximal_addend_matches_fixed_point_oracle(alg):
    if len(alg.strict_pairs) > 8:
        return
    for k in enumerate_offdiag_ideals(alg):
        assert maximal_addend(alg, k)[0] == maximal_addend_oracle(alg, k)


@given(algebras(max_n=5))
def test_maximality_against_diagonal_units(alg):
    if len(alg.strict_pairs) > 8:
        return
    for k in enumerate_offdiag_ideals(alg):
        F, _ = maximal_addend(alg, k)
        K = to_subspace(alg, k)
        for i in range(alg.n):
            d = alg.unit(i, i)
            if not F.contains(d.entries):
                assert not is_lie_ideal(alg, F + K + sp(alg.n, d))


@given(algebras(max_n=5), st.integers(0, 2**31))
def test_generated_ideals_decompose(alg, seed):
    rng = random.Random(seed)
    L = lie_generate(alg, random_generator_set(alg, rng))
    assert is_lie_ideal(alg, L)
    G, K = decompose(alg, L)
    assert G + K == L and (G & K).dim == 0
    assert is_associative_ideal(alg, K)
    d = describe(alg, L)
    assert d.k.is_offdiagonal and to_subspace(alg, d.k) == K
    F, _ = maximal_addend(alg, d.k)
    assert G <= F


@given(algebras(max_n=5).filter(lambda a: a.is_triangular))
def test_triangular_constraint_space_is_maximal_addend(alg):
    if len(alg.strict_pairs) > 8:
        return
    for k in enumerate_offdiag_ideals(alg):
        assert constraint_space(alg, k) == maximal_addend(alg, k)[0]


def test_descriptor_round_trip_on_t3(t3):
    descs = enumerate_descriptors(t3)
    assert len({d.to_subspace(t3) for d in descs}) == len(descs)
    for d in descs:
        L = d.to_subspace(t3)
        assert is_lie_ideal(t3, L)
        assert describe(t3, L) == d


def test_constraint_graph_free_nodes(blocks4):
    cg = constraint_graph(blocks4, bi((1, 2)))
    assert cg.edges == () and cg.free_nodes == (0, 1, 2)
    cg = constraint_graph(blocks4, bi())
    assert cg.components == ((0, 1),) and cg.free_nodes == (2,)


@pytest.mark.parametrize("sizes", [(1, 1), (1, 2), (2, 2), (2, 3), (3, 3)])
def test_corner_commutant_is_a_line(sizes):
    a, b = sizes
    n = a + b
    rows = ["*" * n if i < a else "." * a + "*" * b for i in range(n)]
    alg = DigraphAlgebra.from_rows(rows)
    C = corner_commutant(alg, 0, 1)
    assert C == sp(n, Mat.identity(n))
