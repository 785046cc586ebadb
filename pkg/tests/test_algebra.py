import random

import pytest
from hypothesis import given, strategies as st

from lil.algebra import (
    DigraphAlgebra, Pattern, bracket, diag_offdiag_split, matrix_units, pi, random_element, read_pattern,
    validate_pattern, write_pattern,
)
from lil.errors import DimensionMismatch, NotReflexive, NotTransitive, PatternError, SupportError
from lil.exactmat import Mat

from conftest import algebras, patterns


def E(n, i, j):
    return Mat.unit(n, i - 1, j - 1)


def test_upper_triangular_has_singleton_chain(t3):
    s = t3.structure
    assert s.blocks == ((0,), (1,), (2,))
    assert s.poset == {(0, 1), (0, 2), (1, 2)}
    assert t3.is_triangular


def test_missing_product_is_not_transitive():
    p = Pattern(3, frozenset({(0, 0), (1, 1), (2, 2), (0, 1), (1, 2)}))
    with pytest.raises(NotTransitive) as err:
        validate_pattern(p)
    assert err.value.triple == (0, 1, 2)
    assert "(1,3)" in str(err.value)


def test_missing_diagonal_is_not_reflexive():
    with pytest.raises(NotReflexive):
        validate_pattern(Pattern(2, frozenset({(0, 0), (0, 1)})))


def test_mutual_pairs_form_blocks(blocks4):
    s = blocks4.structure
    assert s.blocks == ((0, 1), (2,), (3,))
    assert s.poset == {(0, 1)}
    assert s.to_json()["blocks"] == [[1, 2], [3], [4]]


def test_canonical_order_ties_break_on_smallest_index():
    # block {3} precedes block {1}; block {2} is isolated
    alg = DigraphAlgebra.from_rows(["*..", ".*.", "*.*"])
    assert alg.structure.blocks == ((1,), (2,), (0,))
    assert alg.structure.poset == {(1, 2)}


def test_matrix_units():
    assert matrix_units(Pattern.diagonal(2)) == [E(2, 1, 1), E(2, 2, 2)]
    assert matrix_units(DigraphAlgebra.upper_triangular(2)) == [E(2, 1, 1), E(2, 1, 2), E(2, 2, 2)]
    assert len(matrix_units(Pattern.full(3))) == 9


def test_diag_offdiag_split(t3, m2, blocks4):
    for alg, dims in ((t3, (3, 3)), (m2, (4, 0)), (blocks4, (6, 2))):
        e, s = diag_offdiag_split(alg)
        assert (e.dim, s.dim) == dims
        assert (e & s).dim == 0
        assert e + s == alg.subspace


def test_pi_examples(t2, blocks4):
    x = Mat.from_rows([[5, 7], [0, -2]])
    assert pi(t2, x) == Mat.from_rows([[5, 0], [0, -2]])
    d = Mat.from_rows([[1, 0], [0, 3]])
    assert pi(t2, d) == d
    y = Mat.from_rows([[1, 2, 3, 0], [4, 5, 6, 0], [0, 0, 7, 0], [0, 0, 0, 8]])
    assert pi(blocks4, y) == Mat.from_rows([[1, 2, 0, 0], [4, 5, 0, 0], [0, 0, 7, 0], [0, 0, 0, 8]])


def test_pi_is_defined_on_all_matrices(t2):
    assert pi(t2, Mat.from_rows([[1, 1], [1, 1]])) == Mat.identity(2)


def test_bracket_examples():
    x = Mat.from_rows([[1, 2], [3, 4]])
    assert bracket(x, x).is_zero()
    assert bracket(E(2, 1, 1), E(2, 1, 2)) == E(2, 1, 2)
    assert bracket(E(2, 1, 2), E(2, 2, 1)) == E(2, 1, 1) - E(2, 2, 2)
    with pytest.raises(DimensionMismatch):
        bracket(x, Mat.identity(3))


def test_check_element_rejects_support(t2):
    with pytest.raises(SupportError):
        t2.check_element(E(2, 2, 1))
    with pytest.raises(DimensionMismatch):
        t2.check_element(Mat.identity(3))


@given(algebras(), st.integers(0, 2**31))
def test_products_and_brackets_stay_in_pattern(alg, seed):
    rng = random.Random(seed)
    x, y = random_element(alg, rng), random_element(alg, rng)
    assert alg.supports(x @ y)
    assert alg.supports(bracket(x, y))


@given(algebras())
def test_pi_properties(alg):
    rng = random.Random(1)
    x, y = random_element(alg, rng), random_element(alg, rng)
    px = pi(alg, x)
    assert pi(alg, px) == px
    assert alg.E.contains(px.entries)
    assert alg.S.contains((x - px).entries)
    assert pi(alg, x + y * 3) == px + pi(alg, y) * 3
    d = pi(alg, random_element(alg, rng))
    f = pi(alg, random_element(alg, rng))
    assert pi(alg, d @ x @ f) == d @ px @ f
    c = pi(alg, bracket(x, y))
    assert c.trace() == 0
    if alg.is_triangular:
        assert c.is_zero()


@given(patterns())
def test_canonical_order_is_block_upper_triangular(p):
    s = validate_pattern(p)
    assert s.order == tuple(i for b in s.blocks for i in b)
    for i, j in p.entries:
        assert s.block_of[i] <= s.block_of[j]
    for u, v in s.poset:
        assert u < v


def test_pattern_file_round_trip():
    text = "# upper triangular\nn 3\n* * *   # row one\n. * *\n\n..*\n"
    p = read_pattern(text)
    assert p == Pattern.upper_triangular(3)
    assert read_pattern(write_pattern(p)) == p


@pytest.mark.parametrize("text", ["", "n x\n", "n 2\n**\n", "n 2\n*?\n.*\n", "n 2\n***\n.*\n"])
def test_bad_pattern_files(text):
    with pytest.raises(PatternError):
        read_pattern(text)
