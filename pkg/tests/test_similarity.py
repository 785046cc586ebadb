import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

import lil.similarity as sim
from lil.algebra import DigraphAlgebra, random_element
from lil.errors import NotLieIdeal, NotNilpotent, Singular
from lil.exactmat import Mat, span
from lil.lie import is_lie_ideal, lie_generate
from lil.similarity import (
    check_similarity_invariance, conjugate, exp_conjugation_check, factor_dn, invert_in_algebra,
    nilpotence_order, random_invertible, telescoping_conjugation,
)
from lil.suite import random_generator_set

from conftest import algebras


def E(n, i, j):
    return Mat.unit(n, i - 1, j - 1)


def test_inverse_examples(t2):
    inv = invert_in_algebra(t2, Mat.from_rows([[2, 3], [0, 4]]))
    assert inv == Mat.from_rows([[Fraction(1, 2), Fraction(-3, 8)], [0, Fraction(1, 4)]])
    with pytest.raises(Singular):
        invert_in_algebra(t2, Mat.from_rows([[1, 1], [0, 0]]))


def test_factor_examples(t2, t3, m2):
    f = factor_dn(t2, Mat.from_rows([[2, 3], [0, 4]]))
    assert f.d == Mat.from_rows([[2, 0], [0, 4]])
    assert f.n == Mat.from_rows([[0, Fraction(3, 2)], [0, 0]])
    assert f.nilpotence_order == 1
    f = factor_dn(t3, Mat.from_rows([[1, 1, 0], [0, 1, 1], [0, 0, 1]]))
    assert f.nilpotence_order == 2
    t = Mat.from_rows([[1, 2], [3, 4]])
    f = factor_dn(m2, t)
    assert f.d == t and f.n.is_zero() and f.nilpotence_order == 0


def test_nilpotence_order_rejects_invertible():
    with pytest.raises(NotNilpotent):
        nilpotence_order(Mat.identity(2))


def test_conjugate_example(t2):
    t = Mat.identity(2) + E(2, 1, 2)
    assert conjugate(t2, t, E(2, 1, 1)) == E(2, 1, 1) + E(2, 1, 2)


def test_telescoping_examples(t2, t3):
    assert telescoping_conjugation(t2, E(2, 1, 2), E(2, 1, 1)) == E(2, 1, 1) + E(2, 1, 2)
    n = E(3, 1, 2) + E(3, 2, 3)
    x = E(3, 2, 2)
    assert telescoping_conjugation(t3, n, x) == conjugate(t3, Mat.identity(3) + n, x)


def test_exp_examples(t2, t3):
    r = exp_conjugation_check(t2, E(2, 1, 2), E(2, 1, 1))
    assert r["ok"] and r["conjugate"] == E(2, 1, 1) + E(2, 1, 2)
    r = exp_conjugation_check(t3, E(3, 1, 2) + E(3, 2, 3), E(3, 3, 3))
    assert r["ok"] and r["series_matches"]
    with pytest.raises(NotNilpotent):
        exp_conjugation_check(t2, E(2, 1, 1), E(2, 1, 2))
    r = exp_conjugation_check(t2, E(2, 1, 1), E(2, 1, 2), exact=False, order=5)
    assert not r["nilpotent"] and r["iterates_in_ideal"]


def test_non_lie_subspace_is_rejected(t2):
    with pytest.raises(NotLieIdeal):
        check_similarity_invariance(t2, span([E(2, 1, 1).entries], 4), trials=2)


def test_probe_finds_violation_for_non_lie_subspace(t2):
    r = check_similarity_invariance(t2, span([E(2, 1, 1).entries], 4), trials=20,
                                    require_lie=False, stop_at_first=True)
    assert not r.ok
    trial, t, x, part = r.failures[0]
    y = conjugate(t2, t, x)
    assert not span([E(2, 1, 1).entries], 4).contains(y.entries)


def test_report_json_shape(t3):
    L = lie_generate(t3, [E(3, 1, 3)])
    j = check_similarity_invariance(t3, L, trials=5, seed=3).to_json()
    assert j["trials_run"] == 5 and j["failures"] == [] and j["dim"] == L.dim
    assert j["split"]["checked"] == 2 * 5 * L.dim


@given(algebras(), st.integers(0, 2**31))
def test_factorization_round_trip(alg, seed):
    rng = random.Random(seed)
    f = random_invertible(alg, rng)
    t = f.d @ (Mat.identity(alg.n) + f.n)
    g = factor_dn(alg, t)
    assert g.d == f.d and g.n == f.n
    assert alg.supports(invert_in_algebra(alg, t))
    x = random_element(alg, rng)
    assert telescoping_conjugation(alg, f.n, x) == conjugate(alg, Mat.identity(alg.n) + f.n, x)


@given(algebras(), st.integers(0, 2**31))
def test_generated_ideals_are_similarity_invariant(alg, seed):
    rng = random.Random(seed)
    L = lie_generate(alg, random_generator_set(alg, rng))
    r = check_similarity_invariance(alg, L, trials=5, seed=seed)
    assert r.ok and r.split["checked"] == 2 * 5 * L.dim


@given(algebras(max_n=4), st.integers(0, 2**31))
def test_exact_conjugates_stay_in_generated_ideal(alg, seed):
    rng = random.Random(seed)
    L = lie_generate(alg, random_generator_set(alg, rng))
    f = random_invertible(alg, random.Random(seed))
    t = f.d @ (Mat.identity(alg.n) + f.n)
    for b in L.basis:
        assert L.contains(conjugate(alg, t, Mat(alg.n, alg.n, b)).entries)


def test_object_fallback_agrees(monkeypatch, t3):
    L = lie_generate(t3, [E(3, 1, 1) - E(3, 2, 2)])
    fast = check_similarity_invariance(t3, L, trials=10, seed=7).to_json()
    monkeypatch.setattr(sim, "_INT64_SAFE", 0.0)
    slow = check_similarity_invariance(t3, L, trials=10, seed=7).to_json()
    assert fast == slow and fast["failures"] == []
    bad = span([E(3, 1, 1).entries], 9)
    a = check_similarity_invariance(t3, bad, trials=10, seed=1, require_lie=False).to_json()
    monkeypatch.setattr(sim, "_INT64_SAFE", float(2 ** 62))
    b = check_similarity_invariance(t3, bad, trials=10, seed=1, require_lie=False).to_json()
    assert a == b and a["failures"]


def test_every_non_lie_subspace_of_t2_fails():
    t2 = DigraphAlgebra.upper_triangular(2)
    cands = [E(2, 1, 1), E(2, 2, 2), E(2, 1, 1) + E(2, 1, 2)]
    for c in cands:
        s = span([c.entries], 4)
        assert not is_lie_ideal(t2, s)
        assert not check_similarity_invariance(t2, s, trials=30, require_lie=False).ok
