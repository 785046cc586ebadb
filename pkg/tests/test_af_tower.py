import json
import random

import pytest
from hypothesis import given, strategies as st

from lil.af_tower import (
    Tower, check_embedding, constraint_space, explicit_embedding, inductivity_check, lemma_row_check,
    pi_compatibility, pi_n, random_generators, standard_embedding, theorem_lieform_check,
)
from lil.algebra import DigraphAlgebra, Pattern, pi
from lil.errors import LilInputError, NotLieIdeal, TooLarge
from lil.exactmat import Mat, span
from lil.ideals import BlockIdeal, enumerate_offdiag_ideals
from lil.io import load_tower, tower_from_json
from lil.lie import lie_generate

from conftest import algebras


def E(n, i, j):
    return Mat.unit(n, i - 1, j - 1)


def test_multiplicity_one_is_identity(t2):
    emb = standard_embedding(t2, 1)
    assert emb.target == t2
    for i, j in t2.unit_pairs:
        assert emb.image(t2.unit(i, j)) == t2.unit(i, j)


def test_refinement_orders(t2):
    inter = standard_embedding(t2, 2)
    assert inter.image(E(2, 1, 2)) == E(4, 1, 2) + E(4, 3, 4)
    assert inter.target == DigraphAlgebra.upper_triangular(4)
    block = standard_embedding(t2, 2, order="block")
    assert block.image(E(2, 1, 2)) == E(4, 1, 3) + E(4, 2, 4)
    assert block.image(Mat.identity(2)) == Mat.identity(4)
    with pytest.raises(LilInputError):
        standard_embedding(t2, 2, order="spiral")


def test_diagonal_source_stays_diagonal():
    d2 = DigraphAlgebra(Pattern.diagonal(2))
    emb = standard_embedding(d2, 3)
    assert emb.target == DigraphAlgebra(Pattern.diagonal(6))
    assert check_embedding(emb)["ok"]


def test_embedding_rejects_target_missing_image(t2):
    with pytest.raises(LilInputError):
        standard_embedding(t2, 2, target=DigraphAlgebra(Pattern.diagonal(4)))


def test_size_cap(monkeypatch, t3):
    monkeypatch.setenv("LIL_MAX_N", "8")
    with pytest.raises(TooLarge):
        standard_embedding(t3, 3)
    assert standard_embedding(t3, 2).target.n == 6


def test_broken_explicit_embedding_is_caught(t2):
    t4 = DigraphAlgebra.upper_triangular(4)
    bad = explicit_embedding(t2, t4, {(0, 0): [(0, 0), (1, 1)], (1, 1): [(2, 2), (3, 3)], (0, 1): [(0, 1)]})
    r = check_embedding(bad)
    assert r["unital"] and r["homomorphism_residual"] > 0 and not r["ok"]
    with pytest.raises(LilInputError):
        explicit_embedding(t2, t4, {(0, 0): [(0, 0)]})


@given(algebras(max_n=4), st.integers(1, 3), st.sampled_from(["interleaved", "block"]))
def test_standard_embeddings_are_good(alg, m, order):
    emb = standard_embedding(alg, m, order=order)
    assert check_embedding(emb)["ok"]
    assert pi_compatibility(emb)


def test_tower_maps_compose(t2):
    tower = Tower.from_multiplicities(t2, [2, 2])
    assert [lvl.n for lvl in tower.levels] == [2, 4, 8]
    x = Mat.from_rows([[1, 2], [0, 3]])
    step = tower.embeddings[1].image(tower.embeddings[0].image(x))
    assert tower.to_top(0, x) == step
    assert tower.level_subspace(0).dim == 3
    assert tower.level_subspace(0) <= tower.level_subspace(1) <= tower.level_subspace(2)
    with pytest.raises(LilInputError):
        tower.top_unit_map(3)


def test_pi_n_examples(t2):
    tower = Tower.from_multiplicities(t2, [2])
    top = tower.top
    x = Mat.from_rows([[1, 2, 3, 4], [0, 5, 6, 7], [0, 0, 8, 9], [0, 0, 0, 1]])
    assert pi_n(tower, 1, x) == pi(top, x)
    # level-1 projections are e11+e33 and e22+e44
    d1, d2 = E(4, 1, 1) + E(4, 3, 3), E(4, 2, 2) + E(4, 4, 4)
    assert pi_n(tower, 0, x) == d1 @ x @ d1 + d2 @ x @ d2
    assert pi_n(tower, 0, x)[0, 2] == 3


def test_lemma_examples(t3):
    L = span([Mat.identity(3).entries, E(3, 1, 3).entries], 9)
    r = lemma_row_check(t3, L, trials=20, seed=1)
    assert r["ok"] and r["pairs_checked"] == 2 * 3 + 20
    with pytest.raises(NotLieIdeal):
        lemma_row_check(t3, span([E(3, 1, 1).entries], 9))
    with pytest.raises(LilInputError):
        lemma_row_check(t3, L, projections=[E(3, 1, 1)])


@given(algebras(max_n=4), st.integers(0, 2**31))
def test_lemma_on_generated_ideals(alg, seed):
    rng = random.Random(seed)
    gens = random_generators(Tower([alg], []), rng)
    L = lie_generate(alg, gens)
    assert lemma_row_check(alg, L, trials=5, seed=seed)["ok"]


def test_lemma_with_lower_level_projections(t2):
    tower = Tower.from_multiplicities(t2, [2])
    L = lie_generate(tower.top, [E(4, 1, 1) - E(4, 2, 2)])
    r = lemma_row_check(tower.top, L, trials=10, projections=tower.diagonal_projections(0))
    assert r["ok"]


def test_inductivity_examples(t2):
    tower = Tower.from_multiplicities(t2, [2])
    for k in enumerate_offdiag_ideals(tower.top):
        r = inductivity_check(tower, k)
        assert r["ok"], (k, r)
        assert [lvl["dim"] for lvl in r["levels"]] == sorted(lvl["dim"] for lvl in r["levels"])
    with pytest.raises(LilInputError):
        inductivity_check(tower, BlockIdeal(frozenset({(0, 1)})))


def test_constraint_space_examples(t3):
    assert constraint_space(t3, BlockIdeal(frozenset())) == span([Mat.identity(3).entries], 9)
    all3 = BlockIdeal(frozenset(t3.strict_pairs))
    assert constraint_space(t3, all3) == t3.E
    with pytest.raises(LilInputError):
        constraint_space(DigraphAlgebra.full(2), BlockIdeal(frozenset()))


def test_theorem_examples(t2):
    tower = Tower.from_multiplicities(t2, [2])
    r = theorem_lieform_check(tower, [Mat.identity(4)])
    assert r["ok"] and r["dim_L"] == 1 and r["dim_K"] == 0
    units = [tower.top.unit(i, j) for i, j in tower.top.unit_pairs]
    r = theorem_lieform_check(tower, units)
    assert r["ok"] and r["dim_L"] == len(tower.top.unit_pairs) and r["dim_F"] == 4


def test_theorem_on_random_generators(t2):
    tower = Tower.from_multiplicities(t2, [2, 2])
    rng = random.Random(5)
    for s in range(8):
        assert theorem_lieform_check(tower, random_generators(tower, rng), seed=s)["ok"]


def test_tower_json_round_trip(tmp_path):
    (tmp_path / "t2.txt").write_text("n 2\n**\n.*\n")
    data = {"levels": ["t2.txt"], "embeddings": [{"multiplicity": 2}, {"multiplicity": 2}]}
    (tmp_path / "tower.json").write_text(json.dumps(data))
    tower = load_tower(tmp_path / "tower.json")
    assert [lvl.n for lvl in tower.levels] == [2, 4, 8]
    explicit = {
        "levels": [{"n": 2, "rows": ["**", ".*"]}, {"n": 4, "rows": ["****", ".***", "..**", "...*"]}],
        "embeddings": [{"unit_map": {"1,1": [[1, 1], [3, 3]], "2,2": [[2, 2], [4, 4]], "1,2": [[1, 2], [3, 4]]}}],
    }
    t = tower_from_json(explicit)
    assert t.embeddings[0].unit_map == tower.embeddings[0].unit_map
    with pytest.raises(LilInputError):
        tower_from_json({"levels": []})
    with pytest.raises(LilInputError):
        tower_from_json({"levels": [{"rows": ["**", ".*"]}], "embeddings": [{}]})
