"""Acceptance suite: the nine criteria as functions returning result records.

Shared by ``lil suite`` and the test-suite.  Each criterion is seeded and
deterministic apart from its wall-clock time.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from . import nest
from .af_tower import (
    Tower, check_embedding, lemma_row_check, pi_compatibility, random_generators, theorem_lieform_check,
)
from .algebra import DigraphAlgebra, Pattern, random_element
from .errors import AddendRejected, NotBlockIdeal
from .exactmat import Mat, Subspace, ZERO, span
from .ideals import (
    block_ideal_of, brute_force_offdiag_ideals, enumerate_offdiag_ideals, is_associative_ideal,
)
from .lie import classify_addend, decompose, describe, enumerate_descriptors, is_lie_ideal, lie_generate, maximal_addend
from .similarity import check_similarity_invariance, conjugate, telescoping_conjugation


@dataclass
class CriterionResult:
    number: int
    name: str
    ok: bool
    seconds: float
    budget: float | None
    details: dict = field(default_factory=dict)
    informational: bool = False

    def line(self) -> str:
        status = "INFO" if self.informational else ("PASS" if self.ok else "FAIL")
        budget = f" (budget {self.budget:.0f}s)" if self.budget else ""
        return f"[{status}] criterion {self.number}: {self.name}: {self.seconds:.2f}s{budget}"

    def to_json(self, timings: bool = True) -> dict:
        out = {
            "criterion": self.number,
            "name": self.name,
            "ok": self.ok,
            "informational": self.informational,
            "budget_seconds": self.budget,
            "details": self.details,
        }
        if timings:
            out["seconds"] = round(self.seconds, 3)
        return out


# corpus

def all_patterns(n: int) -> list:
    """Every reflexive, transitive pattern on n labeled indices."""
    off = [(i, j) for i in range(n) for j in range(n) if i != j]
    diag = {(i, i) for i in range(n)}
    out = []
    for bits in product((0, 1), repeat=len(off)):
        rel = diag | {ij for ij, b in zip(off, bits) if b}
        if all((i, k) in rel for i, j in rel for j2, k in rel if j == j2):
            out.append(Pattern(n, frozenset(rel)))
    return out


def random_pattern(n: int, rng: random.Random) -> Pattern:
    """Random block partition, random DAG on blocks, transitive closure, random relabeling."""
    labels = list(range(n))
    rng.shuffle(labels)
    cuts = sorted(rng.sample(range(1, n), rng.randint(0, n - 1)))
    blocks, start = [], 0
    for c in [*cuts, n]:
        blocks.append(labels[start:c])
        start = c
    p = len(blocks)
    reach = [[u == v for v in range(p)] for u in range(p)]
    density = rng.choice((0.2, 0.4, 0.7))
    for u in range(p):
        for v in range(u + 1, p):
            if rng.random() < density:
                reach[u][v] = True
    for w in range(p):
        for u in range(p):
            if reach[u][w]:
                for v in range(p):
                    if reach[w][v]:
                        reach[u][v] = True
    rel = {(i, j) for u in range(p) for v in range(p) if reach[u][v] for i in blocks[u] for j in blocks[v]}
    return Pattern(n, frozenset(rel))


def corpus(seed: int = 0, random_count: int = 50) -> list:
    pats = [p for n in range(1, 5) for p in all_patterns(n)]
    rng = random.Random(seed)
    pats += [random_pattern(rng.choice((5, 6)), rng) for _ in range(random_count)]
    return pats


def random_generator_set(alg: DigraphAlgebra, rng: random.Random) -> list:
    """One to three generators mixing sparse elements, diagonal elements, units and block scalars."""
    gens = []
    for _ in range(rng.randint(1, 3)):
        kind = rng.randrange(6)
        if kind == 0:
            gens.append(random_element(alg, rng, density=rng.choice((0.2, 0.5, 1.0))))
        elif kind == 1:
            e = [ZERO] * alg.N
            for i in range(alg.n):
                e[i * alg.n + i] = rng.randint(-2, 2)
            gens.append(Mat(alg.n, alg.n, e))
        elif kind == 2:
            gens.append(alg.unit(*rng.choice(alg.unit_pairs)))
        elif kind == 3:
            gens.append(alg.block_identity(rng.randrange(alg.p)))
        elif kind == 4:
            b = rng.choice(alg.structure.blocks)
            i, j = rng.choice(b), rng.choice(b)
            gens.append(alg.unit(i, i) - alg.unit(j, j) if i != j else alg.unit(i, i))
        else:
            u = rng.randrange(alg.p)
            v = rng.randrange(alg.p)
            gens.append(alg.block_identity(u) * rng.randint(1, 3) - alg.block_identity(v))
    return gens


# criteria

def criterion_1(seed: int = 0) -> CriterionResult:
    t0 = time.perf_counter()
    rng = random.Random(seed)
    details = {}
    ok = True
    for n in (2, 3):
        alg = DigraphAlgebra.full(n)
        descs = enumerate_descriptors(alg)
        spaces = [d.to_subspace(alg) for d in descs]
        dims = sorted(s.dim for s in spaces)
        all_lie = all(is_lie_ideal(alg, s) for s in spaces)
        round_trip = all(describe(alg, s) == d for s, d in zip(spaces, descs))
        known = set(spaces)
        fifth = 0
        for _ in range(100):
            L = lie_generate(alg, [random_element(alg, rng, density=rng.choice((0.25, 0.5, 1.0)))])
            if L not in known:
                fifth += 1
        good = len(descs) == 4 and dims == [0, 1, n * n - 1, n * n] and all_lie and round_trip and fifth == 0
        ok = ok and good
        details[f"M{n}"] = {"descriptors": len(descs), "dims": dims, "all_lie": all_lie,
                            "round_trip": round_trip, "new_classes_from_generation": fifth}
    secs = time.perf_counter() - t0
    return CriterionResult(1, "full-matrix Lie-ideal census", ok and secs < 5, secs, 5, details)


def _decomposition_failures(alg: DigraphAlgebra, L: Subspace) -> list:
    problems = []
    G, K = decompose(alg, L)
    if G + K != L:
        problems.append("L != G + K")
    if not is_associative_ideal(alg, K):
        problems.append("K not associative")
    try:
        k = block_ideal_of(alg, K)
    except NotBlockIdeal:
        return problems + ["K not a union of full blocks"]
    if not k.is_offdiagonal:
        problems.append("K meets the diagonal")
    try:
        classify_addend(alg, k, G)
    except AddendRejected as exc:
        problems.append(f"addend rejected ({exc.condition}): {exc}")
    F, _ = maximal_addend(alg, k)
    if not G.issubset(F):
        problems.append("G not inside the maximal addend")
    return problems


def criterion_2(seed: int = 0, sets_per_pattern: int = 20, pats=None, collect: dict | None = None) -> CriterionResult:
    t0 = time.perf_counter()
    pats = pats if pats is not None else corpus(seed)
    rng = random.Random(seed + 1)
    failures = []
    checked = 0
    for pat in pats:
        alg = DigraphAlgebra(pat)
        for _ in range(sets_per_pattern):
            L = lie_generate(alg, random_generator_set(alg, rng))
            checked += 1
            if collect is not None:
                collect.setdefault(pat, set()).add(L)
            problems = _decomposition_failures(alg, L)
            if problems:
                failures.append({"pattern": pat.rows(), "problems": problems})
    secs = time.perf_counter() - t0
    return CriterionResult(2, "decomposition L = G + K", not failures and secs < 120, secs, 120,
                           {"patterns": len(pats), "ideals_checked": checked, "failures": failures[:10]})


def criterion_3(seed: int = 0, trials: int = 100, pats=None, ideals: dict | None = None) -> CriterionResult:
    t0 = time.perf_counter()
    if ideals is None:
        ideals = {}
        criterion_2(seed, pats=pats, collect=ideals)
        t0 = time.perf_counter()
    failures = []
    count = 0
    for k, (pat, Ls) in enumerate(sorted(ideals.items(), key=lambda kv: (kv[0].n, sorted(kv[0].entries)))):
        alg = DigraphAlgebra(pat)
        for m, L in enumerate(sorted(Ls, key=lambda s: (s.dim, s.basis))):
            rep = check_similarity_invariance(alg, L, trials=trials, seed=seed * 7919 + k * 101 + m, split=True)
            count += 1
            if not rep.ok:
                failures.append({"pattern": pat.rows(), "report": rep.to_json()})
    secs = time.perf_counter() - t0
    return CriterionResult(3, "similarity invariance t^-1 L t = L", not failures and secs < 300, secs, 300,
                           {"ideals": count, "trials_per_ideal": trials, "failures": failures[:5]})


def criterion_4(seed: int = 0, samples: int = 100, trials: int = 200) -> CriterionResult:
    t0 = time.perf_counter()
    rng = random.Random(seed + 4)
    pats = [p for n in (2, 3, 4) for p in all_patterns(n)]
    detected = tested = 0
    misses = []
    while tested < samples:
        alg = DigraphAlgebra(rng.choice(pats))
        vecs = [random_element(alg, rng, density=rng.choice((0.2, 0.4))).entries for _ in range(rng.randint(1, 2))]
        S = span(vecs, alg.N)
        if S.dim == 0 or is_lie_ideal(alg, S):
            continue
        tested += 1
        rep = check_similarity_invariance(alg, S, trials=trials, seed=rng.randrange(2**31),
                                          require_lie=False, split=False, stop_at_first=True)
        if rep.failures:
            detected += 1
        else:
            misses.append({"pattern": alg.pattern.rows(), "subspace": S.to_json()})
    rate = detected / tested
    secs = time.perf_counter() - t0
    return CriterionResult(4, "converse detection of non-Lie subspaces", rate >= 0.95, secs, None,
                           {"tested": tested, "detected": detected, "rate": rate, "misses": misses[:5]})


def criterion_5(seed: int = 0, count: int = 500, pats=None) -> CriterionResult:
    t0 = time.perf_counter()
    pats = pats if pats is not None else corpus(seed)
    algs = [a for a in (DigraphAlgebra(p) for p in pats) if a.strict_pairs]
    rng = random.Random(seed + 5)
    failures = 0
    max_order = 0
    for _ in range(count):
        alg = rng.choice(algs)
        e = [ZERO] * alg.N
        for i, j in alg.unit_pairs:
            if alg.block_of(i) != alg.block_of(j):
                e[i * alg.n + j] = rng.randint(-3, 3)
        n = Mat(alg.n, alg.n, e)
        x = random_element(alg, rng)
        one_n = Mat.identity(alg.n) + n
        direct = conjugate(alg, one_n, x)
        tele = telescoping_conjugation(alg, n, x)
        if direct != tele:
            failures += 1
        k = 0
        power = n
        while not power.is_zero():
            k += 1
            power = power @ n
        max_order = max(max_order, k)
    secs = time.perf_counter() - t0
    return CriterionResult(5, "telescoping conjugation identity", failures == 0, secs, None,
                           {"checks": count, "failures": failures, "max_nilpotence_order": max_order})


def criterion_6() -> CriterionResult:
    t0 = time.perf_counter()
    details = {}
    ok = True
    expected = {2: 2, 3: 5}
    for n in (2, 3, 4):
        alg = DigraphAlgebra.upper_triangular(n)
        fast = enumerate_offdiag_ideals(alg)
        oracle = brute_force_offdiag_ideals(alg)
        good = fast == oracle and (n not in expected or len(fast) == expected[n])
        ok = ok and good
        details[f"T{n}"] = {"count": len(fast), "oracle": len(oracle)}
    secs = time.perf_counter() - t0
    return CriterionResult(6, "off-diagonal ideal counts", ok and secs < 1, secs, 1, details)


def _towers() -> dict:
    t2 = DigraphAlgebra.upper_triangular(2)
    t3 = DigraphAlgebra.upper_triangular(3)
    return {
        "T2->T4->T8": Tower.from_multiplicities(t2, [2, 2]),
        "T3 x2": Tower.from_multiplicities(t3, [2]),
        "T3 x3": Tower.from_multiplicities(t3, [3]),
    }


def criterion_7(seed: int = 0, pairs: int = 50, generator_sets: int = 50) -> CriterionResult:
    t0 = time.perf_counter()
    rng = random.Random(seed + 7)
    details = {}
    ok = True
    for name, tower in _towers().items():
        emb_reports = [check_embedding(e) for e in tower.embeddings]
        residual = max(r["homomorphism_residual"] for r in emb_reports)
        emb_ok = all(r["ok"] for r in emb_reports)
        pi_ok = all(pi_compatibility(e) for e in tower.embeddings)
        lemma_fail = 0
        lemma_pairs = 0
        theorem_fail = 0
        for s in range(generator_sets):
            gens = random_generators(tower, rng)
            rep = theorem_lieform_check(tower, gens, seed=rng.randrange(2**31))
            if not rep["ok"]:
                theorem_fail += 1
            if lemma_pairs < pairs:
                L = lie_generate(tower.top, gens)
                q = rng.randrange(tower.depth)
                lr = lemma_row_check(tower.top, L, trials=pairs - lemma_pairs if s == 0 else 0,
                                     seed=rng.randrange(2**31), projections=tower.diagonal_projections(q))
                lemma_pairs += lr["pairs_checked"]
                lemma_fail += lr["membership_failures"] + lr["identity_failures"]
        good = residual == 0 and emb_ok and pi_ok and lemma_fail == 0 and theorem_fail == 0 and lemma_pairs >= pairs
        ok = ok and good
        details[name] = {
            "levels": [lvl.n for lvl in tower.levels],
            "homomorphism_residual": residual,
            "embeddings_ok": emb_ok,
            "pi_compatible": pi_ok,
            "lemma_pairs": lemma_pairs,
            "lemma_failures": lemma_fail,
            "generator_sets": generator_sets,
            "theorem_failures": theorem_fail,
        }
    secs = time.perf_counter() - t0
    return CriterionResult(7, "AF tower checks", ok and secs < 120, secs, 120, details)


def random_atoms(rng: np.random.Generator, max_total: int = 20) -> list:
    atoms = []
    total = int(rng.integers(2, max_total + 1))
    while sum(atoms) < total:
        atoms.append(int(rng.integers(1, min(4, total - sum(atoms)) + 1)))
    return atoms


def criterion_8(seed: int = 0, matrices: int = 20, samples: int = 200) -> CriterionResult:
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed + 8)
    worst = {"boundary": 0.0, "norm_excess": -np.inf, "boundary_norm": 0.0, "inverse": 0.0}
    ok = True
    for _ in range(matrices):
        atoms = random_atoms(rng)
        A = nest.random_block_upper(atoms, rng)
        fro = np.linalg.norm(A)
        for z in nest.disk_samples(samples, rng):
            if abs(abs(z) - 1) < 1e-15:
                r = nest.boundary_conjugation_check(A, atoms, float(np.angle(z))) / fro
                worst["boundary"] = max(worst["boundary"], r)
        nb = nest.norm_bound_check(A, atoms, samples=samples, seed=int(rng.integers(2**31)))
        inv = nest.inverse_path_check(A, np.linalg.inv(A), atoms, samples=samples, seed=int(rng.integers(2**31)))
        worst["norm_excess"] = max(worst["norm_excess"], nb["max_excess"])
        worst["boundary_norm"] = max(worst["boundary_norm"], nb["max_boundary_deviation"])
        worst["inverse"] = max(worst["inverse"], inv["max_residual"])
        ok = ok and nb["ok"] and inv["ok"]
    ok = ok and worst["boundary"] <= nest.BOUNDARY_RTOL
    secs = time.perf_counter() - t0
    return CriterionResult(8, "nest path checks", ok and secs < 30, secs, 30,
                           {"matrices": matrices, "samples": samples,
                            "max_boundary_residual_rel": worst["boundary"],
                            "max_norm_excess": worst["norm_excess"],
                            "max_boundary_norm_deviation": worst["boundary_norm"],
                            "max_inverse_residual": worst["inverse"]})


def criterion_9() -> CriterionResult:
    return CriterionResult(
        9, "infinite-dimensional claims", True, 0.0, None,
        {"note": "strong closures, genuine AF limits and infinite nests have no finite test; "
                 "criteria 7 and 8 check their finite-level counterparts"},
        informational=True,
    )


def run_suite(seed: int = 0, only=None) -> list:
    """Run the criteria in order; 2 and 3 share the corpus and generated ideals."""
    wanted = set(only) if only else set(range(1, 10))
    pats = corpus(seed) if wanted & {2, 3, 5} else None
    out = []
    ideals: dict = {}
    for c in sorted(wanted):
        if c == 1:
            out.append(criterion_1(seed))
        elif c == 2:
            out.append(criterion_2(seed, pats=pats, collect=ideals))
        elif c == 3:
            out.append(criterion_3(seed, pats=pats, ideals=ideals if 2 in wanted else None))
        elif c == 4:
            out.append(criterion_4(seed))
        elif c == 5:
            out.append(criterion_5(seed, pats=pats))
        elif c == 6:
            out.append(criterion_6())
        elif c == 7:
            out.append(criterion_7(seed))
        elif c == 8:
            out.append(criterion_8(seed))
        elif c == 9:
            out.append(criterion_9())
    return out
