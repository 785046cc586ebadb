"""Similarity invariance of Lie ideals, checked exactly.

Invertibles of a digraph algebra factor as ``t = d(1 + n)`` with ``d`` the
block-diagonal part of ``t`` and ``n`` strictly block upper triangular, hence
nilpotent.  Conjugation by ``1 + n`` expands into a finite telescoping sum,
and conjugation by ``exp(a)`` for nilpotent ``a`` is a finite series in
iterated brackets; both are exposed so they can be compared against direct
matrix conjugation.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial, lcm

import numpy as np

from .algebra import DigraphAlgebra, as_algebra, bracket, pi
from .errors import LilInputError, NotLieIdeal, NotNilpotent, Singular
from .exactmat import Mat, Subspace, format_rational
from .lie import decompose, is_lie_ideal, lie_generate


@dataclass(frozen=True)
class Factorization:
    d: Mat
    n: Mat
    nilpotence_order: int


def _check(alg: DigraphAlgebra, *mats):
    for m in mats:
        alg.check_element(m)


def invert_in_algebra(p, t: Mat) -> Mat:
    alg = as_algebra(p)
    _check(alg, t)
    try:
        inv = t.inverse()
    except Singular:
        raise Singular("element is not invertible (a diagonal block is singular)") from None
    if not alg.supports(inv):
        raise AssertionError("inverse left the algebra; pattern closure is broken")
    return inv


def nilpotence_order(n: Mat) -> int:
    """Largest k with n^k != 0 (so n^(k+1) = 0); 0 for n = 0."""
    if n.is_zero():
        return 0
    power, k = n, 1
    while k <= n.rows:
        nxt = power @ n
        if nxt.is_zero():
            return k
        power, k = nxt, k + 1
    raise NotNilpotent("matrix is not nilpotent")


def factor_dn(p, t: Mat) -> Factorization:
    """t = d(1 + n) with d = π(t)."""
    alg = as_algebra(p)
    _check(alg, t)
    d = pi(alg, t)
    try:
        dinv = d.inverse()
    except Singular:
        raise Singular("element is not invertible (a diagonal block is singular)") from None
    n = dinv @ t - Mat.identity(alg.n)
    return Factorization(d, n, nilpotence_order(n))


def conjugate(p, t: Mat, x: Mat) -> Mat:
    """t^-1 x t."""
    alg = as_algebra(p)
    _check(alg, t)
    return invert_in_algebra(alg, t) @ x @ t


def telescoping_conjugation(p, n: Mat, x: Mat) -> Mat:
    """(1+n)^-1 x (1+n) as x - [n,x] + n[n,x] - ... + (-1)^(k+1) n^k [n,x]."""
    alg = as_algebra(p)
    _check(alg, n, x)
    k = nilpotence_order(n)
    c = bracket(n, x)
    result, term = x, c
    for j in range(k + 1):
        result = result - term if j % 2 == 0 else result + term
        term = n @ term
    return result


def _nilpotent_exp(a: Mat, sign: int) -> Mat:
    k = nilpotence_order(a)
    out = Mat.identity(a.rows)
    power = Mat.identity(a.rows)
    s = Fraction(sign)
    for i in range(1, k + 1):
        power = power @ a
        out = out + power * (s ** i / factorial(i))
    return out


def exp_conjugation_check(p, a: Mat, x: Mat, order: int | None = None, exact: bool = True) -> dict:
    """Iterated brackets y_{j+1} = y_j a - a y_j stay in the Lie ideal generated by x.

    For nilpotent ``a`` the iterates vanish eventually and
    exp(-a) x exp(a) = sum_j y_j / j! is checked exactly.
    """
    alg = as_algebra(p)
    _check(alg, a, x)
    try:
        nilpotence_order(a)
        nilpotent = True
    except NotNilpotent:
        nilpotent = False
        if exact:
            raise NotNilpotent("exact exponentials need a nilpotent argument") from None
    L = lie_generate(alg, [x])
    limit = order if order is not None else 2 * alg.n + 1
    ys = [x]
    while len(ys) <= limit:
        y = ys[-1]
        nxt = y @ a - a @ y
        if nxt.is_zero() and nilpotent:
            break
        ys.append(nxt)
    members = [L.contains(y.entries) for y in ys]
    report = {
        "iterates": len(ys),
        "iterates_in_ideal": all(members),
        "nilpotent": nilpotent,
    }
    if nilpotent:
        lhs = _nilpotent_exp(a, -1) @ x @ _nilpotent_exp(a, 1)
        rhs = Mat.zeros(alg.n)
        for j, y in enumerate(ys):
            rhs = rhs + y * Fraction(1, factorial(j))
        report["series_matches"] = lhs == rhs
        report["conjugate_in_ideal"] = L.contains(lhs.entries)
        report["conjugate"] = lhs
    report["ok"] = report["iterates_in_ideal"] and report.get("series_matches", True) and report.get(
        "conjugate_in_ideal", True
    )
    return report


# integer kernels for the bulk checks

_INT64_SAFE = float(2 ** 62)


def _as_ints(m: Mat) -> tuple:
    den = 1
    for x in m.entries:
        if x:
            den = lcm(den, x.denominator)
    return tuple(int(x * den) for x in m.entries), den


def _unit_lower_inverse(low):
    m = len(low)
    inv = [[1 if i == j else 0 for j in range(m)] for i in range(m)]
    for i in range(m):
        for j in range(i):
            inv[i][j] = -sum(low[i][k] * inv[k][j] for k in range(j, i))
    return inv


def _matmul_lists(a, b):
    m = len(a)
    return [[sum(a[i][k] * b[k][j] for k in range(m)) for j in range(m)] for i in range(m)]


def _random_unimodular_block(rng, m):
    """d = L D U with unit-triangular integer L, U and D = diag(c, ±1, ..., ±1), c in ±1..±4.

    Returns (d, c * d^-1, c); the scaled inverse is U^-1 (c D^-1) L^-1, an integer matrix.
    """
    low = [[1 if i == j else (rng.randint(-1, 1) if i > j else 0) for j in range(m)] for i in range(m)]
    up = [[1 if i == j else (rng.randint(-1, 1) if i < j else 0) for j in range(m)] for i in range(m)]
    dg = [rng.choice((-1, 1)) for _ in range(m)]
    dg[0] = rng.choice((-4, -3, -2, -1, 1, 2, 3, 4))
    c = dg[0]
    d = _matmul_lists(low, [[dg[i] * up[i][j] for j in range(m)] for i in range(m)])
    low_inv = _unit_lower_inverse(low)
    up_inv = [list(r) for r in zip(*_unit_lower_inverse([list(r) for r in zip(*up)]))]
    # c / dg[i] is an integer: dg[i] = ±1 for i > 0
    scaled = [[(c // dg[i]) * low_inv[i][j] for j in range(m)] for i in range(m)]
    return d, _matmul_lists(up_inv, scaled), c


def _draw(alg: DigraphAlgebra, rng: random.Random):
    """Integer entries of d (block diagonal), n (supported on S) and C * d^-1, with C."""
    n = alg.n
    d = [0] * alg.N
    dinv = [0] * alg.N
    parts = []
    for b in alg.structure.blocks:
        parts.append((b, *_random_unimodular_block(rng, len(b))))
    common = 1
    for *_, c in parts:
        common = lcm(common, abs(c))
    for b, blk, inv, c in parts:
        f = common // c
        for a, i in enumerate(b):
            for k, j in enumerate(b):
                d[i * n + j] = blk[a][k]
                dinv[i * n + j] = f * inv[a][k]
    nil = [0] * alg.N
    for i, j in alg.unit_pairs:
        if alg.block_of(i) != alg.block_of(j):
            nil[i * n + j] = rng.randint(-2, 2)
    return d, nil, dinv, common


def random_invertible(p, rng: random.Random) -> Factorization:
    """Random t = d(1+n): d block diagonal with det ±1..±4 per block, n in [-2, 2] on S."""
    alg = as_algebra(p)
    d, nil, _, _ = _draw(alg, rng)
    dm, nm = Mat(alg.n, alg.n, d), Mat(alg.n, alg.n, nil)
    return Factorization(dm, nm, nilpotence_order(nm))


def _bound(*arrays) -> float:
    """Float upper bound for |entries| of a product of the given integer arrays."""
    out = 1.0
    for a in arrays:
        out *= float(np.abs(a).max()) if a.size else 0.0
    return out


def _members(ann: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Boolean mask: which rows y of Y satisfy ann . y = 0.

    Uses int64 when a float bound rules out overflow, Python ints otherwise.
    """
    if ann.shape[0] == 0:
        return np.ones(Y.shape[0], dtype=bool)
    if object in (ann.dtype, Y.dtype) or _bound(ann, Y) * ann.shape[1] >= _INT64_SAFE:
        ann, Y = ann.astype(object), Y.astype(object)
    return ~np.any((ann @ Y.T) != 0, axis=0)


def _conjugate_stack(left: np.ndarray, X: np.ndarray, right: np.ndarray):
    """left @ X_i @ right for each X_i, exact; returns (flattened int64 or object array)."""
    n = left.shape[0]
    if X.dtype != object and _bound(left, X, right) * n * n < _INT64_SAFE:
        return (left @ X @ right).reshape(X.shape[0], n * n)
    obj = (left.astype(object) @ X.astype(object) @ right.astype(object))
    return obj.reshape(X.shape[0], n * n)


@dataclass
class SimilarityReport:
    seed: int
    trials: int
    dim: int
    failures: list = field(default_factory=list)
    split: dict = field(default_factory=dict)
    trials_run: int = 0

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {
            "seed": self.seed,
            "trials": self.trials,
            "trials_run": self.trials_run,
            "dim": self.dim,
            "failures": [
                {"trial": i, "t": [[format_rational(x) for x in r] for r in t.tolist()],
                 "x": [[format_rational(v) for v in r] for r in x.tolist()], "part": part}
                for i, t, x, part in self.failures
            ],
            "split": self.split,
        }


def check_similarity_invariance(
    p,
    L: Subspace,
    trials: int = 100,
    seed: int = 0,
    require_lie: bool = True,
    split: bool = True,
    stop_at_first: bool = False,
    ambient: bool = False,
) -> SimilarityReport:
    """Conjugate every basis element of L by random invertibles and test membership.

    Exact throughout: with an integer scale c, c * t^-1 = (1+n)^-1 (c d^-1)
    is an integer matrix, and membership in L is a vanishing test against an
    integer annihilator.  Products run in int64 only when a float bound rules
    out overflow, and in Python integers otherwise.  Conjugation is
    injective, so inclusion of t^-1 L t in L already gives equality.

    With ``split`` the diagonal conjugation d^-1 x d is checked against L
    and (1+n)^-1 x (1+n) - x against K = L ∩ S separately.
    """
    alg = as_algebra(p)
    if require_lie:
        verdict = is_lie_ideal(alg, L, ambient=ambient)
        if not verdict:
            raise NotLieIdeal(verdict.witness)
    elif L.ambient_dim != alg.N:
        raise LilInputError("subspace has the wrong ambient dimension")
    split = split and require_lie and not ambient
    n = alg.n
    rng = random.Random(seed)
    ann = _int_array(L.annihilator(), alg.N)
    X = _int_array(L.integer_basis(), alg.N).reshape(-1, n, n)
    if split:
        _, K = decompose(alg, L)
        K_ann = _int_array(K.annihilator(), alg.N)
    report = SimilarityReport(seed=seed, trials=trials, dim=L.dim)
    diag_ok = nil_ok = 0
    ident = np.eye(n, dtype=np.int64)

    for trial in range(trials):
        d_list, n_list, dinv_list, scale = _draw(alg, rng)
        d = np.array(d_list, dtype=np.int64).reshape(n, n)
        nil = np.array(n_list, dtype=np.int64).reshape(n, n)
        dinv = np.array(dinv_list, dtype=np.int64).reshape(n, n)
        if not np.array_equal(d @ dinv, scale * ident):
            raise AssertionError("scaled block inverse failed its integer check")
        one_n = ident + nil
        # (1+n)^-1 = sum_j (-n)^j
        inv_one_n = ident.copy()
        power = ident
        for _ in range(n):
            power = power @ (-nil)
            if not power.any():
                break
            inv_one_n = inv_one_n + power
        t = d @ one_n
        s = inv_one_n @ dinv
        report.trials_run += 1
        if X.shape[0] == 0:
            continue
        ok = _members(ann, _conjugate_stack(s, X, t))
        if not ok.all():
            bad = int(np.argmin(ok))
            report.failures.append((trial, _to_mat(t), _to_mat(X[bad]), "full"))
            if stop_at_first:
                break
        if split:
            okd = _members(ann, _conjugate_stack(dinv, X, d))
            diag_ok += int(okd.sum())
            if not okd.all():
                report.failures.append((trial, _to_mat(d), _to_mat(X[int(np.argmin(okd))]), "diagonal"))
            Yn = _conjugate_stack(inv_one_n, X, one_n) - X.reshape(X.shape[0], n * n)
            okn = _members(K_ann, Yn)
            nil_ok += int(okn.sum())
            if not okn.all():
                report.failures.append((trial, _to_mat(one_n), _to_mat(X[int(np.argmin(okn))]), "nilpotent"))
    if split:
        report.split = {
            "diagonal_conjugations_in_L": diag_ok,
            "nilpotent_corrections_in_K": nil_ok,
            "checked": diag_ok + nil_ok,
        }
    return report


def _int_array(rows, width) -> np.ndarray:
    rows = list(rows)
    if any(abs(x) >= 2 ** 62 for r in rows for x in r):
        return np.array(rows, dtype=object).reshape(len(rows), width)
    return np.array(rows, dtype=np.int64).reshape(len(rows), width)


def _to_mat(a: np.ndarray) -> Mat:
    n = a.shape[0]
    return Mat(n, n, [int(x) for x in a.ravel()])
