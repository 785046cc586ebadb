"""Command-line entry point ``lil``.

Every command prints one JSON report on stdout:
``{command, inputs, outcome, details, version}``.  Exit codes: 0 pass,
1 a checked identity or theorem failed, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import random
import sys

import numpy as np

from . import __version__, nest
from .af_tower import (
    check_embedding, lemma_row_check, pi_compatibility, random_generators, theorem_lieform_check,
)
from .algebra import DigraphAlgebra, random_element
from .errors import LilError, LilInputError
from .exactmat import Mat
from .ideals import enumerate_offdiag_ideals, ideal_closure, to_subspace, DEFAULT_PAIR_CAP
from .io import (
    load_generators, load_pattern, load_subspace, load_tower, mat_to_json, parse_atoms, parse_pairs,
)
from .lie import (
    decompose, describe, enumerate_descriptors, is_lie_ideal, lie_generate, maximal_addend,
)
from .similarity import check_similarity_invariance
from .suite import _decomposition_failures, run_suite


def _witness_json(w):
    if w is None:
        return None
    return [mat_to_json(x) if isinstance(x, Mat) else x for x in w]


def _ideal_json(alg, k) -> dict:
    return {"block_pairs": k.to_json(), "dim": to_subspace(alg, k).dim}


def _algebra(args) -> DigraphAlgebra:
    return DigraphAlgebra(load_pattern(args.pattern))


# commands: each returns (details, ok)

def cmd_validate(args):
    alg = _algebra(args)
    d = alg.structure.to_json()
    d.update(n=alg.n, sizes=list(alg.structure.sizes()), dimA=alg.subspace.dim, dimE=alg.E.dim,
             dimS=alg.S.dim, triangular=alg.is_triangular)
    return d, True


def cmd_ideals_enumerate(args):
    alg = _algebra(args)
    ideals = enumerate_offdiag_ideals(alg, cap=args.cap)
    return {"count": len(ideals), "ideals": [_ideal_json(alg, k) for k in ideals]}, True


def cmd_ideals_close(args):
    alg = _algebra(args)
    pairs = parse_pairs(args.seed)
    for u, v in pairs:
        if not (u < alg.p and v < alg.p):
            raise LilInputError(f"block index out of range 1..{alg.p}")
    return _ideal_json(alg, ideal_closure(alg, pairs)), True


def _load_lie_input(args, alg):
    if getattr(args, "subspace", None):
        return load_subspace(args.subspace, alg.n)
    if getattr(args, "gens", None):
        return lie_generate(alg, load_generators(args.gens, alg.n))
    raise LilInputError("give --subspace or --gens")


def cmd_lie_check(args):
    alg = _algebra(args)
    S = load_subspace(args.subspace, alg.n)
    verdict = is_lie_ideal(alg, S, ambient=args.ambient)
    d = {"dim": S.dim, "is_lie_ideal": verdict.ok, "witness": _witness_json(verdict.witness)}
    if verdict.ok and not args.ambient:
        d["descriptor"] = describe(alg, S).to_json()
    return d, True


def cmd_lie_generate(args):
    alg = _algebra(args)
    L = lie_generate(alg, load_generators(args.gens, alg.n), ambient=args.ambient)
    d = {"dim": L.dim, "subspace": L.to_json()}
    if not args.ambient:
        d["descriptor"] = describe(alg, L).to_json()
    return d, True


def cmd_lie_decompose(args):
    alg = _algebra(args)
    L = _load_lie_input(args, alg)
    G, K = decompose(alg, L)
    problems = _decomposition_failures(alg, L)
    d = {
        "dim": L.dim,
        "G": G.to_json(),
        "K": K.to_json(),
        "problems": problems,
    }
    if not problems:
        d["descriptor"] = describe(alg, L).to_json()
    return d, not problems


def cmd_lie_max_addend(args):
    alg = _algebra(args)
    pairs = parse_pairs(args.ideal)
    k = ideal_closure(alg, pairs)
    if k.pairs != frozenset(pairs):
        raise LilInputError("the given block pairs are not closed above and to the right; "
                            f"closure is {k.to_json()}")
    if not k.is_offdiagonal:
        raise LilInputError("the ideal must be off-diagonal")
    F, cg = maximal_addend(alg, k)
    lie = is_lie_ideal(alg, F + to_subspace(alg, k))
    return {
        "ideal": k.to_json(),
        "constraint_graph": cg.to_json(),
        "dim_F": F.dim,
        "F": F.to_json(),
        "F_plus_K_is_lie": lie.ok,
        "descriptor": describe(alg, F + to_subspace(alg, k)).to_json(),
    }, lie.ok


def cmd_lie_enumerate(args):
    alg = _algebra(args)
    k = None
    if args.ideal is not None:
        k = ideal_closure(alg, parse_pairs(args.ideal))
    descs = enumerate_descriptors(alg, k=k, cap=args.cap)
    return {
        "count": len(descs),
        "descriptors": [dict(d.to_json(), dim=d.to_subspace(alg).dim) for d in descs],
    }, True


def cmd_sim_check(args):
    alg = _algebra(args)
    L = load_subspace(args.lie, alg.n)
    if args.probe:
        rep = check_similarity_invariance(alg, L, trials=args.trials, seed=args.seed, require_lie=False,
                                          split=False, stop_at_first=True)
        d = rep.to_json()
        d["violation_found"] = bool(rep.failures)
        return d, True
    rep = check_similarity_invariance(alg, L, trials=args.trials, seed=args.seed)
    return rep.to_json(), rep.ok


def cmd_tower_run(args):
    tower = load_tower(args.tower)
    rng = random.Random(args.seed)
    embs = [check_embedding(e) for e in tower.embeddings]
    pi_ok = [pi_compatibility(e) for e in tower.embeddings]
    d = {"levels": [lvl.n for lvl in tower.levels], "embeddings": embs, "pi_compatible": pi_ok}
    ok = all(e["ok"] for e in embs) and all(pi_ok)
    if args.gens:
        sets = [load_generators(args.gens, tower.top.n)]
    else:
        sets = [random_generators(tower, rng) for _ in range(args.sets)]
    lemma, theorem = [], []
    for gens in sets:
        L = lie_generate(tower.top, gens)
        q = rng.randrange(tower.depth)
        lr = lemma_row_check(tower.top, L, trials=args.pairs, seed=rng.randrange(2**31),
                             projections=tower.diagonal_projections(q))
        lemma.append(dict(lr, level=q + 1))
        ok = ok and lr["ok"]
        if tower.top.is_triangular:
            th = theorem_lieform_check(tower, gens, seed=rng.randrange(2**31))
            theorem.append(th)
            ok = ok and th["ok"]
    d["lemma_row_check"] = lemma
    d["theorem_check"] = theorem if tower.top.is_triangular else "skipped: top level is not triangular"
    return d, ok


def cmd_nest_check(args):
    atoms = parse_atoms(args.atoms)
    rng = np.random.default_rng(args.seed)
    mask = None
    alg = None
    if args.csl:
        alg = DigraphAlgebra(load_pattern(args.csl))
        nest.check_csl_atoms(alg, atoms)
        mask = nest.pattern_mask(alg)
    A = nest.random_block_upper(atoms, rng, mask=mask)
    B = nest.random_block_upper(atoms, rng, mask=mask)
    fro = float(np.linalg.norm(A))
    thetas = rng.uniform(0, 2 * np.pi, 16)
    boundary = max(nest.boundary_conjugation_check(A, atoms, float(t)) for t in thetas) / fro
    nb = nest.norm_bound_check(A, atoms, samples=args.samples, seed=args.seed)
    inv = nest.inverse_path_check(A, np.linalg.inv(A), atoms, samples=args.samples, seed=args.seed)
    zs = nest.disk_samples(args.samples, rng)
    mult = max(nest.multiplicativity_residual(A, B, atoms, z) for z in zs)
    coeffs = nest.path_coefficients(A, atoms)
    p = len(atoms)
    degree_residual = max(
        [float(np.linalg.norm(coeffs[k] - nest.diagonal_band(A, atoms, k))) for k in range(p)]
        + [float(np.linalg.norm(coeffs[k])) for k in range(p, 2 * p)]
    ) / fro
    d = {
        "atoms": atoms,
        "boundary_residual_rel": boundary,
        "norm_bound": nb,
        "inverse_path": inv,
        "multiplicativity_residual_rel": mult,
        "degree_residual_rel": degree_residual,
    }
    ok = (boundary <= nest.BOUNDARY_RTOL and nb["ok"] and inv["ok"]
          and mult <= nest.BOUNDARY_RTOL and degree_residual <= nest.BOUNDARY_RTOL)
    if alg is not None:
        prng = random.Random(args.seed)
        L = lie_generate(alg, [random_element(alg, prng, density=0.3)])
        sim = nest.lie_similarity_path_check(alg, L, atoms, samples=min(args.samples, 50), seed=args.seed)
        d["csl_similarity"] = sim
        ok = ok and sim["ok"]
    return d, ok


def cmd_suite(args):
    only = [int(c) for c in args.only.split(",")] if args.only else None
    results = run_suite(args.seed, only=only)
    for r in results:
        print(r.line(), file=sys.stderr)
    return {"criteria": [r.to_json(timings=args.timings) for r in results]}, all(r.ok for r in results)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--pretty", action="store_true", help="indent the JSON report")

    parser = argparse.ArgumentParser(prog="lil", description="Lie ideals of digraph algebras.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="check a pattern and print its block structure")
    p.add_argument("pattern")
    p.set_defaults(func=cmd_validate)

    ideals = sub.add_parser("ideals", help="off-diagonal associative ideals")
    isub = ideals.add_subparsers(dest="action", required=True)
    p = isub.add_parser("enumerate", parents=[common])
    p.add_argument("pattern")
    p.add_argument("--cap", type=int, default=DEFAULT_PAIR_CAP, help="maximum number of strict block pairs")
    p.set_defaults(func=cmd_ideals_enumerate)
    p = isub.add_parser("close", parents=[common])
    p.add_argument("pattern")
    p.add_argument("--seed", required=True, help='block pairs, e.g. "(1,2);(2,3)"')
    p.set_defaults(func=cmd_ideals_close)

    lie = sub.add_parser("lie", help="Lie ideals")
    lsub = lie.add_subparsers(dest="action", required=True)
    p = lsub.add_parser("check", parents=[common])
    p.add_argument("pattern")
    p.add_argument("--subspace", required=True)
    p.add_argument("--ambient", action="store_true", help="allow subspaces of the full matrix space")
    p.set_defaults(func=cmd_lie_check)
    p = lsub.add_parser("generate", parents=[common])
    p.add_argument("pattern")
    p.add_argument("--gens", required=True)
    p.add_argument("--ambient", action="store_true")
    p.set_defaults(func=cmd_lie_generate)
    p = lsub.add_parser("decompose", parents=[common])
    p.add_argument("pattern")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--subspace")
    g.add_argument("--gens")
    p.set_defaults(func=cmd_lie_decompose)
    p = lsub.add_parser("max-addend", parents=[common])
    p.add_argument("pattern")
    p.add_argument("--ideal", required=True, help='block pairs, e.g. "(1,3)"')
    p.set_defaults(func=cmd_lie_max_addend)
    p = lsub.add_parser("enumerate", parents=[common])
    p.add_argument("pattern")
    p.add_argument("--ideal", help="restrict to one ideal given by its generating block pairs")
    p.add_argument("--cap", type=int, default=DEFAULT_PAIR_CAP)
    p.set_defaults(func=cmd_lie_enumerate)

    sim = sub.add_parser("sim", help="similarity invariance")
    ssub = sim.add_subparsers(dest="action", required=True)
    p = ssub.add_parser("check", parents=[common])
    p.add_argument("pattern")
    p.add_argument("--lie", required=True, help="subspace JSON")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--probe", action="store_true",
                   help="accept any subspace and report whether a violating conjugation was found")
    p.set_defaults(func=cmd_sim_check)

    tower = sub.add_parser("tower", help="AF towers")
    tsub = tower.add_subparsers(dest="action", required=True)
    p = tsub.add_parser("run", parents=[common])
    p.add_argument("tower")
    p.add_argument("--gens", help="generators in top-level coordinates")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sets", type=int, default=10, help="random generator sets when --gens is absent")
    p.add_argument("--pairs", type=int, default=10, help="extra random pairs for the row identity")
    p.set_defaults(func=cmd_tower_run)

    nst = sub.add_parser("nest", help="finite nest algebra paths")
    nsub = nst.add_subparsers(dest="action", required=True)
    p = nsub.add_parser("check", parents=[common])
    p.add_argument("--atoms", required=True, help="atom sizes, e.g. 1,2,1")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csl", help="pattern file restricting the algebra")
    p.set_defaults(func=cmd_nest_check)

    p = sub.add_parser("suite", parents=[common], help="run the acceptance criteria")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--only", help="comma-separated criterion numbers")
    p.add_argument("--timings", action="store_true", help="include wall-clock times in the report")
    p.set_defaults(func=cmd_suite)
    return parser


def _inputs(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "pretty", "command", "action")}


def _emit(report: dict, pretty: bool):
    print(json.dumps(report, sort_keys=True, indent=2 if pretty else None, default=str))


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    command = " ".join(x for x in (args.command, getattr(args, "action", None)) if x)
    report = {"command": command, "inputs": _inputs(args), "version": __version__}
    pretty = getattr(args, "pretty", False)
    try:
        details, ok = args.func(args)
    except LilInputError as exc:
        print(f"lil: error: {exc}", file=sys.stderr)
        report.update(outcome="error", details={"error": str(exc), "type": type(exc).__name__})
        if getattr(exc, "witness", None) is not None:
            report["details"]["witness"] = _witness_json(exc.witness)
        _emit(report, pretty)
        return 2
    except LilError as exc:
        print(f"lil: failure: {exc}", file=sys.stderr)
        report.update(outcome="fail", details={"error": str(exc), "type": type(exc).__name__})
        _emit(report, pretty)
        return 1
    report.update(outcome="pass" if ok else "fail", details=details)
    _emit(report, pretty)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
