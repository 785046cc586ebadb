"""File formats: pattern files, subspace and generator JSON, tower JSON.

Everything on disk is 1-based; the Python API is 0-based.
"""

from __future__ import annotations

import json
import os
import re
from pathlib import Path

from .af_tower import Tower, explicit_embedding, max_n, standard_embedding
from .algebra import DigraphAlgebra, Pattern, read_pattern
from .errors import LilInputError, TooLarge
from .exactmat import Mat, Subspace, as_rational, format_rational


def check_size(p: Pattern) -> Pattern:
    if p.n > max_n():
        raise TooLarge(f"pattern size {p.n} exceeds the cap {max_n()} (set LIL_MAX_N to raise it)")
    return p


def load_pattern(path) -> Pattern:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise LilInputError(f"cannot read pattern file {path}: {exc.strerror}") from None
    return check_size(read_pattern(text))


def load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise LilInputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise LilInputError(f"{path} is not valid JSON: {exc}") from None


_PAIR = re.compile(r"\(\s*(\d+)\s*,\s*(\d+)\s*\)")


def parse_pairs(text: str) -> list:
    """'(1,2);(2,3)' -> [(0, 1), (1, 2)]."""
    text = text.strip()
    if not text:
        return []
    parts = [s for s in text.split(";") if s.strip()]
    out = []
    for part in parts:
        m = _PAIR.fullmatch(part.strip())
        if not m:
            raise LilInputError(f"cannot parse block pair {part.strip()!r}; expected '(u,v)'")
        u, v = int(m.group(1)), int(m.group(2))
        if u < 1 or v < 1:
            raise LilInputError("block indices start at 1")
        out.append((u - 1, v - 1))
    return out


def parse_atoms(text: str) -> list:
    try:
        atoms = [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise LilInputError(f"cannot parse atoms {text!r}; expected e.g. 1,2,1") from None
    if not atoms or min(atoms) < 1:
        raise LilInputError("atom sizes must be positive integers")
    return atoms


def mat_to_json(m: Mat) -> list:
    return [[format_rational(x) for x in row] for row in m.tolist()]


def mat_from_json(rows, n: int | None = None) -> Mat:
    try:
        m = Mat.from_rows([[as_rational(x) for x in row] for row in rows])
    except (TypeError, ValueError) as exc:
        raise LilInputError(f"bad matrix entry: {exc}") from None
    if n is not None and (m.rows != n or m.cols != n):
        raise LilInputError(f"expected a {n}x{n} matrix, got {m.rows}x{m.cols}")
    return m


def subspace_from_json(data, n: int) -> Subspace:
    """Accepts {ambient_dim, basis} or a list of n x n matrices spanning the subspace."""
    if isinstance(data, dict) and "basis" in data:
        if int(data.get("ambient_dim", n * n)) != n * n:
            raise LilInputError(f"subspace ambient_dim {data.get('ambient_dim')} != {n * n}")
        try:
            return Subspace.from_json({"ambient_dim": n * n, "basis": data["basis"]})
        except (TypeError, ValueError) as exc:
            raise LilInputError(f"bad subspace basis: {exc}") from None
    return Subspace(n * n, [m.entries for m in generators_from_json(data, n)])


def generators_from_json(data, n: int) -> list:
    """A list of matrices, or {"generators": [...]}."""
    if isinstance(data, dict):
        data = data.get("generators", data.get("matrices"))
    if not isinstance(data, list):
        raise LilInputError("expected a list of matrices or {\"generators\": [...]}")
    return [mat_from_json(m, n) for m in data]


def load_subspace(path, n: int) -> Subspace:
    return subspace_from_json(load_json(path), n)


def load_generators(path, n: int) -> list:
    return generators_from_json(load_json(path), n)


def _level_pattern(ref, base: Path) -> Pattern:
    if isinstance(ref, str):
        return load_pattern(base / ref if not os.path.isabs(ref) else ref)
    if isinstance(ref, dict) and "rows" in ref:
        p = Pattern.from_rows(ref["rows"])
        if "n" in ref and int(ref["n"]) != p.n:
            raise LilInputError(f"level declares n={ref['n']} but has {p.n} rows")
        return check_size(p)
    raise LilInputError("a level is a pattern file path or {\"n\": .., \"rows\": [..]}")


def _unit_map_from_json(data) -> dict:
    out = {}
    for key, pairs in data.items():
        m = _PAIR.fullmatch(f"({key})") if "(" not in key else _PAIR.fullmatch(key)
        if not m:
            raise LilInputError(f"bad unit key {key!r}; expected 'i,j'")
        ij = (int(m.group(1)) - 1, int(m.group(2)) - 1)
        out[ij] = [(int(a) - 1, int(b) - 1) for a, b in pairs]
    return out


def tower_from_json(data, base: Path = Path(".")) -> Tower:
    """{levels: [...], embeddings: [{multiplicity[, order]} | {unit_map}]}.

    With a single level, later levels are generated from the multiplicities.
    """
    if not isinstance(data, dict) or "levels" not in data or "embeddings" not in data:
        raise LilInputError("tower JSON needs 'levels' and 'embeddings'")
    refs, specs = data["levels"], data["embeddings"]
    if not refs:
        raise LilInputError("tower needs at least one level")
    levels = [DigraphAlgebra(_level_pattern(refs[0], base))]
    given = [DigraphAlgebra(_level_pattern(r, base)) for r in refs[1:]]
    if given and len(given) != len(specs):
        raise LilInputError("a tower with L levels needs L-1 embeddings")
    embs = []
    for q, spec in enumerate(specs):
        target = given[q] if given else None
        if "unit_map" in spec:
            if target is None:
                raise LilInputError("explicit unit maps need the target level listed")
            emb = explicit_embedding(levels[-1], target, _unit_map_from_json(spec["unit_map"]))
        elif "multiplicity" in spec:
            emb = standard_embedding(levels[-1], int(spec["multiplicity"]),
                                     order=spec.get("order", "interleaved"),
                                     target=target if target is not None else spec.get("target"))
        else:
            raise LilInputError("each embedding needs 'multiplicity' or 'unit_map'")
        embs.append(emb)
        levels.append(emb.target)
    return Tower(levels, embs)


def load_tower(path) -> Tower:
    return tower_from_json(load_json(path), Path(path).parent)
