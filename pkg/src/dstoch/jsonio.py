"""JSON input formats.

Matrix object, 1-based indices throughout::

    {"n": 3, "rows": [["1/2", "1/2", "0"], ...]}
    {"averaging": [[1, 2], [3]]}
    {"permutation": [2, 1, 3]}          # P(j) for j = 1..n

Vector object: ``{"n": 3, "coords": ["1/2", "1/3", "1/6"]}``.

Generator set: ``{"generators": {"name": <matrix>, ...}}``, a list of
matrices (named M1, M2, ...), or one bare matrix.
"""

from __future__ import annotations

import json
from pathlib import Path

from .errors import InputError, InvalidRational, InvalidVector, NotSquare
from .exact import (
    DSMatrix,
    GeneratorSet,
    Partition,
    Permutation,
    SimplexVector,
    averaging,
    ds_from_rows,
)


def load_json(path) -> object:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc


def parse_matrix(obj) -> DSMatrix:
    if not isinstance(obj, dict):
        raise InputError("matrix must be a JSON object")
    if "averaging" in obj:
        return averaging(Partition.from_one_based(obj["averaging"], obj.get("n")))
    if "permutation" in obj:
        perm = Permutation.from_one_based(obj["permutation"])
        if "n" in obj and obj["n"] != perm.n:
            raise InputError(f"permutation has {perm.n} entries, n is {obj['n']}")
        return perm.matrix()
    if "rows" not in obj:
        raise InputError("matrix object needs 'rows', 'averaging' or 'permutation'")
    rows = obj["rows"]
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise NotSquare("'rows' must be a list of lists")
    if "n" in obj and obj["n"] != len(rows):
        raise NotSquare(f"n is {obj['n']} but {len(rows)} rows were given")
    for r in rows:
        for x in r:
            if isinstance(x, float):
                raise InvalidRational(f"floating-point entry {x!r}; write it as a fraction string")
    return ds_from_rows(rows)


def parse_vector(obj) -> SimplexVector:
    if not isinstance(obj, dict) or "coords" not in obj:
        raise InvalidVector("vector object needs 'coords'")
    coords = obj["coords"]
    if any(isinstance(c, float) for c in coords):
        raise InvalidVector("floating-point coordinate; write it as a fraction string")
    if "n" in obj and obj["n"] != len(coords):
        raise InvalidVector(f"n is {obj['n']} but {len(coords)} coordinates were given")
    return SimplexVector(tuple(coords))


def parse_generators(obj) -> GeneratorSet:
    if isinstance(obj, dict) and "generators" in obj:
        obj = obj["generators"]
    if isinstance(obj, dict) and any(k in obj for k in ("rows", "averaging", "permutation")):
        return GeneratorSet([("M1", parse_matrix(obj))])
    if isinstance(obj, list):
        return GeneratorSet([(f"M{k + 1}", parse_matrix(m)) for k, m in enumerate(obj)])
    if isinstance(obj, dict):
        return GeneratorSet([(str(k), parse_matrix(m)) for k, m in obj.items()])
    raise InputError("generator set must be an object or a list")
