"""Loading, validation, and canonical serialization of system spec files.

A system spec is a JSON document naming a finite alphabet of d x d matrices
(rational entries as "p/q" strings, or floats), optional row vectors /
column vector / per-matrix scales, and a sequence rule assigning a matrix
label to every position n >= 1:

    {"schema_version": 1,
     "d": 2,
     "matrices": {"a": [["1/2", "0"], ["1/3", "1/6"]]},
     "sequence": {"word": "aaa"}}

Sequence rules: {"word": str} (finite), {"periodic": str}, {"generator":
"bernoulli-beta3"} (the built-in 7-dimensional system; matrices/vectors in
the file are ignored and may be omitted), or {"random": {"seed": int}}
(uniform i.i.d. over the sorted labels).

Rational entries keep the exact backend available; any float entry flags
the whole spec non-exact and exact-only features degrade to floats.
``dump_system_spec(load_system_spec(path))`` is byte-identical for files in
canonical form (sorted keys, two-space indent, trailing newline).
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .bernoulli import SHIFTS, _MSTAR0_ROWS, _MSTAR1_ROWS, _MSTAR2_ROWS, beta3_system
from .core_linalg import Mat

__all__ = ["SystemSpec", "SpecError", "load_system_spec", "dump_system_spec", "factor_from_spec"]

SCHEMA_VERSION = 1

_BERNOULLI_FLOAT = tuple(
    Mat(tuple(tuple(x / 2**s for x in row) for row in rows), "float")
    for rows, s in zip((_MSTAR0_ROWS, _MSTAR1_ROWS, _MSTAR2_ROWS), SHIFTS)
)


class SpecError(ValueError):
    """Invalid spec file; message carries field context."""


def _parse_entry(x, where: str):
    if isinstance(x, str):
        try:
            if "/" in x:
                p, q = x.split("/")
                return Fraction(int(p.strip()), int(q.strip()))
            return Fraction(int(x.strip()))
        except (ValueError, ZeroDivisionError) as e:
            raise SpecError(f"{where}: bad rational {x!r} ({e})") from None
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise SpecError(f"{where}: entry must be a 'p/q' string, int, or float, got {type(x).__name__}")
    if isinstance(x, int):
        return Fraction(x)
    return float(x)


@dataclass(frozen=True)
class SystemSpec:
    d: int
    matrices: dict  # label -> Mat
    row_vectors: dict  # label -> tuple
    column_vector: tuple | None
    scales: dict  # label -> Fraction/float
    sequence: dict
    exact: bool
    schema_version: int
    raw: dict


def load_system_spec(path_or_obj) -> SystemSpec:
    if isinstance(path_or_obj, dict):
        doc = path_or_obj
    else:
        try:
            with open(path_or_obj, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
        except OSError as e:
            raise SpecError(f"cannot read spec: {e}") from None
        except json.JSONDecodeError as e:
            raise SpecError(f"spec is not valid JSON: line {e.lineno} col {e.colno}: {e.msg}") from None
    if not isinstance(doc, dict):
        raise SpecError("top level: expected a JSON object")
    version = doc.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise SpecError(f"schema_version: unsupported {version} (this build reads {SCHEMA_VERSION})")
    seq = doc.get("sequence")
    if not isinstance(seq, dict) or len(seq) != 1:
        raise SpecError("sequence: expected exactly one of word/periodic/generator/random")
    kind = next(iter(seq))
    if kind not in ("word", "periodic", "generator", "random"):
        raise SpecError(f"sequence: unknown rule {kind!r}")
    if kind == "generator":
        if seq[kind] != "bernoulli-beta3":
            raise SpecError(f"sequence.generator: unknown generator {seq[kind]!r}")
        d = doc.get("d", 7)
        if d != 7:
            raise SpecError(f"d: the bernoulli-beta3 generator is 7-dimensional, got d={d}")
        sys7 = beta3_system()
        mats = {str(i): m for i, m in enumerate(sys7.M)}
        rows = {str(i): r for i, r in enumerate(sys7.R)}
        return SystemSpec(7, mats, rows, sys7.C, {}, dict(seq), True, version, doc)

    d = doc.get("d")
    if not isinstance(d, int) or d < 1 or d > 32:
        raise SpecError(f"d: expected an integer in 1..32, got {d!r}")
    mats_doc = doc.get("matrices")
    if not isinstance(mats_doc, dict) or not mats_doc:
        raise SpecError("matrices: expected a nonempty object of label -> d x d array")
    exact = True
    matrices = {}
    for label, rows in mats_doc.items():
        if not isinstance(rows, list) or len(rows) != d or any(
            not isinstance(r, list) or len(r) != d for r in rows
        ):
            raise SpecError(f"matrices.{label}: expected a {d}x{d} array")
        parsed = [
            [_parse_entry(x, f"matrices.{label}[{i}][{j}]") for j, x in enumerate(r)]
            for i, r in enumerate(rows)
        ]
        if any(isinstance(x, float) for r in parsed for x in r):
            exact = False
            parsed = [[float(x) for x in r] for r in parsed]
            matrices[label] = Mat(tuple(tuple(r) for r in parsed), "float")
        else:
            matrices[label] = Mat.exact(tuple(tuple(r) for r in parsed))

    scales_doc = doc.get("scales") or {}
    if not isinstance(scales_doc, dict):
        raise SpecError("scales: expected an object mapping labels to scalars")
    scales = {}
    for label, x in scales_doc.items():
        if label not in matrices:
            raise SpecError(f"scales.{label}: no such matrix label")
        scales[label] = _parse_entry(x, f"scales.{label}")

    vectors_doc = doc.get("row_vectors") or {}
    if not isinstance(vectors_doc, dict):
        raise SpecError("row_vectors: expected an object mapping labels to arrays")
    row_vectors = {}
    for label, vec in vectors_doc.items():
        if not isinstance(vec, list) or len(vec) != d:
            raise SpecError(f"row_vectors.{label}: expected a length-{d} array")
        row_vectors[label] = tuple(_parse_entry(x, f"row_vectors.{label}[{j}]") for j, x in enumerate(vec))

    column_vector = None
    if doc.get("column_vector") is not None:
        vec = doc["column_vector"]
        if not isinstance(vec, list) or len(vec) != d:
            raise SpecError(f"column_vector: expected a length-{d} array")
        column_vector = tuple(_parse_entry(x, f"column_vector[{j}]") for j, x in enumerate(vec))

    labels = set(matrices)
    if kind in ("word", "periodic"):
        text = seq[kind]
        if not isinstance(text, str) or not text:
            raise SpecError(f"sequence.{kind}: expected a nonempty string of labels")
        missing = sorted(set(text) - labels)
        if missing:
            raise SpecError(f"sequence.{kind}: labels {missing} not in matrices")
    else:  # random
        rnd = seq[kind]
        if not isinstance(rnd, dict) or not isinstance(rnd.get("seed"), int):
            raise SpecError("sequence.random: expected an object with an integer 'seed'")
    return SystemSpec(d, matrices, row_vectors, column_vector, scales, dict(seq), exact, version, doc)


def _entry_to_json(x):
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return x


def dump_system_spec(spec: SystemSpec) -> str:
    """Canonical serialization: sorted keys, two-space indent, one trailing
    newline.  Round-trips byte-identically for canonical inputs."""
    if spec.sequence.get("generator"):
        doc = {"schema_version": spec.schema_version, "d": spec.d, "sequence": spec.sequence}
    else:
        doc = {
            "schema_version": spec.schema_version,
            "d": spec.d,
            "matrices": {
                label: [[_entry_to_json(x) for x in row] for row in m.rows]
                for label, m in spec.matrices.items()
            },
            "sequence": spec.sequence,
        }
        if spec.scales:
            doc["scales"] = {k: _entry_to_json(v) for k, v in spec.scales.items()}
        if spec.row_vectors:
            doc["row_vectors"] = {
                k: [_entry_to_json(x) for x in v] for k, v in spec.row_vectors.items()
            }
        if spec.column_vector is not None:
            doc["column_vector"] = [_entry_to_json(x) for x in spec.column_vector]
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def factor_from_spec(spec: SystemSpec, backend: str = "float") -> Callable[[int], Mat]:
    """The 1-based factor sequence A_n described by the spec.

    Finite words raise IndexError past their end (callers bound the horizon);
    scales divide their matrix once at build time.
    """
    mats = {}
    for label, m in spec.matrices.items():
        if label in spec.scales:
            s = spec.scales[label]
            if backend == "float" or not spec.exact:
                mf = m.to_float()
                sf = float(s)
                mats[label] = Mat(tuple(tuple(x / sf for x in row) for row in mf.rows), "float")
            else:
                mats[label] = m.scale(Fraction(1, 1) / Fraction(s))
        else:
            mats[label] = m.to_float() if backend == "float" else m

    kind = next(iter(spec.sequence))
    if kind == "word":
        text = spec.sequence["word"]

        def factor(n: int) -> Mat:
            if n < 1 or n > len(text):
                raise IndexError(f"position {n} outside the word of length {len(text)}")
            return mats[text[n - 1]]

        return factor
    if kind == "periodic":
        text = spec.sequence["periodic"]
        return lambda n: mats[text[(n - 1) % len(text)]]
    if kind == "generator":
        mstar = _BERNOULLI_FLOAT if backend == "float" else tuple(
            Mat.exact(rows).scale(Fraction(1, 2**s))
            for rows, s in zip((_MSTAR0_ROWS, _MSTAR1_ROWS, _MSTAR2_ROWS), SHIFTS)
        )
        word = bernoulli_generator_word(1 << 14)

        def factor(n: int) -> Mat:
            if n > len(word):
                raise IndexError(f"built-in generator word exhausted at {n}")
            return mstar[word[n - 1]]

        return factor
    # random
    seed = spec.sequence["random"]["seed"]
    labels = sorted(mats)
    cache: list = []
    rng = random.Random(seed)

    def factor(n: int) -> Mat:
        while len(cache) < n:
            cache.append(labels[rng.randrange(len(labels))])
        return mats[cache[n - 1]]

    return factor


def bernoulli_generator_word(length: int, seed: int = 77) -> list[int]:
    """Deterministic mixing letter stream for the built-in generator: seeded
    uniform letters (avoiding constant tails almost surely)."""
    rng = random.Random(seed)
    return [rng.randrange(3) for _ in range(length)]
