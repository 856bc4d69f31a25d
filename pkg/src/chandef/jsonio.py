"""JSON encoding of maps, experiments, POVMs and reports.

Matrices are written as flat row-major lists of ``[re, im]`` pairs.  Floats
are emitted with Python's shortest round-trip representation, so decoding
reproduces every entry bit for bit.

Schemas::

    HermitianMap  {"in_blocks": [...], "out_blocks": [...], "choi": [[re, im], ...]}
    Experiment    [matrix, ...]   or  {"blocks": [...], "states": [matrix, ...]}
    Povm          [matrix, ...]   or  {"blocks": [...], "effects": [matrix, ...]}

Readers also accept matrices given as nested lists of real numbers or of
``[re, im]`` pairs.
"""

from __future__ import annotations

import json
import math
from typing import Any

import numpy as np

from .hmap import Experiment, HermitianMap
from .matops import BlockAlgebra, DimensionError, HermitianOperator, Povm


class ParseError(ValueError):
    """Input does not follow the expected JSON schema."""


def encode_matrix(a) -> list:
    a = np.asarray(a, dtype=complex)
    return [[float(z.real), float(z.imag)] for z in a.ravel()]


def decode_matrix(data) -> np.ndarray:
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"matrix entries must be numbers: {exc}") from None
    # (n, 2) with n != 2 can only be a flat list of pairs; (2, 2) is read as a
    # real 2x2 matrix since two pairs never form a square.
    if arr.ndim == 2 and arr.shape[1] == 2 and arr.shape[0] != 2:
        flat = arr[:, 0] + 1j * arr[:, 1]
    elif arr.ndim == 2:
        return arr.astype(complex)
    elif arr.ndim == 3 and arr.shape[2] == 2:
        return arr[..., 0] + 1j * arr[..., 1]
    else:
        raise ParseError(f"cannot read a matrix from an array of shape {arr.shape}")
    n = math.isqrt(flat.size)
    if n * n != flat.size:
        raise DimensionError(f"{flat.size} entries do not form a square matrix")
    return flat.reshape(n, n)


def encode_algebra(alg: BlockAlgebra) -> dict:
    if alg.is_contiguous:
        return {"blocks": list(alg.blocks)}
    return {"blocks": list(alg.blocks), "labels": list(alg.labels)}


def _algebra(obj: dict, key: str, dim: int | None) -> BlockAlgebra:
    labels = obj.get(key.replace("blocks", "labels"))
    if labels is not None:
        return BlockAlgebra(tuple(int(l) for l in labels))
    blocks = obj.get(key)
    if blocks is None:
        if dim is None:
            raise ParseError(f"missing field {key!r}")
        return BlockAlgebra.full(dim)
    return BlockAlgebra.from_blocks(blocks)


def map_to_json(m: HermitianMap) -> dict:
    out = {"in_blocks": list(m.in_alg.blocks), "out_blocks": list(m.out_alg.blocks),
           "choi": encode_matrix(m.choi)}
    if not m.in_alg.is_contiguous:
        out["in_labels"] = list(m.in_alg.labels)
    if not m.out_alg.is_contiguous:
        out["out_labels"] = list(m.out_alg.labels)
    return out


def map_from_json(obj: dict) -> HermitianMap:
    if not isinstance(obj, dict) or "choi" not in obj:
        raise ParseError("a map needs a 'choi' field")
    choi = decode_matrix(obj["choi"])
    in_alg = _algebra(obj, "in_blocks", None)
    out_alg = _algebra(obj, "out_blocks", choi.shape[0] // in_alg.ambient_dim)
    return HermitianMap(choi, in_alg, out_alg)


def _ops_from_json(obj, key):
    if isinstance(obj, dict):
        mats = [decode_matrix(x) for x in obj[key]]
        alg = _algebra(obj, "blocks", mats[0].shape[0])
    elif isinstance(obj, list):
        mats = [decode_matrix(x) for x in obj]
        alg = BlockAlgebra.full(mats[0].shape[0]) if mats else None
    else:
        raise ParseError(f"expected a list of matrices or an object with {key!r}")
    if not mats:
        raise ParseError("empty operator list")
    return mats, alg


def experiment_to_json(e: Experiment):
    mats = [encode_matrix(s) for s in e.matrices]
    if e.algebra.is_full:
        return mats
    return {**encode_algebra(e.algebra), "states": mats}


def experiment_from_json(obj) -> Experiment:
    mats, alg = _ops_from_json(obj, "states")
    return Experiment.from_arrays(mats, alg)


def povm_to_json(p: Povm):
    mats = [encode_matrix(m) for m in p.matrices]
    alg = p.effects[0].algebra
    if alg.is_full:
        return mats
    return {**encode_algebra(alg), "effects": mats}


def povm_from_json(obj) -> Povm:
    mats, alg = _ops_from_json(obj, "effects")
    return Povm(tuple(HermitianOperator(m, alg) for m in mats))


def encode_value(v: Any):
    """Recursively turn report payloads into JSON-ready Python objects."""
    from .cones import Interval
    if isinstance(v, HermitianMap):
        return map_to_json(v)
    if isinstance(v, Interval):
        return {"lo": float(v.lo), "hi": float(v.hi)}
    if hasattr(v, "to_json"):
        return v.to_json()
    if isinstance(v, np.ndarray):
        if np.iscomplexobj(v) and v.ndim >= 1:
            return encode_matrix(v) if v.ndim == 2 else [[float(z.real), float(z.imag)] for z in v.ravel()]
        return v.tolist()
    if isinstance(v, dict):
        return {str(k): encode_value(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [encode_value(x) for x in v]
    if isinstance(v, (np.floating, float)):
        return float(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    return v


def dumps(obj) -> str:
    """Deterministic JSON text (sorted keys, non-finite floats as strings)."""
    return json.dumps(_finite(encode_value(obj)), sort_keys=True, indent=2) + "\n"


def _finite(v):
    if isinstance(v, float) and not math.isfinite(v):
        return "inf" if v > 0 else ("-inf" if v < 0 else "nan")
    if isinstance(v, dict):
        return {k: _finite(x) for k, x in v.items()}
    if isinstance(v, list):
        return [_finite(x) for x in v]
    return v


def load(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from None
