"""Bit-exact JSON persistence for operators and vectors.

Canonical form: sorted keys, two-space indent, trailing newline. Loading a
file written here and re-serializing reproduces identical bytes.
"""

from __future__ import annotations

import json

import numpy as np

from .core import (
    CoordVector,
    GeometricTail,
    IdentityTail,
    ModelError,
    OperatorModel,
    TailModel,
    ZeroTail,
)

__all__ = [
    "dumps_canonical",
    "operator_to_dict",
    "operator_from_dict",
    "vector_to_dict",
    "vector_from_dict",
    "save_operator",
    "load_operator",
    "save_vector",
    "load_vector",
    "load_json",
    "write_text",
]


def dumps_canonical(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def write_text(path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def load_json(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ModelError(f"{path}: not valid JSON ({exc})") from exc


def _tail_to_dict(tail: TailModel) -> dict:
    if isinstance(tail, ZeroTail):
        return {"kind": "zero"}
    if isinstance(tail, IdentityTail):
        return {"kind": "identity"}
    return {"kind": "geometric_diagonal", "c": tail.c, "r": tail.r}


def _tail_from_dict(data) -> TailModel:
    if not isinstance(data, dict) or "kind" not in data:
        raise ModelError("tail must be an object with a 'kind' field")
    kind = data["kind"]
    if kind == "zero":
        return ZeroTail()
    if kind == "identity":
        return IdentityTail()
    if kind == "geometric_diagonal":
        if "c" not in data or "r" not in data:
            raise ModelError("geometric tail needs fields 'c' and 'r'")
        return GeometricTail(float(data["c"]), float(data["r"]))
    raise ModelError(f"unknown tail kind {kind!r}")


def operator_to_dict(T: OperatorModel) -> dict:
    return {
        "p": T.p,
        "blockDim": T.block_dim,
        "block": [[float(v) for v in row] for row in T.block],
        "tail": _tail_to_dict(T.tail),
    }


def operator_from_dict(data) -> OperatorModel:
    if not isinstance(data, dict):
        raise ModelError("operator file must hold a JSON object")
    for key in ("p", "blockDim", "block", "tail"):
        if key not in data:
            raise ModelError(f"operator file is missing the field {key!r}")
    p = float(data["p"])
    if p <= 1.0:
        raise ModelError(f"rejected: exponent p must exceed 1, got {p}")
    rows = data["block"]
    if not isinstance(rows, list) or not rows:
        raise ModelError("rejected: block must be a nonempty list of rows")
    width = len(rows[0]) if isinstance(rows[0], list) else -1
    for row in rows:
        if not isinstance(row, list) or len(row) != width:
            raise ModelError("rejected: block rows have inconsistent lengths")
    block = np.array(rows, dtype=float)
    if block.ndim != 2 or block.shape[0] != block.shape[1]:
        raise ModelError("rejected: block must be square")
    if np.any(block < 0):
        raise ModelError("rejected: negative block entries (operators here are positive)")
    if int(data["blockDim"]) != block.shape[0]:
        raise ModelError(
            f"rejected: blockDim {data['blockDim']} does not match a "
            f"{block.shape[0]}x{block.shape[1]} block"
        )
    return OperatorModel(p, block, _tail_from_dict(data["tail"]))


def vector_to_dict(x: CoordVector) -> dict:
    return {"entries": [float(v) for v in x.entries]}


def vector_from_dict(data) -> CoordVector:
    if not isinstance(data, dict) or "entries" not in data:
        raise ModelError("vector file must hold an object with an 'entries' list")
    return CoordVector(data["entries"])


def save_operator(path, T: OperatorModel) -> None:
    write_text(path, dumps_canonical(operator_to_dict(T)))


def load_operator(path) -> OperatorModel:
    return operator_from_dict(load_json(path))


def save_vector(path, x: CoordVector) -> None:
    write_text(path, dumps_canonical(vector_to_dict(x)))


def load_vector(path) -> CoordVector:
    return vector_from_dict(load_json(path))
