"""JSON interchange for matrices, maps, functions and reports.

Complex numbers travel as ``[re, im]`` pairs. Every top-level document
carries ``"schema": 1``. Infinite interval ends are written as ``null``.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from pathlib import Path
from typing import Any

import numpy as np

from .convexity import OperatorConvexMeasure, ScalarFunction, builtin, operator_convex_from_measure
from .errors import ParseError
from .hermitian import HermitianMatrix, make_hermitian
from .maps import (
    BlockAverage,
    BlockDiagonalExpectation,
    BlockPinch,
    ChoiKraus,
    DiscreteDensity,
    PositiveMapSpec,
    SchurMultiplier,
    State,
)

SCHEMA = 1


def encode_complex(a) -> list:
    a = np.asarray(a, dtype=complex)
    if a.ndim == 0:
        return [float(a.real), float(a.imag)]
    return [encode_complex(x) for x in a]


def decode_complex(data) -> np.ndarray:
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"malformed complex array: {exc}") from None
    if arr.ndim < 1 or arr.shape[-1] != 2:
        raise ParseError("complex entries must be [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def matrix_to_json(A) -> dict:
    a = np.asarray(A)
    return {"schema": SCHEMA, "dim": a.shape[0], "entries": encode_complex(a)}


def matrix_from_json(doc: dict) -> HermitianMatrix:
    try:
        entries = decode_complex(doc["entries"])
    except KeyError:
        raise ParseError("matrix document needs 'entries'") from None
    if entries.ndim != 2:
        raise ParseError("matrix entries must be a 2-d array")
    if "dim" in doc and doc["dim"] != entries.shape[0]:
        raise ParseError(f"declared dim {doc['dim']} does not match entries {entries.shape}")
    return make_hermitian(entries)


def _interval_to_json(iv):
    return [None if x is None or math.isinf(x) else x for x in iv]


def function_to_json(f: ScalarFunction) -> dict:
    if f.spec is None:
        raise ParseError(f"function {f.label!r} has no serializable description")
    spec = dict(f.spec)
    if "params" in spec:
        spec["params"] = _jsonify_params(spec["params"])
    return {"schema": SCHEMA, **spec}


def _jsonify_params(params: dict) -> dict:
    out = {}
    for k, v in params.items():
        if k == "domain" and v is not None:
            v = _interval_to_json(v)
        elif k == "box" and v is not None:
            v = [_interval_to_json(iv) for iv in v]
        out[k] = v
    return out


def function_from_json(doc: dict) -> ScalarFunction:
    if "measure" in doc:
        m = doc["measure"]
        return operator_convex_from_measure(OperatorConvexMeasure(
            float(m.get("alpha", 0.0)), float(m.get("beta", 0.0)), float(m.get("gamma", 0.0)),
            tuple(tuple(a) for a in m.get("atoms", ())),
        ))
    if "name" not in doc:
        raise ParseError("function document needs 'name' or 'measure'")
    return builtin(doc["name"], **doc.get("params", {}))


def map_to_json(phi: PositiveMapSpec) -> dict:
    doc: dict[str, Any] = {"schema": SCHEMA, "kind": phi.kind}
    if isinstance(phi, ChoiKraus):
        doc["kraus"] = [encode_complex(w) for w in phi.kraus]
    elif isinstance(phi, SchurMultiplier):
        doc["B"] = encode_complex(phi.B)
    elif isinstance(phi, BlockAverage):
        doc["n"] = phi.n
    elif isinstance(phi, BlockPinch):
        doc.update(alpha=phi.alpha, n=phi.n)
    elif isinstance(phi, State):
        doc["rho"] = encode_complex(phi.rho)
    elif isinstance(phi, BlockDiagonalExpectation):
        doc["partition"] = [list(b) for b in phi.partition]
    elif isinstance(phi, DiscreteDensity):
        doc["atoms"] = [{"d": encode_complex(d), "w": w} for d, w in phi.atoms]
    return doc


def map_from_json(doc: dict) -> PositiveMapSpec:
    kind = doc.get("kind")
    try:
        if kind == "choi_kraus":
            return ChoiKraus(tuple(decode_complex(w) for w in doc["kraus"]))
        if kind == "schur":
            return SchurMultiplier(decode_complex(doc["B"]))
        if kind == "block_pinch":
            return BlockPinch(float(doc["alpha"]), doc.get("n"))
        if kind == "block_average":
            return BlockAverage(n=doc.get("n"))
        if kind == "state":
            return State(decode_complex(doc["rho"]))
        if kind == "block_expectation":
            return BlockDiagonalExpectation(tuple(tuple(b) for b in doc["partition"]))
        if kind == "discrete_density":
            return DiscreteDensity(tuple((decode_complex(a["d"]), float(a["w"])) for a in doc["atoms"]))
    except KeyError as exc:
        raise ParseError(f"map of kind {kind!r} is missing field {exc}") from None
    raise ParseError(f"unknown map kind {kind!r}")


def to_jsonable(obj):
    """Recursively convert arrays, matrices and numpy scalars to JSON values."""
    if isinstance(obj, HermitianMatrix):
        return matrix_to_json(obj.entries)
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return encode_complex(obj)
        return obj.tolist()
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else repr(x)
    return obj


def dumps(doc) -> str:
    return json.dumps(to_jsonable(doc), indent=2, sort_keys=True)


def load_json(path_or_text: str) -> dict:
    """Parse a JSON file, or inline JSON text when the argument starts with ``{``."""
    try:
        if path_or_text.lstrip().startswith("{"):
            return json.loads(path_or_text)
        return json.loads(Path(path_or_text).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON in {path_or_text!r}: {exc}") from None


def write_atomic(path: str | os.PathLike, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)
