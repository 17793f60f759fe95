"""JSON encodings for matrices, channels and reports."""

import json

import numpy as np

from .channels import ChoiState, KrausChannel
from .errors import InputError


def encode_matrix(M):
    M = np.asarray(M, dtype=complex)
    return {
        "rows": int(M.shape[0]),
        "cols": int(M.shape[1]),
        "data": [[float(z.real), float(z.imag)] for z in M.reshape(-1)],
    }


def decode_matrix(obj):
    if not isinstance(obj, dict) or not {"rows", "cols", "data"} <= obj.keys():
        raise InputError("matrix must be an object with rows, cols, data")
    rows, cols, data = obj["rows"], obj["cols"], obj["data"]
    if not (isinstance(rows, int) and isinstance(cols, int) and rows > 0 and cols > 0):
        raise InputError("rows and cols must be positive integers")
    if not isinstance(data, list) or len(data) != rows * cols:
        raise InputError(f"data must hold rows*cols = {rows * cols} entries")
    try:
        arr = np.array([complex(re, im) for re, im in data])
    except (TypeError, ValueError):
        raise InputError("each entry must be a [re, im] pair of numbers") from None
    if not np.all(np.isfinite(arr)):
        raise InputError("matrix has non-finite entries")
    return arr.reshape(rows, cols)


def encode_channel(chan):
    if isinstance(chan, KrausChannel):
        return {"type": "kraus", "s": chan.s, "t": chan.t, "ops": [encode_matrix(A) for A in chan.ops]}
    if isinstance(chan, ChoiState):
        return {"type": "choi", "s": chan.s, "t": chan.t, "matrix": encode_matrix(chan.matrix)}
    raise TypeError(f"cannot encode {type(chan).__name__}")


def decode_channel(obj, tol=1e-10):
    """Parse and validate a channel document (Kraus or Choi)."""
    if not isinstance(obj, dict):
        raise InputError("channel document must be a JSON object", path="$")
    kind = obj.get("type")
    s, t = obj.get("s"), obj.get("t")
    if not (isinstance(s, int) and isinstance(t, int) and s > 0 and t > 0):
        raise InputError("s and t must be positive integers", path="$")
    if kind == "kraus":
        ops = obj.get("ops")
        if not isinstance(ops, list) or not ops:
            raise InputError("ops must be a non-empty list", path="$.ops")
        mats = []
        for k, o in enumerate(ops):
            try:
                mats.append(decode_matrix(o))
            except InputError as exc:
                raise InputError(exc.message, path=f"$.ops[{k}]") from None
        chan = KrausChannel(s, t, tuple(mats))
        chan.validate(tol)
        return chan
    if kind == "choi":
        try:
            M = decode_matrix(obj.get("matrix"))
        except InputError as exc:
            raise InputError(exc.message, path="$.matrix") from None
        return ChoiState.from_matrix(s, t, M, tol)
    raise InputError(f"unknown channel type {kind!r}", path="$.type")


def load_json(path):
    with open(path) as fh:
        return json.load(fh)


def dump_json(obj, path=None):
    text = json.dumps(obj, indent=2, sort_keys=True)
    if path is None:
        return text
    with open(path, "w") as fh:
        fh.write(text + "\n")
    return text


DECOMPOSITION_SCHEMA = {
    "type": "object",
    "required": ["terms", "residual", "split_tree_depth", "certificates"],
    "properties": {
        "terms": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["weight", "channel", "margin"],
                "properties": {
                    "weight": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
                    "margin": {"type": "number", "minimum": 0},
                    "channel": {
                        "type": "object",
                        "required": ["type", "s", "t", "matrix"],
                        "properties": {"type": {"const": "choi"}},
                    },
                },
            },
        },
        "residual": {"type": "number", "minimum": 0},
        "split_tree_depth": {"type": "integer", "minimum": 0},
        "pre_reduction_count": {"type": "integer", "minimum": 1},
        "certificates": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["lambda", "t_plus", "t_minus", "child_ranks"],
                "properties": {
                    "t_plus": {"type": "number", "exclusiveMinimum": 0},
                    "t_minus": {"type": "number", "exclusiveMinimum": 0},
                    "child_ranks": {"type": "array", "items": {"type": "integer"}, "minItems": 2, "maxItems": 2},
                },
            },
        },
    },
}


def encode_decomposition(res):
    return {
        "terms": [
            {"weight": float(w), "channel": encode_channel(C), "margin": float(m)}
            for (w, C), m in zip(res.terms, res.leaf_margins)
        ],
        "residual": res.residual,
        "split_tree_depth": res.split_tree_depth,
        "pre_reduction_count": res.pre_reduction_count,
        "certificates": [c.to_dict() for c in res.certificates],
    }
