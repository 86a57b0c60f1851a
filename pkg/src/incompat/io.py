"""JSON device files.

Schema (complex entries are ``[re, im]`` pairs, matrices are row-major lists
of rows)::

    {"kind": "povm", "dim": 2, "effects": [M, ...], "labels": ["+1", "-1"]}
    {"kind": "channel-choi", "dim_in": 2, "dim_out": 2, "choi": M}
    {"kind": "channel-kraus", "dim_in": 2, "dim_out": 2, "kraus": [M, ...]}
    {"kind": "joint-channel", "dim_in": 2, "dim_out1": 2, "dim_out2": 2, "choi": M}

``labels`` is optional.  A POVM that represents a joint measurement may
carry ``"shape": [nx, ny]``; its effects are then read row-major over the grid.
Channels given by Kraus operators are converted to Choi form on parsing.
"""
import json

import numpy as np

from .errors import ParseError, ValidationError
from .objects import DEVICE_TOL, ChoiChannel, JointChannel, Povm, choi_from_kraus

KINDS = ("povm", "channel-choi", "channel-kraus", "joint-channel")


def _matrix(value, rows, cols, where):
    if not isinstance(value, list) or len(value) != rows:
        raise ParseError(f"expected {rows} rows", where)
    out = np.zeros((rows, cols), dtype=complex)
    for i, row in enumerate(value):
        if not isinstance(row, list) or len(row) != cols:
            raise ParseError(f"expected {cols} entries", f"{where}[{i}]")
        for j, z in enumerate(row):
            if (not isinstance(z, list) or len(z) != 2
                    or not all(isinstance(t, (int, float)) and not isinstance(t, bool) for t in z)):
                raise ParseError("entry must be a [re, im] pair of numbers", f"{where}[{i}][{j}]")
            if not all(np.isfinite(z)):
                raise ParseError("entry is not finite", f"{where}[{i}][{j}]")
            out[i, j] = complex(z[0], z[1])
    return out


def _dim(data, key):
    v = data.get(key)
    if isinstance(v, bool) or not isinstance(v, int) or v < 1:
        raise ParseError("must be a positive integer", key)
    return v


def _matrix_list(data, key, rows, cols):
    v = data.get(key)
    if not isinstance(v, list) or not v:
        raise ParseError("must be a non-empty list of matrices", key)
    return [_matrix(m, rows, cols, f"{key}[{i}]") for i, m in enumerate(v)]


def device_from_dict(data):
    """Build and validate a Povm, ChoiChannel or JointChannel from parsed JSON."""
    if not isinstance(data, dict):
        raise ParseError("top level must be an object")
    kind = data.get("kind")
    if kind not in KINDS:
        raise ParseError(f"must be one of {', '.join(KINDS)}", "kind")
    if kind == "povm":
        d = _dim(data, "dim")
        effects = _matrix_list(data, "effects", d, d)
        labels = data.get("labels")
        if labels is not None:
            if not isinstance(labels, list) or len(labels) != len(effects):
                raise ParseError("must list one label per effect", "labels")
            if len({str(x) for x in labels}) != len(labels):
                raise ParseError("labels must be distinct", "labels")
        shape = data.get("shape")
        if shape is not None:
            if (not isinstance(shape, list) or len(shape) != 2
                    or not all(isinstance(s, int) and s > 0 for s in shape) or shape[0] * shape[1] != len(effects)):
                raise ParseError("must be [nx, ny] with nx * ny equal to the number of effects", "shape")
        return Povm(d, tuple(effects), None if labels is None else tuple(labels))
    if kind == "channel-kraus":
        din, dout = _dim(data, "dim_in"), _dim(data, "dim_out")
        kraus = _matrix_list(data, "kraus", dout, din)
        res = float(np.abs(sum(k.conj().T @ k for k in kraus) - np.eye(din)).max())
        if res > DEVICE_TOL:
            raise ValidationError("trace-preservation", res, "Kraus operators are not complete")
        return choi_from_kraus(kraus, din, dout)
    din = _dim(data, "dim_in")
    if kind == "channel-choi":
        dout = _dim(data, "dim_out")
        return ChoiChannel(din, dout, _matrix(data.get("choi"), dout * din, dout * din, "choi"))
    d1, d2 = _dim(data, "dim_out1"), _dim(data, "dim_out2")
    n = d1 * d2 * din
    return JointChannel(din, d1, d2, _matrix(data.get("choi"), n, n, "choi"))


def parse_device_text(text: str):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"line {exc.lineno}, column {exc.colno}") from None
    return device_from_dict(data)


def parse_device(path):
    """Read a device file; raises ParseError or ValidationError on bad input."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read file: {exc.strerror}", str(path)) from None
    return parse_device_text(text)


def _encode(m):
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def device_to_dict(obj, shape=None) -> dict:
    if isinstance(obj, Povm):
        out = {"kind": "povm", "dim": obj.dim, "effects": [_encode(e) for e in obj.effects], "labels": list(obj.labels)}
        if shape is not None:
            out["shape"] = [int(s) for s in shape]
        return out
    if isinstance(obj, JointChannel):
        return {"kind": "joint-channel", "dim_in": obj.dim_in, "dim_out1": obj.dim_out1, "dim_out2": obj.dim_out2,
                "choi": _encode(obj.choi)}
    if isinstance(obj, ChoiChannel):
        return {"kind": "channel-choi", "dim_in": obj.dim_in, "dim_out": obj.dim_out, "choi": _encode(obj.choi)}
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def serialize_device(obj, shape=None) -> str:
    """Canonical text form: compact JSON followed by a newline."""
    return json.dumps(device_to_dict(obj, shape), separators=(",", ":")) + "\n"


def write_device(obj, path, shape=None):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_device(obj, shape))
