"""Matrix/state JSON codec and deterministic report serialization.

Matrices and states use ``{"dim": s, "re": [...], "im": [...]}`` with the
real and imaginary parts listed row-major. Nested row lists are accepted on
input. Reports are written with every float at 17 significant digits so the
same run always produces byte-identical output.
"""
from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

__all__ = [
    "MalformedMatrix", "encode_array", "decode_operator", "decode_state",
    "load_operator", "load_state", "dumps", "outcomes_csv", "basis_csv",
]


class MalformedMatrix(ValueError):
    pass


def encode_array(a) -> dict:
    a = np.asarray(a, dtype=np.complex128)
    return {"dim": int(a.shape[0]), "re": a.real.ravel().tolist(), "im": a.imag.ravel().tolist()}


def _parts(doc) -> tuple[int, np.ndarray]:
    if not isinstance(doc, dict) or "re" not in doc:
        raise MalformedMatrix('expected an object with "dim", "re" and "im"')
    try:
        re = np.array(doc["re"], dtype=float)
        im = np.array(doc.get("im", np.zeros_like(re)), dtype=float)
    except (TypeError, ValueError) as exc:
        raise MalformedMatrix(f"non-numeric or ragged entries: {exc}") from None
    if re.shape != im.shape:
        raise MalformedMatrix(f'"re" has shape {re.shape} but "im" has shape {im.shape}')
    dim = doc.get("dim")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise MalformedMatrix(f'"dim" must be a positive integer, got {dim!r}')
    z = re + 1j * im
    if not np.all(np.isfinite(z)):
        raise MalformedMatrix("entries must be finite")
    return dim, z


def decode_operator(doc) -> np.ndarray:
    dim, z = _parts(doc)
    if z.ndim == 1:
        if z.size != dim * dim:
            raise MalformedMatrix(f"{z.size} entries cannot form a square {dim}x{dim} matrix")
        z = z.reshape(dim, dim)
    elif z.ndim != 2 or z.shape != (dim, dim):
        raise MalformedMatrix(f"matrix of shape {z.shape} is not square with dim {dim}")
    return z


def decode_state(doc) -> np.ndarray:
    dim, z = _parts(doc)
    if z.shape != (dim,):
        raise MalformedMatrix(f"state has shape {z.shape}, expected ({dim},)")
    return z


def load_operator(path) -> np.ndarray:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise MalformedMatrix(f"{path}: invalid JSON ({exc})") from None
    return decode_operator(doc)


def load_state(path) -> np.ndarray:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise MalformedMatrix(f"{path}: invalid JSON ({exc})") from None
    return decode_state(doc)


def _float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    text = format(x, ".17g")
    if text.lstrip("-").isdigit():
        text += ".0"
    return text


def _encode(obj, indent: int, level: int) -> str:
    pad = "\n" + " " * (indent * (level + 1))
    close = "\n" + " " * (indent * level)
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{" + pad + ("," + pad).join(items) + close + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        items = [_encode(v, indent, level + 1) for v in obj]
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(items) + "]"
        return "[" + pad + ("," + pad).join(items) + close + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    return _encode(obj, indent, 0) + "\n"


def outcomes_csv(report: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    sampled = report.get("mode") == "sampled"
    w.writerow(["phase", "number", "probability", "fidelity"] + (["count", "frequency"] if sampled else []))
    for rec in report["outcomes"]:
        row = [rec["label"][0], rec["label"][1], _float(rec["probability"]),
               "" if rec["fidelity"] is None else _float(rec["fidelity"])]
        if sampled:
            row += [rec["count"], _float(rec["frequency"])]
        w.writerow(row)
    return buf.getvalue()


def basis_csv(labels, states) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["phase", "number", "index", "re", "im"])
    for (k, n), v in zip(labels, states):
        for i, z in enumerate(np.asarray(v)):
            w.writerow([k, n, i, _float(float(z.real)), _float(float(z.imag))])
    return buf.getvalue()

