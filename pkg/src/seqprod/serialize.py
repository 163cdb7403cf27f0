"""Deterministic JSON serialization and the matrix document format.

A matrix document is ``{"dim": n, "entries": [[re, im], ...]}`` with the
entries row-major, length n².  Floats are written with 17 significant
digits so that serialized reports are byte-identical across runs and
round-trip float64 exactly.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .effects import ValidationError
from .linalg import hermitize

__all__ = [
    "dumps",
    "format_float",
    "matrix_to_document",
    "document_to_matrix",
]


def format_float(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite float {x!r}")
    return format(x, ".17g")


def _emit(obj, out: list, indent: int, level: int) -> None:
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, (bool, np.bool_)):
        out.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(format_float(obj))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        pad = " " * (indent * (level + 1))
        out.append("{\n")
        for i, (key, value) in enumerate(obj.items()):
            if not isinstance(key, str):
                raise TypeError(f"JSON object keys must be strings, got {key!r}")
            out.append(pad)
            out.append(json.dumps(key))
            out.append(": ")
            _emit(value, out, indent, level + 1)
            out.append(",\n" if i + 1 < len(obj) else "\n")
        out.append(" " * (indent * level))
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        if not obj:
            out.append("[]")
            return
        pad = " " * (indent * (level + 1))
        out.append("[\n")
        for i, value in enumerate(obj):
            out.append(pad)
            _emit(value, out, indent, level + 1)
            out.append(",\n" if i + 1 < len(obj) else "\n")
        out.append(" " * (indent * level))
        out.append("]")
    else:
        raise TypeError(f"cannot serialize object of type {type(obj).__name__}")


def dumps(obj, *, indent: int = 2) -> str:
    """Serialize to JSON with deterministic 17-digit float formatting."""
    out: list = []
    _emit(obj, out, indent, 0)
    return "".join(out)


def matrix_to_document(matrix) -> dict:
    m = np.asarray(matrix, dtype=np.complex128)
    n = m.shape[0]
    entries = [[float(v.real), float(v.imag)] for v in m.reshape(-1)]
    return {"dim": n, "entries": entries}


def document_to_matrix(doc, *, hermiticity_tol: float = 1e-8) -> np.ndarray:
    """Parse a matrix document into a symmetrized Hermitian matrix.

    Rejects documents whose entries drift from Hermiticity by more than
    ``hermiticity_tol · max(1, ‖M‖_F)``; smaller drift is absorbed by
    symmetrization, which is exact on already-Hermitian input.
    """
    if not isinstance(doc, dict):
        raise ValidationError("matrix document must be a JSON object")
    try:
        dim = int(doc["dim"])
        entries = doc["entries"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"matrix document missing or malformed field: {exc}") from exc
    if dim < 1:
        raise ValidationError(f"matrix document dim must be >= 1, got {dim}")
    if not isinstance(entries, list) or len(entries) != dim * dim:
        raise ValidationError(
            f"matrix document needs {dim * dim} [re, im] entries, got "
            f"{len(entries) if isinstance(entries, list) else type(entries).__name__}"
        )
    flat = np.empty(dim * dim, dtype=np.complex128)
    for idx, pair in enumerate(entries):
        if not (isinstance(pair, list) and len(pair) == 2):
            raise ValidationError(f"entry {idx} is not a [re, im] pair")
        re, im = float(pair[0]), float(pair[1])
        if not (math.isfinite(re) and math.isfinite(im)):
            raise ValidationError(f"entry {idx} is not finite")
        flat[idx] = complex(re, im)
    m = flat.reshape(dim, dim)
    drift = float(np.linalg.norm(m - m.conj().T))
    if drift > hermiticity_tol * max(1.0, float(np.linalg.norm(m))):
        raise ValidationError(
            f"matrix document is not Hermitian (‖M − M†‖_F = {drift:.3e})"
        )
    return hermitize(m)
