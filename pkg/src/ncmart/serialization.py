"""Canonical JSON for instances, reports and configs.

Complex numbers are stored as ``[re, im]`` pairs, floats with ``repr`` round
tripping, keys sorted.  The same object always serializes to the same bytes.
"""
from __future__ import annotations

import json
import math

import numpy as np

from .algebra import Filtration, TracialAlgebra


def encode_matrix(x):
    x = np.asarray(x, dtype=complex)
    return [[[float(v.real), float(v.imag)] for v in row] for row in x]


def decode_matrix(obj):
    a = np.asarray(obj, dtype=float)
    if a.ndim != 3 or a.shape[-1] != 2:
        raise ValueError("matrix must be a nested list of [re, im] pairs")
    return a[..., 0] + 1j * a[..., 1]


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    return obj


def dumps(obj):
    """Canonical JSON text (sorted keys, no NaN literals, trailing newline)."""
    return json.dumps(_clean(obj), sort_keys=True, indent=1, allow_nan=False) + "\n"


def loads(text):
    return json.loads(text)


def instance_to_json(filtration, terminal, meta=None):
    out = {
        "algebra": {"blocks": [[d, w] for d, w in filtration.algebra.blocks]},
        "filtration": filtration.to_json(),
        "terminal": encode_matrix(terminal),
    }
    if meta is not None:
        out["meta"] = meta
    return out


def instance_from_json(obj):
    """``(filtration, terminal, meta)`` from an instance document."""
    try:
        algebra = TracialAlgebra(tuple(tuple(b) for b in obj["algebra"]["blocks"]))
        filtration = Filtration.from_json(algebra, obj["filtration"])
        x = decode_matrix(obj["terminal"])
    except KeyError as exc:
        raise ValueError(f"instance JSON is missing {exc}") from None
    return filtration, algebra.check(x), obj.get("meta")
