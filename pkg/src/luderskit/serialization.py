"""JSON encoding of operators and fixture files.

An operator is ``{"dim": d, "re": [[...]], "im": [[...]]}`` with row-major
nested lists. ``"im"`` may be omitted for real matrices.

A fixture file holds ``{"family": [op, ...], "effect": op}``; lemma
fixtures hold ``{"x": op, "a": op}`` instead (optionally with ``"name"``).
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .exceptions import LudersError

__all__ = ["FixtureError", "operator_to_json", "operator_from_json", "load_fixture"]


class FixtureError(LudersError):
    pass


def operator_to_json(A) -> dict:
    A = np.asarray(A, dtype=np.complex128)
    return {"dim": int(A.shape[0]), "re": A.real.tolist(), "im": A.imag.tolist()}


def operator_from_json(obj) -> np.ndarray:
    if not isinstance(obj, dict) or "re" not in obj:
        raise FixtureError(f"operator must be an object with 're' (and 'im'), got {type(obj).__name__}")
    unknown = set(obj) - {"dim", "re", "im"}
    if unknown:
        raise FixtureError(f"unknown operator keys: {sorted(unknown)}")
    try:
        re = np.array(obj["re"], dtype=float)
        im = np.array(obj.get("im", np.zeros_like(re)), dtype=float)
    except (TypeError, ValueError) as exc:
        raise FixtureError(f"operator entries must be numbers: {exc}") from None
    if re.ndim != 2 or re.shape[0] != re.shape[1] or re.shape != im.shape:
        raise FixtureError(f"operator 're'/'im' must be matching square arrays, got {re.shape} and {im.shape}")
    dim = obj.get("dim", re.shape[0])
    if dim != re.shape[0]:
        raise FixtureError(f"declared dim {dim} does not match entries of size {re.shape[0]}")
    return re + 1j * im


def load_fixture(path) -> dict:
    """Parse a fixture file into numpy operators.

    Returns a dict with keys ``family`` (list of arrays) and ``effect``,
    or ``x`` and ``a`` for lemma fixtures. Raises :class:`FixtureError`
    on any malformed content.
    """
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise FixtureError(f"cannot read fixture {path}: {exc}") from None
    if not isinstance(raw, dict):
        raise FixtureError("fixture must be a JSON object")
    if "x" in raw or "a" in raw:
        unknown = set(raw) - {"x", "a", "name"}
        if unknown:
            raise FixtureError(f"unknown lemma fixture keys: {sorted(unknown)}")
        try:
            return {"x": operator_from_json(raw["x"]), "a": operator_from_json(raw["a"]),
                    "name": str(raw.get("name", Path(path).stem))}
        except KeyError as exc:
            raise FixtureError(f"lemma fixture is missing {exc}") from None
    unknown = set(raw) - {"family", "effect", "name"}
    if unknown:
        raise FixtureError(f"unknown fixture keys: {sorted(unknown)}")
    if "family" not in raw or "effect" not in raw:
        raise FixtureError("fixture needs both 'family' and 'effect'")
    if not isinstance(raw["family"], list) or not raw["family"]:
        raise FixtureError("'family' must be a non-empty list of operators")
    return {
        "family": [operator_from_json(op) for op in raw["family"]],
        "effect": operator_from_json(raw["effect"]),
        "name": str(raw.get("name", Path(path).stem)),
    }
