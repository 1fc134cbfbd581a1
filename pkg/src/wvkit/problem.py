"""
Problem documents and report serialization.

A problem document is a JSON object::

    {
      "observables": {"A": [[[re, im], ...], ...], "B": ...},
      "states": {"psi": [[re, im], ...], "phi": ...},
      "basis": [[[re, im], ...], ...],          # optional, for `average`
      "scan": {"from": [...], "to": [...], "steps": 51},   # for `scan`
      "meter": {"n_grid": 512, "half_width": 10, "sigma": 1, "k0": 0, "x0": 0},
      "g": 0.01,
      "slack": 1e-9
    }

Only the sections a command needs are required.  Real numbers are accepted
wherever a ``[re, im]`` pair is expected.
"""
from __future__ import annotations

import dataclasses
import json
import math
import sys
import warnings

import numpy as np

from .errors import ParseError, ValidationError, WeakValueError
from .hilbert import (
    CONSTRUCTION_TOL,
    Observable,
    State,
    complex_to_json,
    matrix_from_json,
    matrix_to_json,
    state_to_json,
    vector_from_json,
)

RENORMALIZE_WARN = 1e-6


def load_document(path) -> dict:
    try:
        if path == "-":
            doc = json.load(sys.stdin)
        else:
            with open(path) as fh:
                doc = json.load(fh)
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno} col {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ParseError(f"{path}: top level must be an object")
    return doc


def _section(doc: dict, key: str, where: str):
    try:
        return doc[key]
    except (KeyError, TypeError):
        raise ParseError(f"{where}: missing field '{key}'") from None


def parse_state(data, where: str) -> State:
    """Build a state, renormalizing hand-typed vectors.

    Vectors already normalized to 1e-12 are kept bit-for-bit so that
    replayed counterexamples reproduce exactly.
    """
    vec = vector_from_json(data, where)
    if vec.size < 2:
        raise ValidationError(f"{where}: dimension must be >= 2 (state dimension invariant)")
    norm = float(np.linalg.norm(vec))
    if norm == 0.0 or not math.isfinite(norm):
        raise ValidationError(f"{where}: zero or non-finite vector cannot be normalized")
    if abs(norm**2 - 1.0) <= CONSTRUCTION_TOL:
        return State(vec)
    if abs(norm - 1.0) > RENORMALIZE_WARN:
        warnings.warn(f"{where}: norm {norm!r} != 1, renormalizing", stacklevel=2)
    return State(vec / norm)


def parse_observable(data, where: str) -> Observable:
    mat = matrix_from_json(data, where)
    try:
        return Observable(mat)
    except WeakValueError as exc:
        raise ValidationError(f"{where}: {type(exc).__name__}: {exc}") from exc


def get_state(doc: dict, name: str) -> State:
    states = _section(doc, "states", "document")
    return parse_state(_section(states, name, "states"), f"states.{name}")


def get_observable(doc: dict, name: str) -> Observable:
    obs = _section(doc, "observables", "document")
    return parse_observable(_section(obs, name, "observables"), f"observables.{name}")


def get_basis(doc: dict, dim: int) -> np.ndarray:
    """Basis vectors as matrix columns; defaults to the computational basis."""
    if "basis" not in doc:
        return np.eye(dim, dtype=complex)
    data = doc["basis"]
    if not isinstance(data, list) or not data:
        raise ParseError("basis: expected a list of vectors")
    cols = [vector_from_json(v, f"basis[{k}]") for k, v in enumerate(data)]
    if any(c.size != dim for c in cols):
        raise ValidationError(f"basis: every vector must have dimension {dim}")
    return np.column_stack(cols)


def problem_document(A=None, B=None, psi=None, phi=None, basis=None, **extra) -> dict:
    doc = dict(extra)
    observables = {k: matrix_to_json(v) for k, v in (("A", A), ("B", B)) if v is not None}
    states = {k: state_to_json(v) for k, v in (("psi", psi), ("phi", phi)) if v is not None}
    if observables:
        doc["observables"] = observables
    if states:
        doc["states"] = states
    if basis is not None:
        doc["basis"] = [[complex_to_json(z) for z in col] for col in np.asarray(basis).T]
    return doc


def to_jsonable(obj):
    """Recursively convert reports to JSON-compatible values.

    Complex numbers become ``[re, im]``; states become amplitude lists;
    non-finite floats become ``null``.
    """
    if obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        obj = float(obj)
        return obj if math.isfinite(obj) else None
    if isinstance(obj, (complex, np.complexfloating)):
        return complex_to_json(obj)
    if isinstance(obj, State):
        return state_to_json(obj)
    if isinstance(obj, Observable):
        return matrix_to_json(obj)
    if hasattr(obj, "_asdict"):
        return {k: to_jsonable(v) for k, v in obj._asdict().items()}
    if dataclasses.is_dataclass(obj):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [to_jsonable(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), indent=2, allow_nan=False)


def flatten(record: dict, prefix: str = "") -> dict:
    """Flatten nested JSON values into CSV columns (``[re, im]`` -> ``_re``/``_im``)."""
    out = {}
    for key, value in record.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            out.update(flatten(value, name + "."))
        elif (
            isinstance(value, list)
            and len(value) == 2
            and all(isinstance(v, float) for v in value)
        ):
            out[name + "_re"], out[name + "_im"] = value
        elif isinstance(value, list):
            out[name] = json.dumps(value)
        else:
            out[name] = value
    return out
