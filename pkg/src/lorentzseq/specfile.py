"""JSON spec files for weights, sequences and families.

Parsing reports the JSON path of the offending field, e.g.
``$.members[1].entries[0]: expected a number``.  ``to_spec`` is the inverse
of the parsers: ``parse_x(to_spec(obj)) == obj`` for every object it emits.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

from .compactness import Dominated, ExplicitFinite, FamilySpec, ScaledBasis, ShiftFamily
from .core import (
    ExplicitPrefix,
    Finite,
    Geometric,
    GeometricTail,
    Power,
    PowerDecay,
    PowerTail,
    Tabled,
)
from .errors import InvalidSpec

WEIGHT_SHORTHANDS = {"harmonic": PowerDecay(1.0), "invsqrt": PowerDecay(0.5)}


class SpecError(InvalidSpec):
    """A spec document is malformed; ``path`` locates the field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


def _obj(node, path: str) -> dict:
    if not isinstance(node, dict):
        raise SpecError(path, f"expected an object, got {type(node).__name__}")
    return node


def _kind(node: dict, path: str, allowed) -> str:
    if "kind" not in node:
        raise SpecError(f"{path}.kind", "missing")
    kind = node["kind"]
    if kind not in allowed:
        raise SpecError(f"{path}.kind", f"expected one of {sorted(allowed)}, got {kind!r}")
    return kind


def _num(node: dict, key: str, path: str, default=None):
    if key not in node:
        if default is not None:
            return default
        raise SpecError(f"{path}.{key}", "missing")
    v = node[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise SpecError(f"{path}.{key}", f"expected a finite number, got {v!r}")
    return float(v)


def _numlist(node: dict, key: str, path: str) -> tuple:
    if key not in node:
        raise SpecError(f"{path}.{key}", "missing")
    arr = node[key]
    if not isinstance(arr, list):
        raise SpecError(f"{path}.{key}", "expected an array of numbers")
    for k, v in enumerate(arr):
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            raise SpecError(f"{path}.{key}[{k}]", f"expected a finite number, got {v!r}")
    return tuple(float(v) for v in arr)


def _unknown_keys(node: dict, path: str, allowed) -> None:
    extra = sorted(set(node) - set(allowed) - {"kind"})
    if extra:
        raise SpecError(f"{path}.{extra[0]}", "unknown field")


def _build(path: str, ctor, *args):
    try:
        return ctor(*args)
    except InvalidSpec as exc:
        if isinstance(exc, SpecError):
            raise
        field, _, msg = str(exc).partition(": ")
        if msg and field.replace("_", "").replace("[", "").replace("]", "").isalnum():
            raise SpecError(f"{path}.{field}", msg) from None
        raise SpecError(path, str(exc)) from None


# ---------------------------------------------------------------------------
# Parsers
# ---------------------------------------------------------------------------


def parse_weight(node, path: str = "$"):
    if isinstance(node, str):
        if node not in WEIGHT_SHORTHANDS:
            raise SpecError(path, f"unknown weight shorthand {node!r}")
        return WEIGHT_SHORTHANDS[node]
    node = _obj(node, path)
    kind = _kind(node, path, {"power", "prefix"})
    if kind == "power":
        _unknown_keys(node, path, {"beta"})
        return _build(path, PowerDecay, _num(node, "beta", path))
    _unknown_keys(node, path, {"values", "tail_beta"})
    tail = _build(path, PowerDecay, _num(node, "tail_beta", path))
    return _build(path, ExplicitPrefix, _numlist(node, "values", path), tail)


def parse_envelope(node, path: str):
    node = _obj(node, path)
    kind = _kind(node, path, {"power", "geometric"})
    if kind == "power":
        _unknown_keys(node, path, {"c", "s"})
        return _build(path, PowerTail, _num(node, "c", path), _num(node, "s", path))
    _unknown_keys(node, path, {"c", "r"})
    return _build(path, GeometricTail, _num(node, "c", path), _num(node, "r", path))


def parse_sequence(node, path: str = "$"):
    node = _obj(node, path)
    kind = _kind(node, path, {"finite", "power", "geometric", "tabled"})
    if kind == "finite":
        _unknown_keys(node, path, {"entries"})
        return _build(path, Finite, _numlist(node, "entries", path))
    if kind == "power":
        _unknown_keys(node, path, {"c", "s"})
        return _build(path, Power, _num(node, "c", path), _num(node, "s", path))
    if kind == "geometric":
        _unknown_keys(node, path, {"c", "r"})
        return _build(path, Geometric, _num(node, "c", path), _num(node, "r", path))
    _unknown_keys(node, path, {"entries", "envelope", "envelope_start"})
    if "envelope" not in node:
        raise SpecError(f"{path}.envelope", "missing (a tabled sequence needs a tail envelope)")
    env = parse_envelope(node["envelope"], f"{path}.envelope")
    start = node.get("envelope_start")
    if start is not None and (isinstance(start, bool) or not isinstance(start, int)):
        raise SpecError(f"{path}.envelope_start", f"expected an integer, got {start!r}")
    return _build(path, Tabled, _numlist(node, "entries", path), env, start)


def _seqlist(node: dict, key: str, path: str, required: bool = True) -> tuple:
    if key not in node:
        if required:
            raise SpecError(f"{path}.{key}", "missing")
        return ()
    arr = node[key]
    if not isinstance(arr, list):
        raise SpecError(f"{path}.{key}", "expected an array of sequence specs")
    return tuple(parse_sequence(x, f"{path}.{key}[{k}]") for k, x in enumerate(arr))


def parse_family(node, path: str = "$") -> FamilySpec:
    node = _obj(node, path)
    kind = _kind(node, path, {"explicit", "shift", "scaled_basis", "dominated"})
    if kind == "explicit":
        _unknown_keys(node, path, {"members"})
        return ExplicitFinite(_seqlist(node, "members", path))
    if kind == "shift":
        _unknown_keys(node, path, {"base"})
        if "base" not in node:
            raise SpecError(f"{path}.base", "missing")
        base = parse_sequence(node["base"], f"{path}.base")
        return _build(path, ShiftFamily, base)
    if kind == "scaled_basis":
        _unknown_keys(node, path, {"coeffs"})
        if "coeffs" not in node:
            raise SpecError(f"{path}.coeffs", "missing")
        return ScaledBasis(parse_sequence(node["coeffs"], f"{path}.coeffs"))
    _unknown_keys(node, path, {"envelope", "samples"})
    if "envelope" not in node:
        raise SpecError(f"{path}.envelope", "missing")
    g = parse_sequence(node["envelope"], f"{path}.envelope")
    return _build(path, Dominated, g, _seqlist(node, "samples", path, required=False))


# ---------------------------------------------------------------------------
# Emitter
# ---------------------------------------------------------------------------


def to_spec(obj):
    """Serialize a weight, envelope, sequence or family to its JSON-ready form."""
    if isinstance(obj, PowerDecay):
        return {"kind": "power", "beta": obj.beta}
    if isinstance(obj, ExplicitPrefix):
        return {"kind": "prefix", "values": list(obj.values), "tail_beta": obj.tail.beta}
    if isinstance(obj, PowerTail):
        return {"kind": "power", "c": obj.c, "s": obj.s}
    if isinstance(obj, GeometricTail):
        return {"kind": "geometric", "c": obj.c, "r": obj.r}
    if isinstance(obj, Finite):
        return {"kind": "finite", "entries": list(obj.entries)}
    if isinstance(obj, Power):
        return {"kind": "power", "c": obj.c, "s": obj.s}
    if isinstance(obj, Geometric):
        return {"kind": "geometric", "c": obj.c, "r": obj.r}
    if isinstance(obj, Tabled):
        return {"kind": "tabled", "entries": list(obj.entries), "envelope": to_spec(obj.envelope),
                "envelope_start": obj.envelope_start}
    if isinstance(obj, ExplicitFinite):
        return {"kind": "explicit", "members": [to_spec(a) for a in obj.members]}
    if isinstance(obj, ShiftFamily):
        return {"kind": "shift", "base": to_spec(obj.base)}
    if isinstance(obj, ScaledBasis):
        return {"kind": "scaled_basis", "coeffs": to_spec(obj.coeffs)}
    if isinstance(obj, Dominated):
        return {"kind": "dominated", "envelope": to_spec(obj.envelope),
                "samples": [to_spec(s) for s in obj.samples]}
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    return json.dumps(to_spec(obj), indent=2, sort_keys=True)


def load_json(path: str):
    """Read a JSON document; problems are reported as SpecError against the file name."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise SpecError(path, f"cannot read file ({exc.strerror})") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(path, f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
