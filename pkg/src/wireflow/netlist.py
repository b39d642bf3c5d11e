"""Netlist document format: JSON with nodes, resistors, sources, loads.

The document is the circuit's canonical external form::

    {
      "nodes":     ["n1", "n2", ...],
      "resistors": [{"a": "n1", "b": "n2", "ohms": 0.1}, ...],
      "sources":   [{"node": "n1", "volts": 600.0}, ...],
      "loads":     [{"node": "n2", "watts": 1e6}, ...]
    }

Parsing preserves element order, so a circuit survives a dump/parse round
trip unchanged.  Parse errors name the offending field by its JSON path.
"""

from __future__ import annotations

import json
from pathlib import Path

from .network import CircuitSpec

__all__ = [
    "NetlistError",
    "circuit_to_doc",
    "circuit_from_doc",
    "dumps_netlist",
    "loads_netlist",
    "save_netlist",
    "load_netlist",
]


class NetlistError(ValueError):
    """The netlist document is malformed."""


def circuit_to_doc(spec: CircuitSpec) -> dict:
    """Circuit as a JSON-ready document (field order fixed)."""
    return {
        "nodes": list(spec.nodes),
        "resistors": [
            {"a": a, "b": b, "ohms": ohms} for a, b, ohms in spec.resistors
        ],
        "sources": [{"node": n, "volts": v} for n, v in spec.sources],
        "loads": [{"node": n, "watts": w} for n, w in spec.loads],
    }


def _require(condition: bool, path: str, message: str) -> None:
    if not condition:
        raise NetlistError(f"{path}: {message}")


def _string(value, path: str) -> str:
    _require(isinstance(value, str), path, f"expected a string, got {value!r}")
    return value


def _number(value, path: str) -> float:
    _require(
        isinstance(value, (int, float)) and not isinstance(value, bool),
        path,
        f"expected a number, got {value!r}",
    )
    return float(value)


def _entry(item, path: str, fields: tuple[str, ...]) -> dict:
    _require(isinstance(item, dict), path, f"expected an object, got {item!r}")
    unknown = set(item) - set(fields)
    _require(not unknown, path, f"unknown fields {sorted(unknown)}")
    for name in fields:
        _require(name in item, path, f"missing field {name!r}")
    return item


def circuit_from_doc(doc) -> CircuitSpec:
    """Parse and validate a netlist document into a circuit."""
    _require(isinstance(doc, dict), "$", f"expected an object, got {type(doc).__name__}")
    unknown = set(doc) - {"nodes", "resistors", "sources", "loads"}
    _require(not unknown, "$", f"unknown top-level keys {sorted(unknown)}")
    for key in ("nodes", "resistors", "sources", "loads"):
        _require(key in doc, "$", f"missing top-level key {key!r}")
        _require(isinstance(doc[key], list), key, "expected an array")

    nodes = [_string(n, f"nodes[{i}]") for i, n in enumerate(doc["nodes"])]
    resistors = []
    for i, item in enumerate(doc["resistors"]):
        path = f"resistors[{i}]"
        entry = _entry(item, path, ("a", "b", "ohms"))
        resistors.append(
            (
                _string(entry["a"], f"{path}.a"),
                _string(entry["b"], f"{path}.b"),
                _number(entry["ohms"], f"{path}.ohms"),
            )
        )
    sources = []
    for i, item in enumerate(doc["sources"]):
        path = f"sources[{i}]"
        entry = _entry(item, path, ("node", "volts"))
        sources.append(
            (
                _string(entry["node"], f"{path}.node"),
                _number(entry["volts"], f"{path}.volts"),
            )
        )
    loads = []
    for i, item in enumerate(doc["loads"]):
        path = f"loads[{i}]"
        entry = _entry(item, path, ("node", "watts"))
        loads.append(
            (
                _string(entry["node"], f"{path}.node"),
                _number(entry["watts"], f"{path}.watts"),
            )
        )
    return CircuitSpec(
        nodes=nodes, resistors=resistors, sources=sources, loads=loads
    )


def dumps_netlist(spec: CircuitSpec) -> str:
    """Serialize a circuit to netlist JSON text."""
    return json.dumps(circuit_to_doc(spec), indent=2) + "\n"


def loads_netlist(text: str) -> CircuitSpec:
    """Parse netlist JSON text; errors carry line/column or field path."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise NetlistError(
            f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from exc
    return circuit_from_doc(doc)


def save_netlist(spec: CircuitSpec, path) -> None:
    Path(path).write_text(dumps_netlist(spec), encoding="utf-8")


def load_netlist(path) -> CircuitSpec:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise NetlistError(f"cannot read netlist {path!r}: {exc}") from exc
    return loads_netlist(text)
