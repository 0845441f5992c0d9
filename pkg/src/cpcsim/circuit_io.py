"""JSON circuit description files.

Layout::

    {"modes": ["a", "b", {"name": "c", "angular_frequency": 2.6e15}],
     "elements": [
        {"kind": "cpc", "coupling": {"type": "nondegenerate", "a": "a", "b": "b", "c": "c"},
         "theta": "0.5pi"},
        {"kind": "beam_splitter", "mode1": "b", "mode2": "c", "transmissivity": 0.5},
        {"kind": "phase_shift", "mode": "b", "phase": "-0.5pi"},
        {"kind": "filter", "pattern": {"b": 0}, "policy": "keep-pattern"},
        {"kind": "herald", "mode": "b", "occupation": 1},
        {"kind": "relabel", "mapping": {"b": "out0"}}]}

Angles accept ``"<x>pi"`` strings or bare numbers in radians.
"""
from __future__ import annotations

import json
import math
from pathlib import Path

from .circuits import BeamSplitter, Circuit, CpcGate, Filter, Herald, PhaseShift, Relabel
from .coupling import Coupling, CouplingKind
from .errors import CircuitFileError, CPCError
from .fock import ModeId, ModeRegistry
from .units import format_pi, parse_angle

_ROLE_KEYS = {
    CouplingKind.NONDEGENERATE: ("a", "b", "c"),
    CouplingKind.DEGENERATE: ("a", "b"),
    CouplingKind.CONVERTER: ("a", "c"),
}
_ELEMENT_KEYS = {
    "cpc": {"kind", "coupling", "theta"},
    "beam_splitter": {"kind", "mode1", "mode2", "transmissivity"},
    "phase_shift": {"kind", "mode", "phase"},
    "filter": {"kind", "pattern", "policy"},
    "herald": {"kind", "mode", "occupation"},
    "relabel": {"kind", "mapping"},
}


def _coupling(doc) -> Coupling:
    kind = CouplingKind(doc["type"])
    roles = _ROLE_KEYS[kind]
    unknown = set(doc) - set(roles) - {"type", "phase"}
    if unknown:
        raise CircuitFileError(f"unknown coupling keys {sorted(unknown)}")
    phase = doc.get("phase", [1.0, 0.0])
    phase = complex(*phase) if isinstance(phase, (list, tuple)) else complex(math.cos(parse_angle(phase)), math.sin(parse_angle(phase)))
    return Coupling(kind, tuple(doc[r] for r in roles), phase)


def _element(doc):
    kind = doc.get("kind")
    if kind not in _ELEMENT_KEYS:
        raise CircuitFileError(f"unknown element kind {kind!r}")
    unknown = set(doc) - _ELEMENT_KEYS[kind]
    if unknown:
        raise CircuitFileError(f"unknown keys {sorted(unknown)}")
    if kind == "cpc":
        return CpcGate(_coupling(doc["coupling"]), parse_angle(doc["theta"]))
    if kind == "beam_splitter":
        return BeamSplitter(doc["mode1"], doc["mode2"], float(doc.get("transmissivity", 0.5)))
    if kind == "phase_shift":
        return PhaseShift(doc["mode"], parse_angle(doc["phase"]))
    if kind == "filter":
        return Filter(doc["pattern"], doc.get("policy", "keep-pattern"))
    if kind == "herald":
        return Herald(doc["mode"], int(doc.get("occupation", 1)))
    return Relabel(doc["mapping"])


def circuit_from_dict(doc) -> tuple[Circuit, ModeRegistry]:
    """A bare element list is accepted; its modes are declared in order of first use."""
    infer = isinstance(doc, list)
    if infer:
        doc = {"modes": [], "elements": doc}
    if not isinstance(doc, dict):
        raise CircuitFileError("circuit file must hold an object with 'modes' and 'elements'")
    unknown = set(doc) - {"modes", "elements", "description"}
    if unknown:
        raise CircuitFileError(f"unknown top-level keys {sorted(unknown)}")
    registry = ModeRegistry()
    for i, m in enumerate(doc.get("modes", [])):
        try:
            if isinstance(m, str):
                registry.add(m)
            else:
                registry.add(ModeId(m["name"], m.get("angular_frequency")))
        except (CPCError, KeyError, TypeError) as exc:
            raise CircuitFileError(f"mode {i}: {exc}") from None
    declared = set(registry.names)
    elements = []
    for i, el in enumerate(doc.get("elements", [])):
        try:
            element = _element(el)
        except CircuitFileError as exc:
            raise CircuitFileError(f"element {i}: {exc}") from None
        except (CPCError, KeyError, TypeError, ValueError) as exc:
            raise CircuitFileError(f"element {i}: invalid element ({exc!r})") from None
        if infer:
            for m in element.modes:
                if m not in declared:
                    registry.add(m)
                    declared.add(m)
        missing = [m for m in element.modes if m not in declared]
        if missing:
            raise CircuitFileError(f"element {i}: undeclared mode {missing[0]!r}")
        elements.append(element)
    return Circuit(registry.names, tuple(elements)), registry


def load_circuit_file(path) -> Circuit:
    """Parse and validate a circuit file; errors name the line or element index."""
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CircuitFileError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    try:
        return circuit_from_dict(doc)[0]
    except CircuitFileError as exc:
        raise CircuitFileError(f"{path}: {exc}") from None


def element_to_dict(el) -> dict:
    if isinstance(el, CpcGate):
        return {"kind": "cpc", "coupling": el.coupling.to_dict(), "theta": format_pi(el.theta)}
    if isinstance(el, BeamSplitter):
        return {"kind": "beam_splitter", "mode1": el.mode1, "mode2": el.mode2, "transmissivity": el.transmissivity}
    if isinstance(el, PhaseShift):
        return {"kind": "phase_shift", "mode": el.mode, "phase": format_pi(el.phase)}
    if isinstance(el, Filter):
        return {"kind": "filter", "pattern": dict(el.mode_pattern), "policy": el.policy}
    if isinstance(el, Herald):
        return {"kind": "herald", "mode": el.mode, "occupation": el.occupation}
    return {"kind": "relabel", "mapping": dict(el.mapping)}


def circuit_to_dict(circuit: Circuit, description: str | None = None) -> dict:
    doc = {"modes": list(circuit.modes), "elements": [element_to_dict(e) for e in circuit.elements]}
    if description:
        doc = {"description": description, **doc}
    return doc


def save_circuit_file(circuit: Circuit, path, description: str | None = None) -> None:
    Path(path).write_text(json.dumps(circuit_to_dict(circuit, description), indent=2) + "\n")
