"""JSON document format for mass functions, fusion outcomes and sharpenings.

Mass-function documents look like::

    { "atoms": ["a", "b", "c"],
      "world": "closed",
      "masses": [ {"set": ["a"], "mass": 0.3},
                  {"set": ["a", "b", "c"], "mass": 0.7} ] }

Proposition sets are arrays of atom labels sorted in frame order; ``[]``
is the empty proposition; subsets not listed carry zero mass.
"""

from __future__ import annotations

import json
from typing import Any

from .frame import Frame, FrameError, MassFunction, Proposition


class DocumentError(ValueError):
    """Malformed document; the message carries source and field location."""

    def __init__(self, source: str, field: str, message: str):
        super().__init__(f"{source}: {field}: {message}")
        self.source = source
        self.field = field


def parse_mass_document(data: Any, *, source: str = "<document>") -> MassFunction:
    if not isinstance(data, dict):
        raise DocumentError(source, "$", "expected a JSON object")
    atoms = data.get("atoms")
    if not isinstance(atoms, list) or not all(isinstance(a, str) for a in atoms):
        raise DocumentError(source, "atoms", "expected an array of strings")
    try:
        frame = Frame(atoms)
    except FrameError as exc:
        raise DocumentError(source, "atoms", str(exc)) from None
    world = data.get("world", "closed")
    if world not in ("open", "closed"):
        raise DocumentError(source, "world", f"expected 'open' or 'closed', got {world!r}")
    masses = data.get("masses")
    if not isinstance(masses, list):
        raise DocumentError(source, "masses", "expected an array of {set, mass} entries")
    pairs = []
    for i, entry in enumerate(masses):
        field = f"masses[{i}]"
        if not isinstance(entry, dict):
            raise DocumentError(source, field, "expected an object")
        subset = entry.get("set")
        if not isinstance(subset, list) or not all(isinstance(a, str) for a in subset):
            raise DocumentError(source, f"{field}.set", "expected an array of atom labels")
        value = entry.get("mass")
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise DocumentError(source, f"{field}.mass", "expected a number")
        try:
            prop = frame.prop(subset)
        except FrameError as exc:
            raise DocumentError(source, f"{field}.set", str(exc)) from None
        pairs.append((prop, float(value)))
    return MassFunction(frame, pairs, world=world)


def load_mass_document(path: str) -> MassFunction:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise DocumentError(path, "$", f"cannot read file: {exc}") from None
    except json.JSONDecodeError as exc:
        raise DocumentError(path, "$", f"invalid JSON: {exc}") from None
    return parse_mass_document(data, source=path)


def _set_labels(prop: Proposition) -> list[str]:
    return list(prop.members)


def mass_document(m: MassFunction) -> dict:
    return {
        "atoms": list(m.frame.atoms),
        "world": m.world,
        "masses": [
            {"set": _set_labels(p), "mass": v} for p, v in m.items()
        ],
    }


def fusion_document(outcome) -> dict:
    """Serialize a fusion outcome: a mass document plus solver metadata."""
    doc: dict[str, Any] = {
        "status": outcome.status,
        "iterations": outcome.iterations,
        "entropy": outcome.final_entropy,
    }
    if outcome.status == "fused":
        doc.update(mass_document(outcome.fused))
    return doc


def sharpening_document(r) -> dict:
    return {
        "entries": [
            {
                "from": _set_labels(Proposition(r.source.frame, xb)),
                "to": _set_labels(Proposition(r.source.frame, yb)),
                "mass": v,
            }
            for (xb, yb), v in r.entry_items()
        ]
    }


def dump_json(doc: dict, path: str | None) -> str:
    text = json.dumps(doc, indent=2)
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    return text
