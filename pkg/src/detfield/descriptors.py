"""JSON system descriptors used by the CLI.

Two forms are accepted:
  {"bound_states": [{"kappa": r, "c": r}, ...]}        reflectionless data
  {"A": [[...]], "B": [...], "C": [...]}               explicit matrices
Matrix entries are real numbers or [re, im] pairs for complex values.
"""

from __future__ import annotations

import json
from pathlib import Path

from detfield.realization import ScatteringData, StateSpaceSystem, realize_from_bound_states


def _entry(value, where):
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2 and all(
        isinstance(v, (int, float)) for v in value
    ):
        return complex(value[0], value[1])
    raise ValueError(f"{where}: entries must be numbers or [re, im] pairs, got {value!r}")


def parse_system(obj):
    """Build a StateSpaceSystem from a descriptor dict."""
    if not isinstance(obj, dict):
        raise ValueError("system descriptor must be a JSON object")
    if "bound_states" in obj:
        extra = set(obj) - {"bound_states"}
        if extra:
            raise ValueError(f"unexpected fields alongside bound_states: {sorted(extra)}")
        states = []
        for i, rec in enumerate(obj["bound_states"]):
            if not isinstance(rec, dict) or set(rec) != {"kappa", "c"}:
                raise ValueError(f"bound_states[{i}] must be an object with fields kappa and c")
            states.append((float(rec["kappa"]), float(rec["c"])))
        return realize_from_bound_states(ScatteringData(bound_states=tuple(states)))
    if {"A", "B", "C"} <= set(obj):
        extra = set(obj) - {"A", "B", "C"}
        if extra:
            raise ValueError(f"unexpected fields alongside A, B, C: {sorted(extra)}")
        A = [[_entry(v, "A") for v in row] for row in obj["A"]]
        n = len(A)
        B = [[_entry(v, "B")] for v in obj["B"]]
        C = [[_entry(v, "C") for v in obj["C"]]]
        return StateSpaceSystem(A=A, B=B, C=C)
    raise ValueError("system descriptor needs either bound_states or A, B, C")


def load_system(source):
    """Resolve a descriptor given inline (dict) or as a file path (str)."""
    if isinstance(source, str):
        path = Path(source)
        if not path.is_file():
            raise ValueError(f"system file not found: {source}")
        with open(path, encoding="utf-8") as fh:
            return parse_system(json.load(fh))
    return parse_system(source)
