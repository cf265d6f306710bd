"""Scenario persistence with cached bounds and a change fingerprint."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import capacity
from .model import (
    Scenario,
    SchemaError,
    Violation,
    fingerprint,
    scenario_from_dict,
    scenario_to_dict,
    validate_scenario,
)


class StoreError(Exception):
    """Base class; ``code`` distinguishes parse, validation and IO failures."""

    code = "store"


class ParseError(StoreError):
    code = "parse"


class ValidationError(StoreError):
    code = "validation"

    def __init__(self, violations: list[Violation]):
        self.violations = violations
        lines = "; ".join(str(v) for v in violations)
        super().__init__(f"scenario failed validation: {lines}")


class IoError(StoreError):
    code = "io"


@dataclass
class StoredScenario:
    scenario: Scenario
    fingerprint: str
    type_bounds: Optional[np.ndarray] = None
    sub_type_bounds: Optional[list[np.ndarray]] = None

    def ensure_type_bounds(self) -> np.ndarray:
        """Computed bounds merged with per-type overrides, cached."""
        if self.type_bounds is None:
            self.type_bounds = capacity.effective_type_bounds(self.scenario)
        return self.type_bounds

    def ensure_sub_type_bounds(self) -> list[np.ndarray]:
        if self.sub_type_bounds is None:
            self.sub_type_bounds = capacity.subtype_bounds(self.scenario)
        return self.sub_type_bounds


def from_scenario(scenario: Scenario) -> StoredScenario:
    violations = validate_scenario(scenario)
    if violations:
        raise ValidationError(violations)
    return StoredScenario(scenario=scenario, fingerprint=fingerprint(scenario))


def load_scenario(path: str | Path) -> StoredScenario:
    """Parse, validate and wrap a scenario document.

    Cached bounds in the file are honoured only when its fingerprint still
    matches the scenario content; otherwise they are dropped for recomputation.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    try:
        scenario = scenario_from_dict(doc.get("scenario", doc))
    except SchemaError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    stored = from_scenario(scenario)
    cache = doc.get("cache") or {}
    if cache.get("fingerprint") == stored.fingerprint:
        if cache.get("type_bounds") is not None:
            stored.type_bounds = np.asarray(cache["type_bounds"], dtype=float)
        if cache.get("sub_type_bounds") is not None:
            stored.sub_type_bounds = [np.asarray(r, dtype=float) for r in cache["sub_type_bounds"]]
    return stored


def save_scenario(stored: StoredScenario, path: str | Path) -> None:
    path = Path(path)
    doc = {
        "scenario": scenario_to_dict(stored.scenario),
        "cache": {
            "fingerprint": stored.fingerprint,
            "type_bounds": None
            if stored.type_bounds is None
            else [float(v) for v in stored.type_bounds],
            "sub_type_bounds": None
            if stored.sub_type_bounds is None
            else [[float(v) for v in row] for row in stored.sub_type_bounds],
        },
    }
    try:
        path.write_text(json.dumps(doc, indent=2) + "\n")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc
