"""Scenario data model: zones, patient types, clinical pathways, and mixes.

A scenario describes a hospital as a set of resource zones (ICU, pooled
operating theatres, wards) and a set of patient types. Each patient type
splits into sub-types, and each sub-type carries a clinical pathway: an
ordered list of activities with a duration and a set of candidate zones.

Scenarios are immutable after construction and safe to share between
concurrent solves.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Optional

import numpy as np

#: tolerance under which sub-type mix fractions are renormalised at load
SUBMIX_NORMALISE_TOL = 1e-6
#: tolerance for the sub-mix sum-to-one invariant
SUBMIX_SUM_TOL = 1e-9


class ZoneKind(str, Enum):
    ICU = "icu"
    THEATRE = "theatre"
    WARD = "ward"


@dataclass(frozen=True)
class Zone:
    """A pooled resource: a number of treatment spaces open for a number of
    hours per period."""

    id: str
    kind: ZoneKind
    beds: int
    hours_per_period: float

    def capacity(self, periods: int = 1) -> float:
        """Total available hours over the horizon."""
        return self.beds * self.hours_per_period * periods


@dataclass(frozen=True)
class Activity:
    """One step of a clinical pathway.

    ``index`` is the 1-based position within the pathway. The activity may
    be performed in any one of (or split across) its candidate zones.
    """

    index: int
    kind: ZoneKind
    hours: float
    zones: tuple[str, ...]


@dataclass(frozen=True)
class SubType:
    id: str
    mix_fraction: float
    pathway: tuple[Activity, ...]

    def theatre_hours(self) -> float:
        return sum(a.hours for a in self.pathway if a.kind == ZoneKind.THEATRE)


@dataclass(frozen=True)
class PatientType:
    id: str
    mix_fraction: float
    sub_types: tuple[SubType, ...]
    upper_bound_override: Optional[float] = None


@dataclass(frozen=True)
class Scenario:
    """Immutable description of the hospital and its patient population.

    ``periods`` is a horizon multiplier: capacity available downstream is
    ``beds * hours_per_period * periods`` per zone. ``beds_held_during_surgery``
    extends ward stays by the pathway's theatre time, modelling that the bed
    is acquired before surgery begins.
    """

    name: str
    zones: tuple[Zone, ...]
    patient_types: tuple[PatientType, ...]
    periods: int = 1
    beds_held_during_surgery: bool = True
    notes: str = ""

    # -- lookups ---------------------------------------------------------

    def zone_by_id(self, zone_id: str) -> Zone:
        for z in self.zones:
            if z.id == zone_id:
                return z
        raise KeyError(zone_id)

    def type_index(self, type_id: str) -> int:
        for i, t in enumerate(self.patient_types):
            if t.id == type_id:
                return i
        raise KeyError(type_id)

    def subtype_index(self, type_id: str, sub_id: str) -> tuple[int, int]:
        g = self.type_index(type_id)
        for p, st in enumerate(self.patient_types[g].sub_types):
            if st.id == sub_id:
                return g, p
        raise KeyError(sub_id)

    def iter_subtypes(self) -> Iterator[tuple[int, int, PatientType, SubType]]:
        for g, t in enumerate(self.patient_types):
            for p, st in enumerate(t.sub_types):
                yield g, p, t, st

    # -- derived quantities ----------------------------------------------

    def mix_fractions(self) -> np.ndarray:
        return np.array([t.mix_fraction for t in self.patient_types])

    def sub_mix_fractions(self) -> list[np.ndarray]:
        return [np.array([st.mix_fraction for st in t.sub_types]) for t in self.patient_types]

    def zone_capacity(self, zone: Zone) -> float:
        return zone.capacity(self.periods)

    def activity_hours(self, sub_type: SubType, activity: Activity) -> float:
        """Effective duration of an activity under the bed-hold rule."""
        if activity.kind == ZoneKind.WARD:
            return effective_ward_duration(
                sub_type, activity, beds_held=self.beds_held_during_surgery
            )
        return activity.hours


def effective_ward_duration(sub_type: SubType, activity: Activity, beds_held: bool = True) -> float:
    """Duration a ward bed is occupied by one activity of ``sub_type``.

    When ``beds_held`` is on, the sub-type's theatre time is added to the
    first ward activity of the pathway (the bed is held across surgery).
    """
    if activity.kind != ZoneKind.WARD:
        raise ValueError(f"{activity!r} is not a ward activity")
    if not beds_held:
        return activity.hours
    first_ward = next(a for a in sub_type.pathway if a.kind == ZoneKind.WARD)
    if activity.index != first_ward.index:
        return activity.hours
    return activity.hours + sub_type.theatre_hours()


def scale_horizon(scenario: Scenario, k: int) -> Scenario:
    """Stretch the planning horizon by a factor of ``k`` periods."""
    if k < 1:
        raise ValueError(f"horizon multiplier must be >= 1, got {k}")
    return dataclasses.replace(scenario, periods=scenario.periods * k)


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Violation:
    path: str
    message: str

    def __str__(self) -> str:
        return f"{self.path}: {self.message}"


def validate_scenario(scenario: Scenario) -> list[Violation]:
    """Check every structural invariant; an empty list means valid.

    Violations are data, not exceptions, and come back in deterministic
    (path-lexicographic) order.
    """
    out: list[Violation] = []
    zone_ids = set()
    for i, z in enumerate(scenario.zones):
        path = f"zones[{i}]"
        if z.id in zone_ids:
            out.append(Violation(path + ".id", f"duplicate zone id {z.id!r}"))
        zone_ids.add(z.id)
        if z.beds < 1:
            out.append(Violation(path + ".beds", f"beds must be >= 1, got {z.beds}"))
        if z.hours_per_period < 0:
            out.append(Violation(path + ".hours_per_period", "hours must be >= 0"))

    if scenario.periods < 1:
        out.append(Violation("periods", f"must be >= 1, got {scenario.periods}"))

    type_ids = set()
    sub_ids = set()
    for g, t in enumerate(scenario.patient_types):
        tpath = f"patient_types[{g}]"
        if t.id in type_ids:
            out.append(Violation(tpath + ".id", f"duplicate patient type id {t.id!r}"))
        type_ids.add(t.id)
        if not 0.0 <= t.mix_fraction <= 1.0:
            out.append(Violation(tpath + ".mix_fraction", f"must be in [0, 1], got {t.mix_fraction}"))
        if t.upper_bound_override is not None and t.upper_bound_override < 0:
            out.append(Violation(tpath + ".upper_bound_override", "must be >= 0"))
        if not t.sub_types:
            out.append(Violation(tpath + ".sub_types", "patient type needs at least one sub-type"))
            continue
        frac_sum = sum(st.mix_fraction for st in t.sub_types)
        if abs(frac_sum - 1.0) > SUBMIX_SUM_TOL:
            out.append(
                Violation(
                    tpath + ".sub_types",
                    f"sub-type mix fractions of {t.id} sum to {frac_sum:.6g}, expected 1",
                )
            )
        for p, st in enumerate(t.sub_types):
            spath = f"{tpath}.sub_types[{p}]"
            if st.id in sub_ids:
                out.append(Violation(spath + ".id", f"duplicate sub-type id {st.id!r}"))
            sub_ids.add(st.id)
            if not 0.0 <= st.mix_fraction <= 1.0:
                out.append(Violation(spath + ".mix_fraction", f"must be in [0, 1], got {st.mix_fraction}"))
            if not st.pathway:
                out.append(Violation(spath + ".pathway", "pathway must not be empty"))
            for k, a in enumerate(st.pathway):
                apath = f"{spath}.pathway[{k}]"
                if a.hours < 0:
                    out.append(Violation(apath + ".hours", "duration must be >= 0"))
                if not a.zones:
                    out.append(Violation(apath + ".zones", "candidate zone set must not be empty"))
                for zid in a.zones:
                    if zid not in zone_ids:
                        out.append(Violation(apath + ".zones", f"unresolved zone reference {zid!r}"))
                    else:
                        zk = scenario.zone_by_id(zid).kind
                        if zk != a.kind:
                            out.append(
                                Violation(
                                    apath + ".zones",
                                    f"candidate zone {zid!r} has kind {zk.value}, activity is {a.kind.value}",
                                )
                            )
    out.sort(key=lambda v: (v.path, v.message))
    return out


# ---------------------------------------------------------------------------
# serialisation

SCHEMA_FIELDS = ("name", "periods", "flags", "zones", "patient_types", "notes")


def scenario_to_dict(scenario: Scenario) -> dict:
    return {
        "name": scenario.name,
        "periods": scenario.periods,
        "flags": {"beds_held_during_surgery": scenario.beds_held_during_surgery},
        "zones": [
            {"id": z.id, "kind": z.kind.value, "beds": z.beds, "hours_per_period": z.hours_per_period}
            for z in scenario.zones
        ],
        "patient_types": [
            {
                "id": t.id,
                "mix_fraction": t.mix_fraction,
                **(
                    {"upper_bound_override": t.upper_bound_override}
                    if t.upper_bound_override is not None
                    else {}
                ),
                "sub_types": [
                    {
                        "id": st.id,
                        "mix_fraction": st.mix_fraction,
                        "pathway": [
                            {"kind": a.kind.value, "hours": a.hours, "zones": list(a.zones)}
                            for a in st.pathway
                        ],
                    }
                    for st in t.sub_types
                ],
            }
            for t in scenario.patient_types
        ],
        "notes": scenario.notes,
    }


class SchemaError(ValueError):
    """Raised when a scenario document does not match the expected schema."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


def _require(doc: dict, key: str, path: str):
    if key not in doc:
        raise SchemaError(f"{path}.{key}" if path else key, "missing field")
    return doc[key]


def scenario_from_dict(doc: dict) -> Scenario:
    """Build a Scenario from its JSON form, normalising near-one sub mixes."""
    if not isinstance(doc, dict):
        raise SchemaError("", "scenario document must be an object")
    zones = []
    for i, zd in enumerate(_require(doc, "zones", "")):
        path = f"zones[{i}]"
        try:
            kind = ZoneKind(_require(zd, "kind", path))
        except ValueError:
            raise SchemaError(path + ".kind", f"unknown zone kind {zd.get('kind')!r}")
        zones.append(
            Zone(
                id=str(_require(zd, "id", path)),
                kind=kind,
                beds=int(_require(zd, "beds", path)),
                hours_per_period=float(_require(zd, "hours_per_period", path)),
            )
        )
    types = []
    for g, td in enumerate(_require(doc, "patient_types", "")):
        tpath = f"patient_types[{g}]"
        subs = []
        raw_fracs = []
        for p, sd in enumerate(_require(td, "sub_types", tpath)):
            spath = f"{tpath}.sub_types[{p}]"
            pathway = []
            for k, ad in enumerate(_require(sd, "pathway", spath)):
                apath = f"{spath}.pathway[{k}]"
                try:
                    akind = ZoneKind(_require(ad, "kind", apath))
                except ValueError:
                    raise SchemaError(apath + ".kind", f"unknown activity kind {ad.get('kind')!r}")
                pathway.append(
                    Activity(
                        index=k + 1,
                        kind=akind,
                        hours=float(_require(ad, "hours", apath)),
                        zones=tuple(str(z) for z in _require(ad, "zones", apath)),
                    )
                )
            raw_fracs.append(float(_require(sd, "mix_fraction", spath)))
            subs.append(
                SubType(id=str(_require(sd, "id", spath)), mix_fraction=raw_fracs[-1], pathway=tuple(pathway))
            )
        total = sum(raw_fracs)
        if total > 0 and abs(total - 1.0) <= SUBMIX_NORMALISE_TOL and total != 1.0:
            subs = [dataclasses.replace(st, mix_fraction=st.mix_fraction / total) for st in subs]
        override = td.get("upper_bound_override")
        types.append(
            PatientType(
                id=str(_require(td, "id", tpath)),
                mix_fraction=float(td.get("mix_fraction", 0.0)),
                sub_types=tuple(subs),
                upper_bound_override=float(override) if override is not None else None,
            )
        )
    flags = doc.get("flags", {})
    return Scenario(
        name=str(doc.get("name", "")),
        zones=tuple(zones),
        patient_types=tuple(types),
        periods=int(doc.get("periods", 1)),
        beds_held_during_surgery=bool(flags.get("beds_held_during_surgery", True)),
        notes=str(doc.get("notes", "")),
    )


def fingerprint(scenario: Scenario) -> str:
    """Hash of every field that affects solver results (name/notes excluded)."""
    doc = scenario_to_dict(scenario)
    doc.pop("name", None)
    doc.pop("notes", None)
    blob = json.dumps(doc, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()
