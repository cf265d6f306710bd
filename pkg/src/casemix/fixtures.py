"""Built-in demonstration scenarios.

Two hospitals ship with the package: a five-type weekly demonstration and an
eight-week surge variant with a sixth (respiratory) patient type and a
reconfigured ward layout. Availability constants are derived, not measured:
ICU and ward beds staffed 168 h/week, a pooled theatre block of 40 h/week per
theatre, and beds held during surgery. These choices reproduce the published
per-type bounds of the demonstration dataset exactly.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from .capacity import bound_analysis
from .model import Activity, PatientType, Scenario, SubType, Zone, ZoneKind

WEEK_HOURS = 168.0
THEATRE_WEEK_HOURS = 40.0


def _zone(zid: str, kind: ZoneKind, beds: int, hours: float = WEEK_HOURS) -> Zone:
    return Zone(id=zid, kind=kind, beds=beds, hours_per_period=hours)


def _sub(sid: str, frac: float, icu: float, theatre: float, ward: float,
         wards: tuple[str, ...]) -> SubType:
    pathway = []
    k = 1
    if icu > 0:
        pathway.append(Activity(index=k, kind=ZoneKind.ICU, hours=icu, zones=("ICU",)))
        k += 1
    if theatre > 0:
        pathway.append(Activity(index=k, kind=ZoneKind.THEATRE, hours=theatre, zones=("OT",)))
        k += 1
    if ward > 0:
        pathway.append(Activity(index=k, kind=ZoneKind.WARD, hours=ward, zones=wards))
        k += 1
    return SubType(id=sid, mix_fraction=frac, pathway=tuple(pathway))


def demo_scenario() -> Scenario:
    """Five patient types, one week: ICU (5 beds), 10 pooled theatres, wards
    of 2/5/10/14/3 beds."""
    return Scenario(
        name="demo-week",
        zones=(
            _zone("ICU", ZoneKind.ICU, 5),
            _zone("OT", ZoneKind.THEATRE, 10, THEATRE_WEEK_HOURS),
            _zone("Ward 1", ZoneKind.WARD, 2),
            _zone("Ward 2", ZoneKind.WARD, 5),
            _zone("Ward 3", ZoneKind.WARD, 10),
            _zone("Ward 4", ZoneKind.WARD, 14),
            _zone("Ward 5", ZoneKind.WARD, 3),
        ),
        patient_types=(
            PatientType(
                id="T1", mix_fraction=0.05,
                sub_types=(
                    _sub("T1-1", 0.70, 0.0, 1.20, 17.86, ("Ward 1",)),
                    _sub("T1-2", 0.30, 6.0, 1.25, 8.35, ("Ward 1", "Ward 2")),
                ),
            ),
            PatientType(
                id="T2", mix_fraction=0.43,
                sub_types=(
                    _sub("T2-1", 1.00, 0.0, 2.40, 16.31, ("Ward 1", "Ward 2", "Ward 5")),
                ),
            ),
            PatientType(
                id="T3", mix_fraction=0.18,
                sub_types=(
                    _sub("T3-1", 0.25, 0.0, 6.50, 12.94, ("Ward 3",)),
                    _sub("T3-2", 0.40, 0.0, 4.56, 12.39, ("Ward 3",)),
                    _sub("T3-3", 0.35, 0.0, 7.60, 5.54, ("Ward 3",)),
                ),
            ),
            PatientType(
                id="T4", mix_fraction=0.09,
                sub_types=(_sub("T4-1", 1.00, 0.0, 3.40, 18.99, ("Ward 4",)),),
            ),
            PatientType(
                id="T5", mix_fraction=0.25,
                sub_types=(_sub("T5-1", 1.00, 12.0, 4.10, 22.81, ("Ward 4", "Ward 5")),),
            ),
        ),
        periods=1,
        beds_held_during_surgery=True,
        notes=(
            "Derived availability: 168 h/week for ICU and ward beds, 40 h/week "
            "per theatre (pooled), beds held during surgery."
        ),
    )


SURGE_WARDS = ("Ward 1", "Ward 5", "Ward 6")
DAY_HOURS = 24.0


def surge_scenario() -> Scenario:
    """Eight-week surge layout: Wards 1/5/6 repurposed for the respiratory
    type T6, Wards 2/4 shared by the displaced surgical types, and explicit
    1000-patient planning caps on T1/T2."""
    shared = ("Ward 2", "Ward 4")
    return Scenario(
        name="surge-8-weeks",
        zones=(
            _zone("ICU", ZoneKind.ICU, 5),
            _zone("OT", ZoneKind.THEATRE, 10, THEATRE_WEEK_HOURS),
            _zone("Ward 1", ZoneKind.WARD, 2),
            _zone("Ward 2", ZoneKind.WARD, 5),
            _zone("Ward 3", ZoneKind.WARD, 10),
            _zone("Ward 4", ZoneKind.WARD, 14),
            _zone("Ward 5", ZoneKind.WARD, 3),
            _zone("Ward 6", ZoneKind.WARD, 6),
        ),
        patient_types=(
            PatientType(
                id="T1", mix_fraction=0.05, upper_bound_override=1000.0,
                sub_types=(
                    _sub("T1-1", 0.70, 0.0, 1.20, 17.86, shared),
                    _sub("T1-2", 0.30, 6.0, 1.25, 8.35, shared),
                ),
            ),
            PatientType(
                id="T2", mix_fraction=0.43, upper_bound_override=1000.0,
                sub_types=(_sub("T2-1", 1.00, 0.0, 2.40, 16.31, shared),),
            ),
            PatientType(
                id="T3", mix_fraction=0.18,
                sub_types=(
                    _sub("T3-1", 0.25, 0.0, 6.50, 12.94, ("Ward 3",)),
                    _sub("T3-2", 0.40, 0.0, 4.56, 12.39, ("Ward 3",)),
                    _sub("T3-3", 0.35, 0.0, 7.60, 5.54, ("Ward 3",)),
                ),
            ),
            PatientType(
                id="T4", mix_fraction=0.09,
                sub_types=(_sub("T4-1", 1.00, 0.0, 3.40, 18.99, ("Ward 4",)),),
            ),
            PatientType(
                id="T5", mix_fraction=0.25,
                sub_types=(_sub("T5-1", 1.00, 12.0, 4.10, 22.81, ("Ward 4",)),),
            ),
            PatientType(
                id="T6", mix_fraction=0.0,
                sub_types=(
                    # respiratory severity ladder; stays given in days upstream,
                    # converted to hours at authoring time
                    _sub("T6-1", 0.45, 0.0, 0.0, 0.25 * DAY_HOURS, SURGE_WARDS),
                    _sub("T6-2", 0.35, 0.0, 0.0, 5 * DAY_HOURS, SURGE_WARDS),
                    _sub("T6-3", 0.15, 5 * DAY_HOURS, 0.0, 9 * DAY_HOURS, SURGE_WARDS),
                    _sub("T6-4", 0.05, 14 * DAY_HOURS, 0.0, 7 * DAY_HOURS, SURGE_WARDS),
                ),
            ),
        ),
        periods=8,
        beds_held_during_surgery=True,
        notes="Surge layout over two months; T1/T2 carry planning caps of 1000.",
    )


def bed_capacity_bounds(scenario: Scenario) -> np.ndarray:
    """Per-type bounds with theatre session time treated as unlimited.

    Bed hold during surgery stays on, so ward stays still include theatre
    time; only the theatre session budget stops binding. This is the scaling
    used by the alteration studies on the demonstration dataset.
    """
    zones = tuple(
        dataclasses.replace(z, hours_per_period=1e9) if z.kind == ZoneKind.THEATRE else z
        for z in scenario.zones
    )
    relaxed = dataclasses.replace(scenario, zones=zones)
    return bound_analysis(relaxed)


def raw_duration_variant(scenario: Scenario) -> Scenario:
    """Copy with the bed-hold-during-surgery rule switched off."""
    return dataclasses.replace(scenario, beds_held_during_surgery=False)


def alteration_study_scenario() -> Scenario:
    """The demo hospital in its alteration-study configuration.

    Plain ward stays in the constraint matrix, with per-type planning caps
    pinned to the bed-capacity bounds of the bed-hold configuration. This is
    the setup under which the reference alteration tables were produced; the
    baseline mix is unchanged because theatre time binds it either way.
    """
    demo = demo_scenario()
    caps = bed_capacity_bounds(demo)
    raw = raw_duration_variant(demo)
    types = tuple(
        dataclasses.replace(t, upper_bound_override=float(caps[g]))
        for g, t in enumerate(raw.patient_types)
    )
    return dataclasses.replace(
        raw,
        name="demo-week-alteration-study",
        patient_types=types,
        notes=(
            "Alteration-study configuration: ward stays exclude theatre time; "
            "planning caps pinned to the bed-capacity bounds of the bed-hold "
            "variant (derived)."
        ),
    )
