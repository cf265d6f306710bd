"""Throughput model: maximum treatable cohort under zone-time constraints.

Builds the patient-count LP (type totals, sub-type totals, and per-activity
zone allocations) and answers the planning questions on top of it: maximum
throughput for a required mix, per-type and per-sub-type upper bounds, and
feasibility checks for a prescribed mix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .lp import INF, LinearProgram, LpSolution, solve_lp
from .model import Scenario

#: bound reported for a sub-type whose pathway consumes no resources
UNCAPPED = math.inf


@dataclass
class CapacityResult:
    status: str                      # "optimal" | "infeasible"
    case_mix: np.ndarray
    sub_mix: list[np.ndarray]
    total: float
    allocation: dict[tuple[str, str, int, str], float]
    utilization: dict[str, tuple[float, float]]  # zone -> (hours used, capacity)
    message: str = ""


@dataclass
class FeasibilityReport:
    feasible: bool
    allocation: dict[tuple[str, str, int, str], float] = field(default_factory=dict)
    overloads: dict[str, float] = field(default_factory=dict)  # zone -> excess hours

    def __bool__(self) -> bool:
        return self.feasible


class CmpModel:
    """Shared LP skeleton: bookkeeping rows, allocation columns, zone capacity.

    With ``elastic_zones`` each zone row gains an overflow column so that an
    infeasible mix can be diagnosed by minimising the total excess hours.
    """

    def __init__(
        self,
        scenario: Scenario,
        type_bounds: Optional[Sequence[float]] = None,
        elastic_zones: bool = False,
    ):
        self.scenario = scenario
        lp = LinearProgram(scenario.name or "cmp")
        self.lp = lp
        self.total = lp.add_variable("total", 0.0, INF)
        self.n1: list[str] = []
        self.n2: list[list[str]] = []
        self.alloc: dict[tuple[int, int, int, str], str] = {}
        self.overflow: dict[str, str] = {}

        for g, t in enumerate(scenario.patient_types):
            ub = INF
            if type_bounds is not None and type_bounds[g] is not None:
                ub = float(type_bounds[g])
            self.n1.append(lp.add_variable(f"n1[{t.id}]", 0.0, ub))
        for g, t in enumerate(scenario.patient_types):
            self.n2.append([lp.add_variable(f"n2[{st.id}]", 0.0, INF) for st in t.sub_types])
        for g, p, t, st in scenario.iter_subtypes():
            for k, act in enumerate(st.pathway):
                for zid in act.zones:
                    self.alloc[(g, p, k, zid)] = lp.add_variable(
                        f"alloc[{st.id}#{k}@{zid}]", 0.0, INF
                    )

        lp.add_constraint({self.total: -1.0, **{v: 1.0 for v in self.n1}}, "=", 0.0)
        for g, t in enumerate(scenario.patient_types):
            lp.add_constraint({self.n1[g]: 1.0, **{v: -1.0 for v in self.n2[g]}}, "=", 0.0)
        for g, p, t, st in scenario.iter_subtypes():
            for k, act in enumerate(st.pathway):
                cols = {self.alloc[(g, p, k, zid)]: -1.0 for zid in act.zones}
                lp.add_constraint({self.n2[g][p]: 1.0, **cols}, "=", 0.0)
        for zone in scenario.zones:
            usage: dict[str, float] = {}
            for g, p, t, st in scenario.iter_subtypes():
                for k, act in enumerate(st.pathway):
                    if zone.id in act.zones:
                        hours = scenario.activity_hours(st, act)
                        if hours != 0.0:
                            name = self.alloc[(g, p, k, zone.id)]
                            usage[name] = usage.get(name, 0.0) + hours
            if usage:
                if elastic_zones:
                    e = lp.add_variable(f"overflow[{zone.id}]", 0.0, INF)
                    self.overflow[zone.id] = e
                    usage[e] = -1.0
                lp.add_constraint(usage, "<=", scenario.zone_capacity(zone))

    # -- optional constraint blocks ---------------------------------------

    def add_mix_floors(self, mix: Sequence[float]) -> None:
        """Required case mix: each type keeps at least its share of the total."""
        for g, mu in enumerate(mix):
            if mu > 0.0:
                self.lp.add_constraint({self.n1[g]: 1.0, self.total: -float(mu)}, ">=", 0.0)

    def add_submix_floors(
        self, fractions: list[np.ndarray], skip_type: Optional[int] = None
    ) -> None:
        """Sub-mix adherence: each sub-type keeps its share of its type."""
        for g, row in enumerate(self.n2):
            if g == skip_type:
                continue
            for p, var in enumerate(row):
                mu = float(fractions[g][p])
                if mu > 0.0:
                    self.lp.add_constraint({var: 1.0, self.n1[g]: -mu}, ">=", 0.0)

    def set_subtype_bounds(self, bounds: list[np.ndarray]) -> None:
        for g, row in enumerate(self.n2):
            for p, var in enumerate(row):
                ub = float(bounds[g][p])
                if math.isfinite(ub):
                    lo, _ = self.lp.bounds(var)
                    self.lp.set_bounds(var, lo, ub)

    def fix_type(self, g: int, value: float) -> None:
        self.lp.set_bounds(self.n1[g], float(value), float(value))

    def fix_subtype(self, g: int, p: int, value: float) -> None:
        self.lp.set_bounds(self.n2[g][p], float(value), float(value))

    # -- extraction ---------------------------------------------------------

    def extract(self, sol: LpSolution) -> CapacityResult:
        s = self.scenario
        case_mix = np.array([sol[v] for v in self.n1])
        sub_mix = [np.array([sol[v] for v in row]) for row in self.n2]
        allocation = {}
        for (g, p, k, zid), name in self.alloc.items():
            t = s.patient_types[g]
            allocation[(t.id, t.sub_types[p].id, k + 1, zid)] = sol[name]
        utilization = {}
        for zone in s.zones:
            used = 0.0
            for g, p, t, st in s.iter_subtypes():
                for k, act in enumerate(st.pathway):
                    if zone.id in act.zones:
                        used += sol[self.alloc[(g, p, k, zone.id)]] * s.activity_hours(st, act)
            utilization[zone.id] = (used, s.zone_capacity(zone))
        return CapacityResult(
            status="optimal",
            case_mix=case_mix,
            sub_mix=sub_mix,
            total=sol[self.total],
            allocation=allocation,
            utilization=utilization,
        )


def _infeasible_result(scenario: Scenario, message: str = "") -> CapacityResult:
    return CapacityResult(
        status="infeasible",
        case_mix=np.zeros(len(scenario.patient_types)),
        sub_mix=[np.zeros(len(t.sub_types)) for t in scenario.patient_types],
        total=0.0,
        allocation={},
        utilization={z.id: (0.0, scenario.zone_capacity(z)) for z in scenario.zones},
        message=message,
    )


def max_throughput(
    scenario: Scenario,
    mix: Optional[Sequence[float]] = None,
    sub_mix: Optional[list[np.ndarray]] = None,
    type_bounds: Optional[Sequence[float]] = None,
) -> CapacityResult:
    """Maximise the number of treatable patients.

    ``mix`` imposes the case-mix floors (omit to chase the raw maximum);
    ``sub_mix`` defaults to the scenario's sub-type fractions. ``type_bounds``
    caps individual types; by default only explicit per-type overrides apply.
    """
    if mix is not None:
        mix = np.asarray(mix, dtype=float)
        if len(mix) != len(scenario.patient_types):
            raise ValueError("mix length does not match patient types")
        if np.any(mix < 0) or mix.sum() > 1.0 + 1e-9:
            raise ValueError("mix fractions must be >= 0 and sum to at most 1")
    if type_bounds is None:
        type_bounds = [t.upper_bound_override for t in scenario.patient_types]
    model = CmpModel(scenario, type_bounds=type_bounds)
    if mix is not None:
        model.add_mix_floors(mix)
    model.add_submix_floors(sub_mix if sub_mix is not None else scenario.sub_mix_fractions())
    model.lp.set_objective({model.total: 1.0}, maximize=True)
    sol = solve_lp(model.lp)
    if sol.status != "optimal":
        return _infeasible_result(scenario, message=f"solver status: {sol.status}")
    return model.extract(sol)


BoundCallback = Callable[[int, str, float], None]


def bound_analysis(scenario: Scenario, on_result: Optional[BoundCallback] = None) -> np.ndarray:
    """Per-type ceiling: the whole hospital serves only that type.

    Results are reported progressively through ``on_result`` as each type
    finishes. A type that consumes no resources at all comes back as the
    ``UNCAPPED`` sentinel; an infeasible per-type solve reports 0.
    """
    n = len(scenario.patient_types)
    out = np.zeros(n)
    for g, t in enumerate(scenario.patient_types):
        mix = np.zeros(n)
        mix[g] = 1.0
        out[g] = _single_focus_bound(scenario, mix, scenario.sub_mix_fractions())
        if on_result is not None:
            on_result(g, t.id, out[g])
    return out


def subtype_bounds(scenario: Scenario) -> list[np.ndarray]:
    """Ceiling per (type, sub-type): that sub-type carries 100% of its type."""
    out = []
    n = len(scenario.patient_types)
    for g, t in enumerate(scenario.patient_types):
        row = np.zeros(len(t.sub_types))
        for p, st in enumerate(t.sub_types):
            mix = np.zeros(n)
            mix[g] = 1.0
            sub_fracs = [np.zeros(len(tt.sub_types)) for tt in scenario.patient_types]
            sub_fracs[g][p] = 1.0
            row[p] = _single_focus_bound(scenario, mix, sub_fracs)
        out.append(row)
    return out


def _single_focus_bound(scenario: Scenario, mix: np.ndarray, sub_fracs) -> float:
    model = CmpModel(scenario)
    model.add_mix_floors(mix)
    model.add_submix_floors(sub_fracs)
    model.lp.set_objective({model.total: 1.0}, maximize=True)
    sol = solve_lp(model.lp)
    if sol.status == "optimal":
        return sol.objective_value
    if sol.status == "unbounded":
        return UNCAPPED
    return 0.0


def effective_type_bounds(
    scenario: Scenario, computed: Optional[np.ndarray] = None
) -> np.ndarray:
    """Per-type caps: explicit overrides where present, computed bounds otherwise."""
    overrides = [t.upper_bound_override for t in scenario.patient_types]
    if any(o is None for o in overrides) and computed is None:
        computed = bound_analysis(scenario)
    return np.array([o if o is not None else computed[g] for g, o in enumerate(overrides)])


def check_feasibility(
    scenario: Scenario, mix: Sequence[float], sub_mix: Optional[list[np.ndarray]] = None
) -> FeasibilityReport:
    """Can the prescribed case mix be treated?

    Returns a witness allocation, or the overloaded zones found by minimising
    the total excess hours over an elastic copy of the model.
    """
    mix = np.asarray(mix, dtype=float)
    if len(mix) != len(scenario.patient_types):
        raise ValueError("mix length does not match patient types")
    if np.any(mix < 0):
        raise ValueError("patient counts must be non-negative")
    fracs = sub_mix if sub_mix is not None else scenario.sub_mix_fractions()

    def pinned(elastic: bool) -> CmpModel:
        model = CmpModel(scenario, elastic_zones=elastic)
        for g in range(len(mix)):
            model.fix_type(g, mix[g])
            for p in range(len(model.n2[g])):
                model.fix_subtype(g, p, mix[g] * float(fracs[g][p]))
        return model

    model = pinned(elastic=False)
    model.lp.set_objective({}, maximize=False)
    sol = solve_lp(model.lp)
    if sol.status == "optimal":
        return FeasibilityReport(feasible=True, allocation=model.extract(sol).allocation)

    model = pinned(elastic=True)
    model.lp.set_objective({v: 1.0 for v in model.overflow.values()}, maximize=False)
    sol = solve_lp(model.lp)
    overloads = {}
    if sol.status == "optimal":
        for zid, var in model.overflow.items():
            if sol[var] > 1e-6:
                overloads[zid] = sol[var]
    return FeasibilityReport(feasible=False, overloads=overloads)


def report_utilization(result: CapacityResult) -> dict[str, Optional[float]]:
    """Utilisation percentage per zone; None marks zones with no capacity."""
    out: dict[str, Optional[float]] = {}
    for zid, (used, cap) in result.utilization.items():
        out[zid] = 100.0 * used / cap if cap > 0 else None
    return out
