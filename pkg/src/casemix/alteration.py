"""Case-mix alteration: force one type (or sub-type) by delta, re-optimise the rest.

Three re-optimisation policies are supported, all over the same feasibility
model (bookkeeping, allocation, zone capacity, sub-mix adherence):

* ``ssq``: minimise the sum of squared scaled deviations (grow the others as
  much as possible when delta < 0), solved through the separable-programming
  linearisation of the squared term;
* ``lin``: minimise the plain sum of scaled deviations;
* ``eq``: minimise the worst scaled deviation (an equitable change), with a
  relaxation that lets types stuck at a floor fall short of the common level.

Deviations are scaled by per-type planning bounds supplied on the request;
types forced upward when delta < 0 move together, types forced downward when
delta > 0 shrink together.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .capacity import CmpModel, effective_type_bounds, subtype_bounds as compute_subtype_bounds
from .lp import INF, solve_lp
from .model import Scenario
from .pwl import add_pwl_variable, build_square_pwl

METHODS = ("ssq", "lin", "eq")

RANGE_TOL = 1e-6
#: objective drift above which a repaired separable solution is flagged
APPROX_TOL = 1e-4


@dataclass(frozen=True)
class AlterationRequest:
    """A what-if query: move one patient type (or sub-type) by ``delta``.

    ``type_bounds`` double as the deviation scaling and the permitted range
    of each type; they default to the scenario's effective bounds. For
    sub-type queries ``sub_type_bounds`` plays the same role per sub-type.
    ``baseline_sub_mix`` carries the sub-type counts behind the baseline mix;
    when omitted the scenario's sub-mix fractions are assumed.
    """

    baseline: np.ndarray
    delta: float
    method: str
    target_type: Optional[str] = None
    target_subtype: Optional[str] = None
    type_bounds: Optional[np.ndarray] = None
    sub_type_bounds: Optional[list[np.ndarray]] = None
    baseline_sub_mix: Optional[list[np.ndarray]] = None
    scale_deviations: bool = True
    segments: int = 500


@dataclass
class AlterationResult:
    status: str                              # "ok" | "infeasible" | "error"
    method: str
    new_mix: np.ndarray
    new_sub_mix: list[np.ndarray]
    deviations: np.ndarray                   # scaled, >= 0, zero at the target
    sub_deviations: Optional[list[np.ndarray]]
    uniform_deviation: Optional[float]       # the common level of an eq solve
    objective_value: float
    total: float
    total_impact: float
    utilization: dict[str, tuple[float, float]]
    approximate: bool = False
    message: str = ""


def _empty_result(scenario: Scenario, method: str, status: str, message: str) -> AlterationResult:
    return AlterationResult(
        status=status,
        method=method,
        new_mix=np.zeros(len(scenario.patient_types)),
        new_sub_mix=[np.zeros(len(t.sub_types)) for t in scenario.patient_types],
        deviations=np.zeros(len(scenario.patient_types)),
        sub_deviations=None,
        uniform_deviation=None,
        objective_value=float("nan"),
        total=float("nan"),
        total_impact=float("nan"),
        utilization={},
        message=message,
    )


def _baseline_fractions(
    scenario: Scenario, baseline: np.ndarray, baseline_sub_mix: Optional[list[np.ndarray]]
) -> list[np.ndarray]:
    """Sub-mix proportions implied by the starting point (scenario fractions
    where a type is empty)."""
    fracs = []
    for g, t in enumerate(scenario.patient_types):
        row = None
        if baseline_sub_mix is not None:
            row = np.asarray(baseline_sub_mix[g], dtype=float)
        if row is not None and row.sum() > 0:
            fracs.append(row / row.sum())
        else:
            fracs.append(np.array([st.mix_fraction for st in t.sub_types]))
    return fracs


def alter_type(scenario: Scenario, request: AlterationRequest) -> AlterationResult:
    """Re-optimise all other patient types after forcing one type by delta."""
    if request.method not in METHODS:
        raise ValueError(f"unknown method {request.method!r}")
    if request.delta == 0:
        raise ValueError("delta must be nonzero")
    if request.target_type is None:
        raise ValueError("request needs a target type")
    g_star = scenario.type_index(request.target_type)
    baseline = np.asarray(request.baseline, dtype=float)
    if len(baseline) != len(scenario.patient_types):
        raise ValueError("baseline length does not match patient types")
    if np.any(baseline < 0):
        raise ValueError("baseline counts must be non-negative")
    bounds = (
        np.asarray(request.type_bounds, dtype=float)
        if request.type_bounds is not None
        else effective_type_bounds(scenario)
    )
    anchor = baseline[g_star] + request.delta
    if anchor < -RANGE_TOL or anchor > bounds[g_star] + RANGE_TOL:
        raise ValueError(
            f"target value {anchor:.4f} for {request.target_type} outside "
            f"[0, {bounds[g_star]:.4f}]"
        )
    fracs = _baseline_fractions(scenario, baseline, request.baseline_sub_mix)
    engine = _TypeEngine(scenario, request, g_star, baseline, bounds, fracs)
    return engine.run()


def alter_subtype(scenario: Scenario, request: AlterationRequest) -> AlterationResult:
    """Re-optimise all other sub-types after forcing one sub-type by delta."""
    if request.method not in METHODS:
        raise ValueError(f"unknown method {request.method!r}")
    if request.delta == 0:
        raise ValueError("delta must be nonzero")
    if request.target_subtype is None:
        raise ValueError("request needs a target sub-type")
    g_star, p_star = _resolve_subtype(scenario, request.target_subtype)
    baseline = np.asarray(request.baseline, dtype=float)
    fracs = _baseline_fractions(scenario, baseline, request.baseline_sub_mix)
    base_sub = (
        [np.asarray(v, dtype=float) for v in request.baseline_sub_mix]
        if request.baseline_sub_mix is not None
        else [baseline[g] * fracs[g] for g in range(len(baseline))]
    )
    sub_bounds = (
        [np.asarray(v, dtype=float) for v in request.sub_type_bounds]
        if request.sub_type_bounds is not None
        else compute_subtype_bounds(scenario)
    )
    type_bounds = (
        np.asarray(request.type_bounds, dtype=float)
        if request.type_bounds is not None
        else effective_type_bounds(scenario)
    )
    anchor = base_sub[g_star][p_star] + request.delta
    if anchor < -RANGE_TOL or anchor > sub_bounds[g_star][p_star] + RANGE_TOL:
        raise ValueError(
            f"target value {anchor:.4f} for {request.target_subtype} outside "
            f"[0, {sub_bounds[g_star][p_star]:.4f}]"
        )
    engine = _SubTypeEngine(
        scenario, request, g_star, p_star, baseline, base_sub, type_bounds, sub_bounds, fracs
    )
    return engine.run()


def sweep_delta(
    scenario: Scenario,
    target_type: str,
    deltas: Sequence[float],
    method: str,
    **request_fields,
) -> list[AlterationResult]:
    """Independent alteration solves for each delta; failures never abort the sweep."""
    out = []
    for d in deltas:
        try:
            req = AlterationRequest(
                delta=float(d), method=method, target_type=target_type, **request_fields
            )
            out.append(alter_type(scenario, req))
        except ValueError as exc:
            out.append(_empty_result(scenario, method, status="error", message=str(exc)))
    return out


def _resolve_subtype(scenario: Scenario, sub_id: str) -> tuple[int, int]:
    for g, p, t, st in scenario.iter_subtypes():
        if st.id == sub_id:
            return g, p
    raise ValueError(f"unknown sub-type {sub_id!r}")


# ---------------------------------------------------------------------------
# type-level engine


class _TypeEngine:
    def __init__(self, scenario, request, g_star, baseline, bounds, fracs):
        self.s = scenario
        self.req = request
        self.g_star = g_star
        self.baseline = baseline
        self.bounds = bounds
        self.fracs = fracs
        self.sign = 1.0 if request.delta > 0 else -1.0
        self.others = [g for g in range(len(baseline)) if g != g_star]
        # deviation scaling: the planning bounds, or 1 for the unscaled variant
        self.scale = bounds if request.scale_deviations else np.ones_like(bounds)

    def base_model(self) -> CmpModel:
        model = CmpModel(self.s, type_bounds=self.bounds)
        model.add_submix_floors(self.fracs)
        model.fix_type(self.g_star, self.baseline[self.g_star] + self.req.delta)
        for g in self.others:
            lo, up = 0.0, self.bounds[g]
            if self.sign > 0:
                up = min(up, self.baseline[g])
            else:
                lo = self.baseline[g]
            if lo > up:  # baseline sits above the cap; pin at the cap
                lo = up
            model.lp.set_bounds(model.n1[g], lo, up)
        return model

    def add_deviation_vars(self, model: CmpModel) -> list[str]:
        gammas = []
        for g in self.others:
            gv = model.lp.add_variable(f"dev[{self.s.patient_types[g].id}]", 0.0, INF)
            # dev = sign * (baseline - n) / scale
            model.lp.add_constraint(
                {gv: 1.0, model.n1[g]: self.sign / self.scale[g]},
                "=",
                self.sign * self.baseline[g] / self.scale[g],
            )
            gammas.append(gv)
        return gammas

    def run(self) -> AlterationResult:
        method = self.req.method
        if method == "lin":
            return self._run_lin()
        if method == "eq":
            return self._run_eq()
        return self._run_ssq()

    # -- shared result assembly -------------------------------------------

    def finish(self, model, sol, uniform=None, approximate=False) -> AlterationResult:
        res = model.extract(sol)
        new_mix = res.case_mix
        dev = np.zeros(len(new_mix))
        for g in self.others:
            dev[g] = self.sign * (self.baseline[g] - new_mix[g]) / self.scale[g]
        dev = np.maximum(dev, 0.0)
        method = self.req.method
        if method == "lin":
            obj = float(dev.sum())
        elif method == "eq":
            obj = float(uniform if uniform is not None else dev.max(initial=0.0))
        else:
            obj = float((dev**2).sum())
        impact = float(sum(new_mix[g] - self.baseline[g] for g in self.others))
        return AlterationResult(
            status="ok",
            method=method,
            new_mix=new_mix,
            new_sub_mix=res.sub_mix,
            deviations=dev,
            sub_deviations=None,
            uniform_deviation=uniform,
            objective_value=obj,
            total=res.total,
            total_impact=impact,
            utilization=res.utilization,
            approximate=approximate,
        )

    def infeasible(self, message: str) -> AlterationResult:
        return _empty_result(
            self.s,
            self.req.method,
            status="infeasible",
            message=message
            or "no feasible re-optimisation; an equitable alteration is not possible here",
        )

    # -- lin ----------------------------------------------------------------

    def _run_lin(self) -> AlterationResult:
        model = self.base_model()
        gammas = self.add_deviation_vars(model)
        # sign * sum(dev) minimised: shrink as little as possible when the
        # target grows, grow as much as possible when it shrinks
        model.lp.set_objective({gv: self.sign for gv in gammas}, maximize=False)
        sol = solve_lp(model.lp)
        if sol.status != "optimal":
            return self.infeasible(f"solver status: {sol.status}")
        return self.finish(model, sol)

    # -- eq -----------------------------------------------------------------

    def _run_eq(self) -> AlterationResult:
        model = self.base_model()
        gammas = self.add_deviation_vars(model)
        level = model.lp.add_variable("dev.level", 0.0, INF)
        for g, gv in zip(self.others, gammas):
            model.lp.add_constraint({gv: 1.0, level: -1.0}, "<=", 0.0)
            # relaxed floor: a type may stop short of the common level only
            # because it hit zero (or a cap), never drift further
            model.lp.add_constraint(
                {model.n1[g]: 1.0, level: self.sign * self.scale[g]},
                ">=",
                self.baseline[g],
            )
        model.lp.set_objective({level: self.sign}, maximize=False)
        sol = solve_lp(model.lp)
        if sol.status != "optimal":
            return self.infeasible(f"solver status: {sol.status}")
        lam = sol[level]
        if self.sign > 0:
            # pin the alternate optima: with the level fixed, every type drops
            # to its floor, which is where the equitable reading puts it
            model.lp.set_bounds(level, 0.0, lam + 1e-9)
            model.lp.set_objective(
                {model.n1[g]: 1.0 for g in self.others}, maximize=False
            )
            sol = solve_lp(model.lp)
            if sol.status != "optimal":
                return self.infeasible(f"stage-2 solver status: {sol.status}")
            lam = sol[level]
        return self.finish(model, sol, uniform=float(lam))

    # -- ssq ------------------------------------------------------------------

    def _add_ratio_vars(self, model: CmpModel) -> dict[int, str]:
        xs = {}
        for g in self.others:
            if self.bounds[g] <= 0:
                continue
            lo, up = model.lp.bounds(model.n1[g])
            x = model.lp.add_variable(
                f"ratio[{self.s.patient_types[g].id}]",
                lo / self.bounds[g],
                min(1.0, up / self.bounds[g]),
            )
            model.lp.add_constraint({x: self.bounds[g], model.n1[g]: -1.0}, "=", 0.0)
            xs[g] = x
        return xs

    def _true_squared(self, new_mix: np.ndarray) -> float:
        total = 0.0
        for g in self.others:
            gamma = self.sign * (self.baseline[g] - new_mix[g]) / self.scale[g]
            total += gamma * gamma
        return total

    def _run_ssq(self) -> AlterationResult:
        pwl = build_square_pwl(self.req.segments)
        model = self.base_model()
        xs = self._add_ratio_vars(model)
        coeffs: dict[str, float] = {}
        for g, x in xs.items():
            y = add_pwl_variable(model.lp, x, pwl)
            x_hat = self.baseline[g] / self.bounds[g]
            # dev^2 = (bounds/scale)^2 (x_hat - x)^2, expanded around the
            # separable square term y ~= x^2
            wg = self.bounds[g] ** 2 / self.scale[g] ** 2
            coeffs[y] = coeffs.get(y, 0.0) + self.sign * wg
            coeffs[x] = coeffs.get(x, 0.0) - self.sign * 2.0 * x_hat * wg
        model.lp.set_objective(coeffs, maximize=False)
        sol = solve_lp(model.lp)
        if sol.status != "optimal":
            return self.infeasible(f"solver status: {sol.status}")
        if self.sign > 0:
            # convex direction: segment fill order is automatically correct
            return self.finish(model, sol)
        return self._polish_growth(model.extract(sol).case_mix, sol)

    def _polish_growth(self, relax_mix: np.ndarray, relax_sol) -> AlterationResult:
        """Non-convex direction: the separable relaxation over-reports the
        squared growth, so repair by exact re-evaluation and improve the mix
        with iterated linearisations seeded from both the relaxation and the
        largest-total-growth (lin) solutions."""
        lin = self._run_lin()
        candidates = [relax_mix]
        if lin.status == "ok":
            candidates.append(lin.new_mix)
        best_mix, best_val, best_pair = None, -math.inf, None
        for seed in candidates:
            mix, pair = self._iterate_linearised(seed)
            if mix is None:
                continue
            val = self._true_squared(mix)
            if val > best_val + 1e-12:
                best_mix, best_val, best_pair = mix, val, pair
        if best_pair is None:
            return self.infeasible("no feasible growth profile found")
        model, sol = best_pair
        relax_repaired = self._true_squared(relax_mix)
        approximate = abs(best_val - relax_repaired) > APPROX_TOL
        return self.finish(model, sol, approximate=approximate)

    def _iterate_linearised(self, seed_mix: np.ndarray, max_rounds: int = 30):
        mix = seed_mix
        last = None
        for _ in range(max_rounds):
            model = self.base_model()
            obj: dict[str, float] = {}
            for g in self.others:
                gamma = max(0.0, (mix[g] - self.baseline[g]) / self.scale[g])
                # gradient of sum(dev^2), expressed in patient counts
                obj[model.n1[g]] = 2.0 * gamma / self.scale[g]
            model.lp.set_objective(obj, maximize=True)
            sol = solve_lp(model.lp)
            if sol.status != "optimal":
                return None, None
            new_mix = model.extract(sol).case_mix
            last = (model, sol)
            if np.max(np.abs(new_mix - mix)) < 1e-9:
                return new_mix, last
            mix = new_mix
        return mix, last


# ---------------------------------------------------------------------------
# sub-type engine


class _SubTypeEngine:
    def __init__(self, scenario, request, g_star, p_star, baseline, base_sub,
                 type_bounds, sub_bounds, fracs):
        self.s = scenario
        self.req = request
        self.g_star = g_star
        self.p_star = p_star
        self.baseline = baseline
        self.base_sub = base_sub
        self.type_bounds = type_bounds
        self.sub_bounds = sub_bounds
        self.fracs = fracs
        self.sign = 1.0 if request.delta > 0 else -1.0
        self.others = [
            (g, p)
            for g, t in enumerate(scenario.patient_types)
            for p in range(len(t.sub_types))
            if not (g == g_star and p == p_star)
        ]
        self.scale = (
            sub_bounds
            if request.scale_deviations
            else [np.ones_like(row) for row in sub_bounds]
        )

    def base_model(self) -> CmpModel:
        model = CmpModel(self.s, type_bounds=self.type_bounds)
        # adherence only for untouched types; the target's siblings move freely
        model.add_submix_floors(self.fracs, skip_type=self.g_star)
        anchor = self.base_sub[self.g_star][self.p_star] + self.req.delta
        model.fix_subtype(self.g_star, self.p_star, anchor)
        for g, p in self.others:
            lo, up = 0.0, self.sub_bounds[g][p]
            if not math.isfinite(up):
                up = INF
            if self.sign > 0:
                up = min(up, self.base_sub[g][p])
            else:
                lo = self.base_sub[g][p]
            if lo > up:
                lo = up
            model.lp.set_bounds(model.n2[g][p], lo, up)
        return model

    def add_deviation_vars(self, model: CmpModel) -> dict[tuple[int, int], str]:
        gammas = {}
        for g, p in self.others:
            st = self.s.patient_types[g].sub_types[p]
            gv = model.lp.add_variable(f"dev[{st.id}]", 0.0, INF)
            model.lp.add_constraint(
                {gv: 1.0, model.n2[g][p]: self.sign / self.scale[g][p]},
                "=",
                self.sign * self.base_sub[g][p] / self.scale[g][p],
            )
            gammas[(g, p)] = gv
        return gammas

    def run(self) -> AlterationResult:
        method = self.req.method
        if method == "lin":
            return self._run_lin()
        if method == "eq":
            return self._run_eq()
        return self._run_ssq()

    def finish(self, model, sol, uniform=None, approximate=False) -> AlterationResult:
        res = model.extract(sol)
        sub_dev = []
        for g, row in enumerate(res.sub_mix):
            dev_row = np.zeros(len(row))
            for p in range(len(row)):
                if (g, p) == (self.g_star, self.p_star):
                    continue
                dev_row[p] = max(
                    0.0,
                    self.sign * (self.base_sub[g][p] - row[p]) / self.scale[g][p],
                )
            sub_dev.append(dev_row)
        method = self.req.method
        flat = np.concatenate(sub_dev) if sub_dev else np.zeros(0)
        if method == "lin":
            obj = float(flat.sum())
        elif method == "eq":
            obj = float(uniform if uniform is not None else flat.max(initial=0.0))
        else:
            obj = float((flat**2).sum())
        impact = float(
            sum(res.sub_mix[g][p] - self.base_sub[g][p] for g, p in self.others)
        )
        type_dev = np.zeros(len(res.case_mix))
        return AlterationResult(
            status="ok",
            method=method,
            new_mix=res.case_mix,
            new_sub_mix=res.sub_mix,
            deviations=type_dev,
            sub_deviations=sub_dev,
            uniform_deviation=uniform,
            objective_value=obj,
            total=res.total,
            total_impact=impact,
            utilization=res.utilization,
            approximate=approximate,
        )

    def infeasible(self, message: str) -> AlterationResult:
        return _empty_result(self.s, self.req.method, status="infeasible", message=message)

    def _run_lin(self) -> AlterationResult:
        model = self.base_model()
        gammas = self.add_deviation_vars(model)
        model.lp.set_objective({gv: self.sign for gv in gammas.values()}, maximize=False)
        sol = solve_lp(model.lp)
        if sol.status != "optimal":
            return self.infeasible(f"solver status: {sol.status}")
        return self.finish(model, sol)

    def _run_eq(self) -> AlterationResult:
        model = self.base_model()
        gammas = self.add_deviation_vars(model)
        level = model.lp.add_variable("dev.level", 0.0, INF)
        for (g, p), gv in gammas.items():
            model.lp.add_constraint({gv: 1.0, level: -1.0}, "<=", 0.0)
            model.lp.add_constraint(
                {model.n2[g][p]: 1.0, level: self.sign * self.scale[g][p]},
                ">=",
                self.base_sub[g][p],
            )
        model.lp.set_objective({level: self.sign}, maximize=False)
        sol = solve_lp(model.lp)
        if sol.status != "optimal":
            return self.infeasible(f"solver status: {sol.status}")
        lam = sol[level]
        if self.sign > 0:
            model.lp.set_bounds(level, 0.0, lam + 1e-9)
            model.lp.set_objective(
                {model.n2[g][p]: 1.0 for g, p in self.others}, maximize=False
            )
            sol = solve_lp(model.lp)
            if sol.status != "optimal":
                return self.infeasible(f"stage-2 solver status: {sol.status}")
            lam = sol[level]
        return self.finish(model, sol, uniform=float(lam))

    def _true_squared(self, sub_mix: list[np.ndarray]) -> float:
        total = 0.0
        for g, p in self.others:
            gamma = self.sign * (self.base_sub[g][p] - sub_mix[g][p]) / self.scale[g][p]
            total += gamma * gamma
        return total

    def _run_ssq(self) -> AlterationResult:
        pwl = build_square_pwl(self.req.segments)
        model = self.base_model()
        coeffs: dict[str, float] = {}
        for g, p in self.others:
            ub = self.sub_bounds[g][p]
            if not math.isfinite(ub) or ub <= 0:
                continue
            st = self.s.patient_types[g].sub_types[p]
            lo, up = model.lp.bounds(model.n2[g][p])
            x = model.lp.add_variable(
                f"ratio[{st.id}]", lo / ub, min(1.0, up / ub if math.isfinite(up) else 1.0)
            )
            model.lp.add_constraint({x: ub, model.n2[g][p]: -1.0}, "=", 0.0)
            y = add_pwl_variable(model.lp, x, pwl)
            x_hat = self.base_sub[g][p] / ub
            wg = ub**2 / self.scale[g][p] ** 2
            coeffs[y] = coeffs.get(y, 0.0) + self.sign * wg
            coeffs[x] = coeffs.get(x, 0.0) - self.sign * 2.0 * x_hat * wg
        model.lp.set_objective(coeffs, maximize=False)
        sol = solve_lp(model.lp)
        if sol.status != "optimal":
            return self.infeasible(f"solver status: {sol.status}")
        if self.sign > 0:
            return self.finish(model, sol)
        return self._polish_growth(model.extract(sol).sub_mix)

    def _polish_growth(self, relax_sub: list[np.ndarray]) -> AlterationResult:
        lin = self._run_lin()
        candidates = [relax_sub]
        if lin.status == "ok":
            candidates.append(lin.new_sub_mix)
        best, best_val, best_pair = None, -math.inf, None
        for seed in candidates:
            sub, pair = self._iterate_linearised(seed)
            if sub is None:
                continue
            val = self._true_squared(sub)
            if val > best_val + 1e-12:
                best, best_val, best_pair = sub, val, pair
        if best_pair is None:
            return self.infeasible("no feasible growth profile found")
        model, sol = best_pair
        approximate = abs(best_val - self._true_squared(relax_sub)) > APPROX_TOL
        return self.finish(model, sol, approximate=approximate)

    def _iterate_linearised(self, seed_sub: list[np.ndarray], max_rounds: int = 30):
        sub = seed_sub
        last = None
        for _ in range(max_rounds):
            model = self.base_model()
            obj: dict[str, float] = {}
            for g, p in self.others:
                gamma = max(0.0, (sub[g][p] - self.base_sub[g][p]) / self.scale[g][p])
                obj[model.n2[g][p]] = 2.0 * gamma / self.scale[g][p]
            model.lp.set_objective(obj, maximize=True)
            sol = solve_lp(model.lp)
            if sol.status != "optimal":
                return None, None
            new_sub = model.extract(sol).sub_mix
            last = (model, sol)
            if max(np.max(np.abs(a - b)) for a, b in zip(new_sub, sub)) < 1e-9:
                return new_sub, last
            sub = new_sub
        return sub, last
