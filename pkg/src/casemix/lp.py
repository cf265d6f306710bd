"""Dense linear programs and a self-contained simplex solver.

The solver is a two-phase primal simplex with implicit variable bounds:
nonbasic variables sit at a finite lower or upper bound, bound flips avoid
basis changes, and the basis inverse is kept explicitly (problem sizes here
stay in the tens of rows). Pivoting is deterministic: Dantzig pricing with
lowest-index tie-breaks, falling back to Bland's rule after a pivot budget
to rule out cycling.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

INF = float("inf")

FEASIBILITY_TOL = 1e-7
REDUCED_COST_TOL = 1e-9
PIVOT_TOL = 1e-9
REFACTOR_EVERY = 200
BLAND_AFTER = 20_000
MAX_ITERATIONS = 200_000


class LpError(Exception):
    pass


class NumericalError(LpError):
    """Solver failed for numerical reasons (distinct from model infeasibility)."""


@dataclass
class LpSolution:
    status: str  # "optimal" | "infeasible" | "unbounded"
    objective_value: float
    values: dict[str, float] = field(default_factory=dict)

    def __getitem__(self, name: str) -> float:
        return self.values[name]


class LinearProgram:
    """A dense LP in named-variable form.

    Variables carry [lower, upper] bounds, constraints are sparse maps from
    variable name to coefficient with a relation in {"<=", "=", ">="}.
    """

    def __init__(self, name: str = ""):
        self.name = name
        self.var_names: list[str] = []
        self.lower: list[float] = []
        self.upper: list[float] = []
        self._index: dict[str, int] = {}
        self.rows: list[tuple[dict[int, float], str, float]] = []
        self.objective: dict[int, float] = {}
        self.maximize = False

    def add_variable(self, name: str, lower: float = 0.0, upper: float = INF) -> str:
        if name in self._index:
            raise LpError(f"duplicate variable {name!r}")
        if not lower <= upper:
            raise LpError(f"variable {name!r}: lower bound {lower} above upper {upper}")
        if np.isnan(lower) or np.isnan(upper):
            raise LpError(f"variable {name!r}: NaN bound")
        self._index[name] = len(self.var_names)
        self.var_names.append(name)
        self.lower.append(float(lower))
        self.upper.append(float(upper))
        return name

    def set_bounds(self, name: str, lower: float, upper: float) -> None:
        if not lower <= upper:
            raise LpError(f"variable {name!r}: lower bound {lower} above upper {upper}")
        j = self._index[name]
        self.lower[j] = float(lower)
        self.upper[j] = float(upper)

    def bounds(self, name: str) -> tuple[float, float]:
        j = self._index[name]
        return self.lower[j], self.upper[j]

    def add_constraint(self, coeffs: Mapping[str, float], relation: str, rhs: float) -> None:
        if relation not in ("<=", "=", ">="):
            raise LpError(f"unknown relation {relation!r}")
        row: dict[int, float] = {}
        for name, c in coeffs.items():
            if name not in self._index:
                raise LpError(f"constraint references undeclared variable {name!r}")
            c = float(c)
            if not np.isfinite(c):
                raise LpError(f"non-finite coefficient for {name!r}")
            if c != 0.0:
                j = self._index[name]
                row[j] = row.get(j, 0.0) + c
        if not np.isfinite(rhs):
            raise LpError("non-finite right-hand side")
        self.rows.append((row, relation, float(rhs)))

    def set_objective(self, coeffs: Mapping[str, float], maximize: bool = False) -> None:
        self.objective = {}
        self.maximize = maximize
        for name, c in coeffs.items():
            self.add_objective_term(name, c)

    def add_objective_term(self, name: str, coeff: float) -> None:
        if name not in self._index:
            raise LpError(f"objective references undeclared variable {name!r}")
        coeff = float(coeff)
        if not np.isfinite(coeff):
            raise LpError(f"non-finite objective coefficient for {name!r}")
        j = self._index[name]
        self.objective[j] = self.objective.get(j, 0.0) + coeff

    @property
    def num_variables(self) -> int:
        return len(self.var_names)


def lp_to_text(lp: LinearProgram) -> str:
    """Human-readable dump of a program, for external cross-checking."""
    lines = []
    sense = "maximize" if lp.maximize else "minimize"
    terms = " + ".join(
        f"{c:g} {lp.var_names[j]}" for j, c in sorted(lp.objective.items()) if c != 0.0
    )
    lines.append(f"{sense}: {terms or '0'}")
    lines.append("subject to:")
    for row, rel, rhs in lp.rows:
        expr = " + ".join(f"{c:g} {lp.var_names[j]}" for j, c in sorted(row.items()))
        lines.append(f"  {expr or '0'} {rel} {rhs:g}")
    lines.append("bounds:")
    for name, lo, hi in zip(lp.var_names, lp.lower, lp.upper):
        lines.append(f"  {lo:g} <= {name} <= {hi:g}")
    return "\n".join(lines)


def solve_lp(lp: LinearProgram) -> LpSolution:
    """Solve the program; pure function of its input.

    Raises :class:`NumericalError` when the pivot budget is exhausted or the
    basis becomes numerically unusable; infeasible and unbounded models come
    back as statuses, not exceptions.
    """
    return _Simplex(lp).run()


class _Simplex:
    AT_LOWER = 0
    AT_UPPER = 1
    BASIC = 2

    def __init__(self, lp: LinearProgram):
        self.lp = lp
        n = lp.num_variables
        m = len(lp.rows)
        total = n + m + m  # structural, slack per row, artificial per row
        self.n_struct = n
        self.m = m
        A = np.zeros((m, total))
        lower = np.zeros(total)
        upper = np.full(total, INF)
        lower[:n] = lp.lower
        upper[:n] = lp.upper
        b = np.empty(m)
        for i, (row, rel, rhs) in enumerate(lp.rows):
            for j, c in row.items():
                A[i, j] = c
            b[i] = rhs
            s = n + i
            A[i, s] = 1.0
            if rel == "<=":
                lower[s], upper[s] = 0.0, INF
            elif rel == ">=":
                lower[s], upper[s] = -INF, 0.0
            else:
                lower[s], upper[s] = 0.0, 0.0
        self.A = A
        self.b = b
        self.lower = lower
        self.upper = upper
        self.art_start = n + m
        self.c_real = np.zeros(total)
        sign = -1.0 if lp.maximize else 1.0
        for j, c in lp.objective.items():
            self.c_real[j] = sign * c

    def run(self) -> LpSolution:
        m, A, b = self.m, self.A, self.b
        total = A.shape[1]
        self.status = np.full(total, self.AT_LOWER, dtype=np.int8)
        self.x = np.zeros(total)
        for j in range(self.art_start):
            if np.isfinite(self.lower[j]):
                self.status[j] = self.AT_LOWER
                self.x[j] = self.lower[j]
            elif np.isfinite(self.upper[j]):
                self.status[j] = self.AT_UPPER
                self.x[j] = self.upper[j]
            else:
                self.status[j] = self.AT_LOWER  # free variable parked at 0
                self.x[j] = 0.0

        resid = b - A[:, : self.art_start] @ self.x[: self.art_start]
        signs = np.where(resid >= 0, 1.0, -1.0)
        for i in range(m):
            j = self.art_start + i
            A[i, j] = signs[i]
            self.x[j] = abs(resid[i])
            self.status[j] = self.BASIC
        self.basis = list(range(self.art_start, total))
        self.Binv = np.diag(signs)  # inverse of the signed artificial basis
        self.allowed = np.ones(total, dtype=bool)
        self.free = np.isneginf(self.lower) & np.isposinf(self.upper)

        c_phase1 = np.zeros(total)
        c_phase1[self.art_start :] = 1.0
        if self._optimize(c_phase1, phase=1) == "unbounded":
            raise NumericalError("phase 1 reported unbounded")
        if float(c_phase1 @ self.x) > 1e-6:
            return LpSolution(status="infeasible", objective_value=float("nan"))

        self._retire_artificials()

        if self._optimize(self.c_real, phase=2) == "unbounded":
            return LpSolution(status="unbounded", objective_value=INF)

        self._check_consistency()
        values = {name: float(self.x[j]) for j, name in enumerate(self.lp.var_names)}
        obj = float(self.c_real[: self.n_struct] @ self.x[: self.n_struct])
        if self.lp.maximize:
            obj = -obj
        return LpSolution(status="optimal", objective_value=obj, values=values)

    def _retire_artificials(self) -> None:
        """Pin artificials at zero; pivot basic ones out where a real column allows."""
        for i in range(self.m):
            j = self.basis[i]
            if j < self.art_start:
                continue
            row = self.Binv[i] @ self.A
            for k in range(self.art_start):
                if self.status[k] != self.BASIC and self.allowed[k] and abs(row[k]) > 1e-7:
                    self._pivot(entering=k, leaving_pos=i, theta=0.0, direction=1.0,
                                leaving_to_upper=False)
                    break
        for j in range(self.art_start, self.A.shape[1]):
            self.allowed[j] = False
            self.lower[j] = self.upper[j] = 0.0
            if self.status[j] != self.BASIC:
                self.x[j] = 0.0
            # a still-basic artificial marks a redundant row and stays pinned

    def _optimize(self, c: np.ndarray, phase: int) -> str:
        iters = 0
        while True:
            iters += 1
            if iters > MAX_ITERATIONS:
                raise NumericalError(f"pivot budget exhausted in phase {phase}")
            if iters % REFACTOR_EVERY == 0:
                self._refactor()
            y = c[self.basis] @ self.Binv
            d = c - y @ self.A
            j, direction = self._price(d, bland=iters > BLAND_AFTER)
            if j < 0:
                return "optimal"
            w = self.Binv @ self.A[:, j]
            theta, limit_pos, to_upper = self._ratio_test(j, direction, w)
            if theta == INF:
                return "unbounded"
            if limit_pos == -1:
                # entering variable swings to its opposite bound: no basis change
                self.x[self.basis] -= direction * theta * w
                self.x[j] = self.upper[j] if self.status[j] == self.AT_LOWER else self.lower[j]
                self.status[j] = (
                    self.AT_UPPER if self.status[j] == self.AT_LOWER else self.AT_LOWER
                )
            else:
                self._pivot(j, limit_pos, theta, direction, to_upper)

    def _price(self, d: np.ndarray, bland: bool) -> tuple[int, float]:
        movable = self.allowed & (self.status != self.BASIC) & (self.lower != self.upper)
        inc = movable & (d < -REDUCED_COST_TOL) & ((self.status == self.AT_LOWER) | self.free)
        dec = movable & (d > REDUCED_COST_TOL) & ((self.status == self.AT_UPPER) | self.free)
        cand = inc | dec
        if not cand.any():
            return -1, 0.0
        if bland:
            j = int(np.argmax(cand))
        else:
            scores = np.where(cand, np.abs(d), -1.0)
            j = int(np.argmax(scores))
        return j, (1.0 if inc[j] else -1.0)

    def _ratio_test(self, j: int, direction: float, w: np.ndarray) -> tuple[float, int, bool]:
        """Largest step for the entering variable.

        Returns (theta, blocking basis position or -1 for a self bound flip,
        whether the blocking variable lands on its upper bound).
        """
        theta = self.upper[j] - self.lower[j]  # may be inf
        limit_pos = -1
        to_upper = False
        for i in range(self.m):
            rate = -direction * w[i]  # movement of basic i per unit step
            if rate > PIVOT_TOL:
                room = self.upper[self.basis[i]] - self.x[self.basis[i]]
                if np.isfinite(room):
                    t = room / rate
                    if t < theta - 1e-12:
                        theta, limit_pos, to_upper = t, i, True
            elif rate < -PIVOT_TOL:
                room = self.x[self.basis[i]] - self.lower[self.basis[i]]
                if np.isfinite(room):
                    t = room / (-rate)
                    if t < theta - 1e-12:
                        theta, limit_pos, to_upper = t, i, False
        return max(theta, 0.0), limit_pos, to_upper

    def _pivot(self, entering: int, leaving_pos: int, theta: float, direction: float,
               leaving_to_upper: bool) -> None:
        w = self.Binv @ self.A[:, entering]
        if abs(w[leaving_pos]) < PIVOT_TOL:
            raise NumericalError("pivot element below tolerance")
        self.x[self.basis] -= direction * theta * w
        self.x[entering] += direction * theta
        leaving = self.basis[leaving_pos]
        self.status[leaving] = self.AT_UPPER if leaving_to_upper else self.AT_LOWER
        self.x[leaving] = self.upper[leaving] if leaving_to_upper else self.lower[leaving]
        if leaving >= self.art_start:
            self.allowed[leaving] = False
            self.lower[leaving] = self.upper[leaving] = 0.0
            self.x[leaving] = 0.0
        self.basis[leaving_pos] = entering
        self.status[entering] = self.BASIC
        piv = w[leaving_pos]
        row = self.Binv[leaving_pos] / piv
        self.Binv -= np.outer(w, row)
        self.Binv[leaving_pos] = row

    def _refactor(self) -> None:
        B = self.A[:, self.basis]
        try:
            self.Binv = np.linalg.inv(B)
        except np.linalg.LinAlgError as exc:
            raise NumericalError("basis matrix is singular") from exc
        mask = np.ones(self.A.shape[1], dtype=bool)
        mask[self.basis] = False
        resid = self.b - self.A[:, mask] @ self.x[mask]
        self.x[self.basis] = self.Binv @ resid

    def _check_consistency(self) -> None:
        self._refactor()
        x = self.x
        scale = 1.0 + (float(np.max(np.abs(self.b))) if self.m else 0.0)
        for i, (row, rel, rhs) in enumerate(self.lp.rows):
            err = sum(c * x[j] for j, c in row.items()) - rhs
            ok = (
                (rel == "<=" and err <= FEASIBILITY_TOL * scale)
                or (rel == ">=" and err >= -FEASIBILITY_TOL * scale)
                or (rel == "=" and abs(err) <= FEASIBILITY_TOL * scale)
            )
            if not ok:
                raise NumericalError(f"constraint {i} violated by {err:.3e} after solve")
        for j in range(self.n_struct):
            if (
                x[j] < self.lower[j] - FEASIBILITY_TOL * scale
                or x[j] > self.upper[j] + FEASIBILITY_TOL * scale
            ):
                raise NumericalError(
                    f"variable {self.lp.var_names[j]} outside bounds after solve"
                )
