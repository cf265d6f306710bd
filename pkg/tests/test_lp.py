import numpy as np
import pytest

from casemix.lp import INF, LinearProgram, LpError, solve_lp, lp_to_text

from _properties import (
    check_duality,
    check_solver_against_enumeration,
    random_inequality_lp,
    solve_inequality_lp,
)


def test_single_variable_maximum():
    lp = LinearProgram()
    lp.add_variable("x", 0.0, 10.0)
    lp.add_constraint({"x": 1.0}, "<=", 3.0)
    lp.set_objective({"x": 1.0}, maximize=True)
    sol = solve_lp(lp)
    assert sol.status == "optimal"
    assert sol.objective_value == pytest.approx(3.0)
    assert sol["x"] == pytest.approx(3.0)


def test_infeasible_detected():
    lp = LinearProgram()
    lp.add_variable("x")
    lp.add_variable("y")
    lp.add_constraint({"x": 1.0, "y": 1.0}, "<=", 1.0)
    lp.add_constraint({"x": 1.0}, ">=", 2.0)
    lp.set_objective({"x": 1.0, "y": 1.0}, maximize=True)
    assert solve_lp(lp).status == "infeasible"


def test_unbounded_detected():
    lp = LinearProgram()
    lp.add_variable("x")
    lp.set_objective({"x": 1.0}, maximize=True)
    assert solve_lp(lp).status == "unbounded"


def test_equality_and_upper_bounds():
    lp = LinearProgram()
    lp.add_variable("x", 0.0, 4.0)
    lp.add_variable("y", 0.0, 4.0)
    lp.add_constraint({"x": 1.0, "y": 1.0}, "=", 6.0)
    lp.set_objective({"x": 2.0, "y": 1.0}, maximize=True)
    sol = solve_lp(lp)
    assert sol.status == "optimal"
    assert sol["x"] == pytest.approx(4.0)
    assert sol["y"] == pytest.approx(2.0)


def test_negative_lower_bound():
    lp = LinearProgram()
    lp.add_variable("x", -5.0, 5.0)
    lp.add_constraint({"x": 1.0}, ">=", -3.0)
    lp.set_objective({"x": 1.0}, maximize=False)
    sol = solve_lp(lp)
    assert sol["x"] == pytest.approx(-3.0)


def test_free_variable():
    lp = LinearProgram()
    lp.add_variable("x", -INF, INF)
    lp.add_variable("y", 0.0, INF)
    lp.add_constraint({"x": 1.0, "y": 1.0}, "=", 2.0)
    lp.add_constraint({"x": 1.0}, ">=", -7.0)
    lp.set_objective({"x": 1.0}, maximize=False)
    sol = solve_lp(lp)
    assert sol.status == "optimal"
    assert sol["x"] == pytest.approx(-7.0)
    assert sol["y"] == pytest.approx(9.0)


def test_rejects_bad_inputs():
    lp = LinearProgram()
    lp.add_variable("x")
    with pytest.raises(LpError):
        lp.add_variable("x")
    with pytest.raises(LpError):
        lp.add_constraint({"nope": 1.0}, "<=", 1.0)
    with pytest.raises(LpError):
        lp.add_constraint({"x": float("nan")}, "<=", 1.0)
    with pytest.raises(LpError):
        lp.add_variable("bad", 2.0, 1.0)


def test_degenerate_cycling_instance():
    # a textbook instance that cycles under naive most-negative pricing
    lp = LinearProgram()
    names = [lp.add_variable(f"x{i}") for i in range(4)]
    rows = [
        ([0.25, -60.0, -0.04, 9.0], 0.0),
        ([0.5, -90.0, -0.02, 3.0], 0.0),
        ([0.0, 0.0, 1.0, 0.0], 1.0),
    ]
    for row, rhs in rows:
        lp.add_constraint({names[j]: row[j] for j in range(4)}, "<=", rhs)
    lp.set_objective(
        {names[0]: 0.75, names[1]: -150.0, names[2]: 0.02, names[3]: -6.0},
        maximize=True,
    )
    sol = solve_lp(lp)
    assert sol.status == "optimal"
    assert sol.objective_value == pytest.approx(0.05, abs=1e-9)


def test_determinism_same_input_same_output():
    rng = np.random.default_rng(3)
    c, A, b = random_inequality_lp(rng)
    first = solve_inequality_lp(c, A, b)
    second = solve_inequality_lp(c, A, b)
    assert first.values == second.values
    assert first.objective_value == second.objective_value


def test_oracle_equivalence_sample():
    # the acceptance suite runs the full 200; keep a quick version here
    assert check_solver_against_enumeration(30, seed=5) == 30


def test_duality_sample():
    assert check_duality(20, seed=9) == 20


def test_against_reference_solver():
    scipy = pytest.importorskip("scipy.optimize")
    rng = np.random.default_rng(42)
    for _ in range(25):
        c, A, b = random_inequality_lp(rng)
        ours = solve_inequality_lp(c, A, b)
        ref = scipy.linprog(-c, A_ub=A, b_ub=b, bounds=[(0, None)] * len(c), method="highs")
        assert ours.status == "optimal" and ref.status == 0
        assert ours.objective_value == pytest.approx(-ref.fun, rel=1e-6, abs=1e-7)


def test_bounded_variables_against_reference_solver():
    scipy = pytest.importorskip("scipy.optimize")
    rng = np.random.default_rng(77)
    for _ in range(25):
        n = int(rng.integers(2, 6))
        m = int(rng.integers(2, 5))
        A = rng.uniform(-1, 2, size=(m, n))
        b = rng.uniform(0.5, 6.0, size=m)
        c = rng.uniform(-2, 2, size=n)
        lo = rng.uniform(0, 0.5, size=n)
        hi = lo + rng.uniform(0.5, 4.0, size=n)
        lp = LinearProgram()
        names = [lp.add_variable(f"x{i}", float(lo[i]), float(hi[i])) for i in range(n)]
        for row, rhs in zip(A, b):
            lp.add_constraint({names[i]: row[i] for i in range(n)}, "<=", float(rhs))
        lp.set_objective({names[i]: float(c[i]) for i in range(n)}, maximize=True)
        ours = solve_lp(lp)
        ref = scipy.linprog(-c, A_ub=A, b_ub=b, bounds=list(zip(lo, hi)), method="highs")
        if ref.status == 2:
            assert ours.status == "infeasible"
        else:
            assert ours.status == "optimal"
            assert ours.objective_value == pytest.approx(-ref.fun, rel=1e-6, abs=1e-7)


def test_debug_dump_mentions_every_piece():
    lp = LinearProgram()
    lp.add_variable("beds", 0.0, 12.0)
    lp.add_constraint({"beds": 2.0}, "<=", 10.0)
    lp.set_objective({"beds": 1.0}, maximize=True)
    text = lp_to_text(lp)
    assert "maximize" in text and "beds" in text and "<= 10" in text
