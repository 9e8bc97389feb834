"""Exact simplex and branch-and-bound against brute-force oracles."""

import itertools
from fractions import Fraction

import pytest

from kwbench.lp import MilpModel, ModelError, RelOp, Sense, dualize, relax
from kwbench.relation import Lcg64
from kwbench.simplex import SolveStatus, solve_ip, solve_lp, verify_solution

F = Fraction


# ---------------------------------------------------------------------------
# Oracle: enumerate basic solutions of small LPs with exact Gaussian elimination
# ---------------------------------------------------------------------------

def _solve_square(A, b):
    n = len(b)
    M = [row[:] + [b[i]] for i, row in enumerate(A)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if M[r][col] != 0), None)
        if pivot is None:
            return None
        M[col], M[pivot] = M[pivot], M[col]
        inv = M[col][col]
        M[col] = [v / inv for v in M[col]]
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col]
                M[r] = [v - f * w for v, w in zip(M[r], M[col])]
    return [M[r][n] for r in range(n)]


def brute_force_lp(m: MilpModel):
    """Optimal value over all vertices (valid for feasible bounded LPs)."""
    names = [v.name for v in m.variables]
    n = len(names)
    cons = []
    for r in m.rows:
        cons.append(([r.coeffs.get(v, F(0)) for v in names], r.rel, r.rhs))
    for i, v in enumerate(m.variables):
        if v.lower is not None:
            row = [F(0)] * n
            row[i] = F(1)
            cons.append((row, RelOp.GE, v.lower))
    best = None
    for subset in itertools.combinations(range(len(cons)), n):
        x = _solve_square([cons[k][0] for k in subset], [cons[k][2] for k in subset])
        if x is None:
            continue
        feasible = True
        for coeffs, rel, rhs in cons:
            lhs = sum(c * v for c, v in zip(coeffs, x))
            if rel is RelOp.LE and lhs > rhs or \
               rel is RelOp.GE and lhs < rhs or \
               rel is RelOp.EQ and lhs != rhs:
                feasible = False
                break
        if not feasible:
            continue
        val = sum(m.objective.get(nm, F(0)) * v for nm, v in zip(names, x))
        if best is None or (val < best if m.sense is Sense.MIN else val > best):
            best = val
    return best


# ---------------------------------------------------------------------------
# solve_lp
# ---------------------------------------------------------------------------

def test_single_free_variable_max():
    m = MilpModel("m", Sense.MAX)
    m.add_variable("phi", lower=None)
    m.add_row("cap", {"phi": 1}, RelOp.LE, 1)
    m.set_objective({"phi": 1})
    sol = solve_lp(m)
    assert sol.status is SolveStatus.OPTIMAL and sol.objective == 1
    assert sol.assignment == {"phi": F(1)}


def test_two_variable_equality_min():
    m = MilpModel("m", Sense.MIN)
    m.add_variable("x1")
    m.add_variable("x2")
    m.add_row("sum", {"x1": 1, "x2": 1}, RelOp.EQ, 1)
    m.set_objective({"x1": 1, "x2": 1})
    sol = solve_lp(m)
    assert sol.status is SolveStatus.OPTIMAL and sol.objective == 1
    assert not verify_solution(m, sol.assignment)


def test_infeasible_negative_equality():
    m = MilpModel("m", Sense.MIN)
    m.add_variable("x")
    m.add_row("fix", {"x": 1}, RelOp.EQ, -1)
    m.set_objective({"x": 1})
    assert solve_lp(m).status is SolveStatus.INFEASIBLE


def test_infeasible_contradictory_rows():
    m = MilpModel("m", Sense.MIN)
    m.add_variable("x")
    m.add_variable("y")
    m.add_row("a", {"x": 1, "y": 1}, RelOp.EQ, 1)
    m.add_row("b", {"x": 1, "y": 1}, RelOp.EQ, 2)
    m.set_objective({"x": 1})
    assert solve_lp(m).status is SolveStatus.INFEASIBLE


def test_unbounded():
    m = MilpModel("m", Sense.MIN)
    m.add_variable("x")
    m.set_objective({"x": -1})
    assert solve_lp(m).status is SolveStatus.UNBOUNDED
    m2 = MilpModel("m2", Sense.MAX)
    m2.add_variable("u", lower=None)
    m2.add_variable("v", lower=None)
    m2.add_row("r", {"u": 1, "v": 1}, RelOp.LE, 3)
    m2.set_objective({"u": 1})
    assert solve_lp(m2).status is SolveStatus.UNBOUNDED


def test_free_variables_take_negative_values():
    m = MilpModel("m", Sense.MIN)
    m.add_variable("u", lower=None)
    m.add_row("lo", {"u": 1}, RelOp.GE, -5)
    m.set_objective({"u": 1})
    sol = solve_lp(m)
    assert sol.objective == -5 and sol.assignment["u"] == F(-5)


def test_redundant_rows_handled():
    m = MilpModel("m", Sense.MIN)
    m.add_variable("x")
    m.add_variable("y")
    m.add_row("a", {"x": 1, "y": 1}, RelOp.EQ, 2)
    m.add_row("b", {"x": 2, "y": 2}, RelOp.EQ, 4)  # same hyperplane
    m.set_objective({"x": 3, "y": 1})
    sol = solve_lp(m)
    assert sol.status is SolveStatus.OPTIMAL and sol.objective == 2


def test_degenerate_cycling_instance_terminates():
    # Beale's classic cycling example for Dantzig with naive tie-breaks.
    m = MilpModel("beale", Sense.MIN)
    for name in ("x4", "x5", "x6", "x7"):
        m.add_variable(name)
    m.add_row("r1", {"x4": F(1, 4), "x5": -60, "x6": F(-1, 25), "x7": 9}, RelOp.LE, 0)
    m.add_row("r2", {"x4": F(1, 2), "x5": -90, "x6": F(-1, 50), "x7": 3}, RelOp.LE, 0)
    m.add_row("r3", {"x6": 1}, RelOp.LE, 1)
    m.set_objective({"x4": F(-3, 4), "x5": 150, "x6": F(-1, 50), "x7": 6})
    sol = solve_lp(m)
    assert sol.status is SolveStatus.OPTIMAL
    assert sol.objective == F(-1, 20)
    assert sol.objective == brute_force_lp(m)
    assert not verify_solution(m, sol.assignment)


def test_fractional_coefficients_exact():
    m = MilpModel("m", Sense.MAX)
    m.add_variable("a")
    m.add_variable("b")
    m.add_row("r1", {"a": F(1, 3), "b": F(1, 7)}, RelOp.LE, F(5, 21))
    m.set_objective({"a": F(1, 2), "b": F(1, 2)})
    sol = solve_lp(m)
    assert sol.objective == brute_force_lp(m) == F(5, 6)


def _random_bounded_models(seed, count, nvars=3, nrows=3):
    rng = Lcg64(seed)
    models = []
    for k in range(count):
        m = MilpModel(f"rand{k}", Sense.MIN if rng.below(2) else Sense.MAX)
        names = [f"v{i}" for i in range(nvars)]
        for nm in names:
            m.add_variable(nm)
        for r in range(nrows):
            coeffs = {nm: rng.below(7) - 3 for nm in names}
            coeffs = {nm: c for nm, c in coeffs.items() if c}
            if not coeffs:
                coeffs = {names[0]: 1}
            m.add_row(f"r{r}", coeffs, RelOp.LE, rng.below(5) + 1)
        for i, nm in enumerate(names):
            m.add_row(f"box{i}", {nm: 1}, RelOp.LE, 4)
        m.set_objective({nm: rng.below(9) - 4 for nm in names})
        m.validate()
        models.append(m)
    return models


def test_random_lps_match_vertex_enumeration():
    for m in _random_bounded_models(2024, 25):
        sol = solve_lp(m)
        assert sol.status is SolveStatus.OPTIMAL, m.name
        assert sol.objective == brute_force_lp(m), m.name
        assert not verify_solution(m, sol.assignment), m.name


def _random_equality_models(seed, count, nvars=4, nrows=2):
    # feasible by construction: rhs = A @ x0 for a non-negative x0
    rng = Lcg64(seed)
    models = []
    for k in range(count):
        m = MilpModel(f"eq{k}", Sense.MIN)
        names = [f"v{i}" for i in range(nvars)]
        for nm in names:
            m.add_variable(nm)
        x0 = [rng.below(4) for _ in names]
        for r in range(nrows):
            coeffs = {nm: rng.below(5) - 2 for nm in names}
            rhs = sum(c * x for c, x in zip(coeffs.values(), x0))
            coeffs = {nm: c for nm, c in coeffs.items() if c}
            if not coeffs:
                coeffs, rhs = {names[0]: 1}, x0[0]
            m.add_row(f"r{r}", coeffs, RelOp.EQ, rhs)
        m.set_objective({nm: rng.below(4) for nm in names})
        m.validate()
        models.append(m)
    return models


def test_strong_duality_on_random_equality_models():
    for m in _random_equality_models(99, 20):
        primal = solve_lp(m)
        if primal.status is not SolveStatus.OPTIMAL:
            continue
        dual = solve_lp(dualize(m))
        assert dual.status is SolveStatus.OPTIMAL, m.name
        assert primal.objective == dual.objective, m.name
        assert not verify_solution(m, primal.assignment)
        assert not verify_solution(dualize(m), dual.assignment)


def test_solve_lp_rejects_integer_models():
    m = MilpModel("m", Sense.MIN)
    m.add_variable("x", is_integer=True)
    m.add_row("r", {"x": 1}, RelOp.EQ, 1)
    m.set_objective({"x": 1})
    with pytest.raises(ModelError):
        solve_lp(m)
    assert solve_lp(relax(m)).objective == 1


# ---------------------------------------------------------------------------
# solve_ip
# ---------------------------------------------------------------------------

def test_integral_root_returns_at_node_one():
    m = MilpModel("m", Sense.MIN)
    m.add_variable("x", is_integer=True)
    m.add_row("fix", {"x": 1}, RelOp.EQ, 1)
    m.set_objective({"x": 1})
    sol = solve_ip(m)
    assert sol.status is SolveStatus.OPTIMAL and sol.objective == 1
    assert sol.node_count == 1


def test_branching_needed_for_fractional_root():
    m = MilpModel("m", Sense.MAX)
    m.add_variable("a", is_integer=True)
    m.add_variable("b", is_integer=True)
    m.add_row("cap", {"a": 2, "b": 2}, RelOp.LE, 3)
    m.set_objective({"a": 1, "b": 1})
    relaxed_val = solve_lp(relax(m)).objective
    assert relaxed_val == F(3, 2)
    sol = solve_ip(m)
    assert sol.objective == 1 and sol.node_count > 1
    assert all(v.denominator == 1 for v in sol.assignment.values())


def brute_force_ip(m: MilpModel, box):
    names = [v.name for v in m.variables]
    best = None
    for point in itertools.product(range(box + 1), repeat=len(names)):
        assignment = {nm: F(p) for nm, p in zip(names, point)}
        if verify_solution(m, assignment):
            continue
        val = sum(m.objective.get(nm, F(0)) * v for nm, v in assignment.items())
        if best is None or (val > best if m.sense is Sense.MAX else val < best):
            best = val
    return best


def test_knapsack_against_exhaustive_search():
    m = MilpModel("knap", Sense.MAX)
    for nm in ("a", "b", "c"):
        m.add_variable(nm, is_integer=True)
    m.add_row("w1", {"a": 2, "b": 3, "c": 1}, RelOp.LE, 5)
    m.add_row("w2", {"a": 4, "b": 1, "c": 2}, RelOp.LE, 11)
    m.add_row("w3", {"a": 3, "b": 4, "c": 2}, RelOp.LE, 8)
    m.set_objective({"a": 5, "b": 4, "c": 3})
    sol = solve_ip(m)
    assert sol.status is SolveStatus.OPTIMAL
    assert sol.objective == brute_force_ip(m, box=6)
    assert not verify_solution(m, sol.assignment)


def test_random_ips_against_exhaustive_search():
    for m in _random_bounded_models(777, 10):
        m2 = MilpModel(m.name, m.sense,
                       [type(v)(v.name, v.lower, True) for v in m.variables],
                       m.rows, m.objective)
        sol = solve_ip(m2)
        assert sol.status is SolveStatus.OPTIMAL
        assert sol.objective == brute_force_ip(m2, box=4), m.name
        assert not verify_solution(m2, sol.assignment)


def test_ip_infeasible():
    m = MilpModel("m", Sense.MIN)
    m.add_variable("x", is_integer=True)
    m.add_row("a", {"x": 2}, RelOp.EQ, 1)  # x = 1/2 has no integer solution
    m.set_objective({"x": 1})
    sol = solve_ip(m)
    assert sol.status is SolveStatus.INFEASIBLE and sol.node_count >= 1


def test_node_limit_status():
    m = MilpModel("m", Sense.MAX)
    m.add_variable("a", is_integer=True)
    m.add_variable("b", is_integer=True)
    m.add_row("cap", {"a": 2, "b": 2}, RelOp.LE, 3)
    m.set_objective({"a": 1, "b": 1})
    sol = solve_ip(m, node_limit=1)
    assert sol.status is SolveStatus.NODE_LIMIT


def test_verify_solution_reports_violations():
    m = MilpModel("m", Sense.MIN)
    m.add_variable("x", is_integer=True)
    m.add_row("fix", {"x": 1}, RelOp.EQ, 1)
    m.set_objective({"x": 1})
    bad = verify_solution(m, {"x": F(1, 2)})
    assert any("fix" in v for v in bad)
    assert any("not integral" in v for v in bad)
    assert verify_solution(m, {"x": F(-1)}) != []
    assert verify_solution(m, {}) != []
