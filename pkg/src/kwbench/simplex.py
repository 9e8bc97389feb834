"""Exact rational LP solving (primal simplex) and branch-and-bound.

No floating point anywhere on the solve path: the tableau holds exact
rationals (gmpy2.mpq when available, else fractions.Fraction), and all
results are returned as Fraction so equalities downstream are exact.

The simplex is the textbook two-phase method on a sparse row tableau:

  * free variables are split into a difference of two non-negatives;
  * <= and >= rows get slack columns, rows are sign-normalized to a
    non-negative right-hand side, and rows without a unit slack get an
    artificial column that phase 1 drives to zero;
  * entering column by Dantzig's rule (most negative reduced cost, ties
    to the lowest column), with an automatic switch to Bland's rule
    after a run of degenerate pivots, which guarantees termination;
  * leaving row by minimum ratio, ties to the lowest basic column.

Branch-and-bound explores subproblems depth-first, branching on the
fractional integer variable whose value has the largest denominator
(ties by name), and prunes with exact bound comparisons. Branches are
expressed as extra rows (var <= floor, var >= ceil).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import TextIO

from .lp import LinRow, MilpModel, ModelError, RelOp, Sense, evaluate_objective, relax

try:
    from gmpy2 import mpq as _Q
except ImportError:  # pragma: no cover - exercised only without gmpy2
    from fractions import Fraction as _Q

DEFAULT_BLAND_AFTER = 1000
DEFAULT_NODE_LIMIT = 10 ** 6


class SolveStatus(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    NODE_LIMIT = "node_limit"


@dataclass(frozen=True)
class LpSolution:
    status: SolveStatus
    objective: Fraction | None
    assignment: dict[str, Fraction]
    pivots: int = 0


@dataclass(frozen=True)
class IpSolution:
    status: SolveStatus
    objective: Fraction | None
    assignment: dict[str, Fraction]
    node_count: int = 0


def _to_fraction(q) -> Fraction:
    return Fraction(int(q.numerator), int(q.denominator))


class _Tableau:
    """Sparse row tableau for one minimization solve."""

    def __init__(self, model: MilpModel):
        self.model = model
        self.colmeta: list[tuple] = []  # ("v", name, sign) | ("s", row) | ("a", row)
        self.var_cols: dict[str, list[tuple[int, int]]] = {}
        for v in model.variables:
            if v.lower is None:
                self.var_cols[v.name] = [(self._new_col(("v", v.name, 1)), 1),
                                         (self._new_col(("v", v.name, -1)), -1)]
            else:
                self.var_cols[v.name] = [(self._new_col(("v", v.name, 1)), 1)]

        self.rows: list[dict[int, object]] = []
        self.rhs: list[object] = []
        self.basis: list[int] = []
        self.artificials: set[int] = set()
        self.banned: set[int] = set()
        for r in model.rows:
            coeffs: dict[int, object] = {}
            for var, c in r.coeffs.items():
                qc = _Q(c)
                for col, sign in self.var_cols[var]:
                    coeffs[col] = qc if sign == 1 else -qc
            slack = None
            if r.rel is RelOp.LE:
                slack = self._new_col(("s", r.name))
                coeffs[slack] = _Q(1)
            elif r.rel is RelOp.GE:
                slack = self._new_col(("s", r.name))
                coeffs[slack] = _Q(-1)
            rhs = _Q(r.rhs)
            # Normalize to rhs >= 0, and flip rhs-0 rows so their slack can
            # start basic: every <=-like row then begins feasible for free.
            if rhs < 0 or (rhs == 0 and slack is not None and coeffs[slack] < 0):
                coeffs = {c: -v for c, v in coeffs.items()}
                rhs = -rhs
            basic = None
            if slack is not None and coeffs[slack] == 1:
                basic = slack
            if basic is None:
                basic = self._new_col(("a", r.name))
                coeffs[basic] = _Q(1)
                self.artificials.add(basic)
            self.rows.append({c: v for c, v in coeffs.items() if v != 0})
            self.rhs.append(rhs)
            self.basis.append(basic)
        # The initial identity columns double as the symbolic perturbation
        # (rhs_i + eps^i) for the lexicographic ratio test.
        self.eps_cols: list[int] = list(self.basis)

        self.obj: dict[int, object] = {}
        self.pivots = 0

    def _new_col(self, meta: tuple) -> int:
        self.colmeta.append(meta)
        return len(self.colmeta) - 1

    def _reduced(self, cost: dict[int, object]) -> dict[int, object]:
        """Reduced costs of `cost` under the current basis.

        Valid because the basis columns form an identity in the current
        rows, so one elimination pass per row suffices.
        """
        r = {c: v for c, v in cost.items() if v != 0}
        for i, b in enumerate(self.basis):
            cb = r.pop(b, None)
            if cb:
                for c, v in self.rows[i].items():
                    if c == b:
                        continue
                    nv = r.get(c, 0) - cb * v
                    if nv:
                        r[c] = nv
                    else:
                        r.pop(c, None)
        return r

    def _pivot(self, i: int, j: int) -> None:
        row = self.rows[i]
        piv = row[j]
        if piv != 1:
            row = {c: v / piv for c, v in row.items()}
            self.rows[i] = row
            self.rhs[i] = self.rhs[i] / piv
        for k, rk in enumerate(self.rows):
            if k == i:
                continue
            f = rk.get(j)
            if f is None:
                continue
            for c, v in row.items():
                if c == j:
                    continue
                nv = rk.get(c, 0) - f * v
                if nv:
                    rk[c] = nv
                else:
                    rk.pop(c, None)
            del rk[j]
            if f:
                self.rhs[k] = self.rhs[k] - f * self.rhs[i]
        f = self.obj.get(j)
        if f is not None:
            for c, v in row.items():
                if c == j:
                    continue
                nv = self.obj.get(c, 0) - f * v
                if nv:
                    self.obj[c] = nv
                else:
                    self.obj.pop(c, None)
            del self.obj[j]
        self.basis[i] = j
        self.pivots += 1

    def _min_ratio(self, j: int):
        best = None
        for i, rk in enumerate(self.rows):
            a = rk.get(j)
            if a is None or a <= 0:
                continue
            t = self.rhs[i] / a
            if best is None or t < best:
                best = t
        return best

    def _leaving(self, j: int) -> int | None:
        """Lexicographic minimum-ratio row.

        Ties at the minimum ratio are resolved by comparing the rows'
        entries over the initial identity columns, in row order, which
        is the classic symbolic perturbation: it keeps every row vector
        lexicographically positive, so no basis ever repeats and the
        simplex terminates under any entering rule.
        """
        best_t = None
        ties: list[tuple[int, object]] = []
        for i, rk in enumerate(self.rows):
            a = rk.get(j)
            if a is None or a <= 0:
                continue
            t = self.rhs[i] / a
            if best_t is None or t < best_t:
                best_t, ties = t, [(i, a)]
            elif t == best_t:
                ties.append((i, a))
        if best_t is None:
            return None
        if len(ties) > 1:
            for e in self.eps_cols:
                vals = [(self.rows[i].get(e, 0) / a, i, a) for i, a in ties]
                lo = min(v for v, _, _ in vals)
                ties = [(i, a) for v, i, a in vals if v == lo]
                if len(ties) == 1:
                    break
        return ties[0][0]

    def _dantzig_step(self, bland: bool):
        best_col = None
        best_val = None
        for c, v in self.obj.items():
            if v >= 0 or c in self.banned:
                continue
            if bland:
                if best_col is None or c < best_col:
                    best_col = c
            elif best_val is None or v < best_val or (v == best_val and c < best_col):
                best_col, best_val = c, v
        if best_col is None:
            return None
        return best_col, self._leaving(best_col)

    PRICE_CANDIDATES = 25

    def _priced_step(self):
        """Greatest improvement over the most negative reduced-cost columns.

        Dantzig's rule alone stalls badly on these programs (almost all
        balance rows have rhs 0, so most vertices are degenerate). For
        the candidate columns with the most negative reduced costs the
        actual improvement -d_j * theta_j is computed exactly and the
        largest wins, preferring real progress over degenerate pivots.
        Falls back to the most negative column when every candidate is
        degenerate.
        """
        candidates = sorted(
            ((v, c) for c, v in self.obj.items() if v < 0 and c not in self.banned)
        )[:self.PRICE_CANDIDATES]
        if not candidates:
            return None
        best_col = None
        best_gain = None
        for v, c in candidates:
            t = self._min_ratio(c)
            if t is None:
                return c, None
            gain = -v * t
            if best_col is None or gain > best_gain:
                best_col, best_gain = c, gain
        return best_col, self._leaving(best_col)

    def _simplex(self, bland_after: int) -> SolveStatus:
        # The lexicographic ratio test already guarantees termination;
        # the Bland switch after a streak of degenerate pivots is kept
        # as a configurable extra safeguard.
        streak = 0
        while True:
            step = self._dantzig_step(True) if streak >= bland_after else self._priced_step()
            if step is None:
                return SolveStatus.OPTIMAL
            j, i = step
            if i is None:
                return SolveStatus.UNBOUNDED
            streak = streak + 1 if self.rhs[i] == 0 else 0
            self._pivot(i, j)

    def run_phase1(self, bland_after: int) -> bool:
        """Minimize the artificial sum; True if a feasible basis was found."""
        if not self.artificials:
            return True
        self.obj = self._reduced({a: _Q(1) for a in self.artificials})
        status = self._simplex(bland_after)
        assert status is SolveStatus.OPTIMAL, "phase 1 is bounded below by 0"
        residue = sum((self.rhs[i] for i, b in enumerate(self.basis) if b in self.artificials), _Q(0))
        if residue != 0:
            return False
        # Drive leftover artificials (all at value 0) out of the basis;
        # rows with no other support are redundant and dropped.
        i = 0
        while i < len(self.rows):
            b = self.basis[i]
            if b in self.artificials:
                j = min((c for c in self.rows[i] if c not in self.artificials), default=None)
                if j is None:
                    del self.rows[i], self.rhs[i], self.basis[i]
                    continue
                self._pivot(i, j)
            i += 1
        # Artificial columns stay in the tableau as the lexicographic
        # perturbation record, but may never re-enter the basis.
        self.banned = set(self.artificials)
        return True

    def run_phase2(self, bland_after: int) -> SolveStatus:
        cost: dict[int, object] = {}
        flip = -1 if self.model.sense is Sense.MAX else 1
        for var, c in self.model.objective.items():
            qc = flip * _Q(c)
            for col, sign in self.var_cols[var]:
                cost[col] = cost.get(col, 0) + (qc if sign == 1 else -qc)
        self.obj = self._reduced(cost)
        return self._simplex(bland_after)

    def extract(self) -> dict[str, Fraction]:
        values = {v.name: Fraction(0) for v in self.model.variables}
        for i, b in enumerate(self.basis):
            meta = self.colmeta[b]
            if meta[0] == "v":
                values[meta[1]] += meta[2] * _to_fraction(self.rhs[i])
        return values


def solve_lp(m: MilpModel, *, bland_after: int = DEFAULT_BLAND_AFTER,
             log: TextIO | None = None) -> LpSolution:
    """Exact optimum of a continuous model."""
    m.validate()
    if m.has_integers:
        raise ModelError("solve_lp requires a continuous model; call relax() first")
    t = _Tableau(m)
    if not t.run_phase1(bland_after):
        if log:
            log.write(f"{m.name}: infeasible after {t.pivots} pivots\n")
        return LpSolution(SolveStatus.INFEASIBLE, None, {}, t.pivots)
    status = t.run_phase2(bland_after)
    if status is SolveStatus.UNBOUNDED:
        if log:
            log.write(f"{m.name}: unbounded after {t.pivots} pivots\n")
        return LpSolution(SolveStatus.UNBOUNDED, None, {}, t.pivots)
    assignment = t.extract()
    objective = evaluate_objective(m, assignment)
    if log:
        log.write(f"{m.name}: optimal {objective} after {t.pivots} pivots\n")
    return LpSolution(SolveStatus.OPTIMAL, objective, assignment, t.pivots)


def solve_ip(m: MilpModel, *, node_limit: int = DEFAULT_NODE_LIMIT,
             bland_after: int = DEFAULT_BLAND_AFTER, log: TextIO | None = None) -> IpSolution:
    """Exact optimum with the integrality flags enforced.

    Assumes a finite optimum when feasible (true for all models built
    here, whose feasible sets are bounded).
    """
    m.validate()
    base = relax(m)
    int_vars = [v.name for v in m.variables if v.is_integer]
    minimize = m.sense is Sense.MIN

    best_obj: Fraction | None = None
    best_assign: dict[str, Fraction] = {}
    stack: list[list[LinRow]] = [[]]
    nodes = 0
    branch_seq = 0

    while stack:
        if nodes >= node_limit:
            status = SolveStatus.NODE_LIMIT
            if log:
                log.write(f"{m.name}: node limit {node_limit} reached\n")
            return IpSolution(status, best_obj, best_assign, nodes)
        extra = stack.pop()
        nodes += 1
        node_model = MilpModel(m.name, m.sense, base.variables, base.rows + extra, base.objective)
        sol = solve_lp(node_model, bland_after=bland_after)
        if sol.status is SolveStatus.INFEASIBLE:
            continue
        if sol.status is SolveStatus.UNBOUNDED:
            return IpSolution(SolveStatus.UNBOUNDED, None, {}, nodes)
        if best_obj is not None:
            no_better = sol.objective >= best_obj if minimize else sol.objective <= best_obj
            if no_better:
                continue
        fractional = [(name, sol.assignment[name]) for name in int_vars
                      if sol.assignment[name].denominator != 1]
        if not fractional:
            best_obj, best_assign = sol.objective, sol.assignment
            if log:
                log.write(f"{m.name}: incumbent {best_obj} at node {nodes}\n")
            continue
        # Largest denominator wins; ties go to the lexicographically first name.
        pick_name, pick_val = fractional[0]
        for name, val in fractional[1:]:
            if val.denominator > pick_val.denominator or \
                    (val.denominator == pick_val.denominator and name < pick_name):
                pick_name, pick_val = name, val
        floor_val = math.floor(pick_val)
        up = LinRow(f"branch{branch_seq}", {pick_name: Fraction(1)}, RelOp.GE, Fraction(floor_val + 1))
        down = LinRow(f"branch{branch_seq + 1}", {pick_name: Fraction(1)}, RelOp.LE, Fraction(floor_val))
        branch_seq += 2
        stack.append(extra + [up])
        stack.append(extra + [down])  # LIFO: floor branch explored first

    if best_obj is None:
        return IpSolution(SolveStatus.INFEASIBLE, None, {}, nodes)
    if log:
        log.write(f"{m.name}: optimal {best_obj} after {nodes} nodes\n")
    return IpSolution(SolveStatus.OPTIMAL, best_obj, best_assign, nodes)


def verify_solution(m: MilpModel, assignment: dict[str, Fraction],
                    check_integrality: bool = True) -> list[str]:
    """Independent exact re-check of an assignment against the model.

    Walks the model rows directly (never the solver's tableau) and
    returns a description of every violated row, bound, or integrality
    flag; empty means the assignment is feasible.
    """
    violations = []
    for v in m.variables:
        val = assignment.get(v.name)
        if val is None:
            violations.append(f"variable {v.name}: no value assigned")
            continue
        if v.lower is not None and val < v.lower:
            violations.append(f"variable {v.name}: {val} below lower bound {v.lower}")
        if check_integrality and v.is_integer and val.denominator != 1:
            violations.append(f"variable {v.name}: {val} is not integral")
    for r in m.rows:
        lhs = sum((c * assignment.get(var, Fraction(0)) for var, c in r.coeffs.items()), Fraction(0))
        ok = (lhs <= r.rhs if r.rel is RelOp.LE else
              lhs >= r.rhs if r.rel is RelOp.GE else
              lhs == r.rhs)
        if not ok:
            violations.append(f"row {r.name}: lhs {lhs} fails {r.rel.value} {r.rhs}")
    return violations
