"""The covering/balance integer program and the quasi-additive LP.

For a relation T with cells C_T, rectangles R(T), monochromatic
rectangles M(T), splits P(R), pairs Gamma(T) = {(R, P) : P in P(R)},
and R*(T) = R(T) minus the full matrix:

Partition-number IP (built by build_pn), over non-negative integers
x[R] (R in M(T)) and y[R|P] ((R, P) in Gamma(T)):

    minimize   sum x[R]
    cover[c]:  sum of x[R] over R in M(T) containing cell c  = 1
    balance[R] (R in R*(T)):
               sum of y[V|P] over pairs with R a part of P
             - sum of y[R|P] over splits P of R
             - x[R] (only when R in M(T))                     = 0

Its optimum equals the protocol partition number, and its LP relaxation
has the same optimum (no integrality gap).

Quasi-additive LP (built by build_qa), over free phi[c] (cells) and
free nu[R] (R in R*(T)); nu of the full matrix is fixed to 0 by simply
not existing:

    maximize   sum phi[c]
    mono[R] (R in M(T)):          sum of phi[c] over c in R + nu[R] <= 1
    split[R|P] (P = {V, W}):      nu[V] + nu[W] - nu[R]             >= 0

nu[R] stands for the aggregate of the per-cell weights psi[c, R] over
cells outside R; the aggregation is exact because any nu value is
realizable by some psi. The raw psi formulation (one free variable per
(cell, rectangle) pair) is available behind raw_psi=True for fidelity
testing; it has the same optimum but far more variables.

check_duality verifies, name by name and coefficient by coefficient,
that the dual of the relaxed IP is the quasi-additive LP under the
fixed correspondence phi[c] = dual(cover[c]), nu[R] = -dual(balance[R]),
with the split rows' direction flipped by that sign change.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from .lp import MilpModel, RelOp, Sense, dualize, relax
from .relation import (
    DEFAULT_RECT_LIMIT,
    Partition,
    Rectangle,
    Relation,
    enumerate_partitions,
    enumerate_rectangles,
    is_monochromatic,
)


def cell_rect(i: int, j: int) -> Rectangle:
    return Rectangle(1 << i, 1 << j)


def x_name(R: Rectangle) -> str:
    return f"x[{R.key()}]"


def y_name(R: Rectangle, P: Partition) -> str:
    return f"y[{R.key()}|{P.key()}]"


@dataclass(frozen=True)
class PnInstance:
    relation: Relation
    model: MilpModel
    mono_rects: tuple[Rectangle, ...]
    gamma: tuple[tuple[Rectangle, Partition], ...]
    star_rects: tuple[Rectangle, ...]


@dataclass(frozen=True)
class QaInstance:
    relation: Relation
    model: MilpModel
    mono_rects: tuple[Rectangle, ...]
    gamma: tuple[tuple[Rectangle, Partition], ...]
    star_rects: tuple[Rectangle, ...]
    raw_psi: bool = False


def _index_sets(T: Relation, limit: int):
    rects = enumerate_rectangles(T, limit)
    full = T.full_rectangle()
    mono = tuple(R for R in rects if is_monochromatic(T, R) is not None)
    star = tuple(R for R in rects if R != full)
    gamma = tuple((R, P) for R in rects for P in enumerate_partitions(R))
    return rects, full, mono, star, gamma


def build_pn(T: Relation, limit: int = DEFAULT_RECT_LIMIT) -> PnInstance:
    """The partition-number integer program for T."""
    rects, full, mono, star, gamma = _index_sets(T, limit)
    mono_set = set(mono)

    m = MilpModel("pn", Sense.MIN)
    for R in mono:
        m.add_variable(x_name(R), lower=0, is_integer=True)
    for R, P in gamma:
        m.add_variable(y_name(R, P), lower=0, is_integer=True)
    m.set_objective({x_name(R): 1 for R in mono})

    for i in range(T.row_count):
        for j in range(T.col_count):
            cover = {x_name(R): 1 for R in mono if R.contains_cell(i, j)}
            m.add_row(f"cover[{cell_rect(i, j).key()}]", cover, RelOp.EQ, 1)

    incoming: dict[Rectangle, list[str]] = {R: [] for R in star}
    outgoing: dict[Rectangle, list[str]] = {R: [] for R in star}
    for R, P in gamma:
        name = y_name(R, P)
        incoming[P.first].append(name)
        incoming[P.second].append(name)
        if R != full:
            outgoing[R].append(name)
    for R in star:
        coeffs: dict[str, Fraction] = {}
        for name in incoming[R]:
            coeffs[name] = Fraction(1)
        for name in outgoing[R]:
            coeffs[name] = Fraction(-1)
        if R in mono_set:
            coeffs[x_name(R)] = Fraction(-1)
        m.add_row(f"balance[{R.key()}]", coeffs, RelOp.EQ, 0)

    m.validate()
    return PnInstance(T, m, mono, gamma, star)


def build_qa(T: Relation, limit: int = DEFAULT_RECT_LIMIT, raw_psi: bool = False) -> QaInstance:
    """The quasi-additive LP for T (aggregated nu form by default)."""
    rects, full, mono, star, gamma = _index_sets(T, limit)
    cells = [(i, j) for i in range(T.row_count) for j in range(T.col_count)]

    m = MilpModel("qa_raw" if raw_psi else "qa", Sense.MAX)
    phi = {(i, j): f"phi[{cell_rect(i, j).key()}]" for i, j in cells}
    for c in cells:
        m.add_variable(phi[c], lower=None)

    if raw_psi:
        psi = {}
        for R in rects:
            for i, j in cells:
                name = f"psi[{cell_rect(i, j).key()}|{R.key()}]"
                psi[(i, j, R)] = name
                m.add_variable(name, lower=None)

        def nu_terms(R: Rectangle) -> dict[str, Fraction]:
            return {psi[(i, j, R)]: Fraction(1) for i, j in cells if not R.contains_cell(i, j)}
    else:
        nu = {R: f"nu[{R.key()}]" for R in star}
        for R in star:
            m.add_variable(nu[R], lower=None)

        def nu_terms(R: Rectangle) -> dict[str, Fraction]:
            return {} if R == full else {nu[R]: Fraction(1)}

    m.set_objective({name: 1 for name in phi.values()})

    for R in mono:
        coeffs = {phi[c]: Fraction(1) for c in R.cells()}
        for name, v in nu_terms(R).items():
            coeffs[name] = v
        m.add_row(f"mono[{R.key()}]", coeffs, RelOp.LE, 1)

    for R, P in gamma:
        coeffs: dict[str, Fraction] = {}
        for part in P.parts():
            for name, v in nu_terms(part).items():
                coeffs[name] = coeffs.get(name, Fraction(0)) + v
        for name, v in nu_terms(R).items():
            coeffs[name] = coeffs.get(name, Fraction(0)) - v
        m.add_row(f"split[{R.key()}|{P.key()}]", coeffs, RelOp.GE, 0)

    m.validate()
    return QaInstance(T, m, mono, gamma, star, raw_psi)


# ---------------------------------------------------------------------------
# Duality structure check
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MatchEntry:
    dual_name: str
    qa_name: str
    ok: bool
    detail: str = ""


@dataclass(frozen=True)
class DualityReport:
    ok: bool
    variable_matches: tuple[MatchEntry, ...]
    row_matches: tuple[MatchEntry, ...]
    objective_ok: bool
    detail: str = ""

    def to_text(self) -> str:
        lines = [f"duality structure: {'OK' if self.ok else 'MISMATCH'}"]
        if self.detail:
            lines.append(f"  {self.detail}")
        lines.append(f"  objective: {'OK' if self.objective_ok else 'MISMATCH'}")
        for e in self.variable_matches:
            mark = "OK" if e.ok else "MISMATCH"
            lines.append(f"  var {e.dual_name} <-> {e.qa_name}: {mark}{' ' + e.detail if e.detail else ''}")
        for e in self.row_matches:
            mark = "OK" if e.ok else "MISMATCH"
            lines.append(f"  row {e.dual_name} <-> {e.qa_name}: {mark}{' ' + e.detail if e.detail else ''}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        return json.dumps({
            "ok": self.ok,
            "objective_ok": self.objective_ok,
            "detail": self.detail,
            "variables": [{"dual": e.dual_name, "qa": e.qa_name, "ok": e.ok, "detail": e.detail}
                          for e in self.variable_matches],
            "rows": [{"dual": e.dual_name, "qa": e.qa_name, "ok": e.ok, "detail": e.detail}
                     for e in self.row_matches],
        }, indent=2)


def _map_var(dual_var: str) -> tuple[str, int]:
    """Dual variable name -> (qa variable name, sign)."""
    if dual_var.startswith("cover["):
        return "phi[" + dual_var[len("cover["):], 1
    if dual_var.startswith("balance["):
        return "nu[" + dual_var[len("balance["):], -1
    raise ValueError(f"unexpected dual variable {dual_var!r}")


def _map_row(dual_row: str) -> tuple[str, bool]:
    """Dual row name -> (qa row name, flip direction)."""
    if dual_row.startswith("x["):
        return "mono[" + dual_row[len("x["):], False
    if dual_row.startswith("y["):
        return "split[" + dual_row[len("y["):], True
    raise ValueError(f"unexpected dual row {dual_row!r}")


def compare_dual_to_qa(dual: MilpModel, qa: MilpModel) -> DualityReport:
    """Name-level bijection check between dualize(relax(pn)) and the qa model."""
    var_entries = []
    qa_vars = {v.name: v for v in qa.variables}
    sign: dict[str, int] = {}
    mapped_vars = set()
    for v in dual.variables:
        try:
            target, s = _map_var(v.name)
        except ValueError as e:
            var_entries.append(MatchEntry(v.name, "?", False, str(e)))
            continue
        sign[v.name] = s
        mapped_vars.add(target)
        if target not in qa_vars:
            var_entries.append(MatchEntry(v.name, target, False, "no such qa variable"))
        elif qa_vars[target].lower is not None or v.lower is not None:
            var_entries.append(MatchEntry(v.name, target, False, "both sides must be free"))
        else:
            var_entries.append(MatchEntry(v.name, target, True))
    missing_vars = sorted(set(qa_vars) - mapped_vars)

    row_entries = []
    qa_rows = {r.name: r for r in qa.rows}
    mapped_rows = set()
    for r in dual.rows:
        try:
            target, flipped = _map_row(r.name)
        except ValueError as e:
            row_entries.append(MatchEntry(r.name, "?", False, str(e)))
            continue
        mapped_rows.add(target)
        q = qa_rows.get(target)
        if q is None:
            row_entries.append(MatchEntry(r.name, target, False, "no such qa row"))
            continue
        mult = -1 if flipped else 1
        expected_rel = (RelOp.GE if flipped else RelOp.LE)
        expected = {}
        for var, c in r.coeffs.items():
            qvar, s = _map_var(var)
            val = mult * s * c
            if val:
                expected[qvar] = val
        problems = []
        if q.rel is not expected_rel:
            problems.append(f"relation {q.rel.value} != {expected_rel.value}")
        if q.rhs != mult * r.rhs:
            problems.append(f"rhs {q.rhs} != {mult * r.rhs}")
        if dict(q.coeffs) != expected:
            problems.append("coefficients differ")
        row_entries.append(MatchEntry(r.name, target, not problems, "; ".join(problems)))
    missing_rows = sorted(set(qa_rows) - mapped_rows)

    expected_obj = {}
    for var, c in dual.objective.items():
        qvar, s = _map_var(var)
        val = s * c
        if val:
            expected_obj[qvar] = val
    objective_ok = (dual.sense is qa.sense is Sense.MAX and expected_obj == dict(qa.objective))

    detail_bits = []
    if missing_vars:
        detail_bits.append(f"unmatched qa variables: {', '.join(missing_vars)}")
    if missing_rows:
        detail_bits.append(f"unmatched qa rows: {', '.join(missing_rows)}")
    ok = (objective_ok and not missing_vars and not missing_rows
          and all(e.ok for e in var_entries) and all(e.ok for e in row_entries))
    return DualityReport(ok, tuple(var_entries), tuple(row_entries), objective_ok,
                         "; ".join(detail_bits))


def check_duality(T: Relation, limit: int = DEFAULT_RECT_LIMIT) -> DualityReport:
    """Build both formulations for T and compare dualize(relax(pn)) to qa."""
    pn = build_pn(T, limit)
    qa = build_qa(T, limit)
    return compare_dual_to_qa(dualize(relax(pn.model)), qa.model)
