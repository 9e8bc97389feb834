"""A small exact-rational LP/IP model layer.

Coefficients, bounds and right-hand sides are `fractions.Fraction`, so
every comparison downstream is exact equality, never a tolerance check.
Variables carry a lower bound of 0 or None (free, i.e. -inf), an
implicit +inf upper bound, and an integrality flag; rows are named
sparse constraints.

`dualize` covers exactly the two shapes this package produces, which
are mutual duals:

    Min, all rows =,  all vars >= 0   <->   Max, all rows <=, all vars free

One free dual variable per primal row (named after the row), one <=
dual row per primal variable (named after the variable). Applying
`dualize` twice therefore returns the original model up to its name.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from math import lcm


class Sense(Enum):
    MIN = "min"
    MAX = "max"


class RelOp(Enum):
    LE = "<="
    GE = ">="
    EQ = "="


class ModelError(ValueError):
    """Malformed model: duplicate names, undeclared variables, bad shapes."""


def frac(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


@dataclass(frozen=True)
class Variable:
    name: str
    lower: Fraction | None = Fraction(0)  # None means free
    is_integer: bool = False


@dataclass(frozen=True)
class LinRow:
    name: str
    coeffs: dict[str, Fraction]
    rel: RelOp
    rhs: Fraction


@dataclass
class MilpModel:
    """Named variables, sparse rows, and a sparse objective.

    Treated as immutable once built; relax/dualize return new models.
    """

    name: str
    sense: Sense
    variables: list[Variable] = field(default_factory=list)
    rows: list[LinRow] = field(default_factory=list)
    objective: dict[str, Fraction] = field(default_factory=dict)

    def add_variable(self, name: str, lower=Fraction(0), is_integer: bool = False) -> None:
        if lower is not None:
            lower = frac(lower)
            if lower != 0:
                raise ModelError(f"variable {name}: only lower bounds 0 or None (free) are supported")
        self.variables.append(Variable(name, lower, is_integer))

    def add_row(self, name: str, coeffs: dict, rel: RelOp, rhs) -> None:
        self.rows.append(LinRow(name, {v: frac(c) for v, c in coeffs.items() if c != 0}, rel, frac(rhs)))

    def set_objective(self, coeffs: dict) -> None:
        self.objective = {v: frac(c) for v, c in coeffs.items() if c != 0}

    def variable_names(self) -> list[str]:
        return [v.name for v in self.variables]

    def variable(self, name: str) -> Variable:
        for v in self.variables:
            if v.name == name:
                return v
        raise KeyError(name)

    @property
    def has_integers(self) -> bool:
        return any(v.is_integer for v in self.variables)

    def validate(self) -> None:
        names = set()
        for v in self.variables:
            if v.name in names:
                raise ModelError(f"duplicate variable name {v.name!r}")
            names.add(v.name)
        row_names = set()
        for r in self.rows:
            if r.name in row_names:
                raise ModelError(f"duplicate row name {r.name!r}")
            row_names.add(r.name)
            for var in r.coeffs:
                if var not in names:
                    raise ModelError(f"row {r.name!r} references undeclared variable {var!r}")
        for var in self.objective:
            if var not in names:
                raise ModelError(f"objective references undeclared variable {var!r}")


def relax(m: MilpModel) -> MilpModel:
    """The same model with every integrality flag cleared."""
    return MilpModel(
        m.name,
        m.sense,
        [replace(v, is_integer=False) for v in m.variables],
        list(m.rows),
        dict(m.objective),
    )


def dualize(m: MilpModel) -> MilpModel:
    """Textbook dual of the two supported shapes (see module docstring)."""
    m.validate()
    if m.has_integers:
        raise ModelError("dualize requires a continuous model; relax it first")

    if m.sense is Sense.MIN:
        if any(r.rel is not RelOp.EQ for r in m.rows):
            raise ModelError("Min models must have only equality rows to be dualized")
        if any(v.lower != 0 for v in m.variables):
            raise ModelError("Min models must have all variables >= 0 to be dualized")
        dual_sense, dual_lower, dual_rel = Sense.MAX, None, RelOp.LE
    else:
        if any(r.rel is not RelOp.LE for r in m.rows):
            raise ModelError("Max models must have only <= rows to be dualized")
        if any(v.lower is not None for v in m.variables):
            raise ModelError("Max models must have all variables free to be dualized")
        dual_sense, dual_lower, dual_rel = Sense.MIN, Fraction(0), RelOp.EQ

    dual = MilpModel(m.name + "_dual", dual_sense)
    for r in m.rows:
        dual.add_variable(r.name, lower=dual_lower)
    # Dual row per primal variable: transposed column, rhs = objective coefficient.
    columns: dict[str, dict[str, Fraction]] = {v.name: {} for v in m.variables}
    for r in m.rows:
        for var, c in r.coeffs.items():
            columns[var][r.name] = c
    for v in m.variables:
        dual.add_row(v.name, columns[v.name], dual_rel, m.objective.get(v.name, Fraction(0)))
    dual.set_objective({r.name: r.rhs for r in m.rows})
    dual.validate()
    return dual


# ---------------------------------------------------------------------------
# LP file format writer
#
# Rationals are rendered without decimals: every row (and the objective)
# is scaled by the lcm of its denominators so all written coefficients
# are integers, and a comment records the scale factor and the original
# p/q values. Output is byte-stable for a given model.
# ---------------------------------------------------------------------------

def _fmt_frac(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _scale(coeffs: dict[str, Fraction], rhs: Fraction | None):
    denoms = [c.denominator for c in coeffs.values()]
    if rhs is not None:
        denoms.append(rhs.denominator)
    factor = lcm(*denoms) if denoms else 1
    scaled = {v: int(c * factor) for v, c in coeffs.items()}
    scaled_rhs = int(rhs * factor) if rhs is not None else None
    return scaled, scaled_rhs, factor


def _terms(coeffs: dict[str, int], order: list[str]) -> str:
    parts = []
    for v in order:
        if v not in coeffs:
            continue
        c = coeffs[v]
        if not parts:
            if c == 1:
                parts.append(v)
            elif c == -1:
                parts.append(f"- {v}")
            else:
                parts.append(f"{c} {v}")
        else:
            sign = "+" if c > 0 else "-"
            mag = abs(c)
            parts.append(f"{sign} {v}" if mag == 1 else f"{sign} {mag} {v}")
    return " ".join(parts) if parts else "0"


def write_lp(m: MilpModel) -> str:
    """Render the model in the textual LP file format."""
    m.validate()
    order = m.variable_names()
    out = [f"\\ LP export: {m.name}", "\\ exact rational model; scaled rows noted in comments"]

    obj_scaled, _, obj_factor = _scale(m.objective, None)
    if obj_factor != 1:
        original = " ".join(f"{_fmt_frac(c)} {v}" for v, c in m.objective.items())
        out.append(f"\\ objective scaled by {obj_factor}; original: {original}")
    out.append("Minimize" if m.sense is Sense.MIN else "Maximize")
    out.append(f" obj: {_terms(obj_scaled, order)}")

    out.append("Subject To")
    for r in m.rows:
        if not r.coeffs:
            raise ModelError(f"row {r.name!r} has no coefficients")
        scaled, srhs, factor = _scale(r.coeffs, r.rhs)
        if factor != 1:
            original = " ".join(f"{_fmt_frac(c)} {v}" for v, c in r.coeffs.items())
            out.append(f"\\ {r.name} scaled by {factor}; original: {original} {r.rel.value} {_fmt_frac(r.rhs)}")
        out.append(f" {r.name}: {_terms(scaled, order)} {r.rel.value} {srhs}")

    free = [v.name for v in m.variables if v.lower is None]
    if free:
        out.append("Bounds")
        out.extend(f" {name} free" for name in free)

    integers = [v.name for v in m.variables if v.is_integer]
    if integers:
        out.append("General")
        out.extend(f" {name}" for name in integers)

    out.append("End")
    return "\n".join(out) + "\n"


def evaluate_objective(m: MilpModel, assignment: dict[str, Fraction]) -> Fraction:
    return sum((c * assignment.get(v, Fraction(0)) for v, c in m.objective.items()), Fraction(0))
