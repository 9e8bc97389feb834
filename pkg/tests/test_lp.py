"""Model layer: validation, relax, dualize, LP-format writer."""

from fractions import Fraction

import pytest

from kwbench.lp import (
    MilpModel,
    ModelError,
    RelOp,
    Sense,
    dualize,
    relax,
    write_lp,
)


def tiny_min_model():
    m = MilpModel("tiny", Sense.MIN)
    m.add_variable("x", lower=0, is_integer=True)
    m.add_variable("y", lower=0)
    m.add_row("fix", {"x": 1, "y": 1}, RelOp.EQ, 1)
    m.set_objective({"x": 1, "y": 2})
    m.validate()
    return m


def test_validate_duplicate_variable():
    m = MilpModel("bad", Sense.MIN)
    m.add_variable("x")
    m.add_variable("x")
    with pytest.raises(ModelError):
        m.validate()


def test_validate_undeclared_reference():
    m = MilpModel("bad", Sense.MIN)
    m.add_variable("x")
    m.add_row("r", {"z": 1}, RelOp.LE, 1)
    with pytest.raises(ModelError):
        m.validate()


def test_only_zero_or_free_lower_bounds():
    m = MilpModel("bad", Sense.MIN)
    with pytest.raises(ModelError):
        m.add_variable("x", lower=3)


def test_relax_clears_flags_and_nothing_else():
    m = tiny_min_model()
    r = relax(m)
    assert not r.has_integers
    assert r.rows == m.rows and r.objective == m.objective
    assert [v.lower for v in r.variables] == [v.lower for v in m.variables]
    assert relax(r) == r  # idempotent
    m2 = MilpModel("c", Sense.MAX)
    m2.add_variable("u", lower=None)
    assert relax(m2) == m2  # nothing to clear


def test_dualize_one_dimensional():
    m = MilpModel("unit", Sense.MIN)
    m.add_variable("x", lower=0)
    m.add_row("fix", {"x": 1}, RelOp.EQ, 1)
    m.set_objective({"x": 1})
    d = dualize(m)
    assert d.sense is Sense.MAX
    assert [v.name for v in d.variables] == ["fix"]
    assert d.variables[0].lower is None
    assert len(d.rows) == 1 and d.rows[0].name == "x"
    assert d.rows[0].rel is RelOp.LE and d.rows[0].rhs == 1
    assert d.rows[0].coeffs == {"fix": Fraction(1)}
    assert d.objective == {"fix": Fraction(1)}


def test_dualize_two_variables_shared_row():
    m = MilpModel("pair", Sense.MIN)
    m.add_variable("x1", lower=0)
    m.add_variable("x2", lower=0)
    m.add_row("sum", {"x1": 1, "x2": 1}, RelOp.EQ, 1)
    m.set_objective({"x1": 1, "x2": 1})
    d = dualize(m)
    assert len(d.rows) == 2
    assert all(r.rel is RelOp.LE and r.rhs == 1 and r.coeffs == {"sum": Fraction(1)}
               for r in d.rows)


def test_double_dual_is_identity_up_to_name():
    m = tiny_min_model()
    dd = dualize(dualize(relax(m)))
    r = relax(m)
    assert dd.sense is r.sense
    assert dd.variables == r.variables
    assert dd.rows == r.rows
    assert dd.objective == r.objective
    assert dd.name == "tiny_dual_dual"


def test_dualize_rejects_wrong_shapes():
    m = tiny_min_model()
    with pytest.raises(ModelError):
        dualize(m)  # integer flags present
    r = relax(m)
    r.rows[0] = type(r.rows[0])("fix", r.rows[0].coeffs, RelOp.LE, r.rows[0].rhs)
    with pytest.raises(ModelError):
        dualize(r)  # Min model with a <= row
    m2 = MilpModel("m2", Sense.MAX)
    m2.add_variable("u", lower=0)
    m2.add_row("r", {"u": 1}, RelOp.LE, 1)
    with pytest.raises(ModelError):
        dualize(m2)  # Max model with a bounded variable


# ---------------------------------------------------------------------------
# writer
# ---------------------------------------------------------------------------

def test_write_lp_golden():
    m = tiny_min_model()
    assert write_lp(m) == (
        "\\ LP export: tiny\n"
        "\\ exact rational model; scaled rows noted in comments\n"
        "Minimize\n"
        " obj: x + 2 y\n"
        "Subject To\n"
        " fix: x + y = 1\n"
        "General\n"
        " x\n"
        "End\n"
    )


def test_write_lp_scales_fractions_exactly():
    m = MilpModel("fracs", Sense.MAX)
    m.add_variable("a", lower=None)
    m.add_variable("b", lower=0)
    m.add_row("r", {"a": Fraction(1, 2), "b": Fraction(-1, 3)}, RelOp.LE, Fraction(5, 6))
    m.set_objective({"a": Fraction(2, 3)})
    text = write_lp(m)
    assert "\\ r scaled by 6; original: 1/2 a -1/3 b <= 5/6" in text
    assert " r: 3 a - 2 b <= 5" in text
    assert "\\ objective scaled by 3; original: 2/3 a" in text
    assert " obj: 2 a" in text
    assert " a free" in text


def test_write_lp_byte_stable():
    m = tiny_min_model()
    assert write_lp(m) == write_lp(m)


def test_write_lp_rejects_empty_row():
    m = MilpModel("bad", Sense.MIN)
    m.add_variable("x")
    m.rows.append(type(tiny_min_model().rows[0])("empty", {}, RelOp.LE, Fraction(1)))
    with pytest.raises(ModelError):
        write_lp(m)
