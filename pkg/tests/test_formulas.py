"""Formula-size DP against an independent syntactic enumerator."""

import itertools

import pytest

from kwbench.formulas import (
    FunctionClass,
    Gate,
    Literal,
    evaluate,
    formula_size,
    formula_to_dot,
    leaf_count,
    literal_table,
    witness_formula,
)
from kwbench.relation import TruthTable


def syntactic_min_sizes(n, max_size):
    """Oracle: enumerate formula syntax trees by leaf count.

    Builds every table reachable at each exact size by combining all
    smaller sizes, without the minimal-frontier shortcut, and records
    first appearances.
    """
    exact = {1: {literal_table(n, i, neg) for i in range(n) for neg in (False, True)}}
    first = {t: 1 for t in exact[1]}
    for s in range(2, max_size + 1):
        level = set()
        for a in range(1, s):
            for g, h in itertools.product(exact[a], exact[s - a]):
                level.add(g & h)
                level.add(g | h)
        exact[s] = level
        for t in level:
            first.setdefault(t, s)
    return first


def tt(bits):
    return TruthTable.from_string(bits)


def test_literal_sizes():
    assert formula_size(tt("01")) == 1  # x1
    assert formula_size(tt("10")) == 1  # ~x1
    assert formula_size(tt("0011")) == 1  # x1 on two variables
    assert formula_size(tt("0101")) == 1  # x2


def test_and2_xor2_sizes():
    assert formula_size(tt("0001")) == 2
    assert formula_size(tt("0110")) == 4
    assert formula_size(tt("1001")) == 4  # xnor


def test_matches_syntactic_oracle_n2():
    oracle = syntactic_min_sizes(2, 6)
    for bits in range(1, 15):
        f = TruthTable(2, tuple(bits >> j & 1 for j in range(4)))
        assert formula_size(f, max_size=6) == oracle[f.table_int()], str(f)


def test_matches_exact_size_recurrence_n2():
    fc = FunctionClass(2)
    for bits in range(16):
        f = TruthTable(2, tuple(bits >> j & 1 for j in range(4)))
        assert fc.min_size(f, max_size=6) == formula_size(f, max_size=6)


def test_matches_exact_size_recurrence_n3_sample():
    fc = FunctionClass(3)
    for bits in ("00010111", "01101001", "00000001", "01111111", "00000111"):
        f = tt(bits)
        assert fc.min_size(f, max_size=6) == formula_size(f, max_size=6)


def test_max_size_cutoff():
    assert formula_size(tt("0110"), max_size=3) is None


def test_rejects_large_n():
    f = TruthTable(5, tuple([0] * 31 + [1]))
    with pytest.raises(ValueError):
        formula_size(f)


def test_witnesses_evaluate_correctly_n2():
    for bits in range(1, 15):
        f = TruthTable(2, tuple(bits >> j & 1 for j in range(4)))
        w = witness_formula(f)
        assert evaluate(w, 2) == f.table_int()
        assert leaf_count(w) == formula_size(f)


def test_witness_examples():
    w = witness_formula(tt("0001"))
    assert isinstance(w, Gate) and w.op == "and"
    assert {str(w.left), str(w.right)} == {"x1", "x2"}
    assert str(witness_formula(tt("01"))) == "x1"
    w = witness_formula(tt("0110"))
    assert leaf_count(w) == 4 and evaluate(w, 2) == tt("0110").table_int()


def test_witness_deterministic():
    assert str(witness_formula(tt("0110"))) == str(witness_formula(tt("0110")))


def test_witness_unreachable_raises():
    with pytest.raises(ValueError):
        witness_formula(tt("0110"), max_size=3)


def test_de_morgan_dual_symmetry():
    # negating the function table preserves formula size
    for bits in range(1, 15):
        f = TruthTable(2, tuple(bits >> j & 1 for j in range(4)))
        g = TruthTable(2, tuple(1 - b for b in f.bits))
        assert formula_size(f) == formula_size(g)
    for bits in ("00010111", "01101001", "00000111"):
        f = tt(bits)
        g = TruthTable(3, tuple(1 - b for b in f.bits))
        assert formula_size(f) == formula_size(g)


def test_n3_values_cross_checked():
    # frozen from two independent computations (frontier DP and the
    # exact-size recurrence); parity_3 needs ten leaves, majority_3 five
    assert formula_size(tt("01101001")) == 10
    assert formula_size(tt("00010111")) == 5
    assert formula_size(tt("00000001")) == 3  # and_3
    assert formula_size(tt("01111111")) == 3  # or_3
    assert formula_size(tt("00000111")) == 3  # x1 & (x2 | x3)


def test_formula_dot_export():
    dot = formula_to_dot(witness_formula(tt("0001")))
    assert dot.startswith("digraph") and "x1" in dot and "&" in dot


def test_gate_validation():
    with pytest.raises(ValueError):
        Gate("xor", Literal(0), Literal(1))
