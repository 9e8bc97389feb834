"""Brute-force minimum formula size over the {AND, OR} basis with negated leaves.

A formula is a binary tree whose leaves are literals (a variable or its
negation) and whose internal nodes are AND or OR; its size is the number
of leaves. L(f) is the least size of a formula computing f.

The search is a dynamic program over the space of truth tables, not over
formula syntax: tables are packed into ints (bit j = f(j)), the level-1
frontier holds the 2n literal tables, and level s combines the minimal
frontiers of levels a and s-a with bitwise AND/OR. A table is recorded
the first time it appears, together with one back-pointer, so a single
optimal witness can be rebuilt deterministically. Combining minimal
frontiers is enough: an optimal formula's two root subformulas are
themselves optimal for their tables.

Feasible for n <= 4 (at most 2^16 tables); n = 5 would need 2^32.
"""

from __future__ import annotations

from dataclasses import dataclass

from .relation import TruthTable

DEFAULT_MAX_SIZE = 16


@dataclass(frozen=True)
class Literal:
    index: int  # 0-based variable index
    negated: bool = False

    def __str__(self):
        return ("~" if self.negated else "") + f"x{self.index + 1}"


@dataclass(frozen=True)
class Gate:
    op: str  # "and" | "or"
    left: "Formula"
    right: "Formula"

    def __post_init__(self):
        if self.op not in ("and", "or"):
            raise ValueError(f"bad gate op {self.op!r}")

    def __str__(self):
        sym = " & " if self.op == "and" else " | "
        return f"({self.left}{sym}{self.right})"


Formula = Literal | Gate


def leaf_count(expr: Formula) -> int:
    if isinstance(expr, Literal):
        return 1
    return leaf_count(expr.left) + leaf_count(expr.right)


def literal_table(n: int, index: int, negated: bool) -> int:
    """Truth table int of the literal x_{index+1} (or its negation)."""
    t = 0
    for j in range(1 << n):
        bit = j >> (n - 1 - index) & 1
        t |= (bit ^ negated) << j
    return t


def evaluate(expr: Formula, n: int) -> int:
    """Truth table int computed by the formula."""
    if isinstance(expr, Literal):
        return literal_table(n, expr.index, expr.negated)
    left = evaluate(expr.left, n)
    right = evaluate(expr.right, n)
    return left & right if expr.op == "and" else left | right


def _check_n(n: int) -> None:
    if n > 4:
        raise ValueError(f"formula search supports n <= 4, got n = {n}")


def _search(n: int, target: int, max_size: int):
    """Frontier DP up to the first level containing `target`.

    Returns (size or None, frontiers, back) where frontiers[s] is the
    sorted list of tables first reached at size s and back maps each
    reached table to its back-pointer (None for literals, else
    (op, left_table, right_table)).
    """
    literals = sorted({literal_table(n, i, neg) for i in range(n) for neg in (False, True)})
    back: dict[int, tuple | None] = {t: None for t in literals}
    frontiers: dict[int, list[int]] = {1: literals}
    if target in back:
        return 1, frontiers, back

    for s in range(2, max_size + 1):
        new: dict[int, tuple] = {}
        for a in range(1, s // 2 + 1):
            b = s - a
            if b not in frontiers:
                continue
            for g in frontiers[a]:
                for h in frontiers[b]:
                    both = g & h
                    if both not in back and both not in new:
                        new[both] = ("and", g, h)
                    either = g | h
                    if either not in back and either not in new:
                        new[either] = ("or", g, h)
        frontiers[s] = sorted(new)
        back.update(new)
        if target in new:
            return s, frontiers, back
    return None, frontiers, back


def formula_size(f: TruthTable, max_size: int = DEFAULT_MAX_SIZE) -> int | None:
    """L(f) if it is at most max_size, else None."""
    _check_n(f.n)
    if max_size < 1:
        raise ValueError("max_size must be at least 1")
    size, _, _ = _search(f.n, f.table_int(), max_size)
    return size


def witness_formula(f: TruthTable, max_size: int = DEFAULT_MAX_SIZE) -> Formula:
    """One optimal formula for f, rebuilt from the DP back-pointers.

    The result is re-verified by evaluation and has exactly L(f) leaves.
    """
    _check_n(f.n)
    target = f.table_int()
    size, _, back = _search(f.n, target, max_size)
    if size is None:
        raise ValueError(f"no formula of size <= {max_size} computes {f}")

    literal_of = {literal_table(f.n, i, neg): Literal(i, neg)
                  for i in range(f.n) for neg in (False, True)}

    def rebuild(table: int) -> Formula:
        ptr = back[table]
        if ptr is None:
            return literal_of[table]
        op, g, h = ptr
        return Gate(op, rebuild(g), rebuild(h))

    expr = rebuild(target)
    assert evaluate(expr, f.n) == target
    assert leaf_count(expr) == size
    return expr


class FunctionClass:
    """Per-exact-size reachable table sets for n-variable formulas.

    reachable(s) is the set of tables computable by some formula with
    exactly s leaves (no monotone closure; a table can be present at
    several sizes). This is the direct recurrence and grows quickly, so
    it is meant for small n; formula_size uses the minimal-size frontier
    instead, and the two agree on min-s membership.
    """

    def __init__(self, n: int):
        _check_n(n)
        self.n = n
        self._levels: list[set[int]] = [set(),
                                        {literal_table(n, i, neg) for i in range(n) for neg in (False, True)}]

    def reachable(self, s: int) -> set[int]:
        if s < 1:
            raise ValueError("size must be at least 1")
        while len(self._levels) <= s:
            k = len(self._levels)
            level: set[int] = set()
            for a in range(1, k // 2 + 1):
                b = k - a
                for g in self._levels[a]:
                    for h in self._levels[b]:
                        level.add(g & h)
                        level.add(g | h)
            self._levels.append(level)
        return set(self._levels[s])

    def min_size(self, f: TruthTable, max_size: int = DEFAULT_MAX_SIZE) -> int | None:
        target = f.table_int()
        for s in range(1, max_size + 1):
            if target in self.reachable(s):
                return s
        return None


def formula_to_dot(expr: Formula) -> str:
    lines = ["digraph formula {", "  node [shape=circle];"]
    counter = [0]

    def walk(e: Formula) -> int:
        my_id = counter[0]
        counter[0] += 1
        if isinstance(e, Literal):
            lines.append(f'  n{my_id} [label="{e}", shape=box];')
        else:
            sym = "&" if e.op == "and" else "|"
            lines.append(f'  n{my_id} [label="{sym}"];')
            lines.append(f"  n{my_id} -> n{walk(e.left)};")
            lines.append(f"  n{my_id} -> n{walk(e.right)};")
        return my_id

    walk(expr)
    lines.append("}")
    return "\n".join(lines) + "\n"
