"""Protocol partition numbers and witness trees.

C^P(T) is the least number of leaves of a rooted binary tree whose root
is the full matrix, whose internal nodes split into a row or column
partition, and whose leaves are monochromatic. The computation is an
exact dynamic program over rectangles:

    value(R) = 1                                  if R is monochromatic
             = min over splits {V, W} of R of
               value(V) + value(W)                otherwise

Every rectangle is visited once (memoized on its canonical encoding),
and ties between equally good splits go to the first one in canonical
partition order, so the witness tree is reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

from .relation import (
    DEFAULT_RECT_LIMIT,
    Axis,
    Partition,
    Rectangle,
    Relation,
    check_rectangle_limit,
    enumerate_partitions,
    is_monochromatic,
)


@dataclass(frozen=True)
class PartitionTree:
    """A recursive partition witness: a rectangle plus zero or two subtrees."""

    node: Rectangle
    children: tuple = ()

    def __post_init__(self):
        if len(self.children) not in (0, 2):
            raise ValueError("a partition tree node has exactly zero or two children")

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def leaves(self):
        if self.is_leaf:
            yield self
        else:
            for child in self.children:
                yield from child.leaves()

    def leaf_rectangles(self) -> list[Rectangle]:
        return [leaf.node for leaf in self.leaves()]

    def leaf_count(self) -> int:
        return sum(1 for _ in self.leaves())

    def internal_nodes(self):
        """(node, partition formed by its children), preorder."""
        if self.is_leaf:
            return
        a, b = self.children
        axis = Axis.ROW if a.node.col_mask == b.node.col_mask else Axis.COL
        yield self.node, Partition.make(a.node, b.node, axis)
        yield from a.internal_nodes()
        yield from b.internal_nodes()


@dataclass(frozen=True)
class PartitionNumberResult:
    value: int
    witness: PartitionTree


def protocol_partition_number(T: Relation, limit: int = DEFAULT_RECT_LIMIT) -> PartitionNumberResult:
    """Exact C^P(T) with one optimal witness tree."""
    check_rectangle_limit(T, limit)
    memo: dict[Rectangle, tuple[int, Partition | None]] = {}

    def solve(R: Rectangle) -> int:
        hit = memo.get(R)
        if hit is not None:
            return hit[0]
        if is_monochromatic(T, R) is not None:
            # 1 is a lower bound for any rectangle; no need to try splits.
            memo[R] = (1, None)
            return 1
        best = None
        best_part = None
        for P in enumerate_partitions(R):
            cost = solve(P.first) + solve(P.second)
            if best is None or cost < best:
                best, best_part = cost, P
        memo[R] = (best, best_part)
        return best

    def build(R: Rectangle) -> PartitionTree:
        _, part = memo[R]
        if part is None:
            return PartitionTree(R)
        return PartitionTree(R, (build(part.first), build(part.second)))

    root = T.full_rectangle()
    value = solve(root)
    return PartitionNumberResult(value, build(root))


@dataclass(frozen=True)
class TreeValidation:
    ok: bool
    leaf_count: int | None = None
    error: str | None = None


def validate_tree(T: Relation, tree: PartitionTree) -> TreeValidation:
    """Check a tree is a recursive partition of T's matrix into monochromatic leaves.

    Reports the first violation: wrong root, children that do not
    partition their parent, a non-monochromatic leaf, or (structurally
    impossible, asserted anyway) leaves that overlap or miss cells.
    """
    root = T.full_rectangle()
    if tree.node != root:
        return TreeValidation(False, error=f"root is {tree.node}, expected the full matrix {root.key()}")

    stack = [tree]
    leaves = []
    while stack:
        t = stack.pop()
        if t.is_leaf:
            leaves.append(t.node)
            continue
        a, b = t.children
        err = _split_error(t.node, a.node, b.node)
        if err:
            return TreeValidation(False, error=f"children of {t.node} {err}")
        stack.extend(t.children)

    for leaf in leaves:
        if is_monochromatic(T, leaf) is None:
            return TreeValidation(False, error=f"leaf {leaf} is not monochromatic")

    covered = 0
    ncols = T.col_count
    for leaf in leaves:
        board = 0
        for i, j in leaf.cells():
            board |= 1 << (i * ncols + j)
        if covered & board:
            return TreeValidation(False, error=f"leaf {leaf} overlaps another leaf")
        covered |= board
    if covered != (1 << (T.row_count * ncols)) - 1:
        return TreeValidation(False, error="leaves do not cover the full matrix")

    return TreeValidation(True, leaf_count=len(leaves))


def _split_error(parent: Rectangle, a: Rectangle, b: Rectangle) -> str | None:
    if a.col_mask == b.col_mask == parent.col_mask:
        if a.row_mask & b.row_mask:
            return "overlap on rows"
        if (a.row_mask | b.row_mask) != parent.row_mask:
            return "do not cover its rows"
        return None
    if a.row_mask == b.row_mask == parent.row_mask:
        if a.col_mask & b.col_mask:
            return "overlap on columns"
        if (a.col_mask | b.col_mask) != parent.col_mask:
            return "do not cover its columns"
        return None
    return "do not form a row or column partition of it"


# ---------------------------------------------------------------------------
# Witness exports
# ---------------------------------------------------------------------------

def _node_label(T: Relation, R: Rectangle, label_fmt=str) -> str:
    rows = ",".join(label_fmt(T.rows[i]) for i in R.row_indices())
    cols = ",".join(label_fmt(T.cols[j]) for j in R.col_indices())
    return "{%s}x{%s}" % (rows, cols)


def tree_to_text(T: Relation, tree: PartitionTree, label_fmt=str) -> str:
    """Indented rendering; leaves show their lowest common color, 1-indexed."""
    lines = []

    def walk(t: PartitionTree, depth: int):
        label = _node_label(T, t.node, label_fmt)
        if t.is_leaf:
            color = is_monochromatic(T, t.node)
            suffix = f"  <- color {color + 1}" if color is not None else "  <- NOT MONOCHROMATIC"
            lines.append("  " * depth + label + suffix)
        else:
            lines.append("  " * depth + label)
            for child in t.children:
                walk(child, depth + 1)

    walk(tree, 0)
    return "\n".join(lines) + "\n"


def tree_to_dot(T: Relation, tree: PartitionTree, label_fmt=str) -> str:
    lines = ["digraph partition_tree {", "  node [shape=box];"]
    counter = [0]

    def walk(t: PartitionTree) -> int:
        my_id = counter[0]
        counter[0] += 1
        label = _node_label(T, t.node, label_fmt)
        if t.is_leaf:
            color = is_monochromatic(T, t.node)
            if color is not None:
                label += f"\\ncolor {color + 1}"
            lines.append(f'  n{my_id} [label="{label}", style=filled, fillcolor=lightgrey];')
        else:
            lines.append(f'  n{my_id} [label="{label}"];')
            for child in t.children:
                lines.append(f"  n{my_id} -> n{walk(child)};")
        return my_id

    walk(tree)
    lines.append("}")
    return "\n".join(lines) + "\n"
