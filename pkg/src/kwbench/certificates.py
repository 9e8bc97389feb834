"""Conversions between partition trees and feasible (x, y) vectors.

A certificate is a sparse integral pair: x over the monochromatic
rectangles and y over (rectangle, split) pairs, feasible when it
satisfies every cover row (each cell covered exactly once) and every
balance row (flow in = flow out + x) of the partition-number program.

tree_to_certificate reads a witness tree directly: x marks its leaves,
y marks each internal node's split. certificate_to_tree inverts this by
induction on |x| = sum of x:

  * |x| = 1 forces x = {full matrix: 1}; the tree is a single leaf.
  * otherwise some positive-y pair (R', P') with a smallest R' has both
    parts monochromatic and marked in x (anything else would push a
    positive y onto a smaller rectangle). Merge: recolor the second
    part with a color common to the first so R' becomes monochromatic,
    move the two x marks onto R', decrement y[R'|P'], recurse, and
    graft the two parts back under the leaf R' of the returned tree.

Each merge lowers |x| by one, so exactly |x| - 1 merges happen; with
debug=True the intermediate (x, y) is re-checked for feasibility after
every merge.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .formulations import PnInstance, x_name, y_name
from .partition import PartitionTree, validate_tree
from .relation import (
    DEFAULT_RECT_LIMIT,
    Partition,
    Rectangle,
    Relation,
    check_rectangle_limit,
    enumerate_partitions,
    enumerate_rectangles,
    is_monochromatic,
    recolor,
)


class InvalidTreeError(ValueError):
    """The given tree is not a valid recursive partition of the relation."""


class InfeasibleCertificateError(ValueError):
    """The given certificate violates a cover or balance row."""


class MergeSearchError(RuntimeError):
    """No mergeable split exists in a certificate claimed feasible.

    This cannot happen for a genuinely feasible certificate; the full
    certificate is attached for diagnosis.
    """

    def __init__(self, message: str, certificate: "Certificate"):
        super().__init__(f"{message}\n{certificate_to_text(certificate)}")
        self.certificate = certificate


@dataclass
class Certificate:
    """Sparse x over M(T) and y over Gamma(T); absent keys mean 0."""

    x: dict[Rectangle, int] = field(default_factory=dict)
    y: dict[tuple[Rectangle, Partition], int] = field(default_factory=dict)

    def x_total(self) -> int:
        return sum(self.x.values())

    def y_total(self) -> int:
        return sum(self.y.values())


@dataclass(frozen=True)
class FeasibilityReport:
    ok: bool
    violations: tuple[str, ...] = ()


def tree_to_certificate(T: Relation, tree: PartitionTree) -> Certificate:
    """x = leaf indicators, y = one unit per internal split."""
    check = validate_tree(T, tree)
    if not check.ok:
        raise InvalidTreeError(check.error)
    cert = Certificate()
    for leaf in tree.leaf_rectangles():
        cert.x[leaf] = 1
    for node, part in tree.internal_nodes():
        cert.y[(node, part)] = cert.y.get((node, part), 0) + 1
    return cert


def check_feasible(T: Relation, cert: Certificate,
                   limit: int = DEFAULT_RECT_LIMIT) -> FeasibilityReport:
    """Exact evaluation of every cover and balance row against the certificate."""
    check_rectangle_limit(T, limit)
    full = T.full_rectangle()
    violations: list[str] = []

    x_items = []
    for R, v in sorted(cert.x.items()):
        if not full.contains(R):
            violations.append(f"x[{R.key()}] lies outside the matrix")
            continue
        if v < 0:
            violations.append(f"x[{R.key()}] is negative ({v})")
        if v and is_monochromatic(T, R) is None:
            violations.append(f"x[{R.key()}] marks a non-monochromatic rectangle")
        x_items.append((R, v))
    y_items = []
    for (R, P), v in cert.y.items():
        if not full.contains(R):
            violations.append(f"y[{R.key()}|{P.key()}] lies outside the matrix")
            continue
        if v < 0:
            violations.append(f"y[{R.key()}|{P.key()}] is negative ({v})")
        if P.parent() != R:
            violations.append(f"y[{R.key()}|{P.key()}] pairs a split with the wrong rectangle")
            continue
        y_items.append(((R, P), v))

    for i in range(T.row_count):
        for j in range(T.col_count):
            total = sum(v for R, v in x_items if v and R.contains_cell(i, j))
            if total != 1:
                violations.append(f"cover[r{1 << i}c{1 << j}]: covered {total} times, expected 1")

    incoming: dict[Rectangle, int] = {}
    outgoing: dict[Rectangle, int] = {}
    for (R, P), v in y_items:
        if not v:
            continue
        incoming[P.first] = incoming.get(P.first, 0) + v
        incoming[P.second] = incoming.get(P.second, 0) + v
        outgoing[R] = outgoing.get(R, 0) + v
    for R in enumerate_rectangles(T, limit):
        if R == full:
            continue
        lhs = incoming.get(R, 0)
        rhs = outgoing.get(R, 0)
        if is_monochromatic(T, R) is not None:
            rhs += cert.x.get(R, 0)
        if lhs != rhs:
            violations.append(f"balance[{R.key()}]: in {lhs} != out {rhs}")

    return FeasibilityReport(not violations, tuple(violations))


def find_merge_pair(T: Relation, cert: Certificate) -> tuple[Rectangle, Partition]:
    """The positive-y pair with the smallest rectangle whose parts are marked leaves.

    Scans pairs with y > 0 by ascending cell count, ties in canonical
    order, and returns the first whose parts are both monochromatic
    with x = 1; for a feasible certificate with at least two leaves the
    smallest pair always qualifies.
    """
    if cert.x_total() < 2:
        raise ValueError("merge search needs a certificate with at least two marked leaves")
    candidates = sorted(
        ((R, P) for (R, P), v in cert.y.items() if v > 0),
        key=lambda rp: (rp[0].cell_count, rp[0], rp[1].sort_key()),
    )
    for R, P in candidates:
        if all(cert.x.get(part, 0) == 1 and is_monochromatic(T, part) is not None
               for part in P.parts()):
            return R, P
    raise MergeSearchError("no mergeable split with positive y; certificate is inconsistent", cert)


def certificate_to_tree(T: Relation, cert: Certificate, debug: bool = False,
                        limit: int = DEFAULT_RECT_LIMIT) -> PartitionTree:
    """Rebuild a witness tree whose leaf set is exactly {R : x[R] = 1}."""
    report = check_feasible(T, cert, limit)
    if not report.ok:
        raise InfeasibleCertificateError("; ".join(report.violations))
    x = {R: v for R, v in cert.x.items() if v}
    y = {k: v for k, v in cert.y.items() if v}
    return _rebuild(T, x, y, debug, limit)


def _rebuild(T: Relation, x: dict, y: dict, debug: bool, limit: int) -> PartitionTree:
    if sum(x.values()) == 1:
        (R,) = x
        return PartitionTree(R)

    Rp, P = find_merge_pair(T, Certificate(x, y))
    V, W = P.parts()
    color = is_monochromatic(T, V)
    T2 = recolor(T, W, color)

    x2 = dict(x)
    del x2[V], x2[W]
    x2[Rp] = 1
    y2 = dict(y)
    if y2[(Rp, P)] == 1:
        del y2[(Rp, P)]
    else:
        y2[(Rp, P)] -= 1
    if debug:
        inner = check_feasible(T2, Certificate(x2, y2), limit)
        assert inner.ok, f"merge broke feasibility: {'; '.join(inner.violations)}"

    subtree = _rebuild(T2, x2, y2, debug, limit)
    grafted, done = _graft(subtree, Rp, PartitionTree(Rp, (PartitionTree(V), PartitionTree(W))))
    assert done, f"leaf {Rp} missing from the recursive witness"
    return grafted


def _graft(tree: PartitionTree, target: Rectangle, replacement: PartitionTree):
    if tree.is_leaf:
        if tree.node == target:
            return replacement, True
        return tree, False
    a, b = tree.children
    a2, done = _graft(a, target, replacement)
    if done:
        return PartitionTree(tree.node, (a2, b)), True
    b2, done = _graft(b, target, replacement)
    return PartitionTree(tree.node, (a, b2)), done


# ---------------------------------------------------------------------------
# Interop with solved models and text serialization
# ---------------------------------------------------------------------------

def certificate_from_assignment(pn: PnInstance, assignment: dict) -> Certificate:
    """Read an integral (x, y) out of a solved partition-number program."""
    cert = Certificate()
    for R in pn.mono_rects:
        v = assignment.get(x_name(R), 0)
        if v:
            if v.denominator != 1:
                raise ValueError(f"{x_name(R)} = {v} is not integral")
            cert.x[R] = int(v)
    for R, P in pn.gamma:
        v = assignment.get(y_name(R, P), 0)
        if v:
            if v.denominator != 1:
                raise ValueError(f"{y_name(R, P)} = {v} is not integral")
            cert.y[(R, P)] = int(v)
    return cert


def certificate_to_text(cert: Certificate) -> str:
    lines = []
    for R, v in sorted(cert.x.items()):
        lines.append(f"x {R.key()} {v}")
    for (R, P), v in sorted(cert.y.items(), key=lambda kv: (kv[0][0], kv[0][1].sort_key())):
        lines.append(f"y {R.key()} {P.key()} {v}")
    return "\n".join(lines) + "\n"


def parse_certificate(text: str) -> Certificate:
    cert = Certificate()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        try:
            if parts[0] == "x" and len(parts) == 3:
                cert.x[Rectangle.from_key(parts[1])] = int(parts[2])
            elif parts[0] == "y" and len(parts) == 4:
                cert.y[(Rectangle.from_key(parts[1]), Partition.from_key(parts[2]))] = int(parts[3])
            else:
                raise ValueError("expected 'x <rect> <value>' or 'y <rect> <partition> <value>'")
        except ValueError as e:
            raise ValueError(f"line {lineno}: {e}") from None
    return cert
