"""Colored communication matrices: relations, rectangles, partitions.

A relation T on (X, Y, Z) is represented by its communication matrix:
rows indexed by X, columns by Y, and each cell (x, y) carrying the
non-empty set of colors z with (x, y, z) in T, stored as a bitmask.
The Karchmer-Wigderson relation of a Boolean function f has rows
f^-1(1), columns f^-1(0), and colors the input positions where row
and column differ.

All types here are immutable values; they can be shared freely.
Row/column subsets are bitmasks over row/column *indices*, ordered
lexicographically by (row_mask, col_mask), which is the canonical
rectangle order used for every enumeration and tie-break in this
package.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

DEFAULT_RECT_LIMIT = 70_000


class ConstantFunctionError(ValueError):
    """Raised when a constant truth table is used where f^-1(1) and f^-1(0) must both be non-empty."""


class RectangleLimitError(ValueError):
    """Raised when an operation would enumerate more rectangles than the configured guard."""

    def __init__(self, count: int, limit: int):
        super().__init__(f"relation has {count} rectangles, exceeding the limit of {limit}")
        self.count = count
        self.limit = limit


def bit_indices(mask: int) -> list[int]:
    """Indices of the set bits of mask, ascending."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def submasks(mask: int):
    """All submasks of mask in increasing numeric order, including 0 and mask."""
    s = 0
    while True:
        yield s
        if s == mask:
            return
        s = (s - mask) & mask


@dataclass(frozen=True)
class TruthTable:
    """A Boolean function on n variables as its output column.

    bits[j] = f(j) where j's n-bit binary expansion is read as
    x_1 ... x_n with x_1 the most significant bit.
    """

    n: int
    bits: tuple[int, ...]

    def __post_init__(self):
        if not 1 <= self.n <= 5:
            raise ValueError(f"variable count must be in 1..5, got {self.n}")
        if len(self.bits) != 1 << self.n:
            raise ValueError(f"expected {1 << self.n} bits, got {len(self.bits)}")
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError("truth table bits must be 0 or 1")

    @classmethod
    def from_string(cls, bits: str) -> "TruthTable":
        """Build from a bit string like '0110'; length fixes n."""
        m = len(bits)
        n = m.bit_length() - 1
        if m < 2 or (1 << n) != m:
            raise ValueError(f"bit string length must be a power of two >= 2, got {m}")
        if set(bits) - {"0", "1"}:
            raise ValueError(f"bit string may only contain 0/1, got {bits!r}")
        return cls(n, tuple(int(c) for c in bits))

    def ones(self) -> list[int]:
        return [v for v, b in enumerate(self.bits) if b == 1]

    def zeros(self) -> list[int]:
        return [v for v, b in enumerate(self.bits) if b == 0]

    @property
    def is_constant(self) -> bool:
        return len(set(self.bits)) == 1

    def value(self, assignment: int) -> int:
        return self.bits[assignment]

    def table_int(self) -> int:
        """The table packed into an int, bit j = f(j)."""
        t = 0
        for j, b in enumerate(self.bits):
            t |= b << j
        return t

    def input_str(self, v: int) -> str:
        """Render input v as the bit string x_1 ... x_n."""
        return format(v, f"0{self.n}b")

    def __str__(self):
        return "".join(str(b) for b in self.bits)


def parse_truth_table(text: str) -> TruthTable:
    """Parse the truth-table text format: a line `n=<k>` followed by 2^k chars of 0/1."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if len(lines) != 2 or not lines[0].startswith("n="):
        raise ValueError("expected a line 'n=<k>' followed by a line of 2^k bits")
    try:
        n = int(lines[0][2:])
    except ValueError:
        raise ValueError(f"bad variable count in {lines[0]!r}") from None
    tt = TruthTable.from_string(lines[1])
    if tt.n != n:
        raise ValueError(f"declared n={n} but bit string has length {len(lines[1])}")
    return tt


def truth_table_to_text(f: TruthTable) -> str:
    return f"n={f.n}\n{f}\n"


class Axis(enum.Enum):
    ROW = "row"
    COL = "col"


@dataclass(frozen=True, order=True)
class Rectangle:
    """A non-empty row-subset x column-subset, as index bitmasks."""

    row_mask: int
    col_mask: int

    def __post_init__(self):
        if self.row_mask <= 0 or self.col_mask <= 0:
            raise ValueError("rectangle masks must be non-empty")

    @classmethod
    def from_indices(cls, rows, cols) -> "Rectangle":
        rm = 0
        for i in rows:
            rm |= 1 << i
        cm = 0
        for j in cols:
            cm |= 1 << j
        return cls(rm, cm)

    @classmethod
    def from_key(cls, key: str) -> "Rectangle":
        if not key.startswith("r") or "c" not in key:
            raise ValueError(f"bad rectangle key {key!r}")
        r, c = key[1:].split("c", 1)
        return cls(int(r), int(c))

    def key(self) -> str:
        return f"r{self.row_mask}c{self.col_mask}"

    @property
    def row_count(self) -> int:
        return self.row_mask.bit_count()

    @property
    def col_count(self) -> int:
        return self.col_mask.bit_count()

    @property
    def cell_count(self) -> int:
        return self.row_count * self.col_count

    @property
    def is_cell(self) -> bool:
        return self.cell_count == 1

    def row_indices(self) -> list[int]:
        return bit_indices(self.row_mask)

    def col_indices(self) -> list[int]:
        return bit_indices(self.col_mask)

    def cells(self):
        for i in self.row_indices():
            for j in self.col_indices():
                yield (i, j)

    def contains_cell(self, i: int, j: int) -> bool:
        return bool(self.row_mask >> i & 1 and self.col_mask >> j & 1)

    def contains(self, other: "Rectangle") -> bool:
        return (other.row_mask & ~self.row_mask) == 0 and (other.col_mask & ~self.col_mask) == 0

    def __str__(self):
        return self.key()


@dataclass(frozen=True)
class Partition:
    """An unordered split of a rectangle into two along rows or columns.

    Stored with the canonically smaller part first.
    """

    first: Rectangle
    second: Rectangle
    axis: Axis

    def __post_init__(self):
        a, b = self.first, self.second
        if a >= b:
            raise ValueError("partition parts must be stored in canonical order")
        if self.axis is Axis.ROW:
            ok = a.col_mask == b.col_mask and not a.row_mask & b.row_mask
        else:
            ok = a.row_mask == b.row_mask and not a.col_mask & b.col_mask
        if not ok:
            raise ValueError(f"{a} and {b} do not form a {self.axis.value} partition")

    @classmethod
    def make(cls, a: Rectangle, b: Rectangle, axis: Axis) -> "Partition":
        if b < a:
            a, b = b, a
        return cls(a, b, axis)

    def parent(self) -> Rectangle:
        return Rectangle(self.first.row_mask | self.second.row_mask,
                         self.first.col_mask | self.second.col_mask)

    def parts(self) -> tuple[Rectangle, Rectangle]:
        return (self.first, self.second)

    def key(self) -> str:
        return f"{self.first.key()}+{self.second.key()}"

    def sort_key(self):
        return (self.axis is Axis.COL, self.first, self.second)

    @classmethod
    def from_key(cls, key: str) -> "Partition":
        a_key, b_key = key.split("+", 1)
        a, b = Rectangle.from_key(a_key), Rectangle.from_key(b_key)
        axis = Axis.ROW if a.col_mask == b.col_mask else Axis.COL
        return cls.make(a, b, axis)

    def __str__(self):
        return self.key()


@dataclass(frozen=True)
class Relation:
    """A relation's communication matrix with per-cell color sets.

    colors[i][j] is the bitmask of 0-indexed colors of cell
    (rows[i], cols[j]); every cell mask is non-empty. Colors are
    rendered 1-indexed in human-facing output.
    """

    rows: tuple[int, ...]
    cols: tuple[int, ...]
    color_count: int
    colors: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if not self.rows or not self.cols:
            raise ValueError("relation must have at least one row and one column")
        if len(set(self.rows)) != len(self.rows) or len(set(self.cols)) != len(self.cols):
            raise ValueError("row/column labels must be unique")
        if self.color_count < 1:
            raise ValueError("color count must be positive")
        if len(self.colors) != len(self.rows) or any(len(r) != len(self.cols) for r in self.colors):
            raise ValueError("color matrix shape does not match labels")
        full = (1 << self.color_count) - 1
        for i, row in enumerate(self.colors):
            for j, mask in enumerate(row):
                if mask == 0:
                    raise ValueError(f"cell ({self.rows[i]},{self.cols[j]}) has an empty color set")
                if mask & ~full:
                    raise ValueError(f"cell ({self.rows[i]},{self.cols[j]}) uses colors beyond {self.color_count}")

    @property
    def row_count(self) -> int:
        return len(self.rows)

    @property
    def col_count(self) -> int:
        return len(self.cols)

    def full_rectangle(self) -> Rectangle:
        return Rectangle((1 << self.row_count) - 1, (1 << self.col_count) - 1)

    def cell_mask(self, i: int, j: int) -> int:
        return self.colors[i][j]

    def cell_colors(self, i: int, j: int) -> list[int]:
        return bit_indices(self.colors[i][j])

    def cell_rectangles(self) -> list[Rectangle]:
        """Single-cell rectangles in row-major order."""
        return [Rectangle(1 << i, 1 << j)
                for i in range(self.row_count) for j in range(self.col_count)]


def build_relation(f: TruthTable) -> Relation:
    """The Karchmer-Wigderson relation of f.

    Rows are f^-1(1) and columns f^-1(0), both ascending; cell (x, y)
    gets color i (0-indexed) exactly when x and y differ in input
    position i+1, reading x_1 as the most significant bit.
    """
    if f.is_constant:
        raise ConstantFunctionError("constant function: f^-1(1) and f^-1(0) must both be non-empty")
    rows = tuple(f.ones())
    cols = tuple(f.zeros())
    n = f.n
    colors = tuple(
        tuple(_diff_mask(x, y, n) for y in cols)
        for x in rows
    )
    return Relation(rows, cols, n, colors)


def _diff_mask(x: int, y: int, n: int) -> int:
    diff = x ^ y
    mask = 0
    for c in range(n):
        if diff >> (n - 1 - c) & 1:
            mask |= 1 << c
    return mask


def rectangle_count(T: Relation) -> int:
    return ((1 << T.row_count) - 1) * ((1 << T.col_count) - 1)


def check_rectangle_limit(T: Relation, limit: int = DEFAULT_RECT_LIMIT) -> None:
    count = rectangle_count(T)
    if count > limit:
        raise RectangleLimitError(count, limit)


def enumerate_rectangles(T: Relation, limit: int = DEFAULT_RECT_LIMIT) -> list[Rectangle]:
    """All rectangles of T's matrix in canonical (row_mask, col_mask) order."""
    check_rectangle_limit(T, limit)
    return [Rectangle(rm, cm)
            for rm in range(1, 1 << T.row_count)
            for cm in range(1, 1 << T.col_count)]


def common_color_mask(T: Relation, R: Rectangle) -> int:
    mask = (1 << T.color_count) - 1
    for i in R.row_indices():
        row = T.colors[i]
        for j in R.col_indices():
            mask &= row[j]
            if not mask:
                return 0
    return mask


def is_monochromatic(T: Relation, R: Rectangle) -> int | None:
    """The lowest color shared by every cell of R, or None if there is none."""
    mask = common_color_mask(T, R)
    if not mask:
        return None
    return (mask & -mask).bit_length() - 1


def enumerate_partitions(R: Rectangle) -> list[Partition]:
    """All unordered two-part splits of R, row splits then column splits.

    A split along rows keeps the column mask and divides the row mask in
    two non-empty halves; iterating only submasks that contain the lowest
    set bit of the parent mask counts each unordered pair once. Output is
    sorted canonically within each axis.
    """
    out = []
    for axis in (Axis.ROW, Axis.COL):
        mask = R.row_mask if axis is Axis.ROW else R.col_mask
        if mask.bit_count() < 2:
            continue
        low = mask & -mask
        rest = mask ^ low
        parts = []
        for t in submasks(rest):
            if t == rest:
                continue
            s = low | t
            if axis is Axis.ROW:
                a = Rectangle(s, R.col_mask)
                b = Rectangle(mask ^ s, R.col_mask)
            else:
                a = Rectangle(R.row_mask, s)
                b = Rectangle(R.row_mask, mask ^ s)
            parts.append(Partition.make(a, b, axis))
        parts.sort(key=Partition.sort_key)
        out.extend(parts)
    return out


def recolor(T: Relation, W: Rectangle, color: int) -> Relation:
    """A copy of T with `color` added to every cell of W."""
    if not 0 <= color < T.color_count:
        raise ValueError(f"color {color} out of range 0..{T.color_count - 1}")
    bit = 1 << color
    colors = tuple(
        tuple(mask | bit if W.contains_cell(i, j) else mask
              for j, mask in enumerate(row))
        for i, row in enumerate(T.colors)
    )
    return Relation(T.rows, T.cols, T.color_count, colors)


def restrict(T: Relation, R: Rectangle) -> Relation:
    """The sub-relation induced by rectangle R (labels preserved)."""
    ri = R.row_indices()
    ci = R.col_indices()
    if (ri and ri[-1] >= T.row_count) or (ci and ci[-1] >= T.col_count):
        raise ValueError(f"{R} exceeds the matrix dimensions")
    return Relation(
        tuple(T.rows[i] for i in ri),
        tuple(T.cols[j] for j in ci),
        T.color_count,
        tuple(tuple(T.colors[i][j] for j in ci) for i in ri),
    )


# ---------------------------------------------------------------------------
# Relation text format
#
# Header line: `<rows> <cols> <colors>`. Then rows*cols lines, row-major,
# each listing the 1-indexed colors of one cell separated by spaces.
# Lines starting with # are comments.
# ---------------------------------------------------------------------------

def parse_relation(text: str) -> Relation:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise ValueError("empty relation file")
    head = lines[0].split()
    if len(head) != 3:
        raise ValueError(f"header must be '<rows> <cols> <colors>', got {lines[0]!r}")
    try:
        r, c, z = (int(v) for v in head)
    except ValueError:
        raise ValueError(f"non-integer header field in {lines[0]!r}") from None
    if len(lines) - 1 != r * c:
        raise ValueError(f"expected {r * c} cell lines, got {len(lines) - 1}")
    cells = []
    for ln in lines[1:]:
        mask = 0
        for tok in ln.split():
            k = int(tok)
            if not 1 <= k <= z:
                raise ValueError(f"color {k} out of range 1..{z}")
            mask |= 1 << (k - 1)
        cells.append(mask)
    colors = tuple(tuple(cells[i * c + j] for j in range(c)) for i in range(r))
    return Relation(tuple(range(r)), tuple(range(c)), z, colors)


def relation_to_text(T: Relation) -> str:
    lines = [f"{T.row_count} {T.col_count} {T.color_count}"]
    for i in range(T.row_count):
        for j in range(T.col_count):
            lines.append(" ".join(str(k + 1) for k in T.cell_colors(i, j)))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Seeded random relations
#
# The generator is a 64-bit linear congruential generator with Knuth's
# MMIX constants (state = state * 6364136223846793005 + 1442695040888963407
# mod 2^64), so a seed reproduces the same relations on every platform.
# Each cell draws a uniform non-empty color subset by rejection sampling.
# ---------------------------------------------------------------------------

class Lcg64:
    MULT = 6364136223846793005
    INC = 1442695040888963407
    MASK = (1 << 64) - 1

    def __init__(self, seed: int):
        self.state = seed & self.MASK

    def next_u64(self) -> int:
        self.state = (self.state * self.MULT + self.INC) & self.MASK
        return self.state

    def below(self, n: int) -> int:
        """Uniform integer in [0, n) via rejection."""
        span = (1 << 64) - ((1 << 64) % n)
        while True:
            v = self.next_u64()
            if v < span:
                return v % n


def random_relations(seed: int, count: int, rows: int, cols: int, colors: int) -> list[Relation]:
    """`count` relations drawn from one LCG stream seeded by `seed`."""
    rng = Lcg64(seed)
    full = (1 << colors) - 1
    out = []
    for _ in range(count):
        cells = tuple(
            tuple(1 + rng.below(full) for _ in range(cols))
            for _ in range(rows)
        )
        out.append(Relation(tuple(range(rows)), tuple(range(cols)), colors, cells))
    return out
