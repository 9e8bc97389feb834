"""Exact workbench for protocol partition numbers and the quasi-additive bound.

Everything is computed with exact rational arithmetic, so the central
identities (partition number = IP optimum = LP relaxation optimum =
quasi-additive bound = formula size for function relations) are checked
as equalities, never up to a tolerance.
"""

from .certificates import (
    Certificate,
    InfeasibleCertificateError,
    InvalidTreeError,
    certificate_from_assignment,
    certificate_to_text,
    certificate_to_tree,
    check_feasible,
    find_merge_pair,
    parse_certificate,
    tree_to_certificate,
)
from .formulas import (
    Formula,
    FunctionClass,
    Gate,
    Literal,
    formula_size,
    witness_formula,
)
from .formulations import (
    DualityReport,
    PnInstance,
    QaInstance,
    build_pn,
    build_qa,
    check_duality,
)
from .lp import MilpModel, ModelError, RelOp, Sense, Variable, dualize, relax, write_lp
from .partition import (
    PartitionNumberResult,
    PartitionTree,
    protocol_partition_number,
    tree_to_dot,
    tree_to_text,
    validate_tree,
)
from .relation import (
    DEFAULT_RECT_LIMIT,
    Axis,
    ConstantFunctionError,
    Partition,
    Rectangle,
    RectangleLimitError,
    Relation,
    TruthTable,
    build_relation,
    enumerate_partitions,
    enumerate_rectangles,
    is_monochromatic,
    parse_relation,
    parse_truth_table,
    random_relations,
    recolor,
    relation_to_text,
    restrict,
    truth_table_to_text,
)
from .simplex import (
    IpSolution,
    LpSolution,
    SolveStatus,
    solve_ip,
    solve_lp,
    verify_solution,
)

__version__ = "0.1.0"
