"""Command-line entry point.

    kwbench analyze --fn 0110 [--json]
    kwbench analyze --relation matrix.rel
    kwbench export pn --fn 0110 --out pn.lp
    kwbench verify n2-exhaustive
    kwbench verify random-relations --seed 1 --count 50 --dims 3x3 --colors 3
    kwbench verify file cases.txt

analyze computes everything for one input: the partition number with a
witness tree, the covering/balance integer program and its relaxation,
the quasi-additive LP, the dual comparison, both certificate
conversions, and (for functions with n <= 3, or n = 4 with
--formula-n4) the brute-force formula size. Every reported identity is
re-derived from the computed numbers.

Exit codes: 0 all checks held, 1 a check failed, 2 input/parse error,
3 rectangle-guard error, 4 constant function.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .certificates import (
    certificate_from_assignment,
    certificate_to_tree,
    check_feasible,
    tree_to_certificate,
)
from .formulations import build_pn, build_qa, check_duality
from .formulas import formula_size, witness_formula
from .lp import dualize, relax, write_lp
from .partition import protocol_partition_number, tree_to_text, validate_tree
from .relation import (
    DEFAULT_RECT_LIMIT,
    ConstantFunctionError,
    Rectangle,
    RectangleLimitError,
    Relation,
    TruthTable,
    build_relation,
    parse_relation,
    parse_truth_table,
    random_relations,
    rectangle_count,
)
from .simplex import SolveStatus, solve_ip, solve_lp, verify_solution

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_PARSE = 2
EXIT_GUARD = 3
EXIT_CONSTANT = 4


def _fmt(v: Fraction | int | None) -> str:
    if v is None:
        return "-"
    if isinstance(v, Fraction) and v.denominator == 1:
        return str(v.numerator)
    return str(v)


@dataclass
class RunReport:
    description: str
    shape: str
    rectangles: int
    cp_value: int | None = None
    witness_ok: bool = False
    ip_value: Fraction | None = None
    ip_nodes: int = 0
    ip_verified: bool = False
    lp_relax_value: Fraction | None = None
    lp_verified: bool = False
    qa_value: Fraction | None = None
    qa_verified: bool = False
    dual_value: Fraction | None = None
    duality_ok: bool = False
    tree_cert_feasible: bool = False
    cert_tree_ok: bool = False
    formula_leaves: int | None = None
    formula: str | None = None
    identities: dict[str, bool] = field(default_factory=dict)
    timings: dict[str, float] = field(default_factory=dict)
    witness_text: str = ""

    @property
    def ok(self) -> bool:
        checks = [self.witness_ok, self.ip_verified, self.lp_verified, self.qa_verified,
                  self.duality_ok, self.tree_cert_feasible, self.cert_tree_ok]
        return all(checks) and all(self.identities.values())

    def to_json_dict(self) -> dict:
        return {
            "input": self.description,
            "shape": self.shape,
            "rectangles": self.rectangles,
            "protocol_partition_number": self.cp_value,
            "witness_valid": self.witness_ok,
            "ip_optimum": _fmt(self.ip_value),
            "ip_nodes": self.ip_nodes,
            "ip_solution_verified": self.ip_verified,
            "lp_relaxation_optimum": _fmt(self.lp_relax_value),
            "lp_solution_verified": self.lp_verified,
            "quasi_additive_bound": _fmt(self.qa_value),
            "qa_solution_verified": self.qa_verified,
            "dual_optimum": _fmt(self.dual_value),
            "duality_structure_ok": self.duality_ok,
            "tree_certificate_feasible": self.tree_cert_feasible,
            "certificate_tree_roundtrip_ok": self.cert_tree_ok,
            "formula_size": self.formula_leaves,
            "formula": self.formula,
            "identities": dict(self.identities),
            "timings_sec": {k: round(v, 6) for k, v in self.timings.items()},
            "ok": self.ok,
        }

    def to_text(self) -> str:
        lines = [f"input: {self.description}",
                 f"matrix: {self.shape} ({self.rectangles} rectangles)",
                 f"protocol partition number C^P = {self.cp_value} (witness {'valid' if self.witness_ok else 'INVALID'})",
                 f"integer program optimum      = {_fmt(self.ip_value)} "
                 f"({self.ip_nodes} nodes, solution {'verified' if self.ip_verified else 'NOT verified'})",
                 f"LP relaxation optimum        = {_fmt(self.lp_relax_value)}",
                 f"quasi-additive bound QA      = {_fmt(self.qa_value)}",
                 f"dual of relaxation optimum   = {_fmt(self.dual_value)}",
                 f"duality structure            = {'OK' if self.duality_ok else 'MISMATCH'}",
                 f"tree -> certificate feasible = {self.tree_cert_feasible}",
                 f"certificate -> tree valid    = {self.cert_tree_ok}"]
        if self.formula_leaves is not None:
            lines.append(f"formula size L               = {self.formula_leaves}   [{self.formula}]")
        for name, held in self.identities.items():
            lines.append(f"identity {name}: {'OK' if held else 'FAILED'}")
        lines.append(f"timings: " + ", ".join(f"{k}={v:.3f}s" for k, v in self.timings.items()))
        if self.witness_text:
            lines.append("witness tree:")
            lines.append(self.witness_text.rstrip("\n"))
        lines.append(f"result: {'all checks passed' if self.ok else 'CHECK FAILED'}")
        return "\n".join(lines) + "\n"


def analyze_relation(T: Relation, f: TruthTable | None = None, *,
                     limit: int = DEFAULT_RECT_LIMIT, raw_psi: bool = False,
                     debug_certificates: bool = False, formula_n4: bool = False,
                     description: str = "", include_witness: bool = False) -> RunReport:
    report = RunReport(description or "relation",
                       f"{T.row_count}x{T.col_count}, {T.color_count} colors",
                       rectangle_count(T))
    clock = time.perf_counter

    t0 = clock()
    cp = protocol_partition_number(T, limit)
    report.cp_value = cp.value
    report.witness_ok = validate_tree(T, cp.witness).ok
    report.timings["partition_number"] = clock() - t0
    if include_witness:
        fmt = (lambda v: format(v, f"0{f.n}b")) if f is not None else str
        report.witness_text = tree_to_text(T, cp.witness, fmt)

    t0 = clock()
    pn = build_pn(T, limit)
    ip = solve_ip(pn.model)
    report.ip_value = ip.objective
    report.ip_nodes = ip.node_count
    report.ip_verified = (ip.status is SolveStatus.OPTIMAL
                          and not verify_solution(pn.model, ip.assignment))
    report.timings["integer_program"] = clock() - t0

    t0 = clock()
    relaxed = relax(pn.model)
    lp = solve_lp(relaxed)
    report.lp_relax_value = lp.objective
    report.lp_verified = (lp.status is SolveStatus.OPTIMAL
                          and not verify_solution(relaxed, lp.assignment))
    report.timings["lp_relaxation"] = clock() - t0

    t0 = clock()
    qa = build_qa(T, limit, raw_psi=raw_psi)
    qa_sol = solve_lp(qa.model)
    report.qa_value = qa_sol.objective
    report.qa_verified = (qa_sol.status is SolveStatus.OPTIMAL
                          and not verify_solution(qa.model, qa_sol.assignment))
    report.timings["quasi_additive"] = clock() - t0

    t0 = clock()
    dual = dualize(relaxed)
    dual_sol = solve_lp(dual)
    report.dual_value = dual_sol.objective
    report.duality_ok = check_duality(T, limit).ok
    report.timings["duality"] = clock() - t0

    t0 = clock()
    cert = tree_to_certificate(T, cp.witness)
    report.tree_cert_feasible = check_feasible(T, cert, limit).ok
    rebuilt = certificate_to_tree(T, cert, debug=debug_certificates, limit=limit)
    cert_ok = (validate_tree(T, rebuilt).ok
               and sorted(rebuilt.leaf_rectangles()) == sorted(R for R, v in cert.x.items() if v))
    ip_cert = certificate_from_assignment(pn, ip.assignment)
    ip_tree = certificate_to_tree(T, ip_cert, debug=debug_certificates, limit=limit)
    cert_ok = cert_ok and validate_tree(T, ip_tree).ok and ip_tree.leaf_count() == int(ip.objective)
    report.cert_tree_ok = cert_ok
    report.timings["certificates"] = clock() - t0

    if f is not None and (f.n <= 3 or formula_n4):
        t0 = clock()
        report.formula_leaves = formula_size(f)
        if report.formula_leaves is not None:
            report.formula = str(witness_formula(f))
        report.timings["formula_oracle"] = clock() - t0

    cp_frac = Fraction(cp.value)
    report.identities["C^P = IP optimum"] = report.ip_value == cp_frac
    report.identities["C^P = LP relaxation (no gap)"] = report.lp_relax_value == cp_frac
    report.identities["C^P = QA"] = report.qa_value == cp_frac
    report.identities["QA = dual optimum"] = report.qa_value == report.dual_value
    if report.formula_leaves is not None:
        report.identities["C^P = L(f)"] = report.formula_leaves == cp.value
    return report


# ---------------------------------------------------------------------------
# Input loading
# ---------------------------------------------------------------------------

def _load_input(args) -> tuple[Relation, TruthTable | None, str]:
    if getattr(args, "fn", None):
        f = TruthTable.from_string(args.fn)
        return build_relation(f), f, f"function {args.fn} (n={f.n})"
    if getattr(args, "fn_file", None):
        with open(args.fn_file) as fh:
            f = parse_truth_table(fh.read())
        return build_relation(f), f, f"function file {args.fn_file} (n={f.n})"
    if getattr(args, "relation", None):
        with open(args.relation) as fh:
            T = parse_relation(fh.read())
        return T, None, f"relation file {args.relation}"
    raise ValueError("one of --fn, --fn-file, --relation is required")


def _add_input_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--fn", help="truth table bits, e.g. 0110 (length 2^n)")
    p.add_argument("--fn-file", help="truth table file (line n=<k>, then 2^k bits)")
    p.add_argument("--relation", help="relation file (header 'rows cols colors', one cell per line)")
    p.add_argument("--limit-rects", type=int, default=DEFAULT_RECT_LIMIT,
                   help=f"rectangle enumeration guard (default {DEFAULT_RECT_LIMIT})")


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_analyze(args) -> int:
    T, f, desc = _load_input(args)
    report = analyze_relation(
        T, f, limit=args.limit_rects, raw_psi=args.raw_psi,
        debug_certificates=args.debug_certificates, formula_n4=args.formula_n4,
        description=desc, include_witness=not args.json)
    if args.json:
        print(json.dumps(report.to_json_dict(), indent=2))
    else:
        print(report.to_text(), end="")
    return EXIT_OK if report.ok else EXIT_CHECK_FAILED


def cmd_export(args) -> int:
    T, _, _ = _load_input(args)
    pn = build_pn(T, args.limit_rects)
    if args.which == "pn":
        model = pn.model
    elif args.which == "relaxation":
        model = relax(pn.model)
    elif args.which == "dual":
        model = dualize(relax(pn.model))
    else:
        model = build_qa(T, args.limit_rects, raw_psi=args.raw_psi).model
    text = write_lp(model)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        print(text, end="")
    return EXIT_OK


def _verify_case(name: str, T: Relation, f: TruthTable | None, limit: int) -> tuple[bool, str]:
    report = analyze_relation(T, f, limit=limit, debug_certificates=True, description=name)
    values = (f"C^P={report.cp_value} IP={_fmt(report.ip_value)} "
              f"LP={_fmt(report.lp_relax_value)} QA={_fmt(report.qa_value)} nodes={report.ip_nodes}")
    if report.formula_leaves is not None:
        values += f" L={report.formula_leaves}"
    return report.ok, values


def cmd_verify(args) -> int:
    limit = args.limit_rects
    cases: list[tuple[str, Relation, TruthTable | None]] = []

    if args.scope == "n2-exhaustive":
        for bits in range(16):
            s = format(bits, "04b")
            if s in ("0000", "1111"):
                continue
            f = TruthTable.from_string(s)
            cases.append((f"fn {s}", build_relation(f), f))
    elif args.scope == "random-relations":
        try:
            r, c = (int(v) for v in args.dims.lower().split("x"))
        except ValueError:
            raise ValueError(f"bad --dims {args.dims!r}, expected like 3x3") from None
        for idx, T in enumerate(random_relations(args.seed, args.count, r, c, args.colors)):
            cases.append((f"random[{idx}] seed={args.seed}", T, None))
    else:  # file
        if not args.path:
            raise ValueError("verify file requires a path")
        with open(args.path) as fh:
            for raw in fh:
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                kind, _, rest = line.partition(" ")
                if kind == "fn":
                    f = TruthTable.from_string(rest.strip())
                    cases.append((f"fn {rest.strip()}", build_relation(f), f))
                elif kind == "relation":
                    with open(rest.strip()) as rfh:
                        cases.append((f"relation {rest.strip()}", parse_relation(rfh.read()), None))
                else:
                    raise ValueError(f"bad scope line {line!r}: expected 'fn <bits>' or 'relation <path>'")
        if not cases:
            print("warning: empty scope file, nothing verified")
            return EXIT_OK

    failures = 0
    for name, T, f in cases:
        ok, values = _verify_case(name, T, f, limit)
        print(f"[{'PASS' if ok else 'FAIL'}] {name}: {values}")
        if not ok:
            failures += 1
    print(f"{len(cases) - failures}/{len(cases)} cases passed")
    return EXIT_OK if failures == 0 else EXIT_CHECK_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kwbench",
        description="exact workbench for protocol partition numbers and the quasi-additive bound")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="compute and cross-check everything for one input")
    _add_input_args(p)
    p.add_argument("--json", action="store_true", help="emit a JSON report")
    p.add_argument("--raw-psi", action="store_true",
                   help="use the per-cell psi variables in the quasi-additive LP")
    p.add_argument("--debug-certificates", action="store_true",
                   help="re-check feasibility after every certificate merge step")
    p.add_argument("--formula-n4", action="store_true",
                   help="run the formula oracle for n = 4 inputs too")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("export", help="write a model in LP format")
    p.add_argument("which", choices=["pn", "qa", "relaxation", "dual"])
    _add_input_args(p)
    p.add_argument("--raw-psi", action="store_true")
    p.add_argument("--out", help="output path (default: stdout)")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("verify", help="run the identity checks over a scope")
    p.add_argument("scope", choices=["n2-exhaustive", "random-relations", "file"])
    p.add_argument("path", nargs="?", help="scope file for 'file'")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--count", type=int, default=50)
    p.add_argument("--dims", default="3x3")
    p.add_argument("--colors", type=int, default=3)
    p.add_argument("--limit-rects", type=int, default=DEFAULT_RECT_LIMIT)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConstantFunctionError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONSTANT
    except RectangleLimitError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_GUARD
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
