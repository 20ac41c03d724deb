"""Command-line interface.

Every command reads a JSON problem file and supports ``--json`` for
machine-readable output.  Exit codes: 0 success, 1 unsolvable (solve),
2 malformed input, 3 enumeration budget exceeded.
"""

from __future__ import annotations

import argparse
import enum
import json
import sys

from . import approx, dual as dual_mod, fre as fre_mod
from .algebra import verify_adjoint_triple
from .context import (
    build_concept_lattice,
    enumerate_reducts,
    is_consistent,
    lattice_to_dot,
)
from .errors import (
    BudgetExceededError,
    InconsistentSetError,
    MafreError,
    UnsolvableError,
)
from .io import ProblemFile, ProblemFileError, load_problem, problem_from_instance


class ExitStatus(enum.IntEnum):
    OK = 0
    UNSOLVABLE = 1
    INPUT_ERROR = 2
    BUDGET_EXCEEDED = 3


def _dec(v) -> str:
    return f"{v.numerator / v.granularity:g}"


def _vec(values) -> str:
    return "(" + ", ".join(_dec(v) for v in values) + ")"


def _emit(args, payload: dict, text: str) -> None:
    print(json.dumps(payload, indent=2) if args.json else text)


def _split_set(raw: str):
    names = [s for s in (part.strip() for part in raw.split(",")) if s]
    if not names:
        raise ProblemFileError("--set must name at least one element")
    return names


def cmd_check(args) -> int:
    problem = load_problem(args.file)
    frame = problem.frame()  # verifies adjunction for every triple
    problem.to_instance()  # verifies dimensions and sigma
    reports = [
        (t.name, verify_adjoint_triple(t, frame.lattice).passed) for t in frame.triples
    ]
    payload = {
        "valid": True,
        "granularity": problem.granularity,
        "orientation": problem.orientation,
        "triples": [{"name": name, "adjoint": ok} for name, ok in reports],
        "shape": {
            "rows": len(problem.rows),
            "variables": len(problem.variables),
            "columns": len(problem.columns),
        },
    }
    text = (
        f"valid: {len(reports)} triple(s) verified on [0,1]_{problem.granularity}; "
        f"{len(problem.rows)} row(s) x {len(problem.variables)} unknown(s), "
        f"{len(problem.columns)} rhs column(s), orientation {problem.orientation}"
    )
    _emit(args, payload, text)
    return ExitStatus.OK


def _solve_primal(args, instance) -> int:
    gap = fre_mod.solvability_gap(instance)
    if gap:
        payload = {
            "solvable": False,
            "gap": [
                {"row": u, "column": w, "stated": old.numerator, "closed": new.numerator}
                for u, w, old, new in gap
            ],
        }
        text = "unsolvable; rhs vs interior:\n" + "\n".join(
            f"  {u}[{w}]: {_dec(old)} -> {_dec(new)}" for u, w, old, new in gap
        )
        _emit(args, payload, text)
        return ExitStatus.UNSOLVABLE
    solutions = fre_mod.enumerate_solutions(instance, materialize=args.enumerate)
    payload = {"solvable": True, "solutions": solutions.to_json()}
    lines = ["solvable"]
    for col in solutions.columns:
        lines.append(f"column {col.column}: maximum {_vec(col.max_solution.values)}")
        lines.append(f"  {col.count} solution(s)")
        if col.enumerated is not None:
            limit = args.max_count if args.max_count is not None else len(col.enumerated)
            for x in col.enumerated[:limit]:
                lines.append(f"  {_vec(x.values)}")
            if limit < len(col.enumerated):
                lines.append(f"  ... ({len(col.enumerated) - limit} more)")
    _emit(args, payload, "\n".join(lines))
    return ExitStatus.OK


def _solve_dual(args, instance) -> int:
    gap = dual_mod.dual_solvability_gap(instance)
    if gap:
        payload = {
            "solvable": False,
            "gap": [
                {"row": u, "column": w, "stated": old.numerator, "closed": new.numerator}
                for u, w, old, new in gap
            ],
        }
        text = "unsolvable; rhs vs closure:\n" + "\n".join(
            f"  {u}[{w}]: {_dec(old)} -> {_dec(new)}" for u, w, old, new in gap
        )
        _emit(args, payload, text)
        return ExitStatus.UNSOLVABLE
    solutions = dual_mod.dual_solutions(instance, materialize=args.enumerate)
    payload = {"solvable": True, "solutions": solutions.to_json()}
    lines = ["solvable"]
    for row in solutions.columns:
        lines.append(f"row {row.column}: maximum {_vec(row.max_solution.values)}")
        lines.append(f"  {row.count} solution row(s)")
        if row.enumerated is not None:
            limit = args.max_count if args.max_count is not None else len(row.enumerated)
            for x in row.enumerated[:limit]:
                lines.append(f"  {_vec(x.values)}")
            if limit < len(row.enumerated):
                lines.append(f"  ... ({len(row.enumerated) - limit} more)")
    _emit(args, payload, "\n".join(lines))
    return ExitStatus.OK


def cmd_solve(args) -> int:
    problem = load_problem(args.file)
    instance = problem.to_instance()
    if problem.orientation == "primal":
        return _solve_primal(args, instance)
    return _solve_dual(args, instance)


def cmd_reducts(args) -> int:
    problem = load_problem(args.file)
    instance = problem.to_instance()
    if problem.orientation == "primal":
        ctx = fre_mod.associated_context(instance)
        reducts = [list(Y) for Y in enumerate_reducts(ctx)]
        checked = None
        if args.set:
            checked = is_consistent(ctx, _split_set(args.set))
    else:
        ctx = dual_mod.dual_associated_context(instance)
        reducts = [list(Y) for Y in dual_mod.dual_enumerate_reducts(ctx)]
        checked = None
        if args.set:
            checked = dual_mod.dual_is_consistent(ctx, _split_set(args.set))
    payload = {"reducts": reducts}
    lines = [f"{len(reducts)} reduct(s):"] + [
        "  {" + ", ".join(Y) + "}" for Y in reducts
    ]
    if args.set:
        payload["set"] = _split_set(args.set)
        payload["consistent"] = checked
        lines.append(
            f"set {{{args.set}}} is {'consistent' if checked else 'NOT consistent'}"
        )
    _emit(args, payload, "\n".join(lines))
    return ExitStatus.OK


def cmd_reduce(args) -> int:
    problem = load_problem(args.file)
    instance = problem.to_instance()
    Y = _split_set(args.set)
    if problem.orientation == "primal":
        reduced = fre_mod.reduce_fre(instance, Y, enforce_consistency=not args.force)
    else:
        reduced = dual_mod.dual_reduce(instance, Y, enforce_consistency=not args.force)
    out = problem_from_instance(reduced, triples=problem.triples).dumps()
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(out + "\n")
    else:
        print(out)
    return ExitStatus.OK


def cmd_approximate(args) -> int:
    problem = load_problem(args.file)
    instance = problem.to_instance()
    if problem.orientation == "dual":
        feasible = dual_mod.dual_find_feasible_reducts(instance)
        results = [dual_mod.dual_approximate(instance, Y) for Y in feasible]
        payload = {
            "solvable": dual_mod.dual_is_solvable(instance),
            "feasible_reducts": [list(Y) for Y in feasible],
            "approximations": [
                {
                    "reduct": list(r.reduct),
                    "t_star": [[v.numerator for v in row] for row in r.t_star],
                    "modified": {
                        f"{u}[{w}]": [old.numerator, new.numerator]
                        for (u, w), (old, new) in sorted(r.modified_rows.items())
                    },
                }
                for r in results
            ],
        }
        lines = [f"{len(feasible)} feasible column reduct(s)"]
        for r in results:
            lines.append("reduct {" + ", ".join(r.reduct) + "}:")
            for row in r.t_star:
                lines.append("  " + _vec(row))
        _emit(args, payload, "\n".join(lines))
        return ExitStatus.OK
    if args.pessimistic:
        t_star = approx.pessimistic_approximation(instance)
        payload = {
            "pessimistic_rhs": [[v.numerator for v in row] for row in t_star]
        }
        text = "pessimistic rhs:\n" + "\n".join("  " + _vec(row) for row in t_star)
        _emit(args, payload, text)
        return ExitStatus.OK
    report = approx.diagnose(instance, notable_threshold=args.notable_threshold)
    payload = {"diagnosis": report.to_json()}
    if not report.solvable:
        payload["approximations"] = []
        for entry in report.feasible:
            result = approx.approximate_by_reduct(instance, entry["reduct"])
            payload["approximations"].append(
                {
                    "reduct": list(result.reduct),
                    "t_star": [[v.numerator for v in row] for row in result.t_star],
                    "solution_counts": {
                        c.column: c.count for c in result.solution_summary.columns
                    },
                }
            )
    _emit(args, payload, report.render_text())
    return ExitStatus.OK


def cmd_lattice(args) -> int:
    problem = load_problem(args.file)
    instance = problem.to_instance()
    if problem.orientation == "primal":
        lat = build_concept_lattice(fre_mod.associated_context(instance))
        if args.dot:
            print(lattice_to_dot(lat, include_intents=args.intents))
        else:
            payload = {
                "concepts": [
                    {
                        "extent": list(c.extent.numerators),
                        "intent": list(c.intent.numerators),
                    }
                    for c in lat.concepts
                ]
            }
            _emit(args, payload, f"{len(lat)} concepts")
        return ExitStatus.OK
    lat = dual_mod.build_dual_lattice(dual_mod.dual_associated_context(instance))
    if args.dot:
        lines = ["digraph concept_lattice {", "  rankdir=BT;", "  node [shape=box];"]
        for i, m in enumerate(lat.members):
            lines.append(f'  c{i} [label="{m.numerators}"];')
        for i, j in lat.covers():
            lines.append(f"  c{i} -> c{j};")
        lines.append("}")
        print("\n".join(lines))
    else:
        payload = {"members": [list(m.numerators) for m in lat.members]}
        _emit(args, payload, f"{len(lat)} variable-side fixpoints")
    return ExitStatus.OK


def cmd_oracle(args) -> int:
    problem = load_problem(args.file)
    instance = problem.to_instance()
    if problem.orientation == "primal":
        brute = fre_mod.brute_force_solutions(instance, budget=args.budget)
        analytic = fre_mod.enumerate_solutions(instance, materialize=True)
        per_col = {}
        for col in analytic.columns:
            per_col[col.column] = frozenset(x.numerators for x in col.enumerated)
        j = {w: i for i, w in enumerate(instance.col_names)}
        brute_cols = {
            w: frozenset(
                tuple(m[v][j[w]].numerator for v in range(len(instance.var_names)))
                for m in brute
            )
            for w in instance.col_names
        }
        match = per_col == brute_cols
        count = len(brute)
    else:
        brute = dual_mod.dual_brute_force(instance, budget=args.budget)
        analytic = dual_mod.dual_solutions(instance, materialize=True)
        per_row = {
            r.column: frozenset(x.numerators for x in r.enumerated)
            for r in analytic.columns
        }
        i_of = {u: i for i, u in enumerate(instance.row_names)}
        brute_rows = {
            u: frozenset(
                tuple(v.numerator for v in m[i_of[u]]) for m in brute
            )
            for u in instance.row_names
        }
        match = per_row == brute_rows
        count = len(brute)
    payload = {"match": match, "count": count}
    _emit(args, payload, f"{'MATCH' if match else 'MISMATCH'} ({count} solutions)")
    return ExitStatus.OK if match else ExitStatus.INPUT_ERROR


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mafre",
        description="Solve, reduce and repair fuzzy relation equations over "
        "granular truth-value chains.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("file", help="JSON problem file")
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.set_defaults(fn=fn)
        return p

    add("check", cmd_check, "validate the file and verify the adjoint triples")

    p = add("solve", cmd_solve, "solvability, maximum solution, solution count")
    p.add_argument("--enumerate", action="store_true", help="list every solution")
    p.add_argument("--max-count", type=int, default=None, help="cap listed solutions")

    p = add("reducts", cmd_reducts, "list reducts of the associated context")
    p.add_argument("--set", help="also check this comma-separated set for consistency")

    p = add("reduce", cmd_reduce, "emit the Y-reduced problem file")
    p.add_argument("--set", required=True, help="comma-separated names to keep")
    p.add_argument("--force", action="store_true", help="allow non-consistent sets")
    p.add_argument("-o", "--output", help="write the reduced file here")

    p = add("approximate", cmd_approximate, "feasible reducts, repaired rhs, diagnosis")
    p.add_argument(
        "--pessimistic", action="store_true", help="closure-based repair instead"
    )
    p.add_argument(
        "--notable-threshold",
        type=int,
        default=1,
        help="granular steps above which a deviation is notable",
    )

    p = add("lattice", cmd_lattice, "export the associated concept lattice")
    p.add_argument("--dot", action="store_true", help="emit DOT instead of a summary")
    p.add_argument("--intents", action="store_true", help="include intents in labels")

    p = add("oracle", cmd_oracle, "brute-force solve and diff against the solver")
    p.add_argument("--budget", type=int, default=10_000_000, help="candidate cap")

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return int(args.fn(args))
    except BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ExitStatus.BUDGET_EXCEEDED
    except UnsolvableError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ExitStatus.UNSOLVABLE
    except (ProblemFileError, InconsistentSetError, MafreError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ExitStatus.INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
