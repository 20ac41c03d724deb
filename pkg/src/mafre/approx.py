"""Repairing unsolvable equations through feasible reducts.

A reduct of the associated context is feasible when the reduced equation is
solvable; each feasible reduct yields a repaired right-hand side that leaves
the reduct's rows untouched.  The pessimistic closure repair (replacing every
column by its interior) is provided for comparison, and ``diagnose`` turns the
row-by-row deviations into an incoherence report.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Optional

from .context import FuzzySet, necessity, possibility, restrict
from .errors import InfeasibleReductError, NotAReductError
from .fre import (
    FreInstance,
    SolutionSet,
    associated_context,
    enumerate_solutions,
    is_solvable,
    reduce_fre,
)
from .context import enumerate_reducts


def _require_reduct(fre: FreInstance, Y) -> tuple:
    Y = tuple(Y)
    reducts = {frozenset(r) for r in enumerate_reducts(associated_context(fre))}
    if frozenset(Y) not in reducts:
        raise NotAReductError(f"{sorted(Y)} is not a reduct of the associated context")
    return Y


def is_feasible_reduct(fre: FreInstance, Y) -> bool:
    """True when the Y-reduced instance is solvable (Y must be a reduct)."""
    Y = _require_reduct(fre, Y)
    return is_solvable(reduce_fre(fre, Y, enforce_consistency=False))


def find_feasible_reducts(fre: FreInstance):
    """All reducts whose reduced instance is solvable; may be empty."""
    return [
        Y
        for Y in enumerate_reducts(associated_context(fre))
        if is_solvable(reduce_fre(fre, Y, enforce_consistency=False))
    ]


def is_feasible_consistent_set(fre: FreInstance, Y) -> bool:
    """Experimental: feasibility for an arbitrary consistent set.

    No minimality is required; the reduced instance is simply checked for
    solvability after verifying consistency.
    """
    reduced = reduce_fre(fre, tuple(Y), enforce_consistency=True)
    return is_solvable(reduced)


@dataclass(frozen=True)
class ApproximationResult:
    """Outcome of a reduct-based repair: the rhs T* and what changed."""

    reduct: tuple
    t_star: tuple  # matrix over U x W
    preserved_rows: tuple
    modified_rows: dict  # (row, column) -> (old, new)
    solution_summary: Optional[SolutionSet]

    def approximated_instance(self, fre: FreInstance) -> FreInstance:
        return FreInstance(
            fre.frame,
            fre.row_names,
            fre.var_names,
            fre.col_names,
            fre.coeff,
            fre.sigma,
            self.t_star,
        )


def approximate_by_reduct(
    fre: FreInstance, Y, *, materialize_solutions: bool = False
) -> ApproximationResult:
    """Repair the rhs through a feasible reduct Y.

    Column w of the repaired term is the restricted-necessity image of the
    reduced rhs pushed back up through the full possibility operator; rows in
    Y keep their original values.
    """
    Y = _require_reduct(fre, Y)
    reduced = reduce_fre(fre, Y, enforce_consistency=False)
    if not is_solvable(reduced):
        raise InfeasibleReductError(f"{sorted(Y)} is not feasible for this instance")
    ctx = associated_context(fre)
    ctx_y = restrict(ctx, Y)
    columns = []
    for w in fre.col_names:
        t_y = reduced.rhs_column(w)
        g = necessity(FuzzySet(ctx_y.attributes, t_y.values), ctx_y)
        columns.append(possibility(g, ctx))
    t_star = tuple(
        tuple(columns[j].values[i] for j in range(len(fre.col_names)))
        for i in range(len(fre.row_names))
    )
    modified = {}
    for i, u in enumerate(fre.row_names):
        for j, w in enumerate(fre.col_names):
            if fre.rhs[i][j] != t_star[i][j]:
                modified[(u, w)] = (fre.rhs[i][j], t_star[i][j])
    result = ApproximationResult(
        reduct=Y,
        t_star=t_star,
        preserved_rows=Y,
        modified_rows=modified,
        solution_summary=None,
    )
    approx_fre = result.approximated_instance(fre)
    summary = enumerate_solutions(approx_fre, materialize=materialize_solutions)
    return ApproximationResult(Y, t_star, Y, modified, summary)


def pessimistic_approximation(fre: FreInstance):
    """Columnwise interior of T: always solvable, never above T."""
    ctx = associated_context(fre)
    columns = [
        possibility(necessity(fre.rhs_column(w), ctx), ctx) for w in fre.col_names
    ]
    return tuple(
        tuple(columns[j].values[i] for j in range(len(fre.col_names)))
        for i in range(len(fre.row_names))
    )


@dataclass(frozen=True)
class DiagnosisReport:
    """Machine- and human-readable account of where an instance is incoherent."""

    solvable: bool
    feasible: tuple  # entries per feasible reduct
    infeasible_reducts: tuple
    notable_threshold: int

    def to_json(self) -> dict:
        return {
            "solvable": self.solvable,
            "notable_threshold": self.notable_threshold,
            "feasible_reducts": [
                {
                    "reduct": list(entry["reduct"]),
                    "preserved_rows": list(entry["preserved_rows"]),
                    "modified": [
                        {
                            "row": row,
                            "column": col,
                            "old": old.numerator,
                            "new": new.numerator,
                            "steps": steps,
                            "severity": severity,
                        }
                        for (row, col, old, new, steps, severity) in entry["modified"]
                    ],
                }
                for entry in self.feasible
            ],
            "infeasible_reducts": [list(Y) for Y in self.infeasible_reducts],
        }

    def render_text(self) -> str:
        if self.solvable:
            return "no incoherence: the instance is solvable as stated"
        lines = []
        if not self.feasible:
            lines.append("no reduct-based repair exists for this instance")
        for entry in self.feasible:
            lines.append(
                "feasible reduct {%s}: equations %s kept as stated"
                % (", ".join(entry["reduct"]), ", ".join(entry["preserved_rows"]))
            )
            if not entry["modified"]:
                lines.append("  no right-hand side changes needed")
            for row, col, old, new, steps, severity in entry["modified"]:
                lines.append(
                    f"  {row}[{col}]: {old} -> {new} ({steps} granular step"
                    f"{'s' if steps != 1 else ''}; {severity})"
                )
        for Y in self.infeasible_reducts:
            lines.append(
                "reduct {%s} is infeasible: the instance stays unsolvable no "
                "matter how the right-hand sides outside it are changed" % ", ".join(Y)
            )
        return "\n".join(lines)


def diagnose(fre: FreInstance, notable_threshold: int = 1) -> DiagnosisReport:
    """Per-reduct deviation report; deviations above the threshold (in
    granular steps) are flagged as notable, the rest as slight."""
    if is_solvable(fre):
        return DiagnosisReport(True, (), (), notable_threshold)
    feasible_entries = []
    infeasible = []
    for Y in enumerate_reducts(associated_context(fre)):
        if not is_solvable(reduce_fre(fre, Y, enforce_consistency=False)):
            infeasible.append(Y)
            continue
        result = approximate_by_reduct(fre, Y)
        modified = []
        for (row, col), (old, new) in sorted(
            result.modified_rows.items(),
            key=lambda kv: (fre.row_names.index(kv[0][0]), fre.col_names.index(kv[0][1])),
        ):
            steps = abs(old.numerator - new.numerator)
            severity = "notable" if steps > notable_threshold else "slight"
            modified.append((row, col, old, new, steps, severity))
        feasible_entries.append(
            {"reduct": Y, "preserved_rows": Y, "modified": modified}
        )
    return DiagnosisReport(
        False, tuple(feasible_entries), tuple(infeasible), notable_threshold
    )
