"""JSON problem files.

All values are integer numerators over a single granularity, so files are
exact by construction; decimal rendering happens only in human-facing output.
Triples are given by built-in name or as explicit operator tables, and sigma
uses 1-based indices into the triple list.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import List, Sequence, Union

from .algebra import (
    AdjointTriple,
    BUILTIN_TRIPLE_NAMES,
    Frame,
    GranularLattice,
    builtin_triple,
)
from .dual import DualFreInstance
from .errors import MafreError
from .fre import FreInstance


class ProblemFileError(MafreError):
    """The problem file is malformed."""


@dataclass
class ProblemFile:
    """Parsed problem description, convertible to a solver instance."""

    granularity: int
    triples: list  # names (str) or dicts with explicit tables
    orientation: str  # "primal" | "dual"
    rows: List[str]
    variables: List[str]
    columns: List[str]
    coefficients: List[List[int]]
    sigma: List[int]  # 1-based triple index per variable
    rhs: List[List[int]]

    def frame(self) -> Frame:
        lattice = GranularLattice(self.granularity)
        built = []
        for spec in self.triples:
            if isinstance(spec, str):
                built.append(builtin_triple(spec, self.granularity))
            else:
                built.append(
                    AdjointTriple(
                        spec.get("name", "custom"),
                        self.granularity,
                        spec["conj"],
                        spec["left_residuum"],
                        spec["right_residuum"],
                    )
                )
        return Frame(lattice, built)

    def to_instance(self) -> Union[FreInstance, DualFreInstance]:
        frame = self.frame()
        sigma0 = [i - 1 for i in self.sigma]
        cls = FreInstance if self.orientation == "primal" else DualFreInstance
        return cls.from_numerators(
            frame,
            self.rows,
            self.variables,
            self.columns,
            self.coefficients,
            sigma0,
            self.rhs,
        )

    def to_json(self) -> dict:
        return {
            "granularity": self.granularity,
            "triples": self.triples,
            "orientation": self.orientation,
            "rows": list(self.rows),
            "variables": list(self.variables),
            "columns": list(self.columns),
            "coefficients": [list(r) for r in self.coefficients],
            "sigma": list(self.sigma),
            "rhs": [list(r) for r in self.rhs],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def _expect(cond, message):
    if not cond:
        raise ProblemFileError(message)


def _int_matrix(data, n_rows, n_cols, n, what):
    _expect(isinstance(data, list) and len(data) == n_rows, f"{what} must have {n_rows} rows")
    for row in data:
        _expect(isinstance(row, list) and len(row) == n_cols, f"{what} rows must have {n_cols} entries")
        for v in row:
            _expect(isinstance(v, int) and not isinstance(v, bool), f"{what} entries must be integers")
            _expect(0 <= v <= n, f"{what} entry {v} outside [0, {n}]")
    return [list(row) for row in data]


def parse_problem(data: dict) -> ProblemFile:
    """Validate a decoded JSON object and build a ProblemFile."""
    _expect(isinstance(data, dict), "problem file must be a JSON object")
    n = data.get("granularity")
    _expect(isinstance(n, int) and n >= 1, "granularity must be an integer >= 1")
    triples = data.get("triples")
    _expect(isinstance(triples, list) and triples, "triples must be a non-empty list")
    for spec in triples:
        if isinstance(spec, str):
            _expect(
                spec in BUILTIN_TRIPLE_NAMES,
                f"unknown built-in triple {spec!r}; choose from {BUILTIN_TRIPLE_NAMES}",
            )
        else:
            _expect(isinstance(spec, dict), "each triple must be a name or a table object")
            for key in ("conj", "left_residuum", "right_residuum"):
                _expect(key in spec, f"custom triple missing {key!r} table")
                _int_matrix(spec[key], n + 1, n + 1, n, key)
    orientation = data.get("orientation", "primal")
    _expect(orientation in ("primal", "dual"), "orientation must be 'primal' or 'dual'")
    names = {}
    for key in ("rows", "variables", "columns"):
        value = data.get(key)
        _expect(
            isinstance(value, list) and value and all(isinstance(x, str) for x in value),
            f"{key} must be a non-empty list of names",
        )
        _expect(len(set(value)) == len(value), f"{key} contains duplicates")
        names[key] = value
    sigma = data.get("sigma")
    _expect(
        isinstance(sigma, list) and len(sigma) == len(names["variables"]),
        "sigma must list one triple index per variable",
    )
    for i in sigma:
        _expect(isinstance(i, int) and 1 <= i <= len(triples), f"sigma index {i} outside 1..{len(triples)}")
    if orientation == "primal":
        coeff = _int_matrix(
            data.get("coefficients"), len(names["rows"]), len(names["variables"]), n, "coefficients"
        )
    else:
        coeff = _int_matrix(
            data.get("coefficients"), len(names["variables"]), len(names["columns"]), n, "coefficients"
        )
    rhs = _int_matrix(data.get("rhs"), len(names["rows"]), len(names["columns"]), n, "rhs")
    return ProblemFile(
        granularity=n,
        triples=triples,
        orientation=orientation,
        rows=names["rows"],
        variables=names["variables"],
        columns=names["columns"],
        coefficients=coeff,
        sigma=sigma,
        rhs=rhs,
    )


def load_problem(path) -> ProblemFile:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ProblemFileError(f"cannot read {path}: {exc}") from exc
    return parse_problem(data)


def problem_from_instance(instance, triples=None) -> ProblemFile:
    """Serialize a solver instance back to a ProblemFile.

    ``triples`` may override the triple specs (names or tables); by default
    built-in triples serialize by name and others by explicit tables.
    """
    if triples is None:
        triples = []
        for t in instance.frame.triples:
            if t.name in BUILTIN_TRIPLE_NAMES:
                triples.append(t.name)
            else:
                triples.append(
                    {
                        "name": t.name,
                        "conj": [list(r) for r in t.conj_table],
                        "left_residuum": [list(r) for r in t.left_residuum_table],
                        "right_residuum": [list(r) for r in t.right_residuum_table],
                    }
                )
    orientation = "primal" if isinstance(instance, FreInstance) else "dual"
    return ProblemFile(
        granularity=instance.frame.granularity,
        triples=triples,
        orientation=orientation,
        rows=list(instance.row_names),
        variables=list(instance.var_names),
        columns=list(instance.col_names),
        coefficients=[[v.numerator for v in row] for row in instance.coeff],
        sigma=[i + 1 for i in instance.sigma],
        rhs=[[v.numerator for v in row] for row in instance.rhs],
    )
