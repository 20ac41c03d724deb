"""Contexts, the isotone Galois connection and property-oriented concept lattices.

The possibility/necessity operators and the lattice construction work in
numerator space: every adjoint triple is compiled to integer lookup tables, so
batched numpy evaluation stays exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .algebra import Frame, GranularValue
from .errors import (
    DimensionError,
    ExtentDivergenceError,
    GranularityMismatchError,
    IndexMismatchError,
    NotAnExtentError,
    RangeError,
)


@dataclass(frozen=True)
class FuzzySet:
    """A fuzzy subset over a finite index set, ordered componentwise."""

    index_set: tuple
    values: tuple

    def __post_init__(self):
        if len(self.index_set) != len(self.values):
            raise IndexMismatchError(
                f"{len(self.values)} values for {len(self.index_set)} elements"
            )

    @classmethod
    def from_numerators(cls, index_set, numerators, n) -> "FuzzySet":
        return cls(
            tuple(index_set), tuple(GranularValue(int(k), n) for k in numerators)
        )

    @property
    def numerators(self) -> tuple:
        return tuple(v.numerator for v in self.values)

    def __call__(self, name) -> GranularValue:
        return self.values[self.index_set.index(name)]

    def leq(self, other: "FuzzySet") -> bool:
        if self.index_set != other.index_set:
            raise IndexMismatchError("fuzzy sets over different index sets")
        return all(a <= b for a, b in zip(self.values, other.values))

    def __str__(self):
        return "(" + ", ".join(str(v) for v in self.values) + ")"


def _as_value_matrix(rows, n_rows, n_cols, what):
    rows = tuple(tuple(row) for row in rows)
    if len(rows) != n_rows or any(len(r) != n_cols for r in rows):
        raise DimensionError(f"{what} must be {n_rows}x{n_cols}")
    return rows


class Context:
    """A multi-adjoint context (A, B, R, sigma).

    ``relation[a][b]`` holds R(a, b); ``sigma`` assigns a 0-based triple index
    to every (a, b) cell and may be given either per cell (matrix) or per
    object (flat sequence of length |B|, replicated across rows).
    """

    def __init__(self, frame: Frame, attributes, objects, relation, sigma):
        self.frame = frame
        self.attributes = tuple(attributes)
        self.objects = tuple(objects)
        if not self.attributes or not self.objects:
            raise DimensionError("attributes and objects must be non-empty")
        na, nb = len(self.attributes), len(self.objects)
        self.relation = _as_value_matrix(relation, na, nb, "relation")
        n = frame.granularity
        for row in self.relation:
            for v in row:
                if v.granularity != n:
                    raise GranularityMismatchError(
                        f"relation value {v} on a [0,1]_{n} frame"
                    )
        sigma = tuple(sigma)
        if sigma and not isinstance(sigma[0], (tuple, list)):
            if len(sigma) != nb:
                raise DimensionError("per-object sigma must have one entry per object")
            sigma = tuple(sigma for _ in range(na))
        self.sigma = _as_value_matrix(sigma, na, nb, "sigma")
        for row in self.sigma:
            for i in row:
                if not 0 <= i < len(frame.triples):
                    raise RangeError(f"sigma index {i} outside triple list")
        self._compiled = None
        self._lattice = None

    # -- compiled numerator-space view -------------------------------------

    def _arrays(self):
        if self._compiled is None:
            f = self.frame
            self._compiled = {
                "R": np.array(
                    [[v.numerator for v in row] for row in self.relation], dtype=np.int64
                ),
                "SIG": np.array(self.sigma, dtype=np.int64),
                "CT": np.array([t.conj_table for t in f.triples], dtype=np.int64),
                "RT": np.array(
                    [t.right_residuum_table for t in f.triples], dtype=np.int64
                ),
            }
        return self._compiled

    def possibility_batch(self, G: np.ndarray) -> np.ndarray:
        """Map a (k, |B|) array of object-set numerators to (k, |A|) intents."""
        arr = self._arrays()
        R, SIG, CT = arr["R"], arr["SIG"], arr["CT"]
        out = np.empty((G.shape[0], len(self.attributes)), dtype=np.int64)
        for a in range(len(self.attributes)):
            vals = CT[SIG[a][None, :], R[a][None, :], G]
            out[:, a] = vals.max(axis=1)
        return out

    def necessity_batch(self, F: np.ndarray) -> np.ndarray:
        """Map a (k, |A|) array of attribute-set numerators to (k, |B|) extents."""
        arr = self._arrays()
        R, SIG, RT = arr["R"], arr["SIG"], arr["RT"]
        out = np.empty((F.shape[0], len(self.objects)), dtype=np.int64)
        for b in range(len(self.objects)):
            vals = RT[SIG[:, b][None, :], F, R[:, b][None, :]]
            out[:, b] = vals.min(axis=1)
        return out

    # -- fuzzy-set level wrappers ------------------------------------------

    def _object_set(self, nums) -> FuzzySet:
        return FuzzySet.from_numerators(self.objects, nums, self.frame.granularity)

    def _attribute_set(self, nums) -> FuzzySet:
        return FuzzySet.from_numerators(self.attributes, nums, self.frame.granularity)


def possibility(g: FuzzySet, ctx: Context) -> FuzzySet:
    """g^up: the componentwise sup of conjunctions R(a, b) & g(b)."""
    if g.index_set != ctx.objects:
        raise IndexMismatchError("argument must be indexed by the context objects")
    row = np.array([g.numerators], dtype=np.int64)
    return ctx._attribute_set(ctx.possibility_batch(row)[0])


def necessity(f: FuzzySet, ctx: Context) -> FuzzySet:
    """f^down: the componentwise inf of residuations f(a) <- R(a, b)."""
    if f.index_set != ctx.attributes:
        raise IndexMismatchError("argument must be indexed by the context attributes")
    row = np.array([f.numerators], dtype=np.int64)
    return ctx._object_set(ctx.necessity_batch(row)[0])


def object_closure(g: FuzzySet, ctx: Context) -> FuzzySet:
    """The closure operator on object sets (inflationary, idempotent, isotone)."""
    return necessity(possibility(g, ctx), ctx)


def attribute_interior(f: FuzzySet, ctx: Context) -> FuzzySet:
    """The interior operator on attribute sets (deflationary, idempotent, isotone)."""
    return possibility(necessity(f, ctx), ctx)


@dataclass(frozen=True)
class Concept:
    """A fixpoint pair (extent, intent) of the Galois connection."""

    extent: FuzzySet
    intent: FuzzySet


def exhaustive_intents(ctx: Context) -> np.ndarray:
    """All distinct intents, found by closing every fuzzy object set.

    Cost is (n+1)^|B| batched evaluations; fine at desk scale, replaceable by
    a smarter generator through ``build_concept_lattice(strategy=...)``.
    """
    n = ctx.frame.granularity
    nb = len(ctx.objects)
    total = (n + 1) ** nb
    chunk = 200_000
    seen = []
    grids = [np.arange(n + 1, dtype=np.int64)] * nb
    G = (
        np.stack(np.meshgrid(*grids, indexing="ij"), axis=-1).reshape(total, nb)
        if total <= chunk
        else None
    )
    if G is not None:
        seen.append(np.unique(ctx.possibility_batch(G), axis=0))
    else:
        start = 0
        while start < total:
            stop = min(start + chunk, total)
            idx = np.arange(start, stop, dtype=np.int64)
            block = np.empty((stop - start, nb), dtype=np.int64)
            rem = idx
            for b in range(nb - 1, -1, -1):
                block[:, b] = rem % (n + 1)
                rem = rem // (n + 1)
            seen.append(np.unique(ctx.possibility_batch(block), axis=0))
            start = stop
    return np.unique(np.concatenate(seen, axis=0), axis=0)


class ConceptLattice:
    """The complete lattice of concepts, with order and cover (Hasse) relation.

    Concepts are sorted lexicographically by extent numerators, so the result
    is deterministic regardless of how candidates were generated.
    """

    def __init__(self, context: Context, extent_rows: np.ndarray):
        extent_rows = np.unique(extent_rows, axis=0)
        intents = context.possibility_batch(extent_rows)
        self.context = context
        n = context.frame.granularity
        self.concepts = tuple(
            Concept(
                FuzzySet.from_numerators(context.objects, e, n),
                FuzzySet.from_numerators(context.attributes, f, n),
            )
            for e, f in zip(extent_rows, intents)
        )
        self._extent_rows = extent_rows
        self._index = {tuple(map(int, e)): i for i, e in enumerate(extent_rows)}
        less = (extent_rows[:, None, :] <= extent_rows[None, :, :]).all(axis=2)
        np.fill_diagonal(less, False)
        reach2 = (less.astype(np.int64) @ less.astype(np.int64)) > 0
        self.leq = less | np.eye(len(extent_rows), dtype=bool)
        self._covers = less & ~reach2  # covers[i, j]: i is covered by j

    def __len__(self):
        return len(self.concepts)

    def __iter__(self):
        return iter(self.concepts)

    def extent_set(self) -> frozenset:
        return frozenset(self._index)

    def extents(self):
        return [c.extent for c in self.concepts]

    def index_of(self, extent: FuzzySet) -> int:
        key = tuple(extent.numerators)
        if key not in self._index:
            raise NotAnExtentError(f"{extent} is not an extent of this lattice")
        return self._index[key]

    def covers(self):
        """All cover pairs (lower, upper) as concept indices."""
        i, j = np.nonzero(self._covers)
        return list(zip(i.tolist(), j.tolist()))

    def predecessors_of(self, extent: FuzzySet):
        """Extents directly covered by ``extent``."""
        j = self.index_of(extent)
        below = np.nonzero(self._covers[:, j])[0]
        return [self.concepts[i].extent for i in below]


def build_concept_lattice(
    ctx: Context,
    strategy: Optional[Callable[[Context], np.ndarray]] = None,
) -> ConceptLattice:
    """Build the full concept lattice of a finite context.

    ``strategy`` may supply the candidate intents as a (k, |A|) numerator
    array (it must cover every intent); by default every fuzzy object set is
    closed exhaustively.
    """
    if ctx._lattice is None or strategy is not None:
        intents = exhaustive_intents(ctx) if strategy is None else strategy(ctx)
        extents = ctx.necessity_batch(np.asarray(intents, dtype=np.int64))
        lat = ConceptLattice(ctx, extents)
        if strategy is not None:
            return lat
        ctx._lattice = lat
    return ctx._lattice


def predecessors(lat: ConceptLattice, e: FuzzySet):
    """The set of extents immediately below ``e`` in the lattice."""
    return lat.predecessors_of(e)


def restrict(ctx: Context, attributes: Iterable) -> Context:
    """The context limited to a subset of attributes, keeping input order."""
    wanted = set(attributes)
    unknown = wanted - set(ctx.attributes)
    if unknown:
        raise IndexMismatchError(f"unknown attributes: {sorted(unknown)}")
    keep = [i for i, a in enumerate(ctx.attributes) if a in wanted]
    if not keep:
        raise DimensionError("cannot restrict to an empty attribute set")
    return Context(
        ctx.frame,
        [ctx.attributes[i] for i in keep],
        ctx.objects,
        [ctx.relation[i] for i in keep],
        [ctx.sigma[i] for i in keep],
    )


def _extent_set(ctx: Context) -> frozenset:
    return build_concept_lattice(ctx).extent_set()


def is_consistent(ctx: Context, Y: Iterable, *, full_extents=None) -> bool:
    """True when restricting to Y preserves the extent set of the lattice.

    The primary test is containment of the full extent set in the restricted
    one; the reverse containment is then asserted and a divergence raises
    ``ExtentDivergenceError`` instead of being silently assumed.
    """
    Y = tuple(Y)
    if full_extents is None:
        full_extents = _extent_set(ctx)
    if set(Y) == set(ctx.attributes):
        return True
    if not Y:
        top = tuple(ctx.frame.granularity for _ in ctx.objects)
        return full_extents == frozenset({top})
    restricted = _extent_set(restrict(ctx, Y))
    consistent = full_extents <= restricted
    if consistent and restricted != full_extents:
        raise ExtentDivergenceError(
            f"restriction to {Y} contains every original extent but has "
            f"{len(restricted - full_extents)} extra extents"
        )
    return consistent


def enumerate_reducts(ctx: Context):
    """All minimal consistent attribute subsets, in lexicographic index order.

    Definition-level search: consistency of every subset is decided from the
    restricted lattice, and minimality re-checks each one-element removal.
    """
    full_extents = _extent_set(ctx)
    cache = {}

    def consistent(Y: tuple) -> bool:
        if Y not in cache:
            cache[Y] = is_consistent(ctx, Y, full_extents=full_extents)
        return cache[Y]

    names = ctx.attributes
    reducts = []
    for size in range(1, len(names) + 1):
        for idxs in combinations(range(len(names)), size):
            Y = tuple(names[i] for i in idxs)
            if consistent(Y) and all(
                not consistent(tuple(a for a in Y if a != drop)) for drop in Y
            ):
                reducts.append(Y)
    return reducts


def lattice_to_dot(
    lat: ConceptLattice, *, include_intents: bool = False, name: str = "concept_lattice"
) -> str:
    """Render the Hasse diagram as DOT, drawn bottom-up.

    Nodes are labeled with extent numerator tuples (plus intents on request).
    """
    lines = [f"digraph {name} {{", "  rankdir=BT;", "  node [shape=box];"]
    for i, c in enumerate(lat.concepts):
        label = str(c.extent.numerators)
        if include_intents:
            label += f"\\n{c.intent.numerators}"
        lines.append(f'  c{i} [label="{label}"];')
    for i, j in lat.covers():
        lines.append(f"  c{i} -> c{j};")
    lines.append("}")
    return "\n".join(lines)
