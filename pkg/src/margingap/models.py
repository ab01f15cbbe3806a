"""Hierarchical interaction models and their margin matrices.

A model is a simplicial complex on variables 1..n together with a level
count per variable (2 everywhere in the named families).  Releasing the
margins listed by the complex's facets turns a table u into b = A u where
A is the 0/1 margin matrix: one row per (facet, assignment to the facet's
variables), one column per cell, entry 1 iff the cell restricted to the
facet equals the assignment.

Conventions, fixed once and used everywhere:

* cells are tuples over {0..d_j-1}, ordered lexicographically (last
  coordinate fastest), so the all-zero cell is always column 0;
* facets are sorted tuples of 1-based variables, listed in lexicographic
  order, and assignments enumerate lexicographically inside each facet;
* the Lawrence lift doubles the columns with the copy bit outermost: the
  first N columns are the (col|0)'s, the second N the (col|1)'s.

The named families: ``B`` has ground set [n-2] and all (n-3)-subsets as
facets; ``Gamma`` adds the lone facet {n-1}; ``Delta`` is the logit of
``Gamma`` and is, up to row/column relabeling, the Lawrence lift of
``Gamma``'s margin matrix; ``graph-edges`` releases all two-way margins.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from .errors import FormatError

Matrix = tuple[tuple[int, ...], ...]
Vector = tuple[int, ...]


@dataclass(frozen=True)
class SimplicialComplex:
    """Facet list of a simplicial complex on ground set {1..ground_size}."""

    ground_size: int
    facets: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.ground_size < 1:
            raise ValueError("ground set must be nonempty")
        if not self.facets:
            raise ValueError("at least one facet is required")
        for f in self.facets:
            if not f or any(v < 1 or v > self.ground_size for v in f):
                raise ValueError(f"facet {f} out of range for ground set [{self.ground_size}]")
            if tuple(sorted(set(f))) != f:
                raise ValueError(f"facet {f} is not a sorted duplicate-free tuple")
        for f, g in itertools.combinations(self.facets, 2):
            if set(f) <= set(g) or set(g) <= set(f):
                raise ValueError(f"facets {f} and {g} are nested; list only inclusion-maximal faces")
        if self.facets != tuple(sorted(self.facets)):
            raise ValueError("facets must be listed in lexicographic order")


def build_complex(facets: Iterable[Iterable[int]], ground_size: int) -> SimplicialComplex:
    """Normalize arbitrary face input: dedupe, drop dominated faces, sort."""
    cleaned = {tuple(sorted(set(int(v) for v in f))) for f in facets}
    cleaned.discard(())
    maximal = [f for f in cleaned if not any(f != g and set(f) <= set(g) for g in cleaned)]
    return SimplicialComplex(ground_size=ground_size, facets=tuple(sorted(maximal)))


@dataclass(frozen=True)
class HierarchicalModel:
    complex: SimplicialComplex
    levels: tuple[int, ...]

    def __post_init__(self):
        if len(self.levels) != self.complex.ground_size:
            raise ValueError("levels length must equal the ground set size")
        if any(d < 2 for d in self.levels):
            raise ValueError("every variable needs at least two levels")

    @property
    def n_vars(self) -> int:
        return self.complex.ground_size

    @property
    def n_cells(self) -> int:
        out = 1
        for d in self.levels:
            out *= d
        return out

    @property
    def is_binary(self) -> bool:
        return all(d == 2 for d in self.levels)


def binary_model(complex: SimplicialComplex) -> HierarchicalModel:
    return HierarchicalModel(complex, (2,) * complex.ground_size)


@dataclass(frozen=True)
class CellIndex:
    """A cell with its position in the lexicographic column order."""

    coordinates: tuple[int, ...]
    rank: int


def cells(levels: Sequence[int]) -> list[tuple[int, ...]]:
    """All cells in lexicographic order (last coordinate fastest)."""
    return [tuple(c) for c in itertools.product(*(range(d) for d in levels))]


def cell_rank(coords: Sequence[int], levels: Sequence[int]) -> int:
    r = 0
    for c, d in zip(coords, levels):
        if not 0 <= c < d:
            raise ValueError(f"coordinate {c} out of range for level {d}")
        r = r * d + c
    return r


def cell_unrank(rank: int, levels: Sequence[int]) -> tuple[int, ...]:
    out = []
    for d in reversed(levels):
        out.append(rank % d)
        rank //= d
    if rank:
        raise ValueError("rank out of range")
    return tuple(reversed(out))


def cell_indices(levels: Sequence[int]) -> tuple[CellIndex, ...]:
    return tuple(CellIndex(c, i) for i, c in enumerate(cells(levels)))


@dataclass(frozen=True)
class MarginMatrix:
    """Integer matrix plus row/column labels.

    Margin matrices label columns with CellIndex and rows with
    (facet, assignment).  Derived matrices (Lawrence lifts, the block
    presentations below) use plain tuples; only the entries take part in
    arithmetic.
    """

    entries: Matrix
    row_labels: tuple[object, ...]
    col_labels: tuple[object, ...]

    def __post_init__(self):
        if len(self.entries) != len(self.row_labels):
            raise ValueError("row label count mismatch")
        if any(len(r) != len(self.col_labels) for r in self.entries):
            raise ValueError("ragged rows or column label count mismatch")

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.entries), len(self.col_labels))

    @cached_property
    def column_of(self) -> dict:
        """Map column label coordinates to column index."""
        return {label_coords(lab): j for j, lab in enumerate(self.col_labels)}


def label_coords(label) -> tuple:
    return label.coordinates if isinstance(label, CellIndex) else tuple(label)


def as_rows(A) -> Matrix:
    """Accept a MarginMatrix or a raw row tuple/list and return raw rows."""
    if isinstance(A, MarginMatrix):
        return A.entries
    return tuple(tuple(int(x) for x in row) for row in A)


def margin_matrix(model: HierarchicalModel) -> MarginMatrix:
    """0/1 margin matrix of a hierarchical model, canonical ordering."""
    all_cells = cells(model.levels)
    rows = []
    row_labels = []
    for facet in model.complex.facets:
        positions = [v - 1 for v in facet]
        for assignment in itertools.product(*(range(model.levels[p]) for p in positions)):
            rows.append(tuple(1 if all(cell[p] == a for p, a in zip(positions, assignment)) else 0
                              for cell in all_cells))
            row_labels.append((facet, assignment))
    return MarginMatrix(
        entries=tuple(rows),
        row_labels=tuple(row_labels),
        col_labels=cell_indices(model.levels),
    )


def margins_of(A, u: Sequence[int]) -> Vector:
    """Exact margin vector b = A u."""
    rows = as_rows(A)
    if rows and len(u) != len(rows[0]):
        raise ValueError(f"table length {len(u)} does not match {len(rows[0])} columns")
    return tuple(sum(a * x for a, x in zip(row, u)) for row in rows)


def logit(model: HierarchicalModel) -> HierarchicalModel:
    """Adjoin a response variable: join every facet with it, keep the full
    old ground set as one face, and normalize."""
    m = model.complex.ground_size
    faces = [f + (m + 1,) for f in model.complex.facets]
    faces.append(tuple(range(1, m + 1)))
    return HierarchicalModel(build_complex(faces, m + 1), model.levels + (2,))


def lawrence_lift(A) -> MarginMatrix:
    """Block matrix [[A,0],[0,A],[I,I]] with labeled rows and columns.

    Column j of A yields columns (col_j|0) and (col_j|1); the copy bit is
    outermost, so the lifted kernel consists of the vectors (g, -g).
    """
    if isinstance(A, MarginMatrix):
        rows = A.entries
        col_coords = [label_coords(lab) for lab in A.col_labels]
        row_ids = list(A.row_labels)
    else:
        rows = as_rows(A)
        col_coords = [(j,) for j in range(len(rows[0]) if rows else 0)]
        row_ids = list(range(len(rows)))
    n_cols = len(col_coords)
    zero = (0,) * n_cols
    lifted_rows = [row + zero for row in rows] + [zero + row for row in rows]
    row_labels = [(0, rid) for rid in row_ids] + [(1, rid) for rid in row_ids]
    for j in range(n_cols):
        e = tuple(1 if k == j else 0 for k in range(n_cols))
        lifted_rows.append(e + e)
        row_labels.append(("pair", col_coords[j]))
    col_labels = [c + (0,) for c in col_coords] + [c + (1,) for c in col_coords]
    return MarginMatrix(tuple(lifted_rows), tuple(row_labels), tuple(col_labels))


def column_submatrix(A, columns: Sequence[int]) -> Matrix:
    rows = as_rows(A)
    return tuple(tuple(row[j] for j in columns) for row in rows)


_FAMILIES = ("B", "Gamma", "Delta", "graph-edges")


def build_named_model(name: str, n: int) -> HierarchicalModel:
    """Construct one of the named binary families on n variables."""
    key = name.strip().lower().replace("_", "-")
    if key == "b":
        if n < 4:
            raise ValueError("family B needs n >= 4")
        m = n - 2
        facets = itertools.combinations(range(1, m + 1), m - 1)
        return binary_model(build_complex(facets, m))
    if key == "gamma":
        if n < 4:
            raise ValueError("family Gamma needs n >= 4")
        inner = build_named_model("B", n)
        facets = list(inner.complex.facets) + [(n - 1,)]
        return binary_model(build_complex(facets, n - 1))
    if key == "delta":
        if n < 4:
            raise ValueError("family Delta needs n >= 4")
        return logit(build_named_model("Gamma", n))
    if key == "graph-edges":
        if n < 3:
            raise ValueError("family graph-edges needs n >= 3")
        return binary_model(build_complex(itertools.combinations(range(1, n + 1), 2), n))
    raise FormatError(f"unknown family {name!r}; choose from {_FAMILIES}")


def gamma_block_matrix(n: int) -> MarginMatrix:
    """Margin matrix of Gamma_n in the block column order.

    Columns are labeled (i, l) with i over cells of [n-2] and the last
    variable l outermost, giving the literal block shape
    [[A(B_n), A(B_n)], [1...1, 0...0], [0...0, 1...1]].  This is the
    lexicographic margin_matrix(Gamma_n) with its columns regrouped.
    """
    inner = margin_matrix(build_named_model("B", n))
    m_rows, m_cols = inner.shape
    rows = [row + row for row in inner.entries]
    row_labels = list(inner.row_labels)
    ones, zeros = (1,) * m_cols, (0,) * m_cols
    rows.append(ones + zeros)
    rows.append(zeros + ones)
    row_labels.append(((n - 1,), (0,)))
    row_labels.append(((n - 1,), (1,)))
    col_labels = [label_coords(c) + (l,) for l in (0, 1) for c in inner.col_labels]
    return MarginMatrix(tuple(rows), tuple(row_labels), tuple(col_labels))


def delta_block_matrix(n: int) -> MarginMatrix:
    """Lawrence lift of the block-ordered Gamma_n margin matrix.

    Columns are labeled (i, l, l') with the copy bit l' outermost; the
    all-zero cell (0|0|0) is column 0, so the first-cell cost vector is
    e_0.  Same matrix as margin_matrix(Delta_n) up to row and column
    relabeling.
    """
    return lawrence_lift(gamma_block_matrix(n))
