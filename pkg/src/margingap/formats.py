"""Text formats: model files, matrix exchange, margins, bases, reports.

Model files are JSON with 1-based facet indices.  Matrices use a plain
exchange format (header "rows cols", then integer rows) shared with
common algebraic-statistics tools.  Margin vectors are one integer per
line.  Bases serialize one element per line in sparse index:value form,
leading entries first.  Reports render as JSON with exact rationals as
"p/q" strings.
"""

from __future__ import annotations

import json
from dataclasses import fields, is_dataclass
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .errors import FormatError
from .linalg import LatticeElement
from .models import HierarchicalModel, build_complex
from .rationals import QQ, format_q
from .toric import BasisSet, OrientedBinomial, TermOrder

_MPQ_TYPES = (type(QQ(1)), Fraction)
_BASIS_KINDS = ("graver", "reduced_groebner")


def save_model(model: HierarchicalModel, path) -> None:
    data = {
        "n": model.n_vars,
        "levels": list(model.levels),
        "facets": [[v + 1 for v in f] for f in model.complex.facets],
    }
    Path(path).write_text(json.dumps(data, indent=2) + "\n")


def load_model(path) -> HierarchicalModel:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise FormatError(f"cannot read model file {path}: {exc}") from exc
    try:
        n = int(data["n"])
        levels = tuple(int(d) for d in data["levels"])
        facets = [[int(v) - 1 for v in f] for f in data["facets"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed model file {path}: {exc}") from exc
    if any(v < 0 or v >= n for f in facets for v in f):
        raise FormatError(f"facet index out of range in {path} (1-based, 1..{n})")
    try:
        return HierarchicalModel(build_complex(facets, n), levels)
    except ValueError as exc:
        raise FormatError(f"inconsistent model in {path}: {exc}") from exc


def save_matrix(A, path) -> None:
    from .models import as_rows

    rows = as_rows(A)
    n_cols = len(rows[0]) if rows else 0
    lines = [f"{len(rows)} {n_cols}"]
    lines += [" ".join(str(x) for x in row) for row in rows]
    Path(path).write_text("\n".join(lines) + "\n")


def load_matrix(path) -> tuple[tuple[int, ...], ...]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise FormatError(f"cannot read matrix file {path}: {exc}") from exc
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise FormatError(f"matrix file {path} is empty")
    try:
        n_rows, n_cols = (int(t) for t in lines[0].split())
    except ValueError as exc:
        raise FormatError(f"bad matrix header in {path}: {lines[0]!r}") from exc
    if len(lines) - 1 != n_rows:
        raise FormatError(f"{path}: expected {n_rows} rows, found {len(lines) - 1}")
    rows = []
    for ln in lines[1:]:
        try:
            row = tuple(int(t) for t in ln.split())
        except ValueError as exc:
            raise FormatError(f"non-integer matrix entry in {path}: {ln!r}") from exc
        if len(row) != n_cols:
            raise FormatError(f"{path}: row width {len(row)} != {n_cols}")
        rows.append(row)
    return tuple(rows)


def save_margin(b: Sequence[int], path) -> None:
    Path(path).write_text("\n".join(str(int(x)) for x in b) + "\n")


def load_margin(path) -> tuple[int, ...]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise FormatError(f"cannot read margin file {path}: {exc}") from exc
    out = []
    for ln in text.splitlines():
        if not ln.strip():
            continue
        try:
            out.append(int(ln.strip()))
        except ValueError as exc:
            raise FormatError(f"non-integer margin entry in {path}: {ln!r}") from exc
    if not out:
        raise FormatError(f"margin file {path} is empty")
    return tuple(out)


def _element_line(element: OrientedBinomial) -> str:
    lead = [(j, x) for j, x in enumerate(element.vector) if x > 0]
    trail = [(j, x) for j, x in enumerate(element.vector) if x < 0]
    return " ".join(f"{j}:{x}" for j, x in lead + trail)


def save_basis(basis: BasisSet, path) -> None:
    n_cols = len(basis.elements[0].vector) if basis.elements else 0
    lines = [f"{basis.kind} {n_cols} {basis.matrix_fingerprint}"]
    lines += [_element_line(e) for e in basis.elements]
    Path(path).write_text("\n".join(lines) + "\n")


def basis_text(basis: BasisSet) -> str:
    n_cols = len(basis.elements[0].vector) if basis.elements else 0
    lines = [f"{basis.kind} {n_cols} {basis.matrix_fingerprint}"]
    lines += [_element_line(e) for e in basis.elements]
    return "\n".join(lines) + "\n"


def load_basis(path) -> BasisSet:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise FormatError(f"cannot read basis file {path}: {exc}") from exc
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise FormatError(f"basis file {path} is empty")
    head = lines[0].split()
    if len(head) != 3 or head[0] not in _BASIS_KINDS:
        raise FormatError(f"bad basis header in {path}: {lines[0]!r}")
    kind, fingerprint = head[0], head[2]
    try:
        n_cols = int(head[1])
    except ValueError as exc:
        raise FormatError(f"bad column count in {path}: {head[1]!r}") from exc
    elements = []
    for ln in lines[1:]:
        vec = [0] * n_cols
        for token in ln.split():
            try:
                j, x = token.split(":")
                j, x = int(j), int(x)
            except ValueError as exc:
                raise FormatError(f"bad basis token {token!r} in {path}") from exc
            if not 0 <= j < n_cols:
                raise FormatError(f"basis index {j} out of range in {path}")
            if x == 0 or vec[j]:
                raise FormatError(f"zero or repeated entry {token!r} in {path}")
            vec[j] = x
        if not any(vec):
            raise FormatError(f"empty basis element in {path}")
        elements.append(OrientedBinomial(LatticeElement(tuple(vec))))
    order = TermOrder.first_cell(n_cols) if kind == "reduced_groebner" else None
    return BasisSet(kind, tuple(elements), fingerprint, order)


def to_jsonable(obj):
    """Recursive conversion to JSON-serializable values, rationals as p/q."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, _MPQ_TYPES):
        return format_q(obj)
    if isinstance(obj, LatticeElement):
        return list(obj.vector)
    if is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in fields(obj)}
    if isinstance(obj, (set, frozenset)):
        return [to_jsonable(x) for x in sorted(obj)]
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(x) for x in obj]
    return str(obj)


def render_report(obj) -> str:
    return json.dumps(to_jsonable(obj), indent=2) + "\n"
