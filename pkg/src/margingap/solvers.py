"""Exact linear and integer programming over fibers {x >= 0 : A x = b}.

The LP path is a two-phase primal simplex on exact rationals with Bland's
least-index rule in both phases, so every run of the same instance walks
the same pivot sequence.  The IP path is depth-first branch and bound on
top of that LP, branching on the lowest-index fractional coordinate with
the floor branch explored first.  Fibers of interest are bounded (the
matrices are nonnegative with no zero column), which keeps both finite.

Redundant rows are common here (margin matrices are far from full row
rank), so the solvers select a maximal independent row set once per
matrix and replay cheap consistency checks of the dropped rows against
each right-hand side.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .errors import BudgetExceededError
from .models import as_rows, margins_of
from .rationals import QQ, ceil_q, is_integral

Matrix = tuple[tuple[int, ...], ...]

FEASIBLE = "feasible"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LPResult:
    status: str
    value: object | None
    solution: tuple | None


@dataclass(frozen=True)
class IPResult:
    status: str
    value: int | None
    solution: tuple[int, ...] | None
    nodes: int = 0


@dataclass(frozen=True)
class GapReport:
    lp: LPResult
    ip: IPResult
    gap: object | None


@dataclass(frozen=True)
class CellBounds:
    status: str
    lp_min: object | None
    ip_min: int | None
    ip_max: int | None
    lp_max: object | None


def unit_cost(n: int, j: int = 0) -> tuple[int, ...]:
    return tuple(1 if k == j else 0 for k in range(n))


@lru_cache(maxsize=64)
def _row_reduction(rows: Matrix):
    """Independent row selection plus dependency data for dropped rows.

    Returns (kept, checks): kept row indices span the row space, and each
    check is (dropped_index, ((kept_index, coeff), ...)) expressing the
    dropped row as a combination of kept rows.  A right-hand side b is
    consistent iff b[dropped] equals the same combination of b[kept].
    """
    n = len(rows[0]) if rows else 0
    kept: list[int] = []
    checks = []
    reduced = []  # (pivot_col, row as QQ list, expr: kept_idx -> QQ with row = sum expr*orig)
    for idx, row in enumerate(rows):
        r = [QQ(x) for x in row]
        expr = {idx: QQ(1)}
        for pc, rrow, rexpr in reduced:
            f = r[pc]
            if f:
                r = [a - f * b for a, b in zip(r, rrow)]
                for k, v in rexpr.items():
                    expr[k] = expr.get(k, QQ(0)) - f * v
        pc = next((j for j in range(n) if r[j]), None)
        if pc is None:
            # 0 = orig_idx + sum_{k != idx} expr_k * orig_k
            dep = tuple((k, -v) for k, v in expr.items() if k != idx and v)
            checks.append((idx, dep))
            continue
        inv = 1 / r[pc]
        r = [x * inv for x in r]
        expr = {k: v * inv for k, v in expr.items()}
        reduced.append((pc, r, expr))
        kept.append(idx)
    return tuple(kept), tuple(checks)


def _rhs_consistent(checks, bq) -> bool:
    for idx, dep in checks:
        if bq[idx] != sum(coeff * bq[k] for k, coeff in dep):
            return False
    return True


def _simplex_core(rows: Sequence[Sequence[object]], b: Sequence[object], c: Sequence[object]):
    """Two-phase Bland simplex on min c.x, rows.x = b, x >= 0.

    rows may be rank-deficient; redundant rows are dropped at the end of
    phase one.  Returns (status, value, solution list) in exact scalars.
    """
    m = len(rows)
    n = len(rows[0]) if m else len(c)
    if m == 0:
        if any(QQ(x) < 0 for x in c):
            return UNBOUNDED, None, None
        return FEASIBLE, QQ(0), [QQ(0)] * n
    tab = []
    for i in range(m):
        bi = QQ(b[i])
        row = [QQ(x) for x in rows[i]]
        if bi < 0:
            bi = -bi
            row = [-x for x in row]
        art = [QQ(0)] * m
        art[i] = QQ(1)
        tab.append(row + art + [bi])
    width = n + m + 1
    basis = list(range(n, n + m))
    obj = [QQ(0)] * width
    for j in range(n):
        obj[j] = -sum(t[j] for t in tab)
    obj[-1] = -sum(t[-1] for t in tab)
    alive = [True] * m  # artificial i may enter only while it never left the basis

    def pivot(r: int, enter: int):
        prow = tab[r]
        p = prow[enter]
        if p != 1:
            inv = 1 / p
            tab[r] = prow = [x * inv for x in prow]
        for i in range(len(tab)):
            row = tab[i]
            if row is prow:
                continue
            f = row[enter]
            if f:
                tab[i] = [a - f * pb for a, pb in zip(row, prow)]
        f = obj[enter]
        if f:
            obj[:] = [a - f * pb for a, pb in zip(obj, prow)]
        if basis[r] >= n:
            alive[basis[r] - n] = False
        basis[r] = enter

    def run(candidates) -> str:
        while True:
            enter = -1
            for j in candidates():
                if obj[j] < 0:
                    enter = j
                    break
            if enter < 0:
                return "optimal"
            leave = -1
            best = None
            for i in range(len(tab)):
                a = tab[i][enter]
                if a > 0:
                    ratio = tab[i][-1] / a
                    if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                        best = ratio
                        leave = i
            if leave < 0:
                return "unbounded"
            pivot(leave, enter)

    def phase1_cols():
        yield from range(n)
        for i in range(m):
            if alive[i]:
                yield n + i

    run(phase1_cols)  # bounded below by 0, never "unbounded"
    if obj[-1] != 0:
        return INFEASIBLE, None, None
    drop = []
    for i in range(len(tab)):
        if basis[i] >= n:
            enter = next((j for j in range(n) if tab[i][j]), None)
            if enter is None:
                drop.append(i)  # redundant row; its rhs is zero here
            else:
                pivot(i, enter)
    if drop:
        dropset = set(drop)
        keep = [i for i in range(len(tab)) if i not in dropset]
        tab[:] = [tab[i] for i in keep]
        basis[:] = [basis[i] for i in keep]
    cq = [QQ(x) for x in c]
    obj[:] = cq + [QQ(0)] * (width - n)
    for i in range(len(tab)):
        f = obj[basis[i]]
        if f:
            prow = tab[i]
            obj[:] = [a - f * pb for a, pb in zip(obj, prow)]
    status = run(lambda: range(n))
    if status == "unbounded":
        return UNBOUNDED, None, None
    x = [QQ(0)] * n
    for i in range(len(tab)):
        if basis[i] < n:
            x[basis[i]] = tab[i][-1]
    return FEASIBLE, -obj[-1], x


def solve_lp(A, c: Sequence[object], b: Sequence[object]) -> LPResult:
    """Exact LP min c.x over {x >= 0 : A x = b}."""
    rows = as_rows(A)
    n = len(rows[0]) if rows else 0
    if len(c) != n:
        raise ValueError("cost length does not match column count")
    if len(b) != len(rows):
        raise ValueError("margin length does not match row count")
    kept, checks = _row_reduction(rows)
    bq = [QQ(x) for x in b]
    if not _rhs_consistent(checks, bq):
        return LPResult(INFEASIBLE, None, None)
    status, value, x = _simplex_core([rows[i] for i in kept], [bq[i] for i in kept], c)
    if status != FEASIBLE:
        return LPResult(status, None, None)
    return LPResult(FEASIBLE, value, tuple(x))


def _validate_fiber_matrix(rows: Matrix):
    n = len(rows[0]) if rows else 0
    for row in rows:
        if any(x < 0 for x in row):
            raise ValueError("fiber solvers need a nonnegative matrix")
    for j in range(n):
        if all(row[j] == 0 for row in rows):
            raise ValueError(f"column {j} is zero; fiber would be unbounded")


def _int_vector(c) -> list[int]:
    out = []
    for x in c:
        xi = int(x)
        if xi != x:
            raise ValueError("integer vector required")
        out.append(xi)
    return out


def solve_ip(A, c: Sequence[int], b: Sequence[int], *, node_budget: int = 200000) -> IPResult:
    """Exact IP min c.x over the integer fiber, by LP-based branch and bound.

    Deterministic: depth-first, branch on the lowest-index fractional
    coordinate, floor branch first, first incumbent kept on ties.
    """
    rows = as_rows(A)
    n = len(rows[0]) if rows else 0
    _validate_fiber_matrix(rows)
    cint = _int_vector(c)
    if len(cint) != n:
        raise ValueError("cost length does not match column count")
    bint = _int_vector(b)
    if len(bint) != len(rows):
        raise ValueError("margin length does not match row count")
    if any(x < 0 for x in bint):
        return IPResult(INFEASIBLE, None, None, 0)
    kept, checks = _row_reduction(rows)
    base_rows = [rows[i] for i in kept]
    incumbent_value: int | None = None
    incumbent_x: tuple[int, ...] | None = None
    nodes = 0
    stack: list[tuple[tuple[int, ...], tuple]] = [((0,) * n, (None,) * n)]
    while stack:
        lb, ub = stack.pop()
        nodes += 1
        if nodes > node_budget:
            raise BudgetExceededError(f"branch-and-bound exceeded {node_budget} nodes")
        if any(u is not None and u < l for l, u in zip(lb, ub)):
            continue
        shift = [x - y for x, y in zip(bint, margins_of(rows, lb))]
        if any(x < 0 for x in shift):
            continue
        if not _rhs_consistent(checks, [QQ(x) for x in shift]):
            continue
        bounded = [j for j in range(n) if ub[j] is not None]
        n_ext = n + len(bounded)
        lp_rows = [row + (0,) * len(bounded) for row in base_rows]
        lp_b: list[object] = [shift[i] for i in kept]
        for s, j in enumerate(bounded):
            unit = [0] * n_ext
            unit[j] = 1
            unit[n + s] = 1
            lp_rows.append(tuple(unit))
            lp_b.append(ub[j] - lb[j])
        status, value, y = _simplex_core(lp_rows, lp_b, cint + [0] * len(bounded))
        if status != FEASIBLE:
            continue
        actual = value + sum(ci * li for ci, li in zip(cint, lb))
        if incumbent_value is not None and ceil_q(QQ(actual)) >= incumbent_value:
            continue
        frac = next((j for j in range(n) if not is_integral(y[j])), None)
        if frac is None:
            x = tuple(int(y[j].numerator) + lb[j] for j in range(n))
            val = sum(ci * xi for ci, xi in zip(cint, x))
            if incumbent_value is None or val < incumbent_value:
                incumbent_value = val
                incumbent_x = x
            continue
        xval = y[frac] + lb[frac]
        lo = xval.numerator // xval.denominator
        ub_floor = list(ub)
        ub_floor[frac] = lo
        lb_ceil = list(lb)
        lb_ceil[frac] = lo + 1
        stack.append((tuple(lb_ceil), ub))
        stack.append((lb, tuple(ub_floor)))
    if incumbent_value is None:
        return IPResult(INFEASIBLE, None, None, nodes)
    return IPResult(FEASIBLE, incumbent_value, incumbent_x, nodes)


def _fiber_dfs(rows: Matrix, b: Sequence[int], cap: int, first_only: bool):
    n = len(rows[0]) if rows else 0
    _validate_fiber_matrix(rows)
    bint = _int_vector(b)
    if len(bint) != len(rows):
        raise ValueError("margin length does not match row count")
    if any(x < 0 for x in bint):
        return []
    if n == 0:
        return [] if any(bint) else [()]
    m = len(rows)
    col_support = [[(i, rows[i][j]) for i in range(m) if rows[i][j]] for j in range(n)]
    last_col = [max((j for j in range(n) if row[j]), default=-1) for row in rows]
    finish_rows = [[i for i in range(m) if last_col[i] == j] for j in range(n)]
    out: list[tuple[int, ...]] = []
    resid = list(bint)
    point = [0] * n
    steps = 0
    step_limit = max(cap, 1) * (n + 1) * 4

    def rec(j: int) -> bool:
        nonlocal steps
        steps += 1
        if steps > step_limit:
            raise BudgetExceededError(f"fiber search exceeded its step budget ({step_limit})")
        if j == n:
            if any(resid):
                return False
            out.append(tuple(point))
            if not first_only and len(out) > cap:
                raise BudgetExceededError(f"fiber has more than {cap} points")
            return first_only
        hi = min(resid[i] // a for i, a in col_support[j])
        for v in range(hi + 1):
            # rows whose support ends at column j must be consumed exactly
            if any(resid[i] != rows[i][j] * v for i in finish_rows[j]):
                continue
            point[j] = v
            for i, a in col_support[j]:
                resid[i] -= a * v
            done = rec(j + 1)
            for i, a in col_support[j]:
                resid[i] += a * v
            if done:
                return True
        point[j] = 0
        return False

    rec(0)
    return out


def enumerate_fiber(A, b: Sequence[int], *, cap: int = 200000) -> list[tuple[int, ...]]:
    """All nonnegative integer solutions of A x = b, in lexicographic order."""
    return _fiber_dfs(as_rows(A), b, cap, first_only=False)


def fiber_nonempty(A, b: Sequence[int], *, cap: int = 10**6) -> bool:
    """Integer feasibility of A x = b, x >= 0, by the same pruned search."""
    return bool(_fiber_dfs(as_rows(A), b, cap, first_only=True))


def gap(A, c: Sequence[int], b: Sequence[int], *, node_budget: int = 200000,
        ip_value: int | None = None) -> GapReport:
    """Exact integrality gap IP(b) - LP(b) for min c.x over the fiber.

    ip_value short-circuits the branch and bound when the integer optimum
    is already certified elsewhere (for example by the Groebner
    divisibility test); it is trusted as given.
    """
    rows = as_rows(A)
    lp = solve_lp(rows, c, b)
    if lp.status != FEASIBLE:
        return GapReport(lp, IPResult(INFEASIBLE, None, None, 0), None)
    if ip_value is not None:
        ip = IPResult(FEASIBLE, ip_value, None, 0)
    else:
        ip = solve_ip(rows, c, b, node_budget=node_budget)
    if ip.status != FEASIBLE:
        return GapReport(lp, ip, None)
    return GapReport(lp, ip, QQ(ip.value) - lp.value)


def cell_bounds(A, b: Sequence[int], cell: int, *, node_budget: int = 200000) -> CellBounds:
    """Exact LP and IP lower/upper bounds on x_cell over the fiber."""
    rows = as_rows(A)
    n = len(rows[0]) if rows else 0
    if not 0 <= cell < n:
        raise ValueError("cell index out of range")
    plus = unit_cost(n, cell)
    minus = tuple(-x for x in plus)
    lp_lo = solve_lp(rows, plus, b)
    if lp_lo.status != FEASIBLE:
        return CellBounds(lp_lo.status, None, None, None, None)
    lp_hi = solve_lp(rows, minus, b)
    ip_lo = solve_ip(rows, plus, b, node_budget=node_budget)
    if ip_lo.status != FEASIBLE:
        return CellBounds(INFEASIBLE, lp_lo.value, None, None,
                          -lp_hi.value if lp_hi.status == FEASIBLE else None)
    ip_hi = solve_ip(rows, minus, b, node_budget=node_budget)
    return CellBounds(FEASIBLE, lp_lo.value, ip_lo.value, -ip_hi.value,
                      -lp_hi.value if lp_hi.status == FEASIBLE else None)
