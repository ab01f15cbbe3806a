"""Graver bases, Lawrence reduced Groebner bases, and optimality tests.

The Graver basis (all conformally minimal nonzero kernel vectors) is
computed by Pottier's completion: close a kernel lattice basis under
pairwise sums, reducing every sum conformally until a fixed point, then
keep the minimal elements.  For a Lawrence block matrix [[B,0],[0,B],
[I,I]] the kernel is {(g,-g) : B g = 0} and this bijection preserves the
conformal order, so the Graver basis of the lift is the lifted Graver
basis of B; since for Lawrence matrices the Graver basis, the universal
Groebner basis and every reduced Groebner basis coincide as sets, a
reduced basis is obtained by orienting each Graver element under the
term order and checking that inter-reduction is a no-op.

Term order: exact weight vector first, graded reverse lexicographic on
the fixed column order as the tie break.  A fiber point is IP-optimal
for the order's cost iff no leading exponent of the reduced basis
divides it.
"""

from __future__ import annotations

import hashlib
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from .errors import BudgetExceededError, VerificationError
from .linalg import LatticeElement, integer_kernel_basis, rank
from .models import as_rows, margins_of
from .rationals import QQ
from .solvers import gap as solve_gap
from .solvers import solve_lp

Vector = tuple[int, ...]


@dataclass(frozen=True)
class TermOrder:
    """Weight vector refined by graded reverse lexicographic comparison."""

    weight: tuple[int, ...]

    @classmethod
    def first_cell(cls, n_cols: int) -> "TermOrder":
        return cls((1,) + (0,) * (n_cols - 1))

    @property
    def cost(self) -> tuple[int, ...]:
        return self.weight

    def exponent_greater(self, u: Vector, v: Vector) -> bool:
        """u > v as monomials; total because u != v is required."""
        if u == v:
            raise ValueError("order comparison needs distinct exponents")
        wu = sum(w * x for w, x in zip(self.weight, u))
        wv = sum(w * x for w, x in zip(self.weight, v))
        if wu != wv:
            return wu > wv
        du, dv = sum(u), sum(v)
        if du != dv:
            return du > dv
        for k in range(len(u) - 1, -1, -1):
            d = u[k] - v[k]
            if d:
                return d < 0
        raise AssertionError("unreachable: exponents were equal")


@dataclass(frozen=True)
class OrientedBinomial:
    """Kernel element stored so that the positive part is the leading exponent."""

    element: LatticeElement

    @property
    def leading(self) -> Vector:
        return self.element.positive

    @property
    def trailing(self) -> Vector:
        return self.element.negative

    @property
    def vector(self) -> Vector:
        return self.element.vector


def orient(z, order: TermOrder) -> OrientedBinomial:
    vec = z.vector if isinstance(z, LatticeElement) else tuple(int(x) for x in z)
    el = LatticeElement(vec)
    if order.exponent_greater(el.positive, el.negative):
        return OrientedBinomial(el)
    return OrientedBinomial(el.negated())


def _canonical_sign(v: Vector) -> Vector:
    for x in v:
        if x > 0:
            return v
        if x < 0:
            return tuple(-y for y in v)
    return v


def matrix_fingerprint(A) -> str:
    rows = as_rows(A)
    digest = hashlib.sha256(repr(rows).encode()).hexdigest()
    return digest[:16]


@dataclass(frozen=True)
class BasisSet:
    """A Graver basis or reduced Groebner basis tied to one matrix.

    kind "graver": elements carry the canonical sign (first nonzero entry
    positive); the order field is None.  kind "reduced_groebner":
    elements are oriented by the order, and the set equals its own
    inter-reduction.
    """

    kind: str
    elements: tuple[OrientedBinomial, ...]
    matrix_fingerprint: str
    order: TermOrder | None = None

    def __len__(self) -> int:
        return len(self.elements)

    def vectors(self) -> list[Vector]:
        return [e.vector for e in self.elements]

    @cached_property
    def _leading_index(self):
        return _DivisorIndex([e.leading for e in self.elements])

    def divisor_of(self, point: Sequence[int]):
        """Index of some element whose leading exponent divides point."""
        return self._leading_index.find(tuple(point))


class _DivisorIndex:
    """Bucketed divisibility lookup for a fixed list of exponent vectors."""

    def __init__(self, exponents: list[Vector]):
        self.exponents = exponents
        self.buckets: dict[int, list[tuple[int, int, list[tuple[int, int]]]]] = {}
        for idx, u in enumerate(exponents):
            supp = [(j, x) for j, x in enumerate(u) if x]
            if not supp:
                continue
            anchor = supp[0][0]
            mask = 0
            for j, _ in supp:
                mask |= 1 << j
            self.buckets.setdefault(anchor, []).append((idx, mask, supp))

    def find(self, p: Vector):
        pmask = 0
        for j, x in enumerate(p):
            if x:
                pmask |= 1 << j
        for j, x in enumerate(p):
            if not x:
                continue
            for idx, mask, supp in self.buckets.get(j, ()):
                if mask & ~pmask:
                    continue
                if all(p[k] >= v for k, v in supp):
                    return idx
        return None


def _compatible(a: Vector, b: Vector) -> bool:
    return all(x * y >= 0 for x, y in zip(a, b))


def _fits(h: Vector, r: Vector) -> bool:
    """h conformal to r with |h| <= |r| coordinatewise (h sqsubseteq r)."""
    for x, y in zip(h, r):
        if x > 0:
            if y < x:
                return False
        elif x < 0:
            if y > x:
                return False
    return True


def _fits_neg(h: Vector, r: Vector) -> bool:
    for x, y in zip(h, r):
        if x > 0:
            if y > -x:
                return False
        elif x < 0:
            if y < -x:
                return False
    return True


def _sign_masks(v: Vector) -> tuple[int, int]:
    pos = neg = 0
    for j, x in enumerate(v):
        if x > 0:
            pos |= 1 << j
        elif x < 0:
            neg |= 1 << j
    return pos, neg


class _Reducer:
    """Conformal normal form against a growing generator list.

    Sign masks give a cheap necessary test before the coordinate scan:
    g can only be subtracted inside v when its positive and negative
    supports sit inside those of v, and added when they sit crosswise.
    """

    def __init__(self):
        self.gens: list[Vector] = []
        self.masks: list[tuple[int, int]] = []

    def add(self, g: Vector):
        self.gens.append(g)
        self.masks.append(_sign_masks(g))

    def normal_form(self, v: Vector) -> Vector:
        gens, masks = self.gens, self.masks
        vpos, vneg = _sign_masks(v)
        reduced = True
        while reduced and (vpos or vneg):
            reduced = False
            for g, (gp, gn) in zip(gens, masks):
                if not (gp & ~vpos) and not (gn & ~vneg) and _fits(g, v):
                    v = tuple(a - b for a, b in zip(v, g))
                elif not (gp & ~vneg) and not (gn & ~vpos) and _fits_neg(g, v):
                    v = tuple(a + b for a, b in zip(v, g))
                else:
                    continue
                vpos, vneg = _sign_masks(v)
                reduced = True
                break
        return v


def _pottier(seeds: Iterable[Vector], n_cols: int, max_elements: int, max_pairs: int) -> list[Vector]:
    reducer = _Reducer()
    G = reducer.gens
    seen: set[Vector] = set()
    queue: deque[tuple[int, int, int]] = deque()

    def push_pairs(k: int):
        for i in range(k):
            queue.append((i, k, 1))
            queue.append((i, k, -1))

    for s in seeds:
        v = reducer.normal_form(tuple(s))
        cv = _canonical_sign(v)
        if any(cv) and cv not in seen:
            push_pairs(len(G))
            reducer.add(cv)
            seen.add(cv)
    pops = 0
    while queue:
        i, j, sgn = queue.popleft()
        pops += 1
        if pops > max_pairs:
            raise BudgetExceededError(f"completion exceeded {max_pairs} pair reductions")
        f, g = G[i], G[j]
        if sgn < 0:
            g = tuple(-x for x in g)
        if _compatible(f, g):
            continue  # f+g reduces to zero through f then g
        s = tuple(a + b for a, b in zip(f, g))
        if not any(s):
            continue
        v = reducer.normal_form(s)
        if not any(v):
            continue
        cv = _canonical_sign(v)
        if cv in seen:
            continue
        if len(G) >= max_elements:
            raise BudgetExceededError(f"completion exceeded {max_elements} elements")
        push_pairs(len(G))
        reducer.add(cv)
        seen.add(cv)
    # keep the conformally minimal elements
    masks = reducer.masks
    out = []
    for k, g in enumerate(G):
        gp, gn = masks[k]
        keep = True
        for m, h in enumerate(G):
            if h is g:
                continue
            hp, hn = masks[m]
            if not (hp & ~gp) and not (hn & ~gn) and _fits(h, g):
                keep = False
                break
            if not (hp & ~gn) and not (hn & ~gp) and _fits_neg(h, g):
                keep = False
                break
        if keep:
            out.append(g)
    out.sort(key=lambda v: (sum(abs(x) for x in v), v))
    return out


def graver_basis(A, *, max_elements: int = 200000, max_pairs: int = 50_000_000) -> BasisSet:
    """Graver basis of ker_Z(A) by Pottier completion, canonical signs."""
    rows = as_rows(A)
    basis = integer_kernel_basis(rows)
    if not basis:
        raise ValueError("kernel is trivial; the Graver basis is empty")
    n_cols = len(rows[0])
    vectors = _pottier([e.vector for e in basis], n_cols, max_elements, max_pairs)
    elements = tuple(OrientedBinomial(LatticeElement(v)) for v in vectors)
    return BasisSet("graver", elements, matrix_fingerprint(rows), None)


def split_lawrence(A):
    """Split a Lawrence block matrix [[B,0],[0,B],[I,I]] into its inner B.

    Raises ValueError when the matrix does not have the exact block
    layout produced by lawrence_lift.
    """
    rows = as_rows(A)
    m = len(rows)
    n2 = len(rows[0]) if rows else 0
    if n2 % 2:
        raise ValueError("not a Lawrence block matrix: odd column count")
    n = n2 // 2
    if m < n or (m - n) % 2:
        raise ValueError("not a Lawrence block matrix: row count mismatch")
    r = (m - n) // 2
    top, mid, bot = rows[:r], rows[r:r + r], rows[2 * r:]
    for i in range(r):
        if any(top[i][n:]) or any(mid[i][:n]):
            raise ValueError("not a Lawrence block matrix: off-diagonal block is nonzero")
        if top[i][:n] != mid[i][n:]:
            raise ValueError("not a Lawrence block matrix: copies disagree")
    for j in range(n):
        expect = tuple(1 if k == j or k == n + j else 0 for k in range(n2))
        if bot[j] != expect:
            raise ValueError("not a Lawrence block matrix: pairing rows malformed")
    return tuple(row[:n] for row in top)


def lift_vector(g: Vector) -> Vector:
    return tuple(g) + tuple(-x for x in g)


def reduced_groebner(A, order: TermOrder, *, max_elements: int = 200000,
                     max_pairs: int = 50_000_000, validate: bool = True) -> BasisSet:
    """Reduced Groebner basis of a Lawrence block matrix under the order.

    The Graver basis of the inner block is completed and lifted through
    g -> (g, -g); orientation by the order then yields the reduced basis.
    With validate=True the inter-reduction fixed point is checked and a
    VerificationError is raised on any violation.
    """
    rows = as_rows(A)
    inner = split_lawrence(rows)
    if len(order.weight) != len(rows[0]):
        raise ValueError("order weight length does not match column count")
    inner_basis = integer_kernel_basis(inner)
    if not inner_basis:
        raise ValueError("kernel is trivial; the ideal has no binomial generators")
    vectors = _pottier([e.vector for e in inner_basis], len(inner[0]), max_elements, max_pairs)
    lifted = [lift_vector(v) for v in vectors]
    elements = tuple(sorted((orient(v, order) for v in lifted),
                            key=lambda e: (e.leading, e.trailing)))
    basis = BasisSet("reduced_groebner", elements, matrix_fingerprint(rows), order)
    if validate:
        reduced = inter_reduce(basis)
        if [e.vector for e in reduced.elements] != [e.vector for e in basis.elements]:
            raise VerificationError("oriented Graver set is not inter-reduced; "
                                    "matrix is not of Lawrence type or orientation is broken")
    return basis


def _proper_divisor(index: _DivisorIndex, leads: list[Vector], i: int):
    """Some j != i with leads[j] dividing leads[i] (ties keep the first)."""
    p = leads[i]
    pmask = 0
    for j, x in enumerate(p):
        if x:
            pmask |= 1 << j
    for j, x in enumerate(p):
        if not x:
            continue
        for idx, mask, supp in index.buckets.get(j, ()):
            if idx == i or mask & ~pmask:
                continue
            if all(p[k] >= v for k, v in supp):
                if leads[idx] != p or idx < i:
                    return idx
    return None


def inter_reduce(basis: BasisSet) -> BasisSet:
    """Inter-reduce a Groebner basis: minimal leading set, reduced tails."""
    if basis.order is None:
        raise ValueError("inter-reduction needs an ordered basis")
    elems = list(basis.elements)
    leads = [e.leading for e in elems]
    index = _DivisorIndex(leads)
    kept = [e for i, e in enumerate(elems)
            if _proper_divisor(index, leads, i) is None]
    kept_leads = [e.leading for e in kept]
    kept_index = _DivisorIndex(kept_leads)
    out = []
    for e in kept:
        tail = e.trailing
        while True:
            hit = kept_index.find(tail)
            if hit is None:
                break
            u, v = kept[hit].leading, kept[hit].trailing
            tail = tuple(t - a + b for t, a, b in zip(tail, u, v))
        vec = tuple(l - t for l, t in zip(e.leading, tail))
        out.append(OrientedBinomial(LatticeElement(vec)))
    out.sort(key=lambda e: (e.leading, e.trailing))
    return BasisSet(basis.kind, tuple(out), basis.matrix_fingerprint, basis.order)


def _divides(u: Vector, p: Vector) -> bool:
    return all(a <= b for a, b in zip(u, p))


def is_optimal(point: Sequence[int], gb: BasisSet, order: TermOrder | None = None) -> bool:
    """IP optimality of a fiber point for the basis order's cost.

    True iff no leading exponent of the (reduced) basis divides the
    point, i.e. the point's monomial survives in the initial ideal
    complement.  An order argument, when given, must agree with the
    basis's own order.
    """
    if any(x < 0 for x in point):
        raise ValueError("fiber points are nonnegative")
    if order is not None and gb.order is not None and order != gb.order:
        raise ValueError("order disagrees with the basis order")
    return gb.divisor_of(tuple(point)) is None


@dataclass(frozen=True)
class GapWitness:
    element: OrientedBinomial
    alpha: int
    cost_cell: int
    claims: tuple[tuple[int, tuple[int, ...], object], ...]  # (beta, margins, verified gap)


def gap_witnesses(gb: BasisSet, A, *, only: Sequence[OrientedBinomial] | None = None,
                  node_budget: int = 200000, verify_ip: bool = True) -> list[GapWitness]:
    """Margin witnesses with prescribed gaps from heavy basis elements.

    Every element whose leading part has alpha >= 2 in the cost cell
    yields margins b_beta = A(u - (alpha-beta) e) with exact gap beta for
    beta = 1..alpha-1.  Each claim is verified: the branch-and-bound gap
    must equal beta (skipped when verify_ip is False, where the certified
    optimum is used instead), and the explicit zero-cost fractional point
    (u - (alpha-beta) e) - (beta/alpha)(u - v) must be feasible.
    """
    rows = as_rows(A)
    if gb.order is None:
        raise ValueError("gap witnesses need an ordered basis")
    if matrix_fingerprint(rows) != gb.matrix_fingerprint:
        raise ValueError("basis does not belong to this matrix")
    weight = gb.order.weight
    support = [j for j, w in enumerate(weight) if w]
    if len(support) != 1 or weight[support[0]] != 1:
        raise ValueError("gap witnesses need a single-cell cost order")
    j0 = support[0]
    cost = tuple(weight)
    out = []
    for e in (only if only is not None else gb.elements):
        alpha = e.leading[j0]
        if alpha < 2:
            continue
        claims = []
        u, v = e.leading, e.trailing
        for beta in range(1, alpha):
            point = list(u)
            point[j0] -= alpha - beta
            b = margins_of(rows, point)
            # explicit zero-cost feasible point for the relaxation
            wstar = [QQ(point[k]) - QQ(beta, alpha) * (u[k] - v[k]) for k in range(len(u))]
            if any(x < 0 for x in wstar):
                raise VerificationError("zero-cost relaxation point has a negative entry")
            if tuple(margins_of(rows, wstar)) != tuple(QQ(x) for x in b):
                raise VerificationError("zero-cost relaxation point misses the margins")
            if sum(cost[k] * wstar[k] for k in range(len(u))) != 0:
                raise VerificationError("relaxation point does not have zero cost")
            if verify_ip:
                report = solve_gap(rows, cost, b, node_budget=node_budget)
                if report.gap != beta:
                    raise VerificationError(
                        f"claimed gap {beta} but solver found {report.gap}")
                verified = report.gap
            else:
                if not is_optimal(point, gb):
                    raise VerificationError("witness point is not order-optimal")
                lp = solve_lp(rows, cost, b)
                if lp.status != "feasible" or lp.value != 0:
                    raise VerificationError("relaxation value is not zero at the witness")
                verified = QQ(beta)
            claims.append((beta, b, verified))
        out.append(GapWitness(e, alpha, j0, tuple(claims)))
    return out


@dataclass(frozen=True)
class MarkovCheckReport:
    checked: int
    exempt: int
    matrix_rank: int
    violations: tuple[OrientedBinomial, ...]

    @property
    def holds(self) -> bool:
        return not self.violations


def markov_entry_check(gb: BasisSet, A) -> MarkovCheckReport:
    """Entry bound scan: elements with support larger than rank(A) must
    have all entries in {-1, 0, +1}; wider entries are reported, never
    asserted away."""
    rows = as_rows(A)
    if matrix_fingerprint(rows) != gb.matrix_fingerprint:
        raise ValueError("basis does not belong to this matrix")
    r = rank(rows)
    exempt = 0
    violations = []
    for e in gb.elements:
        span = len(e.element.support)
        if span <= r:
            exempt += 1
            continue
        if any(abs(x) > 1 for x in e.vector):
            violations.append(e)
    return MarkovCheckReport(len(gb.elements), exempt, r, tuple(violations))
