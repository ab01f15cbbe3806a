"""Standard pairs of the initial ideal and the large-gap certificates.

A pair (root, free) stands for the lattice points root + m with m
supported on the free columns.  For the reduced basis of a margin
matrix under the first-cell cost, a pair is associated when every one of
its points is IP-optimal, which by initial-ideal theory reduces to a
finite check: no leading exponent may fit under the root outside the
free set.  Standard pairs are the maximal associated pairs; their images
under the matrix stratify the right-hand sides, and per-pair group
relaxations bound the gap contributed by each stratum.

The certificate routines reproduce the named construction: the pair
rooted at k units of the first cell with free set sigma_hat minus that
cell is associated and standard for k up to 2^(n-3)-1, every enlargement
is refuted by an explicit swap or shifted-relation vector, and at the
top k the witness point lies in exactly one standard pair.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Sequence

from .errors import BudgetExceededError, VerificationError
from .linalg import LatticeElement, delta_column, sullivant_relation
from .linalg import rank as matrix_rank
from .models import as_rows, cells, column_submatrix, delta_block_matrix, margins_of
from .rationals import QQ
from .solvers import fiber_nonempty, solve_lp
from .solvers import gap as solve_gap
from .toric import BasisSet, TermOrder, is_optimal
from .toric import matrix_fingerprint as _fingerprint
from .toric import reduced_groebner


@dataclass(frozen=True)
class StandardPair:
    """Root exponent plus free columns; the set {root + m : supp(m) ⊆ free}."""

    root: tuple[int, ...]
    free: tuple[int, ...]

    def __post_init__(self):
        root = tuple(int(x) for x in self.root)
        free = tuple(sorted(int(j) for j in self.free))
        object.__setattr__(self, "root", root)
        object.__setattr__(self, "free", free)
        if any(x < 0 for x in root):
            raise ValueError("pair root must be nonnegative")
        if len(set(free)) != len(free):
            raise ValueError("free columns repeat")
        if free and (free[0] < 0 or free[-1] >= len(root)):
            raise ValueError("free column out of range")
        if any(root[j] for j in free):
            raise ValueError("root is supported on a free column")

    @property
    def root_support(self) -> tuple[int, ...]:
        return tuple(j for j, x in enumerate(self.root) if x)

    def contains(self, point: Sequence[int]) -> bool:
        free = set(self.free)
        for j, (p, g) in enumerate(zip(point, self.root)):
            if p < g or (p > g and j not in free):
                return False
        return True


@dataclass(frozen=True)
class PairStatus:
    admissible: bool
    associated: bool
    standard: bool


@dataclass(frozen=True)
class PairGapEstimate:
    """Exact bracket for the gap contributed by one pair's margins."""

    lower: object
    upper: object
    schedule: tuple[int, ...]


def w_vectors(n: int, i: Sequence[int]) -> tuple[LatticeElement, LatticeElement]:
    """The swap pair w+ / w- around cell pattern i with equal margins.

    w+ places units on (0|0|0), (i|1|0), (0|1|1), (i|0|1) and w- on the
    four cells with the bits traded; their difference is a kernel vector
    of the lifted matrix for every nonzero i.
    """
    bits = tuple(int(x) for x in i)
    if len(bits) != n - 2 or any(x not in (0, 1) for x in bits):
        raise ValueError(f"need a bit vector of length {n - 2}")
    if not any(bits):
        raise ValueError("the zero pattern has no swap pair")
    zero = (0,) * (n - 2)
    wp = [0] * 2 ** n
    wm = [0] * 2 ** n
    wp[delta_column(n, zero, 0, 0)] = 1
    wp[delta_column(n, bits, 1, 0)] = 1
    wp[delta_column(n, zero, 1, 1)] = 1
    wp[delta_column(n, bits, 0, 1)] = 1
    wm[delta_column(n, zero, 1, 0)] = 1
    wm[delta_column(n, bits, 0, 0)] = 1
    wm[delta_column(n, zero, 0, 1)] = 1
    wm[delta_column(n, bits, 1, 1)] = 1
    return LatticeElement(tuple(wp)), LatticeElement(tuple(wm))


def _admissible(root: Sequence[int], free: frozenset[int], leads) -> bool:
    # no leading exponent may fit under the root on the bound columns
    for u in leads:
        if not any(x > root[j] and j not in free for j, x in enumerate(u) if x):
            return False
    return True


def classify_pair(pair: StandardPair, gb: BasisSet, A=None) -> PairStatus:
    """Admissibility, associatedness, and maximality of one pair.

    Associated coincides with admissible under the divisibility
    criterion.  Maximality needs only single-move covers: adding one
    free direction, or freeing one root coordinate after zeroing it
    (the pair invariant forces the zeroing); any strictly larger
    admissible pair forces one of these covers to be admissible.
    """
    if A is not None and _fingerprint(as_rows(A)) != gb.matrix_fingerprint:
        raise ValueError("basis does not belong to this matrix")
    leads = [e.leading for e in gb.elements]
    if leads and len(leads[0]) != len(pair.root):
        raise ValueError("pair length does not match the basis")
    free = frozenset(pair.free)
    adm = _admissible(pair.root, free, leads)
    standard = adm
    if adm:
        for l in range(len(pair.root)):
            if l in free or pair.root[l]:
                continue
            if _admissible(pair.root, free | {l}, leads):
                standard = False
                break
    if standard:
        for j in pair.root_support:
            lowered = list(pair.root)
            lowered[j] = 0
            if _admissible(lowered, free | {j}, leads):
                standard = False
                break
    return PairStatus(admissible=adm, associated=adm, standard=standard)


def _minimalize(gens) -> frozenset[tuple[int, ...]]:
    # keep inclusion-minimal exponent vectors; they define the same ideal
    items = sorted(set(gens), key=lambda u: (sum(u), u))
    out: list[tuple[int, ...]] = []
    for u in items:
        if not any(all(a <= b for a, b in zip(v, u)) for v in out):
            out.append(u)
    return frozenset(out)


def _slice_candidates(n_rest: int, gens: frozenset[tuple[int, ...]], memo: dict,
                      counter: list[int], max_nodes: int):
    """Maximal-in-slice pairs for the monomial ideal of the generators.

    Splits on the first of the n_rest remaining variables: either it
    joins the free set (drop the coordinate everywhere) or it is bound
    to a root value t below the largest exponent (keep the generators
    that survive, drop the coordinate).  Both reductions preserve
    admissibility exactly, so the standard pairs of the sub-ideals lift
    to a candidate superset of the standard pairs; containments across
    branches are filtered later.  Pairs are returned relative to the
    remaining variables.
    """
    key = (n_rest, gens)
    cached = memo.get(key)
    if cached is not None:
        return cached
    counter[0] += 1
    if counter[0] > max_nodes:
        raise BudgetExceededError(f"pair search exceeded {max_nodes} nodes")
    if any(not any(u) for u in gens):
        result: tuple = ()  # unit ideal: no standard monomials
    elif not gens:
        result = (((0,) * n_rest, frozenset(range(n_rest))),)
    else:
        acc = set()
        free_sub = _minimalize(u[1:] for u in gens)
        for root, free in _slice_candidates(n_rest - 1, free_sub, memo, counter, max_nodes):
            acc.add(((0,) + root, frozenset({0}) | {k + 1 for k in free}))
        top = max(u[0] for u in gens)
        for t in range(top):
            bound_sub = _minimalize(u[1:] for u in gens if u[0] <= t)
            for root, free in _slice_candidates(n_rest - 1, bound_sub, memo, counter, max_nodes):
                acc.add(((t,) + root, frozenset(k + 1 for k in free)))
        result = tuple(sorted(acc, key=lambda c: (c[0], sorted(c[1]))))
    memo[key] = result
    return result


def enumerate_standard_pairs(gb: BasisSet, *, max_nodes: int = 5_000_000) -> list[StandardPair]:
    """All standard pairs of the initial ideal of the basis.

    Every standard pair shows up among the slice candidates: fixing how
    the pair treats the first variable (free, or bound at root value t
    below the largest exponent there) reduces it to a standard pair of
    the corresponding sub-ideal, variable by variable.  A scan over the
    root box itself would visit every standard monomial in the box and
    is hopeless at the sizes treated here, while the sub-ideal recursion
    memoizes heavily.  The final filter keeps the candidates that no
    other candidate strictly contains, which is exactly maximality over
    all admissible pairs because every admissible pair sits inside some
    candidate.
    """
    leads = [e.leading for e in gb.elements]
    if not leads:
        raise ValueError("basis has no elements")
    memo: dict = {}
    counter = [0]
    candidates = _slice_candidates(len(leads[0]), _minimalize(leads), memo, counter, max_nodes)

    by_root: dict[tuple[int, ...], set[frozenset[int]]] = {}
    for root, free in candidates:
        by_root.setdefault(root, set()).add(free)

    out = []
    for root, taus in by_root.items():
        supp = [j for j, x in enumerate(root) if x]
        divisors = [
            tuple(d)
            for d in product(*(range(x + 1) if x else (0,) for x in root))
        ] if supp else [root]
        for tau in taus:
            dominated = False
            for other in divisors:
                if other not in by_root:
                    continue
                need = frozenset(j for j in range(len(root)) if other[j] < root[j]) | tau
                for tau2 in by_root[other]:
                    if other == root and tau2 == tau:
                        continue
                    if need <= tau2:
                        dominated = True
                        break
                if dominated:
                    break
            if not dominated:
                out.append(StandardPair(root, tuple(sorted(tau))))
    out.sort(key=lambda p: (p.root, p.free))
    return out


def pair_gap(pair: StandardPair, A, c: Sequence[int], *, gb: BasisSet | None = None,
             t_max: int = 16, node_budget: int = 200000) -> PairGapEstimate:
    """Exact bracket on the gap over the pair's margin image.

    Lower bound: the largest exact gap at the evaluation points
    root + T * sum of free units, T doubling up to t_max; when a basis
    is supplied and the point passes the divisibility test its cost is
    the certified IP optimum and the branch and bound is skipped.
    Upper bound: cost(root) minus the joint relaxation value
    min{c.x : A.x - A_free.y = A.root, x,y >= 0}.
    """
    rows = as_rows(A)
    if gb is not None and gb.matrix_fingerprint != _fingerprint(rows):
        raise ValueError("basis does not belong to this matrix")
    cost = tuple(c)
    if len(cost) != len(pair.root):
        raise ValueError("cost length does not match the pair")
    schedule = []
    t = 1
    while t <= t_max:
        schedule.append(t)
        t *= 2
    lower = QQ(0)
    for t in schedule:
        point = list(pair.root)
        for l in pair.free:
            point[l] += t
        b = margins_of(rows, point)
        ip_value = None
        if gb is not None and is_optimal(point, gb):
            ip_value = sum(cost[j] * point[j] for j in range(len(point)))
        report = solve_gap(rows, cost, b, node_budget=node_budget, ip_value=ip_value)
        if report.gap is None:
            raise VerificationError("evaluation point left the feasible cone")
        if report.gap > lower:
            lower = report.gap
    joint = [tuple(row) + tuple(-row[l] for l in pair.free) for row in rows]
    joint_cost = cost + (0,) * len(pair.free)
    root_margin = margins_of(rows, pair.root)
    lp = solve_lp(joint, joint_cost, root_margin)
    if lp.status != "feasible":
        raise VerificationError(f"joint relaxation reported {lp.status} "
                                "although the root itself is feasible")
    upper = sum(QQ(cost[j]) * pair.root[j] for j in range(len(cost))) - lp.value
    if lower > upper:
        raise VerificationError(
            f"gap bracket inverted: lower {lower} exceeds upper {upper}")
    return PairGapEstimate(lower=lower, upper=upper, schedule=tuple(schedule))


def margin_membership(b: Sequence[int], pair: StandardPair, A, *, cap: int = 10**6) -> bool:
    """Whether b = A(root + m) for some m >= 0 supported on the free set."""
    rows = as_rows(A)
    base = margins_of(rows, pair.root)
    resid = [int(x) - y for x, y in zip(b, base)]
    if any(x < 0 for x in resid):
        return False
    if not pair.free:
        return not any(resid)
    sub = column_submatrix(rows, pair.free)
    return fiber_nonempty(sub, resid, cap=cap)


@dataclass(frozen=True)
class RefutationRecord:
    """One explicit vector pair refuting an enlarged free set."""

    column: int
    pattern: tuple[int, ...]
    kind: str
    improving_cost: int
    baseline_cost: int


@dataclass(frozen=True)
class KCertificate:
    k: int
    associated: bool
    standard: bool
    refutations: tuple[RefutationRecord, ...]
    containing_pairs: int


@dataclass(frozen=True)
class CertificateReport:
    n: int
    gap_bound: int
    per_k: tuple[KCertificate, ...]
    root_cover_refuted: bool
    pair_total: int
    unique_pair: StandardPair


def _check_refutation(rows, k: int, root: tuple[int, ...], tau: frozenset[int],
                      column: int, p: tuple[int, ...], t: tuple[int, ...],
                      kind: str, pattern: tuple[int, ...]) -> RefutationRecord:
    if any(x < 0 for x in p) or any(x < 0 for x in t):
        raise VerificationError(f"refutation vectors must be nonnegative: {p} / {t}")
    if margins_of(rows, p) != margins_of(rows, t):
        raise VerificationError(f"refutation pair has unequal margins: {p} / {t}")
    if not t[0] < p[0]:
        raise VerificationError(f"refutation does not improve the cost: {p} / {t}")
    if p[0] != k:
        raise VerificationError(f"refutation point misses the root: {p}")
    extra = {j for j, (x, g) in enumerate(zip(p, root)) if x != g}
    if any(x < g for x, g in zip(p, root)) or not extra <= (tau | {column}):
        raise VerificationError(f"refutation point leaves the enlarged pair: {p}")
    return RefutationRecord(column=column, pattern=pattern, kind=kind,
                            improving_cost=t[0], baseline_cost=p[0])


def verify_sullivant_certificates(n: int, *, gb: BasisSet | None = None,
                                  pairs: list[StandardPair] | None = None,
                                  max_n: int = 6,
                                  node_budget: int = 400000,
                                  max_nodes: int = 5_000_000) -> CertificateReport:
    """Certificates for the heavy standard pair of the lifted matrix.

    For each k up to 2^(n-3)-1 the pair rooted at k first-cell units with
    free set sigma_hat minus the first cell must classify as associated
    and standard; every possible extra free direction is refuted by an
    explicit equal-margin vector pair (a unit swap for the two mixed
    copy patterns, the shifted heavy relation for the two aligned ones),
    and the root-freeing cover is refuted by the heavy relation itself.
    At the top k the witness point must lie in exactly one enumerated
    standard pair.  Any failed check raises with the offending vector.
    """
    if n < 4:
        raise ValueError("certificates need n >= 4")
    if n > max_n:
        raise ValueError(f"n={n} exceeds the configured maximum {max_n}")
    A = delta_block_matrix(n)
    rows = as_rows(A)
    n_cols = 2 ** n
    order = TermOrder.first_cell(n_cols)
    if gb is None:
        gb = reduced_groebner(A, order)
    elif gb.matrix_fingerprint != _fingerprint(rows):
        raise ValueError("basis does not belong to the lifted matrix")
    rel = sullivant_relation(n)
    tau_hat = frozenset(rel.sigma_hat) - {0}
    tau_sorted = tuple(sorted(tau_hat))
    big_k = 2 ** (n - 3) - 1
    u_hat = rel.f_hat.positive
    v_hat = rel.f_hat.negative

    # root-freeing cover: the heavy relation itself lives in (0, tau+{0})
    if margins_of(rows, u_hat) != margins_of(rows, v_hat) or v_hat[0] >= u_hat[0]:
        raise VerificationError("heavy relation fails to refute the root cover")
    if not set(j for j, x in enumerate(u_hat) if x) <= (tau_hat | {0}):
        raise VerificationError("heavy relation leaves sigma_hat")

    if pairs is None:
        pairs = enumerate_standard_pairs(gb, max_nodes=max_nodes)

    zero = (0,) * (n - 2)
    per_k = []
    unique_pair = None
    for k in range(1, big_k + 1):
        root = tuple(k if j == 0 else 0 for j in range(n_cols))
        pair = StandardPair(root, tau_sorted)
        status = classify_pair(pair, gb)
        if not status.associated:
            raise VerificationError(f"pair at k={k} is not associated")
        if not status.standard:
            raise VerificationError(f"pair at k={k} is not standard")
        refutations = []
        for i in cells((2,) * (n - 2)):
            if i == zero:
                continue
            wp, wm = w_vectors(n, i)
            if sum(i) % 2 == 1:
                swap_col = delta_column(n, i, 1, 0)
                rel_col = delta_column(n, i, 1, 1)
            else:
                swap_col = delta_column(n, i, 0, 1)
                rel_col = delta_column(n, i, 0, 0)
            p = tuple(k * x for x in wp.vector)
            t = tuple(k * x for x in wm.vector)
            refutations.append(_check_refutation(
                rows, k, root, tau_hat, swap_col, p, t, "swap", i))
            z = tuple(f - big_k * (a - b)
                      for f, a, b in zip(rel.f_hat.vector, wp.vector, wm.vector))
            zel = LatticeElement(z)
            p = tuple(k * x for x in zel.positive)
            t = tuple(k * x for x in zel.negative)
            refutations.append(_check_refutation(
                rows, k, root, tau_hat, rel_col, p, t, "shifted-relation", i))
        point = list(u_hat)
        point[0] -= 2 ** (n - 3) - k
        containing = [q for q in pairs if q.contains(point)]
        if k == big_k:
            if len(containing) != 1:
                raise VerificationError(
                    f"witness point lies in {len(containing)} standard pairs")
            unique_pair = containing[0]
            if unique_pair != pair:
                raise VerificationError(
                    f"witness point lies in {unique_pair}, not the heavy pair")
        per_k.append(KCertificate(k=k, associated=status.associated,
                                  standard=status.standard,
                                  refutations=tuple(refutations),
                                  containing_pairs=len(containing)))
    return CertificateReport(n=n, gap_bound=big_k, per_k=tuple(per_k),
                             root_cover_refuted=True, pair_total=len(pairs),
                             unique_pair=unique_pair)


@dataclass(frozen=True)
class PairRecord:
    pair: StandardPair
    estimate: PairGapEstimate
    free_below_rank: bool


def pair_survey(gb: BasisSet, A, c: Sequence[int] | None = None, *,
                t_max: int = 16, node_budget: int = 200000,
                max_nodes: int = 5_000_000) -> list[PairRecord]:
    """Enumerate all standard pairs and bracket each pair's gap.

    Also records for every pair whether its number of free directions
    falls below the matrix rank, the observed companion of positive
    gaps.
    """
    rows = as_rows(A)
    if gb.matrix_fingerprint != _fingerprint(rows):
        raise ValueError("basis does not belong to this matrix")
    if c is None:
        if gb.order is None:
            raise ValueError("no cost available: pass c or an ordered basis")
        c = gb.order.weight
    r = matrix_rank(rows)
    records = []
    for pair in enumerate_standard_pairs(gb, max_nodes=max_nodes):
        est = pair_gap(pair, rows, c, gb=gb, t_max=t_max, node_budget=node_budget)
        records.append(PairRecord(pair=pair, estimate=est,
                                  free_below_rank=len(pair.free) < r))
    return records
