"""Exact integer linear algebra and the named kernel relations.

Everything here is integer or rational arithmetic with no rounding: rank
by fraction-free elimination, integer kernel bases through unimodular
column reduction followed by a Hermite-normal-form cleanup (so the basis
returned for a given matrix is canonical), and the explicit kernel
elements of the named families: the checkerboard relation spanning
ker A(B_n) and the heavy relation f_n / f_hat_n whose support sigma_hat
carries the gap construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from math import gcd
from typing import Sequence

from .models import MarginMatrix, as_rows, cell_rank, cells, column_submatrix

Vector = tuple[int, ...]


@dataclass(frozen=True)
class LatticeElement:
    """Integer vector z split as z = positive - negative with disjoint supports."""

    vector: Vector

    def __post_init__(self):
        object.__setattr__(self, "vector", tuple(int(x) for x in self.vector))

    @cached_property
    def positive(self) -> Vector:
        return tuple(x if x > 0 else 0 for x in self.vector)

    @cached_property
    def negative(self) -> Vector:
        return tuple(-x if x < 0 else 0 for x in self.vector)

    @cached_property
    def support(self) -> frozenset[int]:
        return frozenset(i for i, x in enumerate(self.vector) if x)

    @property
    def is_zero(self) -> bool:
        return not self.support

    def one_norm(self) -> int:
        return sum(abs(x) for x in self.vector)

    def negated(self) -> "LatticeElement":
        return LatticeElement(tuple(-x for x in self.vector))

    def __len__(self) -> int:
        return len(self.vector)


def _exgcd(a: int, b: int) -> tuple[int, int, int]:
    """g, s, t with s*a + t*b = g = gcd(a, b), g >= 0."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def rank(A) -> int:
    """Exact rank over the rationals (integer elimination, gcd-reduced rows)."""
    rows = [list(r) for r in as_rows(A)]
    m = len(rows)
    n = len(rows[0]) if rows else 0
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        prow = rows[r]
        p = prow[c]
        for i in range(r + 1, m):
            f = rows[i][c]
            if f:
                row = rows[i]
                for j in range(c, n):
                    row[j] = p * row[j] - f * prow[j]
                g = 0
                for x in row:
                    g = gcd(g, x)
                    if g == 1:
                        break
                if g > 1:
                    rows[i] = [x // g for x in row]
        r += 1
        if r == m:
            break
    return r


def _hermite_rows(basis: list[list[int]]) -> list[Vector]:
    """Row-style HNF of the lattice spanned by the given rows.

    Pivots positive, entries above a pivot reduced into [0, pivot); zero
    rows dropped.  Canonical for the lattice, so equal lattices give equal
    output.
    """
    rows = [list(r) for r in basis]
    n = len(rows[0]) if rows else 0
    r = 0
    for c in range(n):
        live = [i for i in range(r, len(rows)) if rows[i][c]]
        if not live:
            continue
        # chain gcd steps until a single nonzero remains in this column
        while len(live) > 1:
            live.sort(key=lambda i: abs(rows[i][c]))
            i0, i1 = live[0], live[1]
            q = rows[i1][c] // rows[i0][c]
            rows[i1] = [a - q * b for a, b in zip(rows[i1], rows[i0])]
            live = [i for i in live if rows[i][c]]
        i0 = live[0]
        rows[r], rows[i0] = rows[i0], rows[r]
        if rows[r][c] < 0:
            rows[r] = [-x for x in rows[r]]
        p = rows[r][c]
        for i in range(r):
            q = rows[i][c] // p
            if q:
                rows[i] = [a - q * b for a, b in zip(rows[i], rows[r])]
        r += 1
    return [tuple(row) for row in rows[:r]]


def integer_kernel_basis(A) -> list[LatticeElement]:
    """Canonical lattice basis of {z integer : A z = 0}.

    Unimodular column operations reduce A to echelon form while the same
    operations accumulate on an identity matrix; the columns that end up
    zero give a lattice basis of the kernel, which is then put in Hermite
    normal form.  Basis vectors are primitive because the kernel lattice
    is saturated.
    """
    rows = as_rows(A)
    m = len(rows)
    n = len(rows[0]) if rows else 0
    work = [[rows[i][j] for i in range(m)] for j in range(n)]  # columns
    track = [[1 if k == j else 0 for k in range(n)] for j in range(n)]
    npiv = 0
    for i in range(m):
        live = [j for j in range(npiv, n) if work[j][i]]
        if not live:
            continue
        j0 = live[0]
        for j in live[1:]:
            a, b = work[j0][i], work[j][i]
            g, s, t = _exgcd(a, b)
            a_, b_ = a // g, b // g
            cj0w, cjw = work[j0], work[j]
            work[j0] = [s * x + t * y for x, y in zip(cj0w, cjw)]
            work[j] = [-b_ * x + a_ * y for x, y in zip(cj0w, cjw)]
            cj0t, cjt = track[j0], track[j]
            track[j0] = [s * x + t * y for x, y in zip(cj0t, cjt)]
            track[j] = [-b_ * x + a_ * y for x, y in zip(cj0t, cjt)]
        work[npiv], work[j0] = work[j0], work[npiv]
        track[npiv], track[j0] = track[j0], track[npiv]
        npiv += 1
        if npiv == n:
            break
    kernel_rows = [track[j] for j in range(npiv, n)]
    return [LatticeElement(v) for v in _hermite_rows(kernel_rows)]


def checkerboard(n: int) -> LatticeElement:
    """The +-1 parity vector spanning ker A(B_n); length 2**(n-2)."""
    if n < 4:
        raise ValueError("checkerboard needs n >= 4")
    return LatticeElement(tuple(1 if sum(c) % 2 == 0 else -1 for c in cells((2,) * (n - 2))))


@dataclass(frozen=True)
class SullivantRelation:
    """f_n in ker Gamma_n, its support sigma, and the lifted pair."""

    n: int
    f: LatticeElement
    sigma: frozenset[int]
    f_hat: LatticeElement
    sigma_hat: frozenset[int]

    def __iter__(self):
        # unpacks as (f, sigma, f_hat, sigma_hat)
        return iter((self.f, self.sigma, self.f_hat, self.sigma_hat))


def gamma_column(n: int, i: Sequence[int], l: int) -> int:
    """Column index of (i|l) in the block-ordered Gamma_n matrix."""
    return l * 2 ** (n - 2) + cell_rank(i, (2,) * (n - 2))


def delta_column(n: int, i: Sequence[int], l: int, copy: int) -> int:
    """Column index of (i|l|l') in the block-ordered Lawrence lift."""
    return copy * 2 ** (n - 1) + gamma_column(n, i, l)


def sullivant_relation(n: int) -> SullivantRelation:
    """The heavy kernel relation of Gamma_n and its Lawrence lift.

    f_n puts 2**(n-3) on cell (0|0), -(2**(n-3)-1) on (0|1), -1 on every
    (i|0) with odd parity i, and +1 on every (i|1) with nonzero even
    parity i.  Its support sigma has 2**(n-2)+1 cells; the lift
    f_hat = (f, -f) doubles it.
    """
    if n < 4:
        raise ValueError("sullivant_relation needs n >= 4")
    half = 2 ** (n - 3)
    vec = [0] * 2 ** (n - 1)
    zero_cell = (0,) * (n - 2)
    vec[gamma_column(n, zero_cell, 0)] = half
    vec[gamma_column(n, zero_cell, 1)] = -(half - 1)
    for i in cells((2,) * (n - 2)):
        s = sum(i)
        if s == 0:
            continue
        if s % 2 == 1:
            vec[gamma_column(n, i, 0)] = -1
        else:
            vec[gamma_column(n, i, 1)] = 1
    f = LatticeElement(tuple(vec))
    f_hat = lift_kernel_vector(f)
    return SullivantRelation(n=n, f=f, sigma=f.support,
                             f_hat=f_hat, sigma_hat=f_hat.support)


def lift_kernel_vector(z, n_cols: int | None = None) -> LatticeElement:
    """Send a kernel vector g of A to the kernel vector (g, -g) of the lift."""
    vec = z.vector if isinstance(z, LatticeElement) else tuple(int(x) for x in z)
    if n_cols is not None and len(vec) != n_cols:
        raise ValueError(f"expected a vector of length {n_cols}, got {len(vec)}")
    return LatticeElement(vec + tuple(-x for x in vec))


def is_circuit(A, z) -> bool:
    """True iff the kernel vector z has inclusion-minimal support.

    Minimality is equivalent to the support columns having rank exactly
    |supp(z)| - 1, i.e. a one-dimensional kernel that z spans.
    """
    vec = z.vector if isinstance(z, LatticeElement) else tuple(int(x) for x in z)
    rows = as_rows(A)
    if rows and len(vec) != len(rows[0]):
        raise ValueError("vector length does not match column count")
    support = [j for j, x in enumerate(vec) if x]
    if not support:
        raise ValueError("the zero vector is not a circuit candidate")
    if any(sum(row[j] * vec[j] for j in support) for row in rows):
        raise ValueError("vector is not in the kernel")
    return rank(column_submatrix(rows, support)) == len(support) - 1
