"""Monte Carlo and dimension experiments on margin slices.

M(q) is the set of margins of tables with total count q.  Exact uniform
sampling over M(q) itself is not tractable here, so tables are sampled
instead under two explicit distributions and their margins taken; the
report labels the runs accordingly.  Per sample the exact gap at the
first cell is recorded together with membership in the image of each
heavy standard pair, giving an empirical frequency for the large-gap
margins.  The dimension report gives the structural reason the hits are
rare: the heavy margins live in a slice whose dimension drops by
2^(n-2)-1 below the full margin cone slice, and they cannot appear at
all before q reaches the 1-norm of the heavy pair root.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import BudgetExceededError
from .linalg import rank as matrix_rank
from .linalg import sullivant_relation
from .models import as_rows, column_submatrix, delta_block_matrix
from .models import margins_of
from .stdpairs import StandardPair, margin_membership
from .solvers import gap as solve_gap

DISTRIBUTIONS = ("uniform-composition", "multinomial-uniform")

_MASK64 = (1 << 64) - 1


def _mix(seed: int, index: int) -> int:
    """Splittable per-draw stream seed: one mixing pass per (seed, index)."""
    z = (seed + (index + 1) * 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


@dataclass(frozen=True)
class SampleConfig:
    n: int
    q: int
    samples: int
    seed: int
    distribution: str = "uniform-composition"

    def __post_init__(self):
        if self.n < 4:
            raise ValueError("experiments need n >= 4")
        if self.q < 0:
            raise ValueError("table total must be nonnegative")
        if self.samples < 1:
            raise ValueError("need at least one sample")
        if self.distribution not in DISTRIBUTIONS:
            raise ValueError(f"unknown distribution {self.distribution!r}")


def sample_table(config: SampleConfig, index: int) -> tuple[int, ...]:
    """Deterministic table draw number `index` for the config.

    uniform-composition: uniform over all tables with 1-norm q
    (stars and bars); multinomial-uniform: q cell draws with equal
    probabilities.  Streams depend only on (seed, index).
    """
    n_cells = 2 ** config.n
    rng = random.Random(_mix(config.seed, index))
    if config.q == 0:
        return (0,) * n_cells
    if config.distribution == "uniform-composition":
        bars = sorted(rng.sample(range(config.q + n_cells - 1), n_cells - 1))
        out = []
        prev = -1
        for b in bars:
            out.append(b - prev - 1)
            prev = b
        out.append(config.q + n_cells - 2 - prev)
        return tuple(out)
    counts = [0] * n_cells
    for _ in range(config.q):
        counts[rng.randrange(n_cells)] += 1
    return tuple(counts)


@dataclass(frozen=True)
class DimensionReport:
    n: int
    cone_dim: int
    shifted_dim: int
    slice_dim: int
    shifted_slice_dim: int
    slice_difference: int
    threshold_q: int


def dimension_report(n: int) -> DimensionReport:
    """Exact dimension counts behind the rarity of heavy margins.

    cone_dim is the rank of the lifted matrix (dimension of its margin
    cone), shifted_dim the rank of the columns sigma_hat minus the first
    cell (the cone containing the heavy margins, after the fixed root
    shift).  Slices by fixed total q each lose one dimension; their
    difference is the codimension of the heavy stratum.  The heavy
    margins need q at least the 1-norm of the heavy pair root.
    """
    if n < 4:
        raise ValueError("dimension report needs n >= 4")
    rows = as_rows(delta_block_matrix(n))
    cone = matrix_rank(rows)
    rel = sullivant_relation(n)
    shifted_cols = sorted(rel.sigma_hat - {0})
    shifted = matrix_rank(column_submatrix(rows, shifted_cols))
    return DimensionReport(
        n=n,
        cone_dim=cone,
        shifted_dim=shifted,
        slice_dim=cone - 1,
        shifted_slice_dim=shifted - 1,
        slice_difference=(cone - 1) - (shifted - 1),
        threshold_q=2 ** (n - 3) - 1,
    )


@dataclass(frozen=True)
class SampleRecord:
    index: int
    gap: object
    hits: tuple[int, ...]
    dominates_witness: bool


@dataclass(frozen=True)
class RarityReport:
    config: SampleConfig
    histogram: tuple[tuple[object, int], ...]
    sullivant_hits: tuple[int, ...]
    counted: int
    excluded: int
    hit_records: tuple[SampleRecord, ...]
    records: tuple[SampleRecord, ...] | None
    dimensions: DimensionReport
    threshold_note: str

    @property
    def hit_fraction(self) -> object:
        from .rationals import QQ
        total = sum(1 for r in self.hit_records)
        return QQ(total, self.counted) if self.counted else QQ(0)


class _Context:
    """Per-n solver context shared across samples (and worker processes)."""

    cache: dict[int, "_Context"] = {}

    def __init__(self, n: int):
        self.rows = as_rows(delta_block_matrix(n))
        rel = sullivant_relation(n)
        n_cols = 2 ** n
        self.cost = (1,) + (0,) * (n_cols - 1)
        tau = tuple(sorted(rel.sigma_hat - {0}))
        self.big_k = 2 ** (n - 3) - 1
        self.pairs = [
            StandardPair(tuple(k if j == 0 else 0 for j in range(n_cols)), tau)
            for k in range(1, self.big_k + 1)
        ]
        witness = list(rel.f_hat.positive)
        witness[0] -= 1
        self.witness = tuple(witness)

    @classmethod
    def get(cls, n: int) -> "_Context":
        ctx = cls.cache.get(n)
        if ctx is None:
            ctx = cls.cache[n] = cls(n)
        return ctx


def _one_sample(config: SampleConfig, index: int, node_budget: int,
                membership_cap: int,
                table: tuple[int, ...] | None = None) -> SampleRecord | None:
    ctx = _Context.get(config.n)
    if table is None:
        table = sample_table(config, index)
    b = margins_of(ctx.rows, table)
    try:
        report = solve_gap(ctx.rows, ctx.cost, b, node_budget=node_budget)
    except BudgetExceededError:
        return None
    hits = tuple(k + 1 for k, pair in enumerate(ctx.pairs)
                 if margin_membership(b, pair, ctx.rows, cap=membership_cap))
    dominates = all(t >= w for t, w in zip(table, ctx.witness))
    return SampleRecord(index=index, gap=report.gap, hits=hits,
                        dominates_witness=dominates)


def _worker(args) -> SampleRecord | None:
    config, index, node_budget, membership_cap = args
    return _one_sample(config, index, node_budget, membership_cap)


def rarity_run(config: SampleConfig, *, node_budget: int = 200000,
               membership_cap: int = 10**6,
               overrides: Mapping[int, Sequence[int]] | None = None,
               jobs: int = 1, keep_records: bool = True) -> RarityReport:
    """Run the sampling experiment described by the config.

    overrides maps draw indices to fixed tables (used to inject known
    witnesses); jobs > 1 fans samples out to worker processes, which is
    sound because every draw has its own RNG stream and aggregation is
    order-independent.  Samples whose solve exceeds the node budget are
    excluded from the totals and counted separately.
    """
    overrides = dict(overrides or {})
    results: list[SampleRecord | None] = []
    plain = [i for i in range(config.samples) if i not in overrides]
    if jobs > 1 and plain:
        from multiprocessing import Pool

        with Pool(jobs) as pool:
            work = [(config, i, node_budget, membership_cap) for i in plain]
            results.extend(pool.map(_worker, work, chunksize=64))
    else:
        for i in plain:
            results.append(_one_sample(config, i, node_budget, membership_cap))
    for i in sorted(overrides):
        table = tuple(int(x) for x in overrides[i])
        if len(table) != 2 ** config.n or any(x < 0 for x in table):
            raise ValueError(f"override table at index {i} is malformed")
        results.append(_one_sample(config, i, node_budget, membership_cap, table))

    records = sorted((r for r in results if r is not None), key=lambda r: r.index)
    excluded = sum(1 for r in results if r is None)
    histogram: dict[object, int] = {}
    hits_per_k = [0] * _Context.get(config.n).big_k
    hit_records = []
    for rec in records:
        histogram[rec.gap] = histogram.get(rec.gap, 0) + 1
        for k in rec.hits:
            hits_per_k[k - 1] += 1
        if rec.hits:
            hit_records.append(rec)
    dims = dimension_report(config.n)
    note = (f"margins of the heavy pair need q >= {dims.threshold_q}; "
            f"their slice loses {dims.slice_difference} dimensions")
    return RarityReport(
        config=config,
        histogram=tuple(sorted(histogram.items(), key=lambda kv: kv[0])),
        sullivant_hits=tuple(hits_per_k),
        counted=len(records),
        excluded=excluded,
        hit_records=tuple(hit_records),
        records=tuple(records) if keep_records else None,
        dimensions=dims,
        threshold_note=note,
    )
