"""Coverage of t-dimensional subspaces under repeated sampling trials.

The central quantity: given k trials of n points each, which fraction of the
``n**t`` cells of a t-column projection has been hit at least once.  This
module tracks that fraction incrementally, evaluates the closed-form law

    P(k, n, t) = 1 - (1 - 1/n**(t-1))**k

and its large-k limit ``1 - exp(-k / n**(t-1))``, runs trials-to-threshold
campaigns over many replicates, fits log-log growth rates, and histograms
sub-block occupancy of 2-D projections.

Campaigns monitor all ``C(d, t)`` subspaces and use their mean coverage;
"reaching threshold x" means the smallest k at which that mean is >= x.
Replicates derive independent substreams from (master_seed, replicate,
column), so results are identical no matter how replicates are scheduled
across workers or how trials are batched internally.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial
from typing import NamedTuple, Sequence

import numpy as np

from .rng import MAX_SEED, substream
from .sampling import OsParameters, SampleMatrix, block_enumeration, infer_block_size

__all__ = [
    "DENSE_CELL_LIMIT",
    "CoverageState",
    "CampaignConfig",
    "CoverageCampaignResult",
    "SubBlockHistogram",
    "CurvePoint",
    "covered_fraction",
    "conjectured_coverage",
    "asymptotic_coverage",
    "trials_for_full_coverage_estimate",
    "run_campaign",
    "coverage_curve",
    "fit_loglog_gradient",
    "subblock_histogram",
    "collect_trials_to_coverage",
    "subblock_replicate",
    "campaign_csv",
    "campaign_summary",
    "curve_csv",
    "histogram_csv",
]

# Cell spaces up to this size use a dense occupancy array; larger ones fall
# back to a hash set with identical behavior.
DENSE_CELL_LIMIT = 2**26

# Marks cells not yet covered in the per-replicate first-cover tables.
_NEVER = np.iinfo(np.int32).max


def _check_subspace(subspace: Sequence[int], d: int) -> tuple[int, ...]:
    subs = tuple(int(c) for c in subspace)
    if len(subs) < 1:
        raise ValueError("subspace needs at least one column index")
    if len(set(subs)) != len(subs):
        raise ValueError(f"subspace indices must be distinct, got {subs}")
    if min(subs) < 0 or max(subs) >= d:
        raise ValueError(f"subspace indices must lie in [0, {d - 1}], got {subs}")
    return subs


def _encode_cells(levels: np.ndarray, subspace: Sequence[int], n: int) -> np.ndarray:
    """Map projected rows to flat cell ids in [0, n**t); works on any leading
    shape, encoding along the last axis."""
    enc = np.zeros(levels.shape[:-1], dtype=np.int64)
    for c in subspace:
        enc = enc * n + levels[..., c]
    return enc.ravel()


# ---------------------------------------------------------------------------
# Closed-form coverage laws
# ---------------------------------------------------------------------------


def conjectured_coverage(k: int, n: int, t: int) -> float:
    """Expected covered fraction of a t-subspace after k trials:
    ``1 - (1 - 1/n**(t-1))**k``, evaluated stably for large k."""
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if t < 2:
        raise ValueError(f"t must be >= 2, got {t}")
    if k == 0:
        return 0.0
    return -math.expm1(k * math.log1p(-1.0 / n ** (t - 1)))


def asymptotic_coverage(k: float, n: int, t: int) -> float:
    """Large-k limit of :func:`conjectured_coverage`: ``1 - exp(-k/n**(t-1))``."""
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if t < 2:
        raise ValueError(f"t must be >= 2, got {t}")
    return -math.expm1(-k / n ** (t - 1))


def trials_for_full_coverage_estimate(n: int, t: int) -> float:
    """Rough trial count at which full coverage becomes plausible:
    ``(t-1) * ln(n) * n**(t-1)`` (natural log)."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if t < 2:
        raise ValueError(f"t must be >= 2, got {t}")
    return (t - 1) * math.log(n) * n ** (t - 1)


# ---------------------------------------------------------------------------
# Incremental coverage tracking
# ---------------------------------------------------------------------------


class CoverageState:
    """Covered-cell set of one t-subspace, folded one trial at a time.

    ``occupancy`` is a dense boolean array when ``n**t <= DENSE_CELL_LIMIT``
    and a set of flat cell ids otherwise; ``covered_count`` always equals the
    number of covered cells.
    """

    def __init__(self, n: int, subspace: Sequence[int]):
        if n < 1:
            raise ValueError(f"n must be >= 1, got {n}")
        self.n = n
        self.subspace = tuple(int(c) for c in subspace)
        if len(set(self.subspace)) != len(self.subspace) or min(self.subspace, default=0) < 0:
            raise ValueError(f"invalid subspace {subspace}")
        self.t = len(self.subspace)
        self.cells = n ** self.t
        self._dense = self.cells <= DENSE_CELL_LIMIT
        self.occupancy: np.ndarray | set = (
            np.zeros(self.cells, dtype=bool) if self._dense else set()
        )
        self.covered_count = 0

    def fold(self, sample: SampleMatrix) -> None:
        """Mark the cells this trial hits; duplicates are harmless."""
        if sample.n != self.n:
            raise ValueError(f"sample has n={sample.n}, state expects {self.n}")
        if max(self.subspace) >= sample.d:
            raise ValueError(f"subspace {self.subspace} out of range for d={sample.d}")
        idx = np.unique(_encode_cells(sample.levels, self.subspace, self.n))
        if self._dense:
            fresh = ~self.occupancy[idx]
            self.occupancy[idx] = True
            self.covered_count += int(np.count_nonzero(fresh))
        else:
            self.occupancy.update(idx.tolist())
            self.covered_count = len(self.occupancy)

    @property
    def covered_fraction(self) -> float:
        return self.covered_count / self.cells


def covered_fraction(samples: Sequence[SampleMatrix], subspace: Sequence[int]) -> float:
    """Fraction of the ``n**t`` cells of the given subspace hit by at least
    one point of any sample.  Zero for an empty sample list."""
    samples = list(samples)
    if not samples:
        return 0.0
    n, d = samples[0].n, samples[0].d
    for s in samples:
        if (s.n, s.d) != (n, d):
            raise ValueError(f"mixed sample shapes: {(s.n, s.d)} vs {(n, d)}")
    subs = _check_subspace(subspace, d)
    seen: set[tuple[int, ...]] = set()
    for s in samples:
        seen.update(map(tuple, s.levels[:, list(subs)].tolist()))
    return len(seen) / n ** len(subs)


# ---------------------------------------------------------------------------
# Campaign configuration and results
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CampaignConfig:
    """Parameters of one trials-to-threshold experiment."""

    n: int
    d: int
    t: int
    thresholds: tuple[float, ...] = (0.25, 0.5, 0.75, 1.0)
    replicates: int = 200
    max_trials: int = 1_000_000
    sampler: str = "lhs"
    master_seed: int = 0

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError(f"n must be >= 2, got {self.n}")
        if self.t < 1:
            raise ValueError(f"t must be >= 1, got {self.t}")
        if self.d < self.t:
            raise ValueError(f"need d >= t, got d={self.d}, t={self.t}")
        ths = tuple(float(x) for x in self.thresholds)
        if not ths:
            raise ValueError("at least one threshold required")
        if any(not 0.0 < x <= 1.0 for x in ths):
            raise ValueError(f"thresholds must lie in (0, 1], got {ths}")
        if any(a >= b for a, b in zip(ths, ths[1:])):
            raise ValueError(f"thresholds must be strictly ascending, got {ths}")
        object.__setattr__(self, "thresholds", ths)
        if self.replicates < 1:
            raise ValueError(f"replicates must be >= 1, got {self.replicates}")
        if not 0 <= self.max_trials < _NEVER:
            raise ValueError(f"max_trials must lie in [0, {_NEVER - 1}]")
        if self.sampler not in ("lhs", "os"):
            raise ValueError(f"sampler must be 'lhs' or 'os', got {self.sampler!r}")
        if self.sampler == "os" and infer_block_size(self.n, self.d) is None:
            raise ValueError(
                f"sampler 'os' needs n = p**d for integer p >= 2; n={self.n}, d={self.d}"
            )
        if not 0 <= self.master_seed <= MAX_SEED:
            raise ValueError(f"master_seed must lie in [0, {MAX_SEED}]")

    @property
    def subspaces(self) -> tuple[tuple[int, ...], ...]:
        return tuple(itertools.combinations(range(self.d), self.t))


@dataclass(frozen=True)
class CoverageCampaignResult:
    """Trials-to-threshold outcomes of every replicate of one campaign.

    ``trials[r, i]`` is the first trial count at which replicate r's mean
    coverage reached ``thresholds[i]``; where ``censored[r, i]`` is set the
    cap was hit first and ``trials[r, i]`` holds ``max_trials``.
    ``trials_by_subspace[r, i, s]`` is the same crossing for subspace s
    alone, or -1 when the replicate stopped before that crossing was seen.
    """

    config: CampaignConfig
    trials: np.ndarray
    censored: np.ndarray
    trials_by_subspace: np.ndarray

    @property
    def n(self) -> int:
        return self.config.n

    @property
    def d(self) -> int:
        return self.config.d

    @property
    def t(self) -> int:
        return self.config.t

    @property
    def thresholds(self) -> tuple[float, ...]:
        return self.config.thresholds

    @property
    def replicates(self) -> int:
        return self.config.replicates

    @property
    def master_seed(self) -> int:
        return self.config.master_seed

    @property
    def trials_to_threshold(self) -> dict[float, np.ndarray]:
        """Per-threshold array of per-replicate trial counts."""
        return {th: self.trials[:, i] for i, th in enumerate(self.thresholds)}

    @property
    def mean_trials(self) -> np.ndarray:
        """Per-threshold mean over uncensored replicates (NaN if none)."""
        return self._reduce(np.mean)

    @property
    def stderr_trials(self) -> np.ndarray:
        """Per-threshold standard error over uncensored replicates."""

        def stderr(v: np.ndarray) -> float:
            if len(v) < 2:
                return 0.0
            return float(np.std(v, ddof=1) / math.sqrt(len(v)))

        return self._reduce(stderr)

    @property
    def censored_replicates(self) -> np.ndarray:
        return self.censored.sum(axis=0)

    def _reduce(self, fn) -> np.ndarray:
        out = np.empty(len(self.thresholds))
        for i in range(len(self.thresholds)):
            ok = self.trials[~self.censored[:, i], i]
            out[i] = float(fn(ok)) if len(ok) else math.nan
        return out


class CurvePoint(NamedTuple):
    """One row of a coverage-versus-trials curve."""

    k: int
    empirical: float
    conjectured: float
    asymptotic: float
    stderr: float


@dataclass(frozen=True)
class SubBlockHistogram:
    """Occupancy of the p x p coarse blocks of one 2-D projection.

    ``normalized = counts / (trials * p**(d-2))``, the unique scaling under
    which an exact Orthogonal sample gives 1.0 in every block.
    """

    p: int
    subspace_pair: tuple[int, int]
    counts: np.ndarray
    normalized: np.ndarray
    trials: int


def subblock_histogram(
    samples: Sequence[SampleMatrix],
    params,
    subspace_pair: Sequence[int],
) -> SubBlockHistogram:
    """Count points of all samples in each p x p block pair of one 2-D
    projection of an ``n = p**d`` grid."""
    i, j = _check_subspace(subspace_pair, params.d)
    samples = list(samples)
    counts = np.zeros((params.p, params.p), dtype=np.int64)
    span = params.block_span
    for s in samples:
        if s.n != params.n:
            raise ValueError(f"sample has n={s.n}, expected p**d = {params.n}")
        bi = s.levels[:, i] // span
        bj = s.levels[:, j] // span
        np.add.at(counts, (bi, bj), 1)
    k = len(samples)
    scale = k * params.p ** (params.d - 2)
    normalized = counts / scale if k else counts.astype(float)
    return SubBlockHistogram(
        p=params.p, subspace_pair=(i, j), counts=counts, normalized=normalized, trials=k
    )


# ---------------------------------------------------------------------------
# Replicate engine
#
# Trials are generated in batches, each column drawing exactly n uniforms
# per trial from its (master_seed, replicate, column) substream; the
# trial -> bits mapping is therefore independent of batch boundaries.  For
# every monitored subspace we record the first trial index covering each
# cell, from which threshold crossings and whole coverage curves follow
# exactly.
# ---------------------------------------------------------------------------


class _TrialBatchSource:
    """Generates consecutive trial level batches for one replicate."""

    def __init__(self, config: CampaignConfig, replicate: int):
        self.n, self.d = config.n, config.d
        self.sampler = config.sampler
        self._cols = [
            substream(config.master_seed, replicate, j) for j in range(config.d)
        ]
        if self.sampler == "os":
            self.p = infer_block_size(config.n, config.d)
            self.span = self.p ** (config.d - 1)
            blocks = block_enumeration(self.p, config.d)
            self._rows_by = [
                [np.flatnonzero(blocks[:, j] == x) for x in range(self.p)]
                for j in range(config.d)
            ]

    def next(self, batch: int) -> np.ndarray:
        """Levels of the next ``batch`` trials, shape (batch, n, d)."""
        levels = np.empty((batch, self.n, self.d), dtype=np.int64)
        if self.sampler == "lhs":
            for j in range(self.d):
                u = self._cols[j].random((batch, self.n))
                levels[:, :, j] = np.argsort(u, axis=1)
        else:
            for j in range(self.d):
                u = self._cols[j].random((batch, self.p, self.span))
                offsets = np.argsort(u, axis=2)
                for x in range(self.p):
                    levels[:, self._rows_by[j][x], j] = x * self.span + offsets[:, x, :]
        return levels


def _required_count(tau: float, total: int) -> int:
    """Smallest c with c/total >= tau under float64 comparison."""
    c = min(math.ceil(tau * total), total)
    while c > 0 and (c - 1) / total >= tau:
        c -= 1
    while c <= total and c / total < tau:
        c += 1
    return c


class _FirstCoverTable:
    """First-covering-trial index per cell, per subspace."""

    def __init__(self, n_subspaces: int, cells: int):
        self.cells = cells
        self.dense = cells <= DENSE_CELL_LIMIT
        if self.dense:
            self.table = np.full((n_subspaces, cells), _NEVER, dtype=np.int32)
        else:
            self.maps: list[dict[int, int]] = [dict() for _ in range(n_subspaces)]

    def update(self, s: int, idx: np.ndarray, tids: np.ndarray) -> None:
        if self.dense:
            np.minimum.at(self.table[s], idx, tids)
        else:
            # first occurrence per cell within the batch = earliest trial,
            # because idx is laid out in trial order
            cells, firstpos = np.unique(idx, return_index=True)
            cand = tids[firstpos]
            m = self.maps[s]
            for c, k in zip(cells.tolist(), cand.tolist()):
                if c not in m:
                    m[c] = k

    def covered_total(self) -> int:
        if self.dense:
            return int(self.table.size - np.count_nonzero(self.table == _NEVER))
        return sum(len(m) for m in self.maps)

    def sorted_values(self, s: int | None = None) -> np.ndarray:
        """Ascending first-cover trial indices with one entry per cell;
        uncovered cells hold the _NEVER sentinel and sort last."""
        if self.dense:
            vals = self.table.ravel() if s is None else self.table[s]
            return np.sort(vals)
        maps = self.maps if s is None else [self.maps[s]]
        out = np.full(self.cells * len(maps), _NEVER, dtype=np.int64)
        vals = np.fromiter(
            (v for m in maps for v in m.values()),
            dtype=np.int64,
            count=sum(len(m) for m in maps),
        )
        out[: len(vals)] = np.sort(vals)
        return out

    def curve_counts(self, s: int, k_max: int) -> np.ndarray:
        """Covered-cell count after k = 1..k_max trials for one subspace."""
        if self.dense:
            vals = self.table[s][self.table[s] != _NEVER]
        else:
            vals = np.fromiter(self.maps[s].values(), dtype=np.int64)
        hist = np.bincount(vals, minlength=k_max + 1)[: k_max + 1]
        return np.cumsum(hist)[1:]


def _run_replicate_table(
    config: CampaignConfig, replicate: int, k_cap: int, stop_count: int | None,
    batch_cap: int = 2048,
) -> tuple[_FirstCoverTable, int]:
    """Generate trials until ``stop_count`` pooled cells are covered or
    ``k_cap`` trials have been used; return the first-cover table."""
    subspaces = config.subspaces
    cells = config.n ** config.t
    table = _FirstCoverTable(len(subspaces), cells)
    source = _TrialBatchSource(config, replicate)
    k_done = 0
    batch = 32
    while k_done < k_cap:
        size = min(batch, k_cap - k_done)
        levels = source.next(size)
        tids = np.repeat(
            np.arange(k_done + 1, k_done + size + 1, dtype=np.int32), config.n
        )
        for s, cols in enumerate(subspaces):
            idx = _encode_cells(levels, cols, config.n)
            table.update(s, idx, tids)
        k_done += size
        if stop_count is not None and table.covered_total() >= stop_count:
            break
        batch = min(batch * 2, batch_cap)
    return table, k_done


def _campaign_replicate(config: CampaignConfig, replicate: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    subspaces = config.subspaces
    cells = config.n ** config.t
    total = len(subspaces) * cells
    required = [_required_count(tau, total) for tau in config.thresholds]
    table, k_done = _run_replicate_table(
        config, replicate, config.max_trials, stop_count=required[-1]
    )

    pooled = table.sorted_values()
    trials = np.empty(len(required), dtype=np.int64)
    censored = np.zeros(len(required), dtype=bool)
    for i, c in enumerate(required):
        k = int(pooled[c - 1])
        if k == _NEVER:
            trials[i] = config.max_trials
            censored[i] = True
        else:
            trials[i] = k

    by_sub = np.full((len(required), len(subspaces)), -1, dtype=np.int64)
    for s in range(len(subspaces)):
        vals = table.sorted_values(s)
        for i, tau in enumerate(config.thresholds):
            c = _required_count(tau, cells)
            k = int(vals[c - 1])
            if k != _NEVER:
                by_sub[i, s] = k
    return trials, censored, by_sub


def _map_replicates(fn, replicates: int, workers: int) -> list:
    if workers <= 1 or replicates <= 1:
        return [fn(r) for r in range(replicates)]
    chunk = max(1, replicates // (workers * 4))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(replicates), chunksize=chunk))


def run_campaign(config: CampaignConfig, *, workers: int = 1) -> CoverageCampaignResult:
    """Run every replicate of a trials-to-threshold campaign.

    Per replicate, trials are generated until the mean coverage over all
    ``C(d, t)`` subspaces reaches the top threshold (or ``max_trials`` is
    hit, which censors the remaining thresholds).  The recorded value per
    threshold is the smallest trial count whose mean coverage is >= it.
    ``workers`` only schedules replicates; it never changes results.
    """
    rows = _map_replicates(partial(_campaign_replicate, config), config.replicates, workers)
    trials = np.stack([r[0] for r in rows])
    censored = np.stack([r[1] for r in rows])
    by_sub = np.stack([r[2] for r in rows])
    return CoverageCampaignResult(
        config=config, trials=trials, censored=censored, trials_by_subspace=by_sub
    )


def _curve_replicate(config: CampaignConfig, k_max: int, replicate: int) -> np.ndarray:
    table, _ = _run_replicate_table(config, replicate, k_max, stop_count=None)
    cells = config.n ** config.t
    acc = np.zeros(k_max)
    for s in range(len(config.subspaces)):
        acc += table.curve_counts(s, k_max) / cells
    return acc / len(config.subspaces)


def coverage_curve(
    config: CampaignConfig, k_max: int, *, workers: int = 1
) -> list[CurvePoint]:
    """Tabulate empirical mean coverage after k = 1..k_max trials against
    the closed-form and asymptotic laws.

    The empirical column is the Monte Carlo mean over ``config.replicates``
    replicates of the mean coverage over all ``C(d, t)`` subspaces.
    """
    if k_max < 1:
        raise ValueError(f"k_max must be >= 1, got {k_max}")
    if config.t < 2:
        raise ValueError(f"coverage_curve needs t >= 2, got t={config.t}")
    curves = np.stack(
        _map_replicates(partial(_curve_replicate, config, k_max), config.replicates, workers)
    )
    mean = curves.mean(axis=0)
    if config.replicates > 1:
        stderr = curves.std(axis=0, ddof=1) / math.sqrt(config.replicates)
    else:
        stderr = np.zeros(k_max)
    return [
        CurvePoint(
            k=k,
            empirical=float(mean[k - 1]),
            conjectured=conjectured_coverage(k, config.n, config.t),
            asymptotic=asymptotic_coverage(k, config.n, config.t),
            stderr=float(stderr[k - 1]),
        )
        for k in range(1, k_max + 1)
    ]


def fit_loglog_gradient(
    results: Sequence[CoverageCampaignResult], threshold: float
) -> float:
    """Least-squares slope of log10(mean trials) against log10(n) at one
    threshold, across campaigns that vary n at fixed (d, t)."""
    results = list(results)
    if len({r.n for r in results}) < 3:
        raise ValueError("need results for at least 3 distinct n values")
    if len({(r.d, r.t) for r in results}) != 1:
        raise ValueError("all results must share d and t")
    xs, ys = [], []
    for r in results:
        if threshold not in r.thresholds:
            raise ValueError(f"threshold {threshold} missing from result for n={r.n}")
        m = r.mean_trials[r.thresholds.index(threshold)]
        if not math.isfinite(m):
            raise ValueError(f"no uncensored replicates at threshold {threshold} for n={r.n}")
        xs.append(math.log10(r.n))
        ys.append(math.log10(m))
    slope, _ = np.polyfit(xs, ys, 1)
    return float(slope)


# ---------------------------------------------------------------------------
# Text forms.  Floats carry 17 significant digits so values round-trip.
# ---------------------------------------------------------------------------


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def campaign_csv(result: CoverageCampaignResult) -> str:
    """Per-replicate rows: ``n,d,t,sampler,threshold,replicate,trials,censored``."""
    cfg = result.config
    lines = ["n,d,t,sampler,threshold,replicate,trials,censored"]
    for i, tau in enumerate(cfg.thresholds):
        for r in range(cfg.replicates):
            lines.append(
                f"{cfg.n},{cfg.d},{cfg.t},{cfg.sampler},{_fmt(tau)},{r},"
                f"{int(result.trials[r, i])},"
                f"{'true' if result.censored[r, i] else 'false'}"
            )
    return "\n".join(lines) + "\n"


def campaign_summary(result: CoverageCampaignResult) -> dict:
    """JSON-able summary: config plus per-threshold means and errors."""
    cfg = result.config

    def clean(v: float) -> float | None:
        return None if not math.isfinite(v) else float(v)

    return {
        "n": cfg.n,
        "d": cfg.d,
        "t": cfg.t,
        "sampler": cfg.sampler,
        "replicates": cfg.replicates,
        "max_trials": cfg.max_trials,
        "master_seed": cfg.master_seed,
        "thresholds": list(cfg.thresholds),
        "mean_trials": [clean(v) for v in result.mean_trials],
        "stderr_trials": [clean(v) for v in result.stderr_trials],
        "censored_replicates": [int(v) for v in result.censored_replicates],
    }


def curve_csv(points: Sequence[CurvePoint]) -> str:
    """Rows ``k,empirical,conjectured,asymptotic,stderr``."""
    lines = ["k,empirical,conjectured,asymptotic,stderr"]
    for p in points:
        lines.append(
            f"{p.k},{_fmt(p.empirical)},{_fmt(p.conjectured)},"
            f"{_fmt(p.asymptotic)},{_fmt(p.stderr)}"
        )
    return "\n".join(lines) + "\n"


def histogram_csv(hist: SubBlockHistogram) -> str:
    """Rows ``b1,b2,count,normalized``."""
    lines = ["b1,b2,count,normalized"]
    for b1 in range(hist.p):
        for b2 in range(hist.p):
            lines.append(
                f"{b1},{b2},{int(hist.counts[b1, b2])},{_fmt(hist.normalized[b1, b2])}"
            )
    return "\n".join(lines) + "\n"


def collect_trials_to_coverage(
    config: CampaignConfig, replicate: int
) -> tuple[list[SampleMatrix], float]:
    """Generate trials one by one until the mean coverage over all C(d, t)
    subspaces reaches the top threshold; return them with the final mean.

    Raises RuntimeError if ``max_trials`` is exhausted first.  Uses the same
    substreams as the campaign engine, so trial k here equals trial k there.
    """
    target = config.thresholds[-1]
    states = [CoverageState(config.n, sub) for sub in config.subspaces]
    total = len(states) * config.n ** config.t
    source = _TrialBatchSource(config, replicate)
    out: list[SampleMatrix] = []
    while len(out) < config.max_trials:
        sample = SampleMatrix(source.next(1)[0])
        out.append(sample)
        for st in states:
            st.fold(sample)
        covered = sum(st.covered_count for st in states)
        if covered / total >= target:
            return out, covered / total
    raise RuntimeError(
        f"coverage target {target} not reached within max_trials={config.max_trials}"
    )


def subblock_replicate(config: CampaignConfig, replicate: int) -> tuple[int, np.ndarray]:
    """Run one replicate to its coverage target and histogram every 2-D
    projection pair.

    Returns ``(trials used, counts)`` where ``counts[s]`` is the p x p grid
    of pair s, pairs in ``itertools.combinations(range(d), 2)`` order.
    """
    if config.t != 2:
        raise ValueError(f"sub-block runs track 2-D coverage, got t={config.t}")
    p = infer_block_size(config.n, config.d)
    if p is None:
        raise ValueError(f"sub-blocks need n = p**d; n={config.n}, d={config.d}")
    params = OsParameters(p, config.d)
    trials, _ = collect_trials_to_coverage(config, replicate)
    counts = np.stack(
        [
            subblock_histogram(trials, params, pair).counts
            for pair in itertools.combinations(range(config.d), 2)
        ]
    )
    return len(trials), counts
