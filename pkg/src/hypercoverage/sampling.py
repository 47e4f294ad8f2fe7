"""Latin Hypercube and Orthogonal sample generation, validation and I/O.

A trial is an ``n x d`` integer matrix over levels ``0..n-1`` whose every
column is a permutation (the Latin property).  When ``n = p**d`` each level
splits into a coarse block ``x // p**(d-1)`` and an offset ``x % p**(d-1)``;
an Orthogonal sample is a Latin trial whose rows hit every one of the
``p**d`` block combinations exactly once.

Levels are 0-based everywhere inside the package.  The CSV form uses the
1-based convention; conversion happens only at that boundary.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np

__all__ = [
    "SampleMatrix",
    "BlockCoordinate",
    "OsParameters",
    "generate_lhs",
    "is_latin",
    "decompose_level",
    "recompose_level",
    "is_orthogonal_sample",
    "generate_os",
    "infer_block_size",
    "sample_to_csv",
    "sample_from_csv",
    "sample_to_json",
    "sample_from_json",
    "write_sample",
    "read_sample",
]

# Largest admissible n = p**d; keeps level arithmetic inside exact int64.
MAX_POINTS = 2**62


@dataclass(frozen=True)
class SampleMatrix:
    """One trial: ``n`` points in a ``d``-dimensional grid of ``n`` levels.

    ``levels[i, j]`` is the level of point ``i`` along axis ``j``, in
    ``[0, n-1]``.  Instances are immutable; the backing array is marked
    read-only on construction.
    """

    levels: np.ndarray

    def __post_init__(self) -> None:
        arr = np.ascontiguousarray(self.levels, dtype=np.int64)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"levels must be a non-empty 2-D grid, got shape {arr.shape}")
        n = arr.shape[0]
        if arr.size and (arr.min() < 0 or arr.max() >= n):
            raise ValueError(f"levels must lie in [0, {n - 1}]")
        arr.flags.writeable = False
        object.__setattr__(self, "levels", arr)

    @property
    def n(self) -> int:
        return self.levels.shape[0]

    @property
    def d(self) -> int:
        return self.levels.shape[1]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SampleMatrix):
            return NotImplemented
        return self.levels.shape == other.levels.shape and bool(
            np.array_equal(self.levels, other.levels)
        )


class BlockCoordinate(NamedTuple):
    """(block, offset) split of a level when ``n = p**d``."""

    block: int
    offset: int


@dataclass(frozen=True)
class OsParameters:
    """Block structure ``n = p**d`` of an Orthogonal sample.

    ``p`` is the number of coarse blocks per axis, each spanning
    ``p**(d-1)`` consecutive levels.
    """

    p: int
    d: int

    def __post_init__(self) -> None:
        if self.p < 2:
            raise ValueError(f"p must be >= 2, got {self.p}")
        if self.d < 2:
            raise ValueError(f"d must be >= 2, got {self.d}")
        if self.p ** self.d > MAX_POINTS:
            raise OverflowError(f"p**d = {self.p}**{self.d} exceeds supported capacity")

    @property
    def n(self) -> int:
        return self.p ** self.d

    @property
    def block_span(self) -> int:
        """Levels per block along one axis, ``p**(d-1)``."""
        return self.p ** (self.d - 1)


def generate_lhs(n: int, d: int, rng: np.random.Generator) -> SampleMatrix:
    """Generate a Latin Hypercube trial: each column an independent uniform
    permutation of ``0..n-1``.

    Parameters
    ----------
    n:
        Points per trial (>= 1).
    d:
        Dimensions (>= 1).
    rng:
        Seeded generator; each column draws from its own child substream,
        so the output is a pure function of the generator's seed.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    cols = rng.spawn(d)
    levels = np.empty((n, d), dtype=np.int64)
    for j in range(d):
        levels[:, j] = cols[j].permutation(n)
    return SampleMatrix(levels)


def is_latin(sample: SampleMatrix) -> bool:
    """True iff every column contains each level ``0..n-1`` exactly once."""
    expect = np.arange(sample.n)[:, None]
    return bool((np.sort(sample.levels, axis=0) == expect).all())


def decompose_level(x: int, params: OsParameters) -> BlockCoordinate:
    """Split level ``x`` into its (block, offset) pair."""
    if not 0 <= x < params.n:
        raise ValueError(f"level {x} outside [0, {params.n - 1}]")
    span = params.block_span
    return BlockCoordinate(int(x) // span, int(x) % span)


def recompose_level(c: BlockCoordinate, params: OsParameters) -> int:
    """Inverse of :func:`decompose_level`: ``block * p**(d-1) + offset``."""
    span = params.block_span
    if not 0 <= c.block < params.p:
        raise ValueError(f"block {c.block} outside [0, {params.p - 1}]")
    if not 0 <= c.offset < span:
        raise ValueError(f"offset {c.offset} outside [0, {span - 1}]")
    return c.block * span + c.offset


def is_orthogonal_sample(sample: SampleMatrix, params: OsParameters) -> bool:
    """True iff ``sample`` is Latin and its rows, reduced to per-axis blocks,
    hit every one of the ``p**d`` block combinations (once each, since there
    are exactly ``p**d`` rows)."""
    if sample.n != params.n:
        raise ValueError(f"sample has n={sample.n}, expected p**d = {params.n}")
    if not is_latin(sample):
        return False
    blocks = sample.levels // params.block_span
    # Distinct block rows <=> full coverage, because #rows == p**d.
    return len(np.unique(blocks, axis=0)) == params.n


def generate_os(params: OsParameters, rng: np.random.Generator) -> SampleMatrix:
    """Generate an Orthogonal sample for ``n = p**d``.

    Enumerates all ``p**d`` block combinations, one per row; then, per column
    and per block value, assigns a fresh random permutation of the
    ``p**(d-1)`` offsets to the rows holding that block.  The combined level
    is ``block * p**(d-1) + offset``, which makes the output both Latin and
    an Orthogonal sample by construction.
    """
    p, d, span = params.p, params.d, params.block_span
    blocks = block_enumeration(p, d)
    cols = rng.spawn(d)
    levels = np.empty((params.n, d), dtype=np.int64)
    for j in range(d):
        for x in range(p):
            rows = np.flatnonzero(blocks[:, j] == x)
            levels[rows, j] = x * span + cols[j].permutation(span)
    return SampleMatrix(levels)


def block_enumeration(p: int, d: int) -> np.ndarray:
    """All ``p**d`` block d-tuples in lexicographic row order, shape (p**d, d)."""
    n = p ** d
    rows = np.arange(n, dtype=np.int64)
    out = np.empty((n, d), dtype=np.int64)
    for j in range(d):
        out[:, j] = (rows // p ** (d - 1 - j)) % p
    return out


def infer_block_size(n: int, d: int) -> int | None:
    """Integer ``p >= 2`` with ``p**d == n``, or None if there is none.

    Exact integer arithmetic; no floating point.
    """
    if n < 2**d or d < 1:
        return None
    p = round(n ** (1.0 / d))
    for cand in (p - 1, p, p + 1):
        if cand >= 2 and cand ** d == n:
            return cand
    return None


# ---------------------------------------------------------------------------
# Serialization.  CSV: header x1..xd, 1-based levels.  JSON: 0-based levels.
# ---------------------------------------------------------------------------


def sample_to_csv(sample: SampleMatrix) -> str:
    """Render the sample as CSV text, one row per point, 1-based levels."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([f"x{j + 1}" for j in range(sample.d)])
    for row in sample.levels + 1:
        writer.writerow([int(v) for v in row])
    return buf.getvalue()


def sample_from_csv(text: str) -> SampleMatrix:
    """Parse the CSV form produced by :func:`sample_to_csv`."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ValueError("empty sample CSV") from None
    d = len(header)
    if header != [f"x{j + 1}" for j in range(d)]:
        raise ValueError(f"unexpected sample CSV header: {header!r}")
    rows = [[int(v) for v in row] for row in reader if row]
    if not rows:
        raise ValueError("sample CSV has no data rows")
    return SampleMatrix(np.asarray(rows, dtype=np.int64) - 1)


def sample_to_json(sample: SampleMatrix, p: int | None = None) -> str:
    """Render ``{"n":..,"d":..,"p":..|null,"levels":[[..],..]}`` (0-based)."""
    if p is not None and p ** sample.d != sample.n:
        raise ValueError(f"p={p} inconsistent with n={sample.n}, d={sample.d}")
    doc = {
        "n": sample.n,
        "d": sample.d,
        "p": p,
        "levels": sample.levels.tolist(),
    }
    return json.dumps(doc, indent=2) + "\n"


def sample_from_json(text: str) -> tuple[SampleMatrix, int | None]:
    """Parse the JSON form; returns the sample and the optional block size."""
    doc = json.loads(text)
    sample = SampleMatrix(np.asarray(doc["levels"], dtype=np.int64))
    if sample.n != doc["n"] or sample.d != doc["d"]:
        raise ValueError("JSON n/d fields disagree with the levels grid")
    p = doc.get("p")
    if p is not None and p ** sample.d != sample.n:
        raise ValueError(f"JSON p={p} inconsistent with n={sample.n}, d={sample.d}")
    return sample, p


def write_sample(sample: SampleMatrix, path: str | Path, fmt: str = "csv",
                 p: int | None = None) -> None:
    """Write a sample file in ``csv`` or ``json`` format."""
    text = sample_to_csv(sample) if fmt == "csv" else sample_to_json(sample, p)
    Path(path).write_text(text)


def read_sample(path: str | Path) -> tuple[SampleMatrix, int | None]:
    """Read a sample file, dispatching on extension (.json vs CSV)."""
    path = Path(path)
    text = path.read_text()
    if path.suffix == ".json":
        return sample_from_json(text)
    return sample_from_csv(text), None
