"""Orthogonal arrays: construction, strength verification, randomization,
and expansion into Latin samples with stratified low-dimensional margins.

An ``OA(N, d, s, t)`` is an ``N x d`` array over symbols ``0..s-1`` such
that every projection onto ``t`` columns contains every ``t``-tuple exactly
``lam = N / s**t`` times.  Expanding each symbol occurrence into a distinct
level from that symbol's stratum (in random order, per column) yields an
``N``-point Latin sample whose ``t``-dimensional margins are stratified at
the block level.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .sampling import SampleMatrix

__all__ = [
    "OrthogonalArray",
    "build_oa_strength2",
    "verify_strength",
    "tang_expand",
    "randomize_oa",
    "write_oa",
    "read_oa",
]


@dataclass(frozen=True)
class OrthogonalArray:
    """An ``N x d`` symbol array with declared strength ``t`` and index ``lam``.

    Construction checks the cheap invariants (shape, symbol range,
    ``N == lam * s**t``); the coverage-multiplicity property itself is the
    job of :func:`verify_strength`, which constructors and importers run.
    """

    rows: np.ndarray
    s: int
    t: int
    lam: int

    def __post_init__(self) -> None:
        arr = np.ascontiguousarray(self.rows, dtype=np.int64)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"rows must be a non-empty 2-D array, got shape {arr.shape}")
        if self.s < 1 or self.t < 1 or self.lam < 1:
            raise ValueError("s, t, lam must be positive")
        if self.t > arr.shape[1]:
            raise ValueError(f"strength t={self.t} exceeds d={arr.shape[1]} columns")
        if arr.shape[0] != self.lam * self.s ** self.t:
            raise ValueError(
                f"N={arr.shape[0]} != lam*s**t = {self.lam * self.s ** self.t}"
            )
        if arr.min() < 0 or arr.max() >= self.s:
            raise ValueError(f"symbols must lie in [0, {self.s - 1}]")
        arr.flags.writeable = False
        object.__setattr__(self, "rows", arr)

    @property
    def N(self) -> int:
        return self.rows.shape[0]

    @property
    def d(self) -> int:
        return self.rows.shape[1]


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def build_oa_strength2(s: int, d: int) -> OrthogonalArray:
    """Construct ``OA(s**2, d, s, 2)`` with index 1 for prime ``s``.

    Rows are indexed by pairs ``(a, b)`` mod ``s``; column 0 holds ``a``,
    column 1 holds ``b``, and column ``j >= 2`` holds ``(a + (j-1)*b) mod s``.
    For prime ``s`` any two such columns restrict to a bijection on the
    ``(a, b)`` grid, giving strength 2 for up to ``s + 1`` columns.
    """
    if not _is_prime(s):
        raise ValueError(f"s must be prime, got {s}")
    if not 2 <= d <= s + 1:
        raise ValueError(f"d must satisfy 2 <= d <= s+1 = {s + 1}, got {d}")
    a, b = np.divmod(np.arange(s * s, dtype=np.int64), s)
    rows = np.empty((s * s, d), dtype=np.int64)
    rows[:, 0] = a
    rows[:, 1] = b
    for j in range(2, d):
        rows[:, j] = (a + (j - 1) * b) % s
    oa = OrthogonalArray(rows, s=s, t=2, lam=1)
    if not verify_strength(oa, 2):
        raise AssertionError("strength-2 construction failed self-check")
    return oa


def verify_strength(oa: OrthogonalArray, t: int) -> bool:
    """True iff every ``t``-column projection covers all ``t``-tuples exactly
    ``N / s**t`` times (requires ``s**t`` to divide ``N``)."""
    if not 1 <= t <= oa.d:
        raise ValueError(f"t must be in [1, {oa.d}], got {t}")
    cells = oa.s ** t
    if oa.N % cells:
        return False
    lam = oa.N // cells
    for cols in itertools.combinations(range(oa.d), t):
        enc = np.zeros(oa.N, dtype=np.int64)
        for c in cols:
            enc = enc * oa.s + oa.rows[:, c]
        if not np.all(np.bincount(enc, minlength=cells) == lam):
            return False
    return True


def tang_expand(oa: OrthogonalArray, rng: np.random.Generator) -> SampleMatrix:
    """Expand an orthogonal array into an ``N``-point Latin sample.

    Per column, the ``lam * s**(t-1)`` rows holding symbol ``x`` receive the
    distinct levels ``x*lam*s**(t-1) .. (x+1)*lam*s**(t-1) - 1`` in random
    order, independently per (column, symbol).  The result is always Latin;
    for strength-2 index-1 arrays every 2-D projection places exactly one
    point in each block pair.
    """
    if not verify_strength(oa, oa.t):
        raise ValueError(f"array does not have its declared strength t={oa.t}")
    stratum = oa.lam * oa.s ** (oa.t - 1)
    cols = rng.spawn(oa.d)
    levels = np.empty((oa.N, oa.d), dtype=np.int64)
    for j in range(oa.d):
        for x in range(oa.s):
            rows = np.flatnonzero(oa.rows[:, j] == x)
            levels[rows, j] = x * stratum + cols[j].permutation(stratum)
    return SampleMatrix(levels)


def randomize_oa(oa: OrthogonalArray, rng: np.random.Generator) -> OrthogonalArray:
    """Apply a uniform row permutation, column permutation, and an
    independent symbol relabeling per column.

    Draw order is fixed (rows, columns, then per-column relabels), so the
    output is a pure function of the stream.  All of (N, d, s, t, lam) and
    the strength property are preserved.
    """
    rows = oa.rows[rng.permutation(oa.N)]
    rows = rows[:, rng.permutation(oa.d)]
    out = np.empty_like(rows)
    for j in range(oa.d):
        relabel = rng.permutation(oa.s)
        out[:, j] = relabel[rows[:, j]]
    return OrthogonalArray(out, s=oa.s, t=oa.t, lam=oa.lam)


# ---------------------------------------------------------------------------
# File form: CSV of N rows (0-based symbols) + JSON sidecar {"s","t","lambda"}.
# ---------------------------------------------------------------------------


def _sidecar_path(csv_path: Path) -> Path:
    return csv_path.with_suffix(csv_path.suffix + ".meta.json")


def write_oa(oa: OrthogonalArray, csv_path: str | Path,
             meta_path: str | Path | None = None) -> None:
    """Write the array rows as CSV plus its JSON sidecar."""
    csv_path = Path(csv_path)
    meta_path = Path(meta_path) if meta_path else _sidecar_path(csv_path)
    lines = [",".join(str(int(v)) for v in row) for row in oa.rows]
    csv_path.write_text("\n".join(lines) + "\n")
    meta_path.write_text(json.dumps({"s": oa.s, "t": oa.t, "lambda": oa.lam}) + "\n")


def read_oa(csv_path: str | Path, meta_path: str | Path | None = None) -> OrthogonalArray:
    """Read an array written by :func:`write_oa`; rejects arrays that fail
    their declared strength."""
    csv_path = Path(csv_path)
    meta_path = Path(meta_path) if meta_path else _sidecar_path(csv_path)
    meta = json.loads(meta_path.read_text())
    rows = [
        [int(v) for v in line.split(",")]
        for line in csv_path.read_text().splitlines()
        if line.strip()
    ]
    oa = OrthogonalArray(
        np.asarray(rows, dtype=np.int64),
        s=int(meta["s"]), t=int(meta["t"]), lam=int(meta["lambda"]),
    )
    if not verify_strength(oa, oa.t):
        raise ValueError(f"imported array fails strength-{oa.t} verification")
    return oa
