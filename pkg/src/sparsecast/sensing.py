"""Sparsification, measurement-level quantization, and seeded sensing matrices.

Measurement counts are restricted to a small table of predefined levels so
the per-group choice costs only ceil(log2 S) bits of side information. The
sensing matrices are row-orthonormal, generated from a 64-bit seed that
both ends derive from the session seed and the frequency index, so no
matrix entries ever travel over the channel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DimensionError, SparseCastError


@dataclass(frozen=True)
class MeasurementLevels:
    """Strictly increasing table of admissible measurement counts."""

    levels: tuple[int, ...]

    def __post_init__(self):
        lv = tuple(int(x) for x in self.levels)
        if not lv:
            raise SparseCastError("measurement level table is empty")
        if any(x < 1 for x in lv) or any(a >= b for a, b in zip(lv, lv[1:])):
            raise SparseCastError(f"levels must be positive and strictly increasing: {lv}")
        object.__setattr__(self, "levels", lv)

    @property
    def count(self) -> int:
        return len(self.levels)

    @property
    def index_bits(self) -> int:
        """Bits needed to signal one level choice."""
        return math.ceil(math.log2(self.count)) if self.count > 1 else 0


def default_levels(n: int) -> MeasurementLevels:
    """Eight levels spread over (0, n]: n/16, n/8, 3n/16, n/4, 3n/8, n/2, 3n/4, n."""
    fractions = (1 / 16, 1 / 8, 3 / 16, 1 / 4, 3 / 8, 1 / 2, 3 / 4, 1)
    raw = [max(1, round(f * n)) for f in fractions]
    raw[-1] = n
    seen: list[int] = []
    for x in raw:
        if not seen or x > seen[-1]:
            seen.append(x)
    return MeasurementLevels(tuple(seen))


def sparsify(values: np.ndarray, threshold: float) -> tuple[np.ndarray, int]:
    """Zero every entry with magnitude below ``threshold``.

    Entries with |x| >= threshold survive. Returns the sparsified vector and
    its exact nonzero count.
    """
    if threshold < 0:
        raise SparseCastError(f"sparsity threshold must be >= 0, got {threshold}")
    values = np.asarray(values, dtype=np.float64)
    out = np.where(np.abs(values) >= threshold, values, 0.0)
    return out, int(np.count_nonzero(out))


def choose_level(
    sparsity: int, oversampling: float, levels: MeasurementLevels, n: int
) -> tuple[int, int]:
    """Pick the measurement count for a group of given sparsity.

    The demand is ceil(oversampling * sparsity); the chosen count is the
    smallest level >= demand, falling back to n (the last level) when the
    demand exceeds every level. Returns (count, level_index).
    """
    if not 0 <= sparsity <= n:
        raise SparseCastError(f"sparsity {sparsity} outside [0, {n}]")
    if oversampling <= 1:
        raise SparseCastError(f"oversampling ratio must exceed 1, got {oversampling}")
    if levels.levels[-1] != n:
        raise SparseCastError(f"level table must end at {n}, got {levels.levels}")
    demand = math.ceil(oversampling * sparsity)
    for index, level in enumerate(levels.levels):
        if level >= demand:
            return level, index
    return n, levels.count - 1


def derive_matrix_seed(session_seed: int, frequency_index: int) -> int:
    """64-bit per-group matrix seed, identical on both ends of the link."""
    ss = np.random.SeedSequence(entropy=(session_seed & (2**64 - 1), frequency_index))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class MeasurementMatrix:
    """Row-orthonormal sensing matrix with its generating seed."""

    seed: int
    entries: np.ndarray

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]


@lru_cache(maxsize=256)
def _matrix_entries(seed: int, rows: int, cols: int) -> np.ndarray:
    if rows == cols:
        entries = np.eye(rows)
    else:
        rng = np.random.Generator(np.random.PCG64(seed))
        gauss = rng.standard_normal((rows, cols))
        # QR on the transpose keeps `rows` orthonormal directions; signs are
        # pinned to the R diagonal so the result is unique given the seed.
        q, r = np.linalg.qr(gauss.T)
        signs = np.sign(np.diag(r))
        signs[signs == 0] = 1.0
        entries = (q * signs).T
    entries.setflags(write=False)
    return entries


def generate_matrix(seed: int, rows: int, cols: int) -> MeasurementMatrix:
    """Deterministic row-orthonormal matrix; rows == cols yields exact identity."""
    if not 1 <= rows <= cols:
        raise DimensionError(f"need 1 <= rows <= cols, got {rows}x{cols}")
    return MeasurementMatrix(seed=seed, entries=_matrix_entries(seed, rows, cols))


def measure(matrix: MeasurementMatrix, centered: np.ndarray) -> np.ndarray:
    """Project a zero-mean group vector down to its measurements."""
    centered = np.asarray(centered, dtype=np.float64)
    if centered.shape != (matrix.cols,):
        raise DimensionError(
            f"vector length {centered.shape} does not match matrix width {matrix.cols}"
        )
    if matrix.rows == matrix.cols:
        return centered.copy()
    return matrix.entries @ centered
