"""Orthonormal block 2D-DCT and frequency-wise coefficient grouping.

Each block is transformed with the unitary type-II DCT, the per-block
coefficient planes are stacked into a 3-D cube, and the cube is sliced the
other way: one vector per (row, col) frequency pair, holding that
coefficient from every block. Those per-frequency vectors are the unit the
rest of the pipeline operates on.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.fft import dctn, idctn

from .errors import DimensionError
from .image import BlockGrid


@dataclass(frozen=True)
class CoefficientCube:
    """DCT coefficients indexed (row, col, block); shape (side, side, N)."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 3 or v.shape[0] != v.shape[1]:
            raise DimensionError(f"coefficient cube must be (s, s, N), got {v.shape}")
        object.__setattr__(self, "values", v)

    @property
    def block_side(self) -> int:
        return self.values.shape[0]

    @property
    def depth(self) -> int:
        return self.values.shape[2]


@dataclass(frozen=True)
class CoefficientGroup:
    """All blocks' DCT coefficients for one frequency pair.

    ``frequency_index`` is 0-based and row-major over (row, col). The
    statistics follow the conventions the decoder relies on: ``sparsity``
    is the exact nonzero count, ``mean`` the empirical mean, ``variance``
    the population variance (divide by N) about that mean.
    """

    frequency_index: int
    values: np.ndarray
    sparsity: int = field(init=False)
    mean: float = field(init=False)
    variance: float = field(init=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 1:
            raise DimensionError(f"group values must be 1-D, got shape {v.shape}")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "sparsity", int(np.count_nonzero(v)))
        object.__setattr__(self, "mean", float(v.mean()))
        object.__setattr__(self, "variance", float(v.var()))


def dct2(block: np.ndarray) -> np.ndarray:
    """Orthonormal type-II 2D DCT of one square block."""
    block = np.asarray(block, dtype=np.float64)
    if block.ndim != 2 or block.shape[0] != block.shape[1]:
        raise DimensionError(f"block must be square, got shape {block.shape}")
    return dctn(block, type=2, norm="ortho")


def idct2(coeffs: np.ndarray) -> np.ndarray:
    """Inverse of :func:`dct2`."""
    coeffs = np.asarray(coeffs, dtype=np.float64)
    if coeffs.ndim != 2 or coeffs.shape[0] != coeffs.shape[1]:
        raise DimensionError(f"block must be square, got shape {coeffs.shape}")
    return idctn(coeffs, type=2, norm="ortho")


def dct_cube(grid: BlockGrid) -> CoefficientCube:
    """Per-block 2D DCT of a whole grid, stacked as an (s, s, N) cube."""
    coeffs = dctn(grid.blocks, type=2, norm="ortho", axes=(1, 2))
    return CoefficientCube(np.moveaxis(coeffs, 0, 2))


def idct_cube(cube: CoefficientCube) -> BlockGrid:
    """Inverse of :func:`dct_cube`, back to pixel-domain blocks."""
    blocks = idctn(np.moveaxis(cube.values, 2, 0), type=2, norm="ortho", axes=(1, 2))
    return BlockGrid(block_side=cube.block_side, blocks=blocks)


def group(cube: CoefficientCube) -> list[CoefficientGroup]:
    """Slice a cube into per-frequency vectors, row-major over (row, col)."""
    s, n = cube.block_side, cube.depth
    flat = cube.values.reshape(s * s, n)
    return [CoefficientGroup(j, flat[j]) for j in range(s * s)]


def ungroup(groups: list[CoefficientGroup]) -> CoefficientCube:
    """Inverse of :func:`group`."""
    b = len(groups)
    s = int(round(b**0.5))
    if s * s != b:
        raise DimensionError(f"{b} groups do not form a square frequency grid")
    lengths = {g.values.shape[0] for g in groups}
    if len(lengths) != 1:
        raise DimensionError(f"groups have inconsistent lengths {sorted(lengths)}")
    flat = np.stack([g.values for g in groups])
    return CoefficientCube(flat.reshape(s, s, lengths.pop()))
