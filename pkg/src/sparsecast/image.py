"""Grayscale frame I/O, block partitioning, and quality metrics.

Frames hold real-valued luminance samples while they move through the
pipeline; quantization to 8-bit integers happens exactly once, when a frame
is written back to disk (or when reassembly is asked to produce final
output). The canonical on-disk format is binary PGM (P5) with maxval 255.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import DimensionError, PgmHeaderError, PgmMaxvalError

PEAK = 255.0


@dataclass(frozen=True)
class Frame:
    """A grayscale image; ``pixels`` is a (height, width) float64 array."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels, dtype=np.float64)
        if px.ndim != 2:
            raise DimensionError(f"frame must be 2-D, got shape {px.shape}")
        object.__setattr__(self, "pixels", px)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


@dataclass(frozen=True)
class BlockGrid:
    """Square blocks of a frame in row-major scan order.

    ``blocks`` has shape (N, side, side); concatenating the blocks in order
    reconstructs the frame exactly.
    """

    block_side: int
    blocks: np.ndarray

    @property
    def block_count(self) -> int:
        return self.blocks.shape[0]


def clamp(values: np.ndarray) -> np.ndarray:
    """Clip luminance values into [0, 255]. Idempotent."""
    return np.clip(values, 0.0, PEAK)


def _read_pgm_tokens(data: bytes, count: int) -> tuple[list[bytes], int]:
    """Read whitespace-separated header tokens, skipping '#' comments.

    Returns the tokens and the offset of the first raster byte (one single
    whitespace byte after the last token, per the PGM grammar).
    """
    tokens: list[bytes] = []
    i = 0
    n = len(data)
    while len(tokens) < count:
        while i < n and data[i : i + 1].isspace():
            i += 1
        if i < n and data[i] == ord("#"):
            while i < n and data[i] not in (ord("\n"), ord("\r")):
                i += 1
            continue
        start = i
        while i < n and not data[i : i + 1].isspace() and data[i] != ord("#"):
            i += 1
        if start == i:
            raise PgmHeaderError("truncated PGM header")
        tokens.append(data[start:i])
    if i >= n or not data[i : i + 1].isspace():
        raise PgmHeaderError("missing whitespace after PGM header")
    return tokens, i + 1


def load_frame(path: str | Path, block_side: int | None = None) -> Frame:
    """Load a binary PGM (P5, maxval 255) file as a Frame.

    When ``block_side`` is given, the image dimensions must be divisible by
    it; violations raise DimensionError.
    """
    data = Path(path).read_bytes()
    if data[:2] != b"P5":
        raise PgmHeaderError(f"not a binary PGM (P5) file: {path}")
    try:
        tokens, offset = _read_pgm_tokens(data, 4)
        width, height, maxval = (int(t) for t in tokens[1:])
    except (ValueError, PgmHeaderError) as exc:
        raise PgmHeaderError(f"malformed PGM header in {path}: {exc}") from exc
    if tokens[0] != b"P5":
        raise PgmHeaderError(f"not a binary PGM (P5) file: {path}")
    if maxval != 255:
        raise PgmMaxvalError(f"unsupported PGM maxval {maxval} (only 255)")
    if width <= 0 or height <= 0:
        raise PgmHeaderError(f"non-positive PGM dimensions {width}x{height}")
    raster = data[offset : offset + width * height]
    if len(raster) != width * height:
        raise PgmHeaderError(f"PGM raster truncated in {path}")
    if block_side is not None and (width % block_side or height % block_side):
        raise DimensionError(
            f"{width}x{height} image is not divisible into {block_side}x{block_side} blocks"
        )
    pixels = np.frombuffer(raster, dtype=np.uint8).reshape(height, width)
    return Frame(pixels.astype(np.float64))


def save_frame(frame: Frame, path: str | Path) -> None:
    """Write a frame as binary PGM, clamping to [0, 255] and rounding."""
    quantized = np.rint(clamp(frame.pixels)).astype(np.uint8)
    header = f"P5\n{frame.width} {frame.height}\n255\n".encode("ascii")
    Path(path).write_bytes(header + quantized.tobytes())


def bundled_image_path() -> Path:
    """Path of the 512x512 grayscale test scene shipped with the package."""
    return Path(resources.files("sparsecast").joinpath("data/scene512.pgm"))


def partition(frame: Frame, block_side: int) -> BlockGrid:
    """Split a frame into non-overlapping square blocks, row-major order."""
    h, w = frame.height, frame.width
    if block_side < 1 or h % block_side or w % block_side:
        raise DimensionError(
            f"{w}x{h} frame is not divisible into {block_side}x{block_side} blocks"
        )
    s = block_side
    blocks = (
        frame.pixels.reshape(h // s, s, w // s, s)
        .swapaxes(1, 2)
        .reshape(-1, s, s)
    )
    return BlockGrid(block_side=s, blocks=blocks)


def reassemble(grid: BlockGrid, width: int, height: int, final: bool = False) -> Frame:
    """Inverse of :func:`partition`.

    ``final=True`` clamps values to [0, 255], marking the frame as decoder
    output; intermediate frames keep their real values untouched.
    """
    s = grid.block_side
    if width % s or height % s:
        raise DimensionError(f"{width}x{height} not divisible by block side {s}")
    rows, cols = height // s, width // s
    if grid.block_count != rows * cols:
        raise DimensionError(
            f"{grid.block_count} blocks cannot tile a {width}x{height} frame"
        )
    pixels = (
        grid.blocks.reshape(rows, cols, s, s).swapaxes(1, 2).reshape(height, width)
    )
    if final:
        pixels = clamp(pixels)
    return Frame(pixels)


def psnr(reference: Frame, test: Frame) -> float:
    """Peak signal-to-noise ratio in dB; returns math.inf for identical frames."""
    if reference.pixels.shape != test.pixels.shape:
        raise DimensionError(
            f"frame shapes differ: {reference.pixels.shape} vs {test.pixels.shape}"
        )
    mse = float(np.mean((reference.pixels - test.pixels) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(PEAK * PEAK / mse)
