"""I/Q symbol mapping and a calibrated complex AWGN channel.

Consecutive elements of each scaled group become the in-phase and
quadrature parts of one complex symbol; odd-length groups get a zero
quadrature pad that is charged to the bandwidth budget but discarded on
unmapping. Noise power is set from the measured stream power so the
realized channel SNR matches the request exactly, and the realized noise
variance is handed to the decoder out of band.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import LayoutError, SparseCastError

NOISELESS = math.inf


@dataclass(frozen=True)
class LayoutRecord:
    group_index: int
    symbol_count: int
    padded: bool


@dataclass(frozen=True)
class SymbolStream:
    """Complex channel symbols plus the per-group layout needed to unmap them."""

    symbols: np.ndarray
    layout: tuple[LayoutRecord, ...]

    def __post_init__(self):
        object.__setattr__(self, "symbols", np.asarray(self.symbols, dtype=np.complex128))
        if self.symbols.ndim != 1:
            raise LayoutError("symbol stream must be 1-D")
        if sum(r.symbol_count for r in self.layout) != self.symbols.shape[0]:
            raise LayoutError("layout symbol counts do not match the stream length")

    @property
    def symbol_count(self) -> int:
        return int(self.symbols.shape[0])

    def component_count(self) -> int:
        """Number of real payload components, zero pads excluded."""
        return sum(2 * r.symbol_count - int(r.padded) for r in self.layout)


@dataclass(frozen=True)
class ChannelConfig:
    csnr_db: float
    seed: int = 0


def map_symbols(
    vectors: list[np.ndarray], group_indices: list[int] | None = None
) -> SymbolStream:
    """Pack per-group real vectors into complex symbols, in the given order."""
    if group_indices is None:
        group_indices = list(range(len(vectors)))
    if len(group_indices) != len(vectors):
        raise LayoutError("one group index required per vector")
    chunks: list[np.ndarray] = []
    layout: list[LayoutRecord] = []
    for j, vec in zip(group_indices, vectors):
        vec = np.asarray(vec, dtype=np.float64)
        padded = vec.size % 2 == 1
        if padded:
            vec = np.append(vec, 0.0)
        chunks.append(vec[0::2] + 1j * vec[1::2])
        layout.append(LayoutRecord(j, vec.size // 2, padded))
    symbols = np.concatenate(chunks) if chunks else np.zeros(0, dtype=np.complex128)
    return SymbolStream(symbols, tuple(layout))


def unmap_symbols(stream: SymbolStream) -> list[np.ndarray]:
    """Recover the per-group real vectors, dropping pad components."""
    vectors = []
    offset = 0
    for record in stream.layout:
        part = stream.symbols[offset : offset + record.symbol_count]
        offset += record.symbol_count
        flat = np.empty(2 * record.symbol_count)
        flat[0::2] = part.real
        flat[1::2] = part.imag
        if record.padded:
            flat = flat[:-1]
        vectors.append(flat)
    return vectors


def transmit(stream: SymbolStream, config: ChannelConfig) -> tuple[SymbolStream, float]:
    """Send a stream through complex AWGN at the requested channel SNR.

    The per-component noise variance is empirical stream power divided by
    the linear CSNR, applied independently to every real and imaginary
    component (pads included). Returns the noisy stream and the realized
    noise variance for the decoder.
    """
    if stream.symbol_count == 0:
        raise SparseCastError("cannot transmit an empty stream")
    if config.csnr_db == NOISELESS:
        return stream, 0.0
    components = stream.component_count()
    power = float(np.sum(stream.symbols.real**2 + stream.symbols.imag**2)) / components
    if power == 0.0:
        raise SparseCastError("zero-power stream cannot meet a finite CSNR target")
    sigma2 = power / 10.0 ** (config.csnr_db / 10.0)
    rng = np.random.Generator(np.random.PCG64(config.seed))
    noise = rng.standard_normal(2 * stream.symbol_count) * math.sqrt(sigma2)
    noisy = stream.symbols + noise[0::2] + 1j * noise[1::2]
    return SymbolStream(noisy, stream.layout), sigma2


def estimate_noise_power(sent: SymbolStream, received: SymbolStream) -> float:
    """Per-component noise variance estimated from a sent/received pair.

    Diagnostic only; the simulator hands the decoder the exact variance.
    """
    if sent.symbol_count != received.symbol_count:
        raise LayoutError(
            f"stream lengths differ: {sent.symbol_count} vs {received.symbol_count}"
        )
    diff = received.symbols - sent.symbols
    return float(np.mean(np.concatenate([diff.real, diff.imag]) ** 2))
