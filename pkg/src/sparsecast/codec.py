"""End-to-end encoders/decoders and the metadata wire formats.

Two codecs share the block-DCT + frequency-grouping front end:

* The compressed-sensing codec thresholds each frequency group, measures
  the sparse groups with seeded row-orthonormal matrices sized from a
  quantized level table, and leaves dense groups uncompressed (identity
  measurement, no thresholding) so nothing is lost when there is no
  sparsity to exploit.
* The baseline codec keeps or discards whole frequency groups by energy
  and transmits retained groups uncompressed.

Both scale groups with the minimum-MSE power allocation and pack the
result into I/Q symbols. Metadata (means, variances, level indices or the
retained-group bitmap) travels on an error-free side channel; its exact
bit cost is accounted by the serializers here.

Wire format, compressed-sensing codec (version 1, little-endian):
  u8 version | u8 block_side | u16 width | u16 height | u64 session_seed |
  u8 level_count | level_count x u32 levels |
  b x f32 means | b x f32 variances |
  b x ceil(log2 S)-bit level indices, bit-packed MSB-first, zero-padded.
The fixed header is 15 + 4 * level_count bytes; the per-group payload is
b * (64 + ceil(log2 S)) bits.

Wire format, baseline codec (version 2, little-endian):
  u8 version | u8 block_side | u16 width | u16 height |
  ceil(b/8)-byte retained bitmap (MSB-first) |
  retained x (f32 mean, f32 variance) in ascending group order.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field

import numpy as np

from .allocation import min_mse_gains, mmse_estimate
from .amp import AmpConfig, amp_recover
from .channel import LayoutRecord, SymbolStream, map_symbols, unmap_symbols
from .errors import LayoutError, MetadataError, SparseCastError
from .image import Frame, partition, reassemble
from .sensing import (
    MeasurementLevels,
    choose_level,
    default_levels,
    derive_matrix_seed,
    generate_matrix,
    measure,
    sparsify,
)
from .transform import CoefficientGroup, dct_cube, group, idct_cube, ungroup

SPARSECAST_VERSION = 1
SOFTCAST_VERSION = 2


@dataclass(frozen=True)
class SparseCastParams:
    block_side: int = 16
    threshold: float = 0.1
    oversampling: float = 3.0
    levels: MeasurementLevels | None = None
    session_seed: int = 0


@dataclass(frozen=True)
class SoftCastParams:
    block_side: int = 32
    energy_threshold: float = 0.0


@dataclass(frozen=True)
class Metadata:
    """Side information for the compressed-sensing codec."""

    block_side: int
    width: int
    height: int
    session_seed: int
    level_table: tuple[int, ...]
    means: np.ndarray
    variances: np.ndarray
    level_indices: np.ndarray
    version: int = SPARSECAST_VERSION

    @property
    def group_count(self) -> int:
        return self.block_side * self.block_side

    @property
    def group_length(self) -> int:
        return (self.width // self.block_side) * (self.height // self.block_side)

    def measurement_counts(self) -> np.ndarray:
        return np.asarray([self.level_table[i] for i in self.level_indices])


@dataclass(frozen=True)
class SoftCastMetadata:
    """Side information for the baseline codec."""

    block_side: int
    width: int
    height: int
    retained: tuple[int, ...]
    means: np.ndarray
    variances: np.ndarray
    version: int = SOFTCAST_VERSION

    @property
    def group_count(self) -> int:
        return self.block_side * self.block_side

    @property
    def group_length(self) -> int:
        return (self.width // self.block_side) * (self.height // self.block_side)


@dataclass(frozen=True)
class TransmissionPlan:
    """Per-group encoder decisions, kept for introspection only."""

    measurement_counts: np.ndarray
    gains: np.ndarray
    matrix_seeds: tuple[int, ...]
    sparsities: np.ndarray

    @property
    def total_symbols(self) -> int:
        return int(sum(math.ceil(int(m) / 2) for m in self.measurement_counts))


@dataclass(frozen=True)
class EncodedImage:
    metadata: Metadata | SoftCastMetadata
    stream: SymbolStream
    plan: TransmissionPlan

    @property
    def symbol_count(self) -> int:
        return self.stream.symbol_count

    @property
    def metadata_bits(self) -> int:
        return 8 * len(serialize_metadata(self.metadata))


def _pack_bits(values, bits_per_value: int) -> bytes:
    if bits_per_value == 0:
        return b""
    out = bytearray((len(values) * bits_per_value + 7) // 8)
    pos = 0
    for value in values:
        for shift in range(bits_per_value - 1, -1, -1):
            out[pos >> 3] |= ((int(value) >> shift) & 1) << (7 - (pos & 7))
            pos += 1
    return bytes(out)


def _unpack_bits(data: bytes, count: int, bits_per_value: int) -> list[int]:
    if bits_per_value == 0:
        return [0] * count
    values = []
    pos = 0
    for _ in range(count):
        value = 0
        for _ in range(bits_per_value):
            value = (value << 1) | ((data[pos >> 3] >> (7 - (pos & 7))) & 1)
            pos += 1
        values.append(value)
    return values


def _take(buffer: bytes, offset: int, size: int) -> tuple[bytes, int]:
    if offset + size > len(buffer):
        raise MetadataError("metadata truncated")
    return buffer[offset : offset + size], offset + size


def serialize_metadata(metadata: Metadata | SoftCastMetadata) -> bytes:
    """Serialize either codec's metadata; round-trips bit-exactly."""
    if isinstance(metadata, Metadata):
        levels = MeasurementLevels(metadata.level_table)
        head = struct.pack(
            "<BBHHQB",
            metadata.version,
            metadata.block_side,
            metadata.width,
            metadata.height,
            metadata.session_seed,
            levels.count,
        )
        body = struct.pack(f"<{levels.count}I", *metadata.level_table)
        body += np.asarray(metadata.means, dtype="<f4").tobytes()
        body += np.asarray(metadata.variances, dtype="<f4").tobytes()
        body += _pack_bits(metadata.level_indices, levels.index_bits)
        return head + body
    if isinstance(metadata, SoftCastMetadata):
        head = struct.pack(
            "<BBHH",
            metadata.version,
            metadata.block_side,
            metadata.width,
            metadata.height,
        )
        b = metadata.group_count
        bitmap = bytearray((b + 7) // 8)
        for j in metadata.retained:
            bitmap[j >> 3] |= 1 << (7 - (j & 7))
        pairs = np.empty(2 * len(metadata.retained), dtype="<f4")
        pairs[0::2] = np.asarray(metadata.means, dtype="<f4")
        pairs[1::2] = np.asarray(metadata.variances, dtype="<f4")
        return head + bytes(bitmap) + pairs.tobytes()
    raise MetadataError(f"unknown metadata type {type(metadata).__name__}")


def deserialize_metadata(data: bytes) -> Metadata | SoftCastMetadata:
    """Parse serialized metadata, dispatching on the version byte."""
    if not data:
        raise MetadataError("metadata truncated")
    version = data[0]
    if version == SPARSECAST_VERSION:
        raw, offset = _take(data, 0, struct.calcsize("<BBHHQB"))
        _, side, width, height, seed, level_count = struct.unpack("<BBHHQB", raw)
        raw, offset = _take(data, offset, 4 * level_count)
        level_table = struct.unpack(f"<{level_count}I", raw)
        levels = MeasurementLevels(level_table)
        b = side * side
        raw, offset = _take(data, offset, 4 * b)
        means = np.frombuffer(raw, dtype="<f4").astype(np.float32)
        raw, offset = _take(data, offset, 4 * b)
        variances = np.frombuffer(raw, dtype="<f4").astype(np.float32)
        raw, offset = _take(data, offset, (b * levels.index_bits + 7) // 8)
        indices = np.asarray(_unpack_bits(raw, b, levels.index_bits))
        if np.any(indices >= levels.count):
            raise MetadataError("level index out of range")
        return Metadata(side, width, height, seed, level_table, means, variances, indices)
    if version == SOFTCAST_VERSION:
        raw, offset = _take(data, 0, struct.calcsize("<BBHH"))
        _, side, width, height = struct.unpack("<BBHH", raw)
        b = side * side
        raw, offset = _take(data, offset, (b + 7) // 8)
        retained = tuple(
            j for j in range(b) if raw[j >> 3] & (1 << (7 - (j & 7)))
        )
        raw, offset = _take(data, offset, 8 * len(retained))
        pairs = np.frombuffer(raw, dtype="<f4")
        return SoftCastMetadata(
            side, width, height, retained,
            pairs[0::2].astype(np.float32), pairs[1::2].astype(np.float32),
        )
    raise MetadataError(f"unknown metadata version {version}")


def _group_gains(variances: np.ndarray, lengths: np.ndarray) -> np.ndarray:
    """Minimum-MSE gains, degenerating to all-zero for an all-zero image."""
    if not np.any(variances > 0):
        return np.zeros_like(variances, dtype=np.float64)
    return min_mse_gains(variances, lengths)


def encode(frame: Frame, params: SparseCastParams) -> EncodedImage:
    """Compress a frame into channel symbols plus decoding metadata."""
    grid = partition(frame, params.block_side)
    groups = group(dct_cube(grid))
    n = grid.block_count
    b = len(groups)
    levels = params.levels or default_levels(n)

    means = np.zeros(b, dtype=np.float32)
    variances = np.zeros(b, dtype=np.float32)
    level_indices = np.zeros(b, dtype=np.int64)
    counts = np.zeros(b, dtype=np.int64)
    sparsities = np.zeros(b, dtype=np.int64)
    seeds = []
    measured: list[np.ndarray] = []

    for g in groups:
        j = g.frequency_index
        thresholded, k = sparsify(g.values, params.threshold)
        mu, level_index = choose_level(k, params.oversampling, levels, n)
        # Uncompressed groups skip thresholding; there is no sparsity to
        # exploit and dropping small entries would only lose fidelity.
        sent = g.values if mu == n else thresholded
        mean32 = np.float32(sent.mean())
        var32 = np.float32(sent.var())
        seed = derive_matrix_seed(params.session_seed, j)
        matrix = generate_matrix(seed, mu, n)
        measured.append(measure(matrix, sent - float(mean32)))
        means[j], variances[j] = mean32, var32
        level_indices[j], counts[j], sparsities[j] = level_index, mu, k
        seeds.append(seed)

    gains = _group_gains(variances.astype(np.float64), counts.astype(np.float64))
    stream = map_symbols([gains[j] * measured[j] for j in range(b)])
    metadata = Metadata(
        block_side=params.block_side,
        width=frame.width,
        height=frame.height,
        session_seed=params.session_seed,
        level_table=levels.levels,
        means=means,
        variances=variances,
        level_indices=level_indices,
    )
    plan = TransmissionPlan(counts, gains, tuple(seeds), sparsities)
    return EncodedImage(metadata, stream, plan)


def stream_layout(metadata: Metadata | SoftCastMetadata) -> tuple[LayoutRecord, ...]:
    """Reconstruct the symbol-stream layout implied by metadata alone."""
    if isinstance(metadata, Metadata):
        counts = metadata.measurement_counts()
        return tuple(
            LayoutRecord(j, math.ceil(int(m) / 2), int(m) % 2 == 1)
            for j, m in enumerate(counts)
        )
    n = metadata.group_length
    return tuple(
        LayoutRecord(j, math.ceil(n / 2), n % 2 == 1) for j in metadata.retained
    )


def _check_layout(stream: SymbolStream, expected: tuple[LayoutRecord, ...]) -> None:
    if stream.layout != expected:
        raise LayoutError("symbol stream layout does not match metadata")


def decode(
    received: SymbolStream,
    metadata: Metadata,
    noise_variance: float,
    amp_config: AmpConfig | None = None,
) -> Frame:
    """Reconstruct a frame from noisy symbols and metadata.

    Undersampled groups go through AMP (falling back to the transpose
    projection if the solver reports divergence); full-rank groups use the
    linear MMSE estimate. Output pixels are clamped to [0, 255].
    """
    _check_layout(received, stream_layout(metadata))
    n = metadata.group_length
    counts = metadata.measurement_counts().astype(np.float64)
    variances = metadata.variances.astype(np.float64)
    means = metadata.means.astype(np.float64)
    gains = _group_gains(variances, counts)
    vectors = unmap_symbols(received)

    estimates = []
    for j, received_vector in enumerate(vectors):
        mu = int(counts[j])
        if gains[j] == 0.0 or variances[j] == 0.0:
            estimate = np.full(n, means[j])
        elif mu == n:
            estimate = mmse_estimate(
                received_vector, float(gains[j]), float(variances[j]),
                float(means[j]), noise_variance,
            )
        else:
            matrix = generate_matrix(
                derive_matrix_seed(metadata.session_seed, j), mu, n
            )
            # Compensate the known mean into the measurement domain so the
            # solver sees the genuinely sparse vector: the centered signal
            # is sparse-plus-constant, and thresholding the constant away
            # would plant an error of (n - k) * mean**2 in the group.
            target = received_vector / gains[j] + means[j] * matrix.entries.sum(axis=1)
            result = amp_recover(target, matrix, amp_config)
            estimate = result.estimate if result.converged else matrix.entries.T @ target
        estimates.append(CoefficientGroup(j, estimate))

    grid = idct_cube(ungroup(estimates))
    return reassemble(grid, metadata.width, metadata.height, final=True)


def softcast_encode(frame: Frame, params: SoftCastParams) -> EncodedImage:
    """Baseline: keep whole frequency groups by energy, no compression."""
    grid = partition(frame, params.block_side)
    groups = group(dct_cube(grid))
    n = grid.block_count
    retained = [
        g.frequency_index
        for g in groups
        if float(np.sum(g.values**2)) >= params.energy_threshold
    ]
    if not retained:
        raise SparseCastError("energy threshold discarded every group")

    means = np.array([np.float32(groups[j].mean) for j in retained], dtype=np.float32)
    variances = np.array(
        [np.float32(groups[j].variance) for j in retained], dtype=np.float32
    )
    lengths = np.full(len(retained), n, dtype=np.float64)
    gains = _group_gains(variances.astype(np.float64), lengths)
    scaled = [
        gains[i] * (groups[j].values - float(means[i]))
        for i, j in enumerate(retained)
    ]
    stream = map_symbols(scaled, group_indices=list(retained))
    metadata = SoftCastMetadata(
        block_side=params.block_side,
        width=frame.width,
        height=frame.height,
        retained=tuple(retained),
        means=means,
        variances=variances,
    )
    plan = TransmissionPlan(
        measurement_counts=lengths.astype(np.int64),
        gains=gains,
        matrix_seeds=tuple(0 for _ in retained),
        sparsities=np.array([groups[j].sparsity for j in retained]),
    )
    return EncodedImage(metadata, stream, plan)


def softcast_decode(
    received: SymbolStream, metadata: SoftCastMetadata, noise_variance: float
) -> Frame:
    """Baseline decoder: linear MMSE per retained group, zeros elsewhere."""
    _check_layout(received, stream_layout(metadata))
    n = metadata.group_length
    b = metadata.group_count
    variances = metadata.variances.astype(np.float64)
    means = metadata.means.astype(np.float64)
    gains = _group_gains(variances, np.full(len(metadata.retained), n, dtype=np.float64))
    vectors = unmap_symbols(received)

    estimates = [np.zeros(n)] * b
    for i, j in enumerate(metadata.retained):
        estimates[j] = mmse_estimate(
            vectors[i], float(gains[i]), float(variances[i]),
            float(means[i]), noise_variance,
        )
    grid = idct_cube(ungroup([CoefficientGroup(j, v) for j, v in enumerate(estimates)]))
    return reassemble(grid, metadata.width, metadata.height, final=True)


def write_symbols(stream: SymbolStream, path) -> None:
    """Store symbols as interleaved little-endian float32 I/Q pairs."""
    flat = np.empty(2 * stream.symbol_count, dtype="<f4")
    flat[0::2] = stream.symbols.real
    flat[1::2] = stream.symbols.imag
    with open(path, "wb") as fh:
        fh.write(flat.tobytes())


def read_symbols(path, layout: tuple[LayoutRecord, ...]) -> SymbolStream:
    """Load a symbol file written by :func:`write_symbols`."""
    flat = np.fromfile(path, dtype="<f4").astype(np.float64)
    expected = 2 * sum(r.symbol_count for r in layout)
    if flat.size != expected:
        raise LayoutError(f"symbol file holds {flat.size} floats, expected {expected}")
    return SymbolStream(flat[0::2] + 1j * flat[1::2], layout)
