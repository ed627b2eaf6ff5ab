"""Sweep driver, CSV reporting, and static reference data for benchmarks.

A sweep encodes an image once per codec configuration, then repeats the
channel-plus-decode leg for every requested CSNR point and trial with
independently derived seeds. Results are summarized one record per CSNR
point and emitted as CSV for external plotting.
"""

from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import codec as codec_mod
from .amp import AmpConfig
from .channel import ChannelConfig, SymbolStream, estimate_noise_power, transmit
from .codec import EncodedImage, SoftCastParams, SparseCastParams
from .errors import SparseCastError
from .image import Frame, partition, psnr, save_frame
from .transform import dct_cube, group

CSV_HEADER = (
    "codec,csnr_req_db,csnr_real_db,psnr_mean_db,psnr_std_db,"
    "symbols,metadata_bits,seconds"
)


@dataclass(frozen=True)
class SweepSpec:
    csnr_points: tuple[float, ...]
    trials_per_point: int = 5
    codec: str = "sparsecast"
    params: SparseCastParams | SoftCastParams = SparseCastParams()
    seed_base: int = 0
    amp_config: AmpConfig | None = None

    def __post_init__(self):
        if not self.csnr_points:
            raise SparseCastError("sweep needs at least one CSNR point")
        if self.trials_per_point < 1:
            raise SparseCastError("sweep needs at least one trial per point")
        if self.codec not in ("sparsecast", "softcast"):
            raise SparseCastError(f"unknown codec {self.codec!r}")


@dataclass(frozen=True)
class SweepRecord:
    codec: str
    csnr_req_db: float
    csnr_real_db: float
    psnr_mean_db: float
    psnr_std_db: float
    symbols: int
    metadata_bits: int
    seconds: float


def derive_trial_seed(base_seed: int, point_index: int, trial_index: int) -> int:
    """Schedule-independent per-trial channel seed."""
    ss = np.random.SeedSequence((base_seed & (2**64 - 1), point_index, trial_index))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def encode_image(frame: Frame, codec_name: str, params) -> EncodedImage:
    if codec_name == "sparsecast":
        return codec_mod.encode(frame, params)
    return codec_mod.softcast_encode(frame, params)


def decode_image(
    received: SymbolStream, encoded: EncodedImage, sigma2: float,
    amp_config: AmpConfig | None = None,
) -> Frame:
    if isinstance(encoded.metadata, codec_mod.Metadata):
        return codec_mod.decode(received, encoded.metadata, sigma2, amp_config)
    return codec_mod.softcast_decode(received, encoded.metadata, sigma2)


def run_trial(
    frame: Frame, encoded: EncodedImage, csnr_db: float, seed: int,
    amp_config: AmpConfig | None = None,
) -> tuple[float, float]:
    """One channel realization; returns (psnr_db, realized_csnr_db)."""
    received, sigma2 = transmit(encoded.stream, ChannelConfig(csnr_db, seed))
    reconstruction = decode_image(received, encoded, sigma2, amp_config)
    quality = psnr(frame, reconstruction)
    if csnr_db == math.inf:
        return quality, math.inf
    power = float(
        np.sum(encoded.stream.symbols.real**2 + encoded.stream.symbols.imag**2)
    ) / encoded.stream.component_count()
    realized = 10.0 * math.log10(power / estimate_noise_power(encoded.stream, received))
    return quality, realized


def run_sweep(spec: SweepSpec, frame: Frame) -> list[SweepRecord]:
    """Encode once, then measure PSNR across all CSNR points and trials."""
    encoded = encode_image(frame, spec.codec, spec.params)
    records = []
    for point_index, csnr_db in enumerate(spec.csnr_points):
        start = time.perf_counter()
        qualities, realized = [], []
        for trial_index in range(spec.trials_per_point):
            seed = derive_trial_seed(spec.seed_base, point_index, trial_index)
            quality, real_csnr = run_trial(frame, encoded, csnr_db, seed, spec.amp_config)
            qualities.append(quality)
            realized.append(real_csnr)
        records.append(
            SweepRecord(
                codec=spec.codec,
                csnr_req_db=csnr_db,
                csnr_real_db=float(np.mean(realized)),
                psnr_mean_db=float(np.mean(qualities)),
                psnr_std_db=float(np.std(qualities)),
                symbols=encoded.symbol_count,
                metadata_bits=encoded.metadata_bits,
                seconds=time.perf_counter() - start,
            )
        )
    return records


def emit_csv(records: list[SweepRecord], path) -> None:
    """Write sweep records with fixed 4-decimal formatting.

    All columns except ``seconds`` are reproducible across identical runs;
    ``seconds`` is measured wall time.
    """
    lines = [CSV_HEADER]
    for r in records:
        lines.append(
            f"{r.codec},{r.csnr_req_db:.4f},{r.csnr_real_db:.4f},"
            f"{r.psnr_mean_db:.4f},{r.psnr_std_db:.4f},"
            f"{r.symbols},{r.metadata_bits},{r.seconds:.4f}"
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def read_csv(path) -> list[dict]:
    """Parse a sweep CSV back into typed rows."""
    with open(path, newline="", encoding="ascii") as fh:
        rows = list(csv.DictReader(fh))
    for row in rows:
        for key in ("csnr_req_db", "csnr_real_db", "psnr_mean_db", "psnr_std_db", "seconds"):
            row[key] = float(row[key])
        for key in ("symbols", "metadata_bits"):
            row[key] = int(row[key])
    return rows


def save_reconstruction(frame: Frame, path) -> None:
    """Write a decoded frame as an 8-bit PGM."""
    save_frame(frame, path)


@dataclass(frozen=True)
class ReferenceThreshold:
    """One 802.11a operating point: minimum CSNR for 10% packet loss."""

    constellation: str
    code_rate: str
    csnr_threshold_db: float


REFERENCE_THRESHOLDS: tuple[ReferenceThreshold, ...] = (
    ReferenceThreshold("BPSK", "uncoded", 8.0),
    ReferenceThreshold("BPSK", "1/2", 3.0),
    ReferenceThreshold("BPSK", "3/4", 5.0),
    ReferenceThreshold("QPSK", "uncoded", 11.0),
    ReferenceThreshold("QPSK", "1/2", 6.0),
    ReferenceThreshold("QPSK", "3/4", 8.0),
    ReferenceThreshold("16-QAM", "uncoded", 18.0),
    ReferenceThreshold("16-QAM", "1/2", 11.0),
    ReferenceThreshold("16-QAM", "3/4", 15.0),
    ReferenceThreshold("64-QAM", "uncoded", 24.0),
    ReferenceThreshold("64-QAM", "2/3", 19.0),
    ReferenceThreshold("64-QAM", "3/4", 21.0),
)


def best_reference_at(csnr_db: float) -> ReferenceThreshold | None:
    """Highest-threshold digital scheme usable at the given CSNR, if any."""
    usable = [t for t in REFERENCE_THRESHOLDS if t.csnr_threshold_db <= csnr_db]
    return max(usable, key=lambda t: t.csnr_threshold_db) if usable else None


def softcast_threshold_for_budget(
    frame: Frame, block_side: int, max_symbols: int
) -> float:
    """Group-energy threshold putting the baseline at or under a symbol budget."""
    grid = partition(frame, block_side)
    energies = sorted(
        (float(np.sum(g.values**2)) for g in group(dct_cube(grid))), reverse=True
    )
    per_group = math.ceil(grid.block_count / 2)
    keep = min(len(energies), max_symbols // per_group)
    if keep < 1:
        raise SparseCastError(f"budget {max_symbols} cannot fit even one group")
    if keep == len(energies):
        return 0.0
    # Back off over ties so the threshold keeps exactly the budgeted set.
    while keep > 1 and energies[keep - 1] == energies[keep]:
        keep -= 1
    if energies[keep - 1] == energies[keep]:
        raise SparseCastError("cannot separate groups with identical energies")
    return 0.5 * (energies[keep - 1] + energies[keep])
