#!/usr/bin/env python3
"""Benchmark both codecs on the bundled scene at two bandwidth settings.

Produces, under out/ (or the directory given as argv[1]):
  sweep_high_sparsecast.csv   full-rate configuration (threshold 0.1)
  sweep_low_sparsecast.csv    compressed configuration (threshold 5.0)
  sweep_low_softcast.csv      baseline matched to the compressed budget
  recon_low_5db.pgm           sample reconstruction at 5 dB CSNR
"""

import sys
from pathlib import Path

from sparsecast.channel import ChannelConfig, transmit
from sparsecast.codec import SoftCastParams, SparseCastParams, decode, encode
from sparsecast.harness import (
    SweepSpec,
    emit_csv,
    run_sweep,
    save_reconstruction,
    softcast_threshold_for_budget,
)
from sparsecast.image import bundled_image_path, load_frame, psnr

CSNR_POINTS = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0)
TRIALS = 5
SEED = 2718


def main() -> None:
    out_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("out")
    out_dir.mkdir(parents=True, exist_ok=True)
    frame = load_frame(bundled_image_path())

    high = SparseCastParams(block_side=16, threshold=0.1, oversampling=3.0, session_seed=SEED)
    records = run_sweep(SweepSpec(CSNR_POINTS, TRIALS, "sparsecast", high, SEED), frame)
    emit_csv(records, out_dir / "sweep_high_sparsecast.csv")
    print(f"high-bandwidth sparsecast: {records[0].symbols} symbols")

    low = SparseCastParams(block_side=16, threshold=5.0, oversampling=3.0, session_seed=SEED)
    records = run_sweep(SweepSpec(CSNR_POINTS, TRIALS, "sparsecast", low, SEED), frame)
    emit_csv(records, out_dir / "sweep_low_sparsecast.csv")
    budget = records[0].symbols
    print(f"low-bandwidth sparsecast: {budget} symbols")

    threshold = softcast_threshold_for_budget(frame, 32, int(budget * 1.04))
    soft = SoftCastParams(block_side=32, energy_threshold=threshold)
    records = run_sweep(SweepSpec(CSNR_POINTS, TRIALS, "softcast", soft, SEED), frame)
    emit_csv(records, out_dir / "sweep_low_softcast.csv")
    print(f"matched softcast: {records[0].symbols} symbols (threshold {threshold:.0f})")

    encoded = encode(frame, low)
    received, sigma2 = transmit(encoded.stream, ChannelConfig(5.0, SEED))
    reconstruction = decode(received, encoded.metadata, sigma2)
    save_reconstruction(reconstruction, out_dir / "recon_low_5db.pgm")
    print(f"5 dB reconstruction: {psnr(frame, reconstruction):.2f} dB -> recon_low_5db.pgm")


if __name__ == "__main__":
    main()
