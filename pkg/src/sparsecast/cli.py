"""Command-line interface: encode, decode, simulate, sweep, report.

Every verb accepts ``--config FILE`` pointing at a flat ``key = value``
text file whose keys mirror the long flag names (hyphens or underscores);
explicit flags override file values, which override built-in defaults.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from .amp import AmpConfig
from .channel import ChannelConfig, estimate_noise_power, transmit
from .codec import (
    Metadata,
    SoftCastParams,
    SparseCastParams,
    decode,
    deserialize_metadata,
    encode,
    read_symbols,
    serialize_metadata,
    softcast_decode,
    softcast_encode,
    stream_layout,
    write_symbols,
)
from .errors import SparseCastError
from .harness import (
    REFERENCE_THRESHOLDS,
    SweepSpec,
    best_reference_at,
    emit_csv,
    read_csv,
    run_sweep,
    save_reconstruction,
    softcast_threshold_for_budget,
)
from .image import load_frame, psnr
from .sensing import MeasurementLevels

DEFAULTS = {
    "block_side": None,  # 16 for sparsecast, 32 for softcast
    "tau": 0.1,
    "oversampling": 3.0,
    "levels": None,
    "csnr": 5.0,
    "csnr_list": "5,10,15,20,25",
    "trials": 5,
    "seed": 0,
    "codec": "sparsecast",
    "noise_var": 0.0,
    "energy_threshold": 0.0,
    "match_budget": None,
}


def _parse_config(path: str | None) -> dict[str, str]:
    if path is None:
        return {}
    values: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SparseCastError(f"{path}:{lineno}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key.replace("-", "_")] = value
    return values


def _resolve(args: argparse.Namespace, config: dict[str, str], key: str, cast):
    flag = getattr(args, key, None)
    if flag is not None:
        return flag
    if key in config:
        return cast(config[key])
    return DEFAULTS.get(key)


def _parse_csnr(text: str) -> float:
    return math.inf if text.strip().lower() in ("inf", "noiseless") else float(text)


def _parse_levels(text: str) -> MeasurementLevels:
    return MeasurementLevels(tuple(int(x) for x in text.split(",") if x.strip()))


def _codec_params(args, config):
    codec = _resolve(args, config, "codec", str)
    block_side = _resolve(args, config, "block_side", int)
    if codec == "sparsecast":
        return codec, SparseCastParams(
            block_side=block_side if block_side is not None else 16,
            threshold=_resolve(args, config, "tau", float),
            oversampling=_resolve(args, config, "oversampling", float),
            levels=_resolve(args, config, "levels", _parse_levels),
            session_seed=_resolve(args, config, "seed", int),
        )
    if codec == "softcast":
        return codec, SoftCastParams(
            block_side=block_side if block_side is not None else 32,
            energy_threshold=_resolve(args, config, "energy_threshold", float),
        )
    raise SparseCastError(f"unknown codec {codec!r}")


def _softcast_budget_params(args, config, frame, params):
    budget = _resolve(args, config, "match_budget", int)
    if budget is None:
        return params
    threshold = softcast_threshold_for_budget(frame, params.block_side, int(budget))
    return SoftCastParams(block_side=params.block_side, energy_threshold=threshold)


def _cmd_encode(args, config) -> int:
    codec, params = _codec_params(args, config)
    frame = load_frame(args.image, params.block_side)
    if codec == "sparsecast":
        encoded = encode(frame, params)
    else:
        params = _softcast_budget_params(args, config, frame, params)
        encoded = softcast_encode(frame, params)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    Path(f"{out}.meta").write_bytes(serialize_metadata(encoded.metadata))
    write_symbols(encoded.stream, f"{out}.iq")
    print(
        f"encoded {args.image}: codec={codec} symbols={encoded.symbol_count} "
        f"metadata_bits={encoded.metadata_bits} -> {out}.meta {out}.iq"
    )
    return 0


def _cmd_decode(args, config) -> int:
    prefix = Path(args.image)
    metadata = deserialize_metadata(Path(f"{prefix}.meta").read_bytes())
    stream = read_symbols(f"{prefix}.iq", stream_layout(metadata))
    sigma2 = _resolve(args, config, "noise_var", float)
    if isinstance(metadata, Metadata):
        frame = decode(stream, metadata, sigma2)
    else:
        frame = softcast_decode(stream, metadata, sigma2)
    save_reconstruction(frame, args.out)
    print(f"decoded {prefix} -> {args.out} ({frame.width}x{frame.height})")
    return 0


def _cmd_simulate(args, config) -> int:
    codec, params = _codec_params(args, config)
    frame = load_frame(args.image, params.block_side)
    csnr_db = _resolve(args, config, "csnr", _parse_csnr)
    seed = _resolve(args, config, "seed", int)
    if codec == "sparsecast":
        encoded = encode(frame, params)
    else:
        params = _softcast_budget_params(args, config, frame, params)
        encoded = softcast_encode(frame, params)
    received, sigma2 = transmit(encoded.stream, ChannelConfig(csnr_db, seed))
    if isinstance(encoded.metadata, Metadata):
        reconstruction = decode(received, encoded.metadata, sigma2)
    else:
        reconstruction = softcast_decode(received, encoded.metadata, sigma2)
    quality = psnr(frame, reconstruction)
    if csnr_db == math.inf:
        realized = math.inf
    else:
        power = float(
            np.sum(encoded.stream.symbols.real**2 + encoded.stream.symbols.imag**2)
        ) / encoded.stream.component_count()
        realized = 10.0 * math.log10(power / estimate_noise_power(encoded.stream, received))
    if args.out:
        save_reconstruction(reconstruction, args.out)
    print(
        f"codec={codec} csnr_req_db={csnr_db:.4f} csnr_real_db={realized:.4f} "
        f"psnr_db={quality:.4f} symbols={encoded.symbol_count} "
        f"metadata_bits={encoded.metadata_bits}"
    )
    return 0


def _cmd_sweep(args, config) -> int:
    codec, params = _codec_params(args, config)
    frame = load_frame(args.image, params.block_side)
    if codec == "softcast":
        params = _softcast_budget_params(args, config, frame, params)
    points = tuple(
        _parse_csnr(x) for x in _resolve(args, config, "csnr_list", str).split(",")
    )
    spec = SweepSpec(
        csnr_points=points,
        trials_per_point=_resolve(args, config, "trials", int),
        codec=codec,
        params=params,
        seed_base=_resolve(args, config, "seed", int),
    )
    records = run_sweep(spec, frame)
    emit_csv(records, args.out)
    print(f"swept {len(points)} CSNR points x {spec.trials_per_point} trials -> {args.out}")
    return 0


def _cmd_report(args, config) -> int:
    if args.table:
        print("constellation,code_rate,csnr_threshold_db")
        for t in REFERENCE_THRESHOLDS:
            print(f"{t.constellation},{t.code_rate},{t.csnr_threshold_db:.4f}")
        return 0
    if args.csv is None:
        raise SparseCastError("report needs a sweep CSV (or --table)")
    rows = read_csv(args.csv)
    lines = [
        "codec,csnr_req_db,csnr_real_db,psnr_mean_db,psnr_std_db,symbols,"
        "metadata_bits,seconds,digital_scheme,digital_threshold_db"
    ]
    for row in rows:
        ref = best_reference_at(row["csnr_real_db"])
        scheme = f"{ref.constellation} {ref.code_rate}" if ref else ""
        threshold = f"{ref.csnr_threshold_db:.4f}" if ref else ""
        lines.append(
            f"{row['codec']},{row['csnr_req_db']:.4f},{row['csnr_real_db']:.4f},"
            f"{row['psnr_mean_db']:.4f},{row['psnr_std_db']:.4f},{row['symbols']},"
            f"{row['metadata_bits']},{row['seconds']:.4f},{scheme},{threshold}"
        )
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="ascii")
        print(f"report -> {args.out}")
    else:
        print(text, end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sparsecast",
        description="Analog image transmission codecs over a simulated AWGN channel",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, *, image=True, out_required=True):
        p.add_argument("--config", help="flat key=value config file; flags override")
        if image:
            p.add_argument("--image", required=True, help="input PGM (or file prefix)")
        p.add_argument("--out", required=out_required, help="output path (or prefix)")

    def add_codec_flags(p):
        p.add_argument("--codec", choices=["sparsecast", "softcast"])
        p.add_argument("--block-side", dest="block_side", type=int)
        p.add_argument("--tau", type=float, help="sparsity threshold")
        p.add_argument("--oversampling", type=float)
        p.add_argument("--levels", type=_parse_levels, help="comma-separated counts")
        p.add_argument("--seed", type=int)
        p.add_argument("--energy-threshold", dest="energy_threshold", type=float)
        p.add_argument(
            "--match-budget", dest="match_budget", type=int,
            help="softcast: pick the energy threshold to fit this symbol budget",
        )

    p = sub.add_parser("encode", help="encode a PGM into .meta/.iq files")
    add_common(p)
    add_codec_flags(p)
    p.set_defaults(func=_cmd_encode)

    p = sub.add_parser("decode", help="decode .meta/.iq files back to a PGM")
    add_common(p)
    p.add_argument("--noise-var", dest="noise_var", type=float,
                   help="per-component noise variance seen by the stream")
    p.set_defaults(func=_cmd_decode)

    p = sub.add_parser("simulate", help="one encode/channel/decode shot")
    add_common(p, out_required=False)
    add_codec_flags(p)
    p.add_argument("--csnr", type=_parse_csnr, help="channel SNR in dB, or 'inf'")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("sweep", help="PSNR-vs-CSNR sweep to CSV")
    add_common(p)
    add_codec_flags(p)
    p.add_argument("--csnr-list", dest="csnr_list", help="comma-separated dB values")
    p.add_argument("--trials", type=int)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("report", help="annotate a sweep CSV with digital reference points")
    p.add_argument("csv", nargs="?", help="sweep CSV to annotate")
    p.add_argument("--config", help="flat key=value config file; flags override")
    p.add_argument("--out", help="output CSV (stdout if omitted)")
    p.add_argument("--table", action="store_true", help="print the reference thresholds")
    p.set_defaults(func=_cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _parse_config(args.config)
        return args.func(args, config)
    except (SparseCastError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
