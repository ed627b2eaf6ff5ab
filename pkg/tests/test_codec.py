import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sparsecast.channel import NOISELESS, ChannelConfig, transmit, unmap_symbols
from sparsecast.codec import (
    Metadata,
    SoftCastMetadata,
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
from sparsecast.errors import LayoutError, MetadataError, SparseCastError
from sparsecast.image import Frame, psnr
from sparsecast.sensing import MeasurementLevels

from .oracles import threshold_invert_oracle


def engineered_sparse_frame(size=256, dots=45, seed=5):
    """Analog plane gradient + strong dots in a few blocks + faint dust.

    Mixed-frequency groups then hold exactly `dots` nonzeros after
    thresholding at 1.0, all well above the threshold, sitting comfortably
    inside the solver's exact-recovery region.
    """
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:size, 0:size].astype(np.float64)
    pixels = 60.0 + 0.25 * xx + 0.18 * yy
    blocks = [(r, c) for r in range(size // 16) for c in range(size // 16)]
    chosen = rng.choice(len(blocks), size=dots, replace=False)
    for idx in chosen:
        r, c = blocks[idx]
        pixels[16 * r + 7 : 16 * r + 9, 16 * c + 7 : 16 * c + 9] += 120.0
    pixels += rng.uniform(-0.1, 0.1, pixels.shape)
    return Frame(pixels)


def rounded(frame):
    return Frame(np.rint(np.clip(frame.pixels, 0.0, 255.0)))


float32s = st.floats(allow_nan=False, allow_infinity=False, width=32)


@st.composite
def metadata_instances(draw):
    side = draw(st.sampled_from([2, 4]))
    b = side * side
    levels = sorted(draw(st.lists(st.integers(1, 10_000), min_size=1, max_size=8, unique=True)))
    return Metadata(
        block_side=side,
        width=side * 4,
        height=side * 2,
        session_seed=draw(st.integers(0, 2**64 - 1)),
        level_table=tuple(levels),
        means=np.array(draw(st.lists(float32s, min_size=b, max_size=b)), dtype=np.float32),
        variances=np.array(draw(st.lists(float32s, min_size=b, max_size=b)), dtype=np.float32),
        level_indices=np.arange(b) % len(levels),
    )


class TestMetadataWireFormat:
    @given(metadata_instances())
    def test_round_trip_bit_exact(self, metadata):
        back = deserialize_metadata(serialize_metadata(metadata))
        assert isinstance(back, Metadata)
        assert back.block_side == metadata.block_side
        assert (back.width, back.height) == (metadata.width, metadata.height)
        assert back.session_seed == metadata.session_seed
        assert back.level_table == metadata.level_table
        assert np.array_equal(back.means, metadata.means)
        assert np.array_equal(back.variances, metadata.variances)
        assert np.array_equal(back.level_indices, metadata.level_indices)
        assert serialize_metadata(back) == serialize_metadata(metadata)

    def test_block16_eight_levels_budget(self):
        meta = Metadata(
            block_side=16, width=512, height=512, session_seed=1,
            level_table=(64, 128, 192, 256, 384, 512, 768, 1024),
            means=np.zeros(256, dtype=np.float32),
            variances=np.zeros(256, dtype=np.float32),
            level_indices=np.zeros(256, dtype=np.int64),
        )
        data = serialize_metadata(meta)
        header_bytes = 15 + 4 * 8
        per_group_bits = 8 * (len(data) - header_bytes)
        assert per_group_bits == 17_152  # 256 * (64 + 3)

    def test_single_level_table_needs_no_index_bits(self):
        meta = Metadata(
            block_side=4, width=16, height=16, session_seed=0,
            level_table=(16,),
            means=np.zeros(16, dtype=np.float32),
            variances=np.zeros(16, dtype=np.float32),
            level_indices=np.zeros(16, dtype=np.int64),
        )
        data = serialize_metadata(meta)
        assert len(data) == (15 + 4) + 16 * 8  # header + float pairs, no index bytes

    def test_unknown_version_rejected(self):
        with pytest.raises(MetadataError):
            deserialize_metadata(b"\x77" + bytes(64))

    def test_truncation_rejected(self):
        meta = Metadata(
            block_side=4, width=16, height=16, session_seed=0,
            level_table=(4, 16),
            means=np.zeros(16, dtype=np.float32),
            variances=np.zeros(16, dtype=np.float32),
            level_indices=np.zeros(16, dtype=np.int64),
        )
        data = serialize_metadata(meta)
        with pytest.raises(MetadataError):
            deserialize_metadata(data[:-3])

    def test_softcast_round_trip(self):
        meta = SoftCastMetadata(
            block_side=4, width=32, height=32, retained=(0, 3, 15),
            means=np.array([1.0, -2.0, 3.5], dtype=np.float32),
            variances=np.array([0.5, 4.0, 0.0], dtype=np.float32),
        )
        back = deserialize_metadata(serialize_metadata(meta))
        assert isinstance(back, SoftCastMetadata)
        assert back.retained == meta.retained
        assert np.array_equal(back.means, meta.means)
        assert np.array_equal(back.variances, meta.variances)


class TestSparseCastCodec:
    def test_constant_frame_degenerates_to_metadata_only(self):
        frame = Frame(np.full((32, 32), 77.0))
        enc = encode(frame, SparseCastParams(block_side=16, threshold=0.1, session_seed=1))
        assert np.all(enc.plan.gains == 0.0)
        assert np.all(enc.plan.sparsities[1:] == 0)
        assert np.count_nonzero(enc.stream.symbols) == 0
        received, sigma2 = transmit(enc.stream, ChannelConfig(NOISELESS, 1))
        out = decode(received, enc.metadata, sigma2)
        assert np.array_equal(rounded(out).pixels, frame.pixels)

    def test_lossless_limit_on_random_frame(self):
        rng = np.random.default_rng(21)
        frame = Frame(rng.integers(0, 256, (64, 64)).astype(float))
        params = SparseCastParams(
            block_side=16, threshold=0.0, levels=MeasurementLevels((16,)), session_seed=3
        )
        enc = encode(frame, params)
        assert np.all(enc.plan.measurement_counts == 16)
        received, sigma2 = transmit(enc.stream, ChannelConfig(NOISELESS, 1))
        out = decode(received, enc.metadata, sigma2)
        assert np.max(np.abs(rounded(out).pixels - frame.pixels)) <= 1.0

    def test_noiseless_threshold_matches_direct_oracle(self):
        frame = engineered_sparse_frame()
        params = SparseCastParams(block_side=16, threshold=1.0, oversampling=3.0, session_seed=11)
        enc = encode(frame, params)
        assert (enc.plan.measurement_counts < 256).any()
        received, sigma2 = transmit(enc.stream, ChannelConfig(NOISELESS, 1))
        out = decode(received, enc.metadata, sigma2)
        reference = threshold_invert_oracle(frame, 16, 1.0, 3.0)
        assert abs(psnr(frame, out) - psnr(frame, reference)) <= 1e-3

    def test_decoder_is_self_sufficient(self):
        frame = engineered_sparse_frame(size=128, dots=12, seed=9)
        params = SparseCastParams(block_side=16, threshold=1.0, session_seed=4)
        enc = encode(frame, params)
        received, sigma2 = transmit(enc.stream, ChannelConfig(15.0, 8))
        via_bytes = decode(
            received, deserialize_metadata(serialize_metadata(enc.metadata)), sigma2
        )
        direct = decode(received, enc.metadata, sigma2)
        assert np.array_equal(via_bytes.pixels, direct.pixels)

    def test_stream_layout_reconstruction(self):
        frame = engineered_sparse_frame(size=128, dots=12, seed=9)
        enc = encode(frame, SparseCastParams(block_side=16, threshold=1.0, session_seed=4))
        assert stream_layout(enc.metadata) == enc.stream.layout

    def test_layout_mismatch_rejected(self):
        frame = engineered_sparse_frame(size=128, dots=12, seed=9)
        enc = encode(frame, SparseCastParams(block_side=16, threshold=1.0, session_seed=4))
        other = encode(frame, SparseCastParams(block_side=16, threshold=30.0, session_seed=4))
        with pytest.raises(LayoutError):
            decode(other.stream, enc.metadata, 0.0)

    def test_symbol_count_accounting(self, scene):
        enc = encode(scene, SparseCastParams(block_side=16, threshold=3.5, session_seed=2))
        expected = sum(math.ceil(int(m) / 2) for m in enc.plan.measurement_counts)
        assert enc.symbol_count == expected == enc.plan.total_symbols
        assert enc.symbol_count <= 256 * 512

    def test_stream_power_is_normalized(self, scene):
        # allocation and channel agree: average per-component transmit
        # power lands on 1 for natural content
        enc = encode(scene, SparseCastParams(block_side=16, threshold=3.5, session_seed=9))
        power = float(np.sum(enc.stream.symbols.real**2 + enc.stream.symbols.imag**2))
        power /= enc.stream.component_count()
        assert power == pytest.approx(1.0, rel=0.02)

    def test_symbols_monotone_in_threshold(self, scene):
        counts = [
            encode(scene, SparseCastParams(block_side=16, threshold=t, session_seed=2)).symbol_count
            for t in (0.1, 3.5, 8.0)
        ]
        assert counts[0] >= counts[1] >= counts[2]

    def test_symbol_file_round_trip(self, tmp_path):
        frame = engineered_sparse_frame(size=128, dots=12, seed=9)
        enc = encode(frame, SparseCastParams(block_side=16, threshold=1.0, session_seed=4))
        path = tmp_path / "payload.iq"
        write_symbols(enc.stream, path)
        back = read_symbols(path, stream_layout(enc.metadata))
        assert back.layout == enc.stream.layout
        assert np.array_equal(
            back.symbols.astype(np.complex64), enc.stream.symbols.astype(np.complex64)
        )

    def test_symbol_file_length_validation(self, tmp_path):
        frame = engineered_sparse_frame(size=128, dots=12, seed=9)
        enc = encode(frame, SparseCastParams(block_side=16, threshold=1.0, session_seed=4))
        path = tmp_path / "payload.iq"
        write_symbols(enc.stream, path)
        with open(path, "ab") as fh:
            fh.write(b"\x00" * 8)
        with pytest.raises(LayoutError):
            read_symbols(path, stream_layout(enc.metadata))


class TestSoftCastCodec:
    def test_zero_threshold_keeps_everything(self):
        rng = np.random.default_rng(6)
        frame = Frame(rng.integers(0, 256, (128, 128)).astype(float))
        enc = softcast_encode(frame, SoftCastParams(block_side=32, energy_threshold=0.0))
        b, n = 1024, 16
        assert len(enc.metadata.retained) == b
        assert enc.symbol_count == b * n // 2

    def test_noiseless_round_trip_with_zero_threshold(self):
        rng = np.random.default_rng(7)
        frame = Frame(rng.integers(0, 256, (128, 128)).astype(float))
        enc = softcast_encode(frame, SoftCastParams(block_side=32, energy_threshold=0.0))
        received, sigma2 = transmit(enc.stream, ChannelConfig(NOISELESS, 1))
        out = softcast_decode(received, enc.metadata, sigma2)
        assert np.max(np.abs(rounded(out).pixels - frame.pixels)) <= 1.0

    def test_discarded_groups_reconstruct_as_zero(self):
        rng = np.random.default_rng(8)
        frame = Frame(rng.integers(0, 256, (64, 64)).astype(float))
        enc = softcast_encode(frame, SoftCastParams(block_side=32, energy_threshold=1e7))
        assert 0 < len(enc.metadata.retained) < 1024
        received, sigma2 = transmit(enc.stream, ChannelConfig(NOISELESS, 1))
        out = softcast_decode(received, enc.metadata, sigma2)
        assert out.pixels.shape == frame.pixels.shape

    def test_all_discarded_rejected(self):
        frame = Frame(np.zeros((64, 64)))
        with pytest.raises(SparseCastError):
            softcast_encode(frame, SoftCastParams(block_side=32, energy_threshold=1e12))

    def test_self_sufficient_decode(self):
        rng = np.random.default_rng(9)
        frame = Frame(rng.integers(0, 256, (64, 64)).astype(float))
        enc = softcast_encode(frame, SoftCastParams(block_side=32, energy_threshold=100.0))
        received, sigma2 = transmit(enc.stream, ChannelConfig(10.0, 5))
        via_bytes = softcast_decode(
            received, deserialize_metadata(serialize_metadata(enc.metadata)), sigma2
        )
        direct = softcast_decode(received, enc.metadata, sigma2)
        assert np.array_equal(via_bytes.pixels, direct.pixels)
