"""Analog image transmission over AWGN: compressed-sensing codec, linear
baseline, channel simulator, and benchmark harness."""

from .allocation import min_mse_gains, mmse_estimate
from .amp import AmpConfig, AmpResult, amp_recover
from .channel import (
    NOISELESS,
    ChannelConfig,
    SymbolStream,
    estimate_noise_power,
    map_symbols,
    transmit,
    unmap_symbols,
)
from .codec import (
    EncodedImage,
    Metadata,
    SoftCastMetadata,
    SoftCastParams,
    SparseCastParams,
    TransmissionPlan,
    decode,
    deserialize_metadata,
    encode,
    serialize_metadata,
    softcast_decode,
    softcast_encode,
)
from .harness import SweepRecord, SweepSpec, emit_csv, run_sweep, save_reconstruction
from .image import Frame, bundled_image_path, load_frame, partition, psnr, reassemble, save_frame
from .sensing import (
    MeasurementLevels,
    MeasurementMatrix,
    choose_level,
    default_levels,
    generate_matrix,
    measure,
    sparsify,
)
from .transform import CoefficientCube, CoefficientGroup, dct2, group, idct2, ungroup

__version__ = "0.1.0"
