"""Streaming low-latency STFT analysis/synthesis.

Thin Python facade over the C++ core: asymmetric analysis/synthesis
window pairs, a streaming engine with two-hop latency, pluggable
spectral processors, hearing-aid amplification, evaluation metrics,
resampling, and WAV I/O.
"""

from ._core import (
    DegenerateWindowError,
    Error,
    IoError,
    ParameterError,
    Processor,
    SampleRateError,
    ShapeError,
    SpectrumFrame,
    StateError,
    StftEngine,
    UnsupportedFormatError,
    WindowPair,
    apply_amplification,
    cola_envelope,
    design_fir,
    fir_response_db,
    identity_processor,
    magnitude_gain_processor,
    make_window_pair,
    measure_delay_snr,
    multires_mag_loss,
    multires_mag_loss_detail,
    nalr_gains,
    normalize_synthesis,
    read_wav,
    resample,
    write_wav,
)

__all__ = [
    "DegenerateWindowError",
    "Error",
    "IoError",
    "ParameterError",
    "Processor",
    "SampleRateError",
    "ShapeError",
    "SpectrumFrame",
    "StateError",
    "StftEngine",
    "UnsupportedFormatError",
    "WindowPair",
    "apply_amplification",
    "cola_envelope",
    "design_fir",
    "fir_response_db",
    "identity_processor",
    "magnitude_gain_processor",
    "make_window_pair",
    "measure_delay_snr",
    "multires_mag_loss",
    "multires_mag_loss_detail",
    "nalr_gains",
    "normalize_synthesis",
    "read_wav",
    "resample",
    "write_wav",
]
