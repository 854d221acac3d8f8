"""Deterministic signal primitives shared by every other subsystem."""

from .activity import ActivityTrack, pairwise_iou
from .metrics import DB_CAP, improvement, si_snr_db, snr_db, stoi
from .mixing import convolve_brir, scale_to_snr, snr_gain
from .spectral import Spectrogram, frame_count, istft, sqrt_hann, stft
from .vad import vad_trim
from .waveform import (
    DEFAULT_SAMPLE_RATE,
    Waveform,
    concatenate,
    float_to_pcm16,
    pcm16_to_float,
    read_wav,
    resample,
    silence,
    write_wav,
)

__all__ = [
    "ActivityTrack",
    "DB_CAP",
    "DEFAULT_SAMPLE_RATE",
    "Spectrogram",
    "Waveform",
    "concatenate",
    "convolve_brir",
    "float_to_pcm16",
    "frame_count",
    "improvement",
    "istft",
    "pairwise_iou",
    "pcm16_to_float",
    "read_wav",
    "resample",
    "scale_to_snr",
    "si_snr_db",
    "silence",
    "snr_db",
    "snr_gain",
    "sqrt_hann",
    "stft",
    "stoi",
    "vad_trim",
    "write_wav",
]
