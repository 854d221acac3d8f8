"""Waveform container and PCM16 WAV I/O.

All audio inside the package is float64 in [-1, 1], canonically 16 kHz.
Files are RIFF PCM16 WAV, mono or stereo; ingest of other rates goes
through a linear-phase polyphase resampler.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.io import wavfile
from scipy.signal import resample_poly

DEFAULT_SAMPLE_RATE = 16000


@dataclass(frozen=True)
class Waveform:
    """Sampled audio: ``samples`` has shape (channels, n), channels 1 or 2."""

    samples: np.ndarray
    sample_rate: int = DEFAULT_SAMPLE_RATE

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=np.float64)
        if s.ndim == 1:
            s = s[np.newaxis, :]
        if s.ndim != 2 or s.shape[0] not in (1, 2):
            raise ValueError(f"expected (channels, n) with 1 or 2 channels, got {s.shape}")
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")
        if not np.all(np.isfinite(s)):
            raise ValueError("waveform contains non-finite values")
        object.__setattr__(self, "samples", s)

    @property
    def channels(self) -> int:
        return self.samples.shape[0]

    @property
    def num_samples(self) -> int:
        return self.samples.shape[1]

    @property
    def duration_s(self) -> float:
        return self.num_samples / self.sample_rate

    @property
    def mono_samples(self) -> np.ndarray:
        """1-D view of a mono waveform; raises on stereo."""
        if self.channels != 1:
            raise ValueError("waveform is not mono")
        return self.samples[0]

    def to_mono(self) -> "Waveform":
        if self.channels == 1:
            return self
        return Waveform(self.samples.mean(axis=0), self.sample_rate)

    def slice_s(self, start_s: float, end_s: float) -> "Waveform":
        """Cut [start_s, end_s) by sample index (rounded to nearest sample)."""
        i0 = int(round(start_s * self.sample_rate))
        i1 = int(round(end_s * self.sample_rate))
        if not 0 <= i0 < i1 <= self.num_samples:
            raise ValueError(f"slice [{start_s}, {end_s}) outside waveform")
        return Waveform(self.samples[:, i0:i1], self.sample_rate)

    def __add__(self, other: "Waveform") -> "Waveform":
        if (other.sample_rate != self.sample_rate
                or other.samples.shape != self.samples.shape):
            raise ValueError("waveform shape/rate mismatch")
        return Waveform(self.samples + other.samples, self.sample_rate)

    def scaled(self, gain: float) -> "Waveform":
        return Waveform(self.samples * gain, self.sample_rate)


def silence(duration_s: float, sample_rate: int = DEFAULT_SAMPLE_RATE, channels: int = 1) -> Waveform:
    n = int(round(duration_s * sample_rate))
    return Waveform(np.zeros((channels, n)), sample_rate)


def concatenate(parts: list[Waveform]) -> Waveform:
    if not parts:
        raise ValueError("nothing to concatenate")
    sr = parts[0].sample_rate
    ch = parts[0].channels
    if any(p.sample_rate != sr or p.channels != ch for p in parts):
        raise ValueError("waveform rate/channel mismatch")
    return Waveform(np.concatenate([p.samples for p in parts], axis=1), sr)


def resample(w: Waveform, target_rate: int) -> Waveform:
    """Linear-phase polyphase resampling to ``target_rate``."""
    if target_rate == w.sample_rate:
        return w
    g = math.gcd(int(target_rate), int(w.sample_rate))
    up, down = target_rate // g, w.sample_rate // g
    out = resample_poly(w.samples, up, down, axis=1)
    return Waveform(np.clip(out, -1.0, 1.0), target_rate)


def float_to_pcm16(samples: np.ndarray) -> np.ndarray:
    """Quantize float [-1, 1] to int16 (round-half-away, clipped)."""
    scaled = np.clip(samples, -1.0, 1.0) * 32767.0
    return np.round(scaled).astype(np.int16)


def pcm16_to_float(samples: np.ndarray) -> np.ndarray:
    return samples.astype(np.float64) / 32767.0


def _fspath(target):
    return str(target) if isinstance(target, (str, Path)) else target


def write_wav(path, w: Waveform) -> None:
    """Write PCM16 WAV to a path or file-like object; stereo is stored as
    interleaved (n, 2)."""
    data = float_to_pcm16(w.samples)
    wavfile.write(_fspath(path), w.sample_rate,
                  data.T if w.channels > 1 else data[0])


def read_wav(path, target_rate: int | None = DEFAULT_SAMPLE_RATE) -> Waveform:
    """Read a PCM WAV from a path or file-like object, converting to float
    and optionally resampling.

    Accepts PCM16/PCM32/float WAVs (mono or stereo). When ``target_rate``
    is given and differs from the file's rate, the polyphase resampler is
    applied.
    """
    rate, data = wavfile.read(_fspath(path))
    if data.ndim == 1:
        data = data[:, np.newaxis]
    if data.shape[1] > 2:
        raise ValueError(f"unsupported channel count {data.shape[1]}")
    if data.dtype == np.int16:
        f = pcm16_to_float(data)
    elif data.dtype == np.int32:
        f = data.astype(np.float64) / 2147483647.0
    elif data.dtype in (np.float32, np.float64):
        f = data.astype(np.float64)
    elif data.dtype == np.uint8:
        f = (data.astype(np.float64) - 128.0) / 128.0
    else:
        raise ValueError(f"unsupported WAV sample format {data.dtype}")
    w = Waveform(f.T, rate)
    if target_rate is not None and rate != target_rate:
        w = resample(w, target_rate)
    return w
