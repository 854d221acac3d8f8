"""STFT analysis/synthesis with exact interior reconstruction.

Conventions (recorded in the Spectrogram metadata rather than implied):

* analysis and synthesis both use the square-root of a periodic Hann
  window, hop = window/2, which satisfies COLA, so overlap-add synthesis
  is exact on the interior (the first and last ``hop`` samples of the
  reconstruction see only one frame and are attenuated by the window
  ramp);
* no padding: frame count = floor((n - window) / hop) + 1, and a trailing
  remainder shorter than one window is dropped by analysis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .waveform import Waveform


def sqrt_hann(window_size: int) -> np.ndarray:
    """Square root of the periodic Hann window."""
    n = np.arange(window_size)
    hann = 0.5 * (1.0 - np.cos(2.0 * np.pi * n / window_size))
    return np.sqrt(hann)


@dataclass(frozen=True)
class Spectrogram:
    """Complex STFT bins, shape (channels, frames, window//2 + 1)."""

    bins: np.ndarray
    window_size: int
    hop: int
    sample_rate: int
    padding: str = "none"

    def __post_init__(self):
        b = np.asarray(self.bins, dtype=np.complex128)
        if b.ndim == 2:
            b = b[np.newaxis]
        if b.ndim != 3:
            raise ValueError(f"expected (channels, frames, bins), got {b.shape}")
        if b.shape[2] != self.window_size // 2 + 1:
            raise ValueError(
                f"bin count {b.shape[2]} inconsistent with window {self.window_size}")
        if self.padding != "none":
            raise ValueError(f"unknown padding mode {self.padding!r}")
        object.__setattr__(self, "bins", b)

    @property
    def channels(self) -> int:
        return self.bins.shape[0]

    @property
    def num_frames(self) -> int:
        return self.bins.shape[1]

    @property
    def num_bins(self) -> int:
        return self.bins.shape[2]


def frame_count(n_samples: int, window_size: int, hop: int) -> int:
    return (n_samples - window_size) // hop + 1


def stft(w: Waveform, window_size: int = 128, hop: int = 64) -> Spectrogram:
    """Short-time Fourier transform of all channels.

    Raises ``ValueError("input too short")`` for inputs shorter than one
    window. ``hop`` must divide ``window_size``; the COLA-exact synthesis
    assumes hop = window/2.
    """
    if window_size % hop != 0:
        raise ValueError("hop must divide window_size")
    if w.num_samples < window_size:
        raise ValueError("input too short")
    win = sqrt_hann(window_size)
    n_frames = frame_count(w.num_samples, window_size, hop)
    offsets = np.arange(n_frames) * hop
    idx = offsets[:, None] + np.arange(window_size)[None, :]
    frames = w.samples[:, idx] * win  # (ch, frames, window)
    bins = np.fft.rfft(frames, axis=2)
    return Spectrogram(bins, window_size, hop, w.sample_rate)


def istft(s: Spectrogram) -> Waveform:
    """Overlap-add inverse STFT.

    Output length is window + (frames - 1) * hop; division by the
    accumulated squared-window envelope makes the interior exact and the
    edges best-effort.
    """
    win = sqrt_hann(s.window_size)
    n_out = s.window_size + (s.num_frames - 1) * s.hop
    out = np.zeros((s.channels, n_out))
    env = np.zeros(n_out)
    frames = np.fft.irfft(s.bins, n=s.window_size, axis=2)
    for t in range(s.num_frames):
        lo = t * s.hop
        out[:, lo:lo + s.window_size] += frames[:, t, :] * win
        env[lo:lo + s.window_size] += win ** 2
    out /= np.maximum(env, 1e-12)
    return Waveform(out, s.sample_rate)
