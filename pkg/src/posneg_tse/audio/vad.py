"""Energy-threshold voice activity trimming."""

from __future__ import annotations

import numpy as np

from .waveform import Waveform

DEFAULT_FRAME_MS = 20.0
DEFAULT_THRESHOLD_DB = -40.0


def vad_trim(w: Waveform, frame_ms: float = DEFAULT_FRAME_MS,
             threshold_db: float = DEFAULT_THRESHOLD_DB) -> Waveform:
    """Drop non-speech frames from a mono waveform.

    Splits into non-overlapping ``frame_ms`` frames, computes per-frame
    RMS, and keeps frames whose RMS is within ``threshold_db`` of the
    95th-percentile frame RMS. Kept frames are concatenated bit-identically.
    Raises ``ValueError("no speech detected")`` when nothing passes.
    """
    x = w.mono_samples
    frame = max(1, int(round(frame_ms * 1e-3 * w.sample_rate)))
    n_frames = (len(x) + frame - 1) // frame
    rms = np.empty(n_frames)
    for i in range(n_frames):
        seg = x[i * frame:(i + 1) * frame]
        rms[i] = np.sqrt(np.mean(seg ** 2))
    floor = np.percentile(rms, 95) * 10.0 ** (threshold_db / 20.0)
    keep = rms > floor
    if not keep.any():
        raise ValueError("no speech detected")
    parts = [x[i * frame:(i + 1) * frame] for i in range(n_frames) if keep[i]]
    return Waveform(np.concatenate(parts), w.sample_rate)
