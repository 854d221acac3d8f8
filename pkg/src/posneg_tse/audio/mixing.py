"""Gain solving against an SNR target and binaural impulse-response routing."""

from __future__ import annotations

import numpy as np
from scipy.signal import fftconvolve

from .waveform import Waveform


def snr_gain(noise_energy: float, ref_energy: float, target_snr_db: float) -> float:
    """Gain g with 10*log10(ref_energy / (g^2 * noise_energy)) == target."""
    if noise_energy <= 0.0:
        raise ValueError("zero noise")
    if ref_energy <= 0.0:
        raise ValueError("zero reference")
    return float(np.sqrt(ref_energy / noise_energy * 10.0 ** (-target_snr_db / 10.0)))


def scale_to_snr(noise: Waveform, ref: Waveform, target_snr_db: float) -> Waveform:
    """Scale ``noise`` so that the ref-to-noise energy ratio hits the target dB."""
    if noise.samples.shape != ref.samples.shape or noise.sample_rate != ref.sample_rate:
        raise ValueError("noise/ref shape mismatch")
    g = snr_gain(float(np.sum(noise.samples ** 2)), float(np.sum(ref.samples ** 2)),
                 target_snr_db)
    return noise.scaled(g)


def convolve_brir(w: Waveform, brir_left: Waveform, brir_right: Waveform) -> Waveform:
    """Render a mono source binaurally: per-ear linear convolution, truncated."""
    if w.channels != 1:
        raise ValueError("source must be mono")
    for ir in (brir_left, brir_right):
        if ir.channels != 1:
            raise ValueError("impulse responses must be mono")
        if ir.sample_rate != w.sample_rate:
            raise ValueError("sample-rate mismatch between source and BRIR")
    n = w.num_samples
    left = fftconvolve(w.mono_samples, brir_left.mono_samples)[:n]
    right = fftconvolve(w.mono_samples, brir_right.mono_samples)[:n]
    return Waveform(np.stack([left, right]), w.sample_rate)
