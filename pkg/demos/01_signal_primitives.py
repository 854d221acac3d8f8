"""Tour of the signal primitives: STFT round trips, metrics, VAD, IoU.

Run:  python demos/01_signal_primitives.py
"""

import numpy as np

from posneg_tse.audio import (
    ActivityTrack,
    Waveform,
    improvement,
    istft,
    pairwise_iou,
    si_snr_db,
    snr_db,
    stft,
    stoi,
    vad_trim,
)

rng = np.random.default_rng(0)

# ---- waveforms and the STFT round trip -------------------------------------
speech = Waveform(0.3 * rng.normal(0, 1.0, 16000))
spec = stft(speech, window_size=128, hop=64)
print(f"1 s @ 16 kHz -> {spec.num_frames} frames x {spec.num_bins} bins")

recon = istft(spec)
interior = slice(64, recon.num_samples - 64)
err = np.max(np.abs(recon.samples[0][interior] - speech.samples[0][interior]))
print(f"ISTFT(STFT(x)) interior error: {err:.2e}")

# ---- extraction metrics ------------------------------------------------------
noise = Waveform(0.1 * rng.normal(0, 1.0, 16000))
mixture = speech + noise
print(f"mixture SNR:        {snr_db(mixture, speech):7.2f} dB")
print(f"scale-invariance:   si_snr(3x, x) = {si_snr_db(speech.scaled(3.0), speech):.1f} dB (cap)")
print(f"identity improves:  {improvement(snr_db, mixture, speech, mixture):.2f} dB")
print(f"oracle improves:    {improvement(snr_db, speech, speech, mixture):.2f} dB")
print(f"STOI(clean, clean): {stoi(speech, speech):.3f}")
print(f"STOI(mix, clean):   {stoi(mixture, speech):.3f}")

# ---- energy VAD ---------------------------------------------------------------
padded = Waveform(np.concatenate([np.zeros(8000), speech.mono_samples,
                                  np.zeros(8000)]))
trimmed = vad_trim(padded)
print(f"VAD: {padded.duration_s:.2f} s in, {trimmed.duration_s:.2f} s out")

# ---- activity IoU ---------------------------------------------------------------
a = ActivityTrack(((0.0, 2.0),), 3.0)
b = ActivityTrack(((1.0, 3.0),), 3.0)
print(f"IoU([0,2] vs [1,3]) = {pairwise_iou(a, b):.3f}")
