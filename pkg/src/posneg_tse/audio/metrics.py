"""Objective extraction metrics: SNR, SI-SNR, their improvements, STOI.

dB values are capped to [-60, +60] so aggregates stay finite when the
estimate equals the reference exactly. Epsilon regularizers scale with
the relevant signal power rather than being absolute constants.
"""

from __future__ import annotations

import numpy as np
from scipy.signal import resample_poly

from .waveform import Waveform

DB_CAP = 60.0
_REL_EPS = 1e-10


def _check_pair(est: Waveform, ref: Waveform) -> None:
    if est.sample_rate != ref.sample_rate:
        raise ValueError("sample rate mismatch")
    if est.samples.shape != ref.samples.shape:
        raise ValueError("length/channel mismatch")


def _capped_db(num: float, den: float) -> float:
    if num <= 0.0:
        return -DB_CAP
    return float(np.clip(10.0 * np.log10(num / den), -DB_CAP, DB_CAP))


def snr_db(est: Waveform, ref: Waveform) -> float:
    """10*log10(||ref||^2 / (||ref - est||^2 + eps)), eps = 1e-10*||ref||^2."""
    _check_pair(est, ref)
    ref_e = float(np.sum(ref.samples ** 2))
    if ref_e == 0.0:
        raise ValueError("undefined SNR: all-zero reference")
    err_e = float(np.sum((ref.samples - est.samples) ** 2))
    return _capped_db(ref_e, err_e + _REL_EPS * ref_e)


def si_snr_db(est: Waveform, ref: Waveform) -> float:
    """Scale-invariant SNR: project est onto ref after zero-meaning both.

    The regularizer scales with the projection energy so that est = a*ref
    hits the +60 dB cap for every a > 0.
    """
    _check_pair(est, ref)
    e = est.samples - est.samples.mean(axis=1, keepdims=True)
    r = ref.samples - ref.samples.mean(axis=1, keepdims=True)
    ref_e = float(np.sum(r ** 2))
    if ref_e == 0.0:
        raise ValueError("undefined SI-SNR: all-zero reference")
    proj = (np.sum(e * r) / ref_e) * r
    num = float(np.sum(proj ** 2))
    den = float(np.sum((e - proj) ** 2)) + _REL_EPS * num
    return _capped_db(num, den)


def improvement(metric, est: Waveform, ref: Waveform, mixture: Waveform) -> float:
    """metric(est, ref) - metric(mixture, ref)."""
    return metric(est, ref) - metric(mixture, ref)


# --- STOI ------------------------------------------------------------------
#
# Standard short-time objective intelligibility: 10 kHz analysis rate,
# silent-frame removal with a 40 dB dynamic range, 1/3-octave band
# decomposition of a 512-point STFT, 384 ms (30-frame) segments,
# clipped+normalized correlation averaged over bands and segments.

_STOI_RATE = 10000
_STOI_FRAME = 256
_STOI_HOP = 128
_STOI_NFFT = 512
_STOI_NBANDS = 15
_STOI_MINFREQ = 150.0
_STOI_SEG = 30
_STOI_DYN_RANGE = 40.0
_STOI_BETA_DB = -15.0


def _third_octave_matrix(rate: int, nfft: int, n_bands: int, min_freq: float) -> np.ndarray:
    f = np.linspace(0, rate / 2, nfft // 2 + 1)
    k = np.arange(n_bands, dtype=float)
    cf = min_freq * 2.0 ** (k / 3.0)
    lo = cf * 2.0 ** (-1.0 / 6.0)
    hi = cf * 2.0 ** (1.0 / 6.0)
    mat = np.zeros((n_bands, len(f)))
    for b in range(n_bands):
        ilo = int(np.argmin((f - lo[b]) ** 2))
        ihi = int(np.argmin((f - hi[b]) ** 2))
        mat[b, ilo:ihi] = 1.0
    return mat


def _frame_signal(x: np.ndarray, frame: int, hop: int) -> np.ndarray:
    n_frames = (len(x) - frame) // hop + 1
    idx = np.arange(n_frames)[:, None] * hop + np.arange(frame)[None, :]
    return x[idx]


def _remove_silent_frames(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    w = np.hanning(_STOI_FRAME + 2)[1:-1]
    xf = _frame_signal(x, _STOI_FRAME, _STOI_HOP) * w
    yf = _frame_signal(y, _STOI_FRAME, _STOI_HOP) * w
    energy = 20.0 * np.log10(np.linalg.norm(xf, axis=1) + 1e-30)
    keep = energy > energy.max() - _STOI_DYN_RANGE
    xf, yf = xf[keep], yf[keep]
    # overlap-add the surviving frames back into contiguous signals
    n = _STOI_FRAME + max(0, len(xf) - 1) * _STOI_HOP
    xo, yo = np.zeros(n), np.zeros(n)
    for i in range(len(xf)):
        lo = i * _STOI_HOP
        xo[lo:lo + _STOI_FRAME] += xf[i]
        yo[lo:lo + _STOI_FRAME] += yf[i]
    return xo, yo


def stoi(est: Waveform, ref: Waveform) -> float:
    """Short-time objective intelligibility of ``est`` against clean ``ref``.

    Inputs are mono at 16 kHz (resampled to 10 kHz internally). Raises
    ``ValueError("too short for STOI")`` when fewer than one 384 ms
    segment survives silent-frame removal.
    """
    _check_pair(est, ref)
    x = resample_poly(ref.to_mono().mono_samples, _STOI_RATE, ref.sample_rate)
    y = resample_poly(est.to_mono().mono_samples, _STOI_RATE, est.sample_rate)
    if len(x) < _STOI_FRAME:
        raise ValueError("too short for STOI")
    x, y = _remove_silent_frames(x, y)
    if len(x) < _STOI_FRAME + (_STOI_SEG - 1) * _STOI_HOP:
        raise ValueError("too short for STOI")

    w = np.hanning(_STOI_FRAME + 2)[1:-1]
    xf = _frame_signal(x, _STOI_FRAME, _STOI_HOP) * w
    yf = _frame_signal(y, _STOI_FRAME, _STOI_HOP) * w
    X = np.abs(np.fft.rfft(xf, n=_STOI_NFFT, axis=1)) ** 2
    Y = np.abs(np.fft.rfft(yf, n=_STOI_NFFT, axis=1)) ** 2
    octave = _third_octave_matrix(_STOI_RATE, _STOI_NFFT, _STOI_NBANDS, _STOI_MINFREQ)
    Xb = np.sqrt(X @ octave.T)  # (frames, bands)
    Yb = np.sqrt(Y @ octave.T)

    clip = 10.0 ** (-_STOI_BETA_DB / 20.0)
    scores = []
    for m in range(_STOI_SEG, Xb.shape[0] + 1):
        xs = Xb[m - _STOI_SEG:m]  # (seg, bands)
        ys = Yb[m - _STOI_SEG:m]
        alpha = np.linalg.norm(xs, axis=0) / (np.linalg.norm(ys, axis=0) + 1e-30)
        ys = np.minimum(ys * alpha, xs * (1.0 + clip))
        xm = xs - xs.mean(axis=0)
        ym = ys - ys.mean(axis=0)
        denom = np.linalg.norm(xm, axis=0) * np.linalg.norm(ym, axis=0) + 1e-30
        scores.append(np.sum(xm * ym, axis=0) / denom)
    return float(np.mean(scores))
