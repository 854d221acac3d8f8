import numpy as np
import pytest

from posneg_tse.audio import Spectrogram, Waveform, frame_count, istft, stft


def test_zero_waveform_zero_spectrogram():
    s = stft(Waveform(np.zeros(16000)), 128, 64)
    assert s.bins.shape == (1, 249, 65)
    assert not s.bins.any()


def test_frame_count_arithmetic():
    s = stft(Waveform(np.random.default_rng(0).normal(0, 0.1, 16000)), 128, 64)
    assert s.num_frames == (16000 - 128) // 64 + 1 == 249
    assert s.num_bins == 65


def test_too_short_input():
    with pytest.raises(ValueError, match="input too short"):
        stft(Waveform(np.zeros(100)), 128, 64)


def test_hop_must_divide_window():
    with pytest.raises(ValueError):
        stft(Waveform(np.zeros(1000)), 128, 48)


def test_bin_center_sinusoid_concentrates_energy():
    # tone at bin k of the 128-point analysis: k * 16000 / 128; the sqrt-Hann
    # mainlobe spans k-1..k+1, putting 81% in bin k and 99% in the mainlobe
    sr, win, hop, k = 16000, 128, 64, 10
    t = np.arange(sr) / sr
    tone = 0.5 * np.sin(2 * np.pi * (k * sr / win) * t)
    s = stft(Waveform(tone), win, hop)
    interior = s.bins[0, 2:-2]
    energy = np.abs(interior) ** 2
    assert np.all(np.argmax(energy, axis=1) == k)
    peak = energy[:, k] / energy.sum(axis=1)
    mainlobe = energy[:, k - 1:k + 2].sum(axis=1) / energy.sum(axis=1)
    assert np.all(peak >= 0.80)
    assert np.all(mainlobe >= 0.95)


def test_istft_zero_and_single_frame():
    zero = Spectrogram(np.zeros((1, 5, 65), dtype=complex), 128, 64, 16000)
    assert not istft(zero).samples.any()
    one = stft(Waveform(np.random.default_rng(1).normal(0, 0.1, 128)), 128, 64)
    assert one.num_frames == 1
    assert istft(one).num_samples == 128


def test_round_trip_interior_exact():
    rng = np.random.default_rng(2)
    x = rng.normal(0, 0.2, 16000)
    w = Waveform(x)
    r = istft(stft(w, 128, 64))
    lo, hi = 64, r.num_samples - 64
    err = np.max(np.abs(r.samples[0, lo:hi] - x[lo:hi])) / np.max(np.abs(x))
    assert err < 1e-6


@pytest.mark.parametrize("n", [256, 1000, 4097, 16000])
def test_round_trip_relative_l2(n):
    rng = np.random.default_rng(n)
    x = rng.normal(0, 0.2, n)
    r = istft(stft(Waveform(x), 128, 64))
    lo = 64
    hi = r.num_samples - 64
    num = np.linalg.norm(r.samples[0, lo:hi] - x[lo:hi])
    den = np.linalg.norm(x[lo:hi])
    assert num / den < 1e-6


def test_stereo_round_trip():
    rng = np.random.default_rng(3)
    x = rng.normal(0, 0.2, (2, 8000))
    r = istft(stft(Waveform(x), 128, 64))
    assert r.channels == 2
    assert np.allclose(r.samples[:, 64:-64], x[:, 64:r.num_samples - 64],
                       atol=1e-10)


def test_spectrogram_metadata_validation():
    with pytest.raises(ValueError):
        Spectrogram(np.zeros((1, 5, 64), dtype=complex), 128, 64, 16000)
    with pytest.raises(ValueError):
        Spectrogram(np.zeros((1, 5, 65), dtype=complex), 128, 64, 16000,
                    padding="reflect")
