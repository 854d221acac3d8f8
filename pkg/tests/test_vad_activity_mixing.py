import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from posneg_tse.audio import (
    ActivityTrack,
    Waveform,
    convolve_brir,
    pairwise_iou,
    scale_to_snr,
    vad_trim,
)

SR = 16000


class TestVadTrim:
    def test_leading_silence_removed_bit_identical(self, rng):
        speech = 0.3 * rng.normal(0, 1.0, SR)
        x = np.concatenate([np.zeros(SR), speech])
        out = vad_trim(Waveform(x))
        assert out.num_samples == SR
        assert np.array_equal(out.mono_samples, speech)

    def test_all_zero_errors(self):
        with pytest.raises(ValueError, match="no speech"):
            vad_trim(Waveform(np.zeros(SR)))

    def test_tone_silence_tone_length(self):
        t = np.arange(SR // 2) / SR
        tone = 0.4 * np.sin(2 * np.pi * 440 * t)
        x = np.concatenate([tone, np.zeros(SR // 2), tone])
        out = vad_trim(Waveform(x), frame_ms=20.0)
        frame = int(0.02 * SR)
        assert abs(out.num_samples - SR) <= frame

    def test_idempotent(self, rng):
        speech = 0.3 * rng.normal(0, 1.0, SR)
        x = np.concatenate([np.zeros(4000), speech, np.zeros(4000)])
        once = vad_trim(Waveform(x))
        twice = vad_trim(once)
        frame = int(0.02 * SR)
        assert abs(once.num_samples - twice.num_samples) <= frame


class TestPairwiseIou:
    def test_identical(self):
        a = ActivityTrack(((0.0, 2.0), (3.0, 4.0)), 5.0)
        assert pairwise_iou(a, a) == 1.0

    def test_analytic_third(self):
        a = ActivityTrack(((0.0, 2.0),), 3.0)
        b = ActivityTrack(((1.0, 3.0),), 3.0)
        assert pairwise_iou(a, b) == pytest.approx(1.0 / 3.0)

    def test_empty_union_zero(self):
        a = ActivityTrack((), 3.0)
        assert pairwise_iou(a, a) == 0.0

    @staticmethod
    def _random_track(rng, n_iv=10, total=20.0):
        marks = np.sort(rng.uniform(0, total, size=2 * n_iv))
        iv = [(marks[2 * i], marks[2 * i + 1]) for i in range(n_iv)
              if marks[2 * i + 1] - marks[2 * i] > 1e-3]
        return ActivityTrack(tuple(iv), total)

    def test_matches_rasterized_oracle(self, rng):
        for trial in range(20):
            a = self._random_track(rng)
            b = self._random_track(rng)
            got = pairwise_iou(a, b)
            # 10 ms rasterization oracle (interval ends rounded to the grid)
            grid = np.zeros((2, 2000), dtype=bool)
            for row, tr in ((0, a), (1, b)):
                for s, e in tr.intervals:
                    grid[row, int(round(s * 100)):int(round(e * 100))] = True
            inter = np.logical_and(grid[0], grid[1]).sum() / 100.0
            union = np.logical_or(grid[0], grid[1]).sum() / 100.0
            want = inter / union if union else 0.0
            assert got == pytest.approx(want, abs=2e-2)

    @settings(max_examples=50, deadline=None)
    @given(seed=st.integers(0, 2 ** 16))
    def test_symmetry_and_bounds(self, seed):
        r = np.random.default_rng(seed)
        a = self._random_track(r)
        b = self._random_track(r)
        ab, ba = pairwise_iou(a, b), pairwise_iou(b, a)
        assert ab == ba
        assert 0.0 <= ab <= 1.0


class TestScaleToSnr:
    def test_analytic_gain_two(self):
        ref = Waveform(np.full(4, 1.0))      # energy 4
        noise = Waveform(np.array([1.0, 0, 0, 0]))  # energy 1
        out = scale_to_snr(noise, ref, 0.0)
        assert np.allclose(out.samples[0], [2.0, 0, 0, 0])

    def test_equal_power_plus_ten(self, rng):
        x = rng.normal(0, 0.2, 1000)
        ref = Waveform(x)
        noise = Waveform(x[::-1].copy())
        out = scale_to_snr(noise, ref, 10.0)
        g = np.linalg.norm(out.samples) / np.linalg.norm(noise.samples)
        assert g == pytest.approx(10 ** -0.5, rel=1e-12)

    def test_post_condition_exact(self, rng):
        ref = Waveform(rng.normal(0, 0.3, 3000))
        noise = Waveform(rng.normal(0, 0.05, 3000))
        out = scale_to_snr(noise, ref, -2.5)
        measured = 10 * np.log10(np.sum(ref.samples ** 2) /
                                 np.sum(out.samples ** 2))
        assert measured == pytest.approx(-2.5, abs=1e-9)

    def test_zero_noise_errors(self, rng):
        with pytest.raises(ValueError, match="zero noise"):
            scale_to_snr(Waveform(np.zeros(100)),
                         Waveform(rng.normal(0, 1, 100)), 0.0)


class TestConvolveBrir:
    def test_unit_impulse_identity(self, rng):
        x = Waveform(rng.normal(0, 0.2, SR))
        imp = Waveform(np.array([1.0]))
        out = convolve_brir(x, imp, imp)
        assert out.channels == 2
        assert np.allclose(out.samples[0], x.mono_samples, atol=1e-12)
        assert np.allclose(out.samples[1], x.mono_samples, atol=1e-12)

    def test_delayed_impulse_shifts(self, rng):
        x = Waveform(rng.normal(0, 0.2, 1000))
        left = Waveform(np.array([1.0]))
        right = Waveform(np.concatenate([np.zeros(5), [1.0]]))
        out = convolve_brir(x, left, right)
        assert np.allclose(out.samples[1][5:], x.mono_samples[:-5], atol=1e-12)
        assert np.allclose(out.samples[1][:5], 0.0, atol=1e-12)

    def test_matches_naive_convolution(self, rng):
        x = Waveform(rng.normal(0, 0.2, SR))
        k = rng.normal(0, 0.1, 64)
        brir = Waveform(k)
        out = convolve_brir(x, brir, brir)
        naive = np.zeros(SR)
        for i, tap in enumerate(k):  # direct O(N*K) oracle
            naive[i:] += tap * x.mono_samples[:SR - i]
        assert np.max(np.abs(out.samples[0] - naive)) < 1e-6

    def test_rate_mismatch_errors(self, rng):
        x = Waveform(rng.normal(0, 0.2, 100))
        bad = Waveform(np.array([1.0]), sample_rate=8000)
        with pytest.raises(ValueError, match="sample-rate"):
            convolve_brir(x, bad, bad)
