import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from posneg_tse.audio import (
    DB_CAP,
    Waveform,
    improvement,
    si_snr_db,
    snr_db,
    stoi,
)


def _wave(x):
    return Waveform(np.asarray(x, dtype=float))


def _orthogonalize(n, ref, rng):
    """Noise orthogonal to ref with unit pre-scaling."""
    raw = rng.normal(0, 1, len(ref))
    raw -= np.dot(raw, ref) / np.dot(ref, ref) * ref
    return raw


class TestSnr:
    def test_identical_hits_cap(self, rng):
        x = _wave(rng.normal(0, 0.3, 4000))
        assert snr_db(x, x) == DB_CAP

    def test_double_gain_is_zero_db(self, rng):
        x = rng.normal(0, 0.2, 4000)
        assert snr_db(_wave(2 * x), _wave(x)) == pytest.approx(0.0, abs=1e-9)

    def test_orthogonal_noise_ten_db(self, rng):
        ref = rng.normal(0, 0.2, 4000)
        n = _orthogonalize(4000, ref, rng)
        n *= np.sqrt(0.1 * np.dot(ref, ref) / np.dot(n, n))
        assert snr_db(_wave(ref + n), _wave(ref)) == pytest.approx(10.0, abs=1e-6)

    def test_zero_reference_error(self):
        with pytest.raises(ValueError, match="undefined"):
            snr_db(_wave(np.ones(10)), _wave(np.zeros(10)))

    def test_monotone_in_noise_power(self, rng):
        ref = rng.normal(0, 0.2, 4000)
        n = _orthogonalize(4000, ref, rng)
        values = [snr_db(_wave(ref + a * n), _wave(ref))
                  for a in (0.01, 0.1, 0.3, 1.0, 3.0)]
        assert all(a > b for a, b in zip(values, values[1:]))


class TestSiSnr:
    def test_scale_invariance_cap(self, rng):
        x = rng.normal(0, 0.2, 2000)
        for a in (1e-4, 0.5, 1.0, 7.3, 1e4):
            assert si_snr_db(_wave(a * x), _wave(x)) == DB_CAP

    def test_orthogonal_hits_negative_cap(self, rng):
        ref = rng.normal(0, 0.2, 2000)
        ref -= ref.mean()
        n = _orthogonalize(2000, ref, rng)
        n -= n.mean()
        n -= np.dot(n, ref) / np.dot(ref, ref) * ref  # re-orthogonalize zero-mean
        assert si_snr_db(_wave(n), _wave(ref)) == -DB_CAP

    def test_equal_power_orthogonal_noise_zero_db(self, rng):
        ref = rng.normal(0, 0.2, 2000)
        ref -= ref.mean()
        n = _orthogonalize(2000, ref, rng)
        n -= n.mean()
        n -= np.dot(n, ref) / np.dot(ref, ref) * ref
        n *= np.linalg.norm(ref) / np.linalg.norm(n)
        assert si_snr_db(_wave(ref + n), _wave(ref)) == pytest.approx(0.0, abs=1e-6)

    @settings(max_examples=100, deadline=None)
    @given(a=st.floats(min_value=1e-4, max_value=1e4), seed=st.integers(0, 2 ** 16))
    def test_cap_property(self, a, seed):
        x = np.random.default_rng(seed).normal(0, 0.3, 300)
        assert si_snr_db(_wave(a * x), _wave(x)) == DB_CAP


class TestImprovement:
    def test_mixture_as_estimate_is_zero(self, rng):
        ref = _wave(rng.normal(0, 0.2, 2000))
        mix = _wave(rng.normal(0, 0.2, 2000))
        assert improvement(snr_db, mix, ref, mix) == 0.0
        assert improvement(si_snr_db, mix, ref, mix) == 0.0

    def test_oracle_from_zero_db_mixture(self, rng):
        ref = rng.normal(0, 0.2, 2000)
        n = _orthogonalize(2000, ref, rng)
        n *= np.linalg.norm(ref) / np.linalg.norm(n)
        mix = _wave(ref + n)
        got = improvement(snr_db, _wave(ref), _wave(ref), mix)
        assert got == pytest.approx(DB_CAP - 0.0, abs=1e-6)

    def test_fixed_triple_matches_direct_difference(self, rng):
        est = _wave(rng.normal(0, 0.2, 1500))
        ref = _wave(rng.normal(0, 0.2, 1500))
        mix = _wave(rng.normal(0, 0.2, 1500))
        direct = snr_db(est, ref) - snr_db(mix, ref)
        assert improvement(snr_db, est, ref, mix) == pytest.approx(direct, abs=0)


class TestStoi:
    def _speech_like(self, rng, seconds=2.0):
        # amplitude-modulated band noise resembles speech energy structure
        n = int(16000 * seconds)
        t = np.arange(n) / 16000
        carrier = rng.normal(0, 1.0, n)
        env = 0.5 + 0.5 * np.sin(2 * np.pi * 4.0 * t) ** 2
        x = carrier * env
        return _wave(0.3 * x / np.abs(x).max())

    def test_self_intelligibility(self, rng):
        x = self._speech_like(rng)
        assert stoi(x, x) >= 0.99

    def test_independent_noise_low(self, rng):
        x = self._speech_like(rng)
        noise = _wave(0.3 * rng.normal(0, 1.0, x.num_samples)
                      / np.abs(rng.normal(0, 1.0, x.num_samples)).max())
        assert stoi(noise, x) < 0.3

    def test_monotonic_between_bounds(self, rng):
        x = self._speech_like(rng)
        noisy = _wave(x.mono_samples +
                      np.sqrt(10.0) * np.sqrt(np.mean(x.mono_samples ** 2))
                      * rng.normal(0, 1.0, x.num_samples))
        mid = stoi(noisy, x)
        assert stoi(noise_free := x, x) > mid > stoi(
            _wave(rng.normal(0, 0.1, x.num_samples)), x)

    def test_too_short(self, rng):
        x = _wave(rng.normal(0, 0.1, 1600))
        with pytest.raises(ValueError, match="too short"):
            stoi(x, x)
