"""Speaker/noise corpus store and the in-repo synthetic mini-corpus.

A corpus is a directory of WAV files plus ``index.json``::

    {"speakers": {"spk00": ["spk00/utt0.wav", ...], ...},
     "noise": {"noise0": "noise/noise0.wav", ...}}

The synthetic mini-corpus gives twelve "speakers", each a band-limited
noise voice with its own spectral envelope and amplitude-modulation rate,
which keeps speaker identity learnable by a small model in minutes of CPU
training.
"""

from __future__ import annotations

import json
from functools import lru_cache
from pathlib import Path

import numpy as np
from scipy.signal import butter, sosfilt

from ..audio import DEFAULT_SAMPLE_RATE, Waveform, write_wav, read_wav

_FIXED_NOISE_SEED = 20240001


class Corpus:
    """Read-only audio store resolving speaker ids and noise clip ids."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        index = json.loads((self.root / "index.json").read_text())
        self.speaker_files: dict[str, list[str]] = index["speakers"]
        self.noise_files: dict[str, str] = index.get("noise", {})
        self._cache: dict[str, Waveform] = {}

    @property
    def speaker_ids(self) -> list[str]:
        return sorted(self.speaker_files)

    @property
    def noise_ids(self) -> list[str]:
        return sorted(self.noise_files)

    def _load(self, relpath: str) -> Waveform:
        if relpath not in self._cache:
            self._cache[relpath] = read_wav(self.root / relpath)
        return self._cache[relpath]

    def utterance(self, speaker_id: str, rng: np.random.Generator) -> Waveform:
        """A random utterance of the speaker (seeded choice)."""
        try:
            files = self.speaker_files[speaker_id]
        except KeyError:
            raise KeyError(f"speaker {speaker_id!r} not in corpus") from None
        return self._load(files[int(rng.integers(0, len(files)))])

    def noise_clip(self, clip_id: str) -> Waveform:
        try:
            return self._load(self.noise_files[clip_id])
        except KeyError:
            raise KeyError(f"noise clip {clip_id!r} not in corpus") from None


def _voice_params(n_speakers: int) -> list[tuple[float, float]]:
    """Per-speaker (center frequency Hz, AM rate Hz), mutually distinct."""
    cf = np.geomspace(350.0, 4800.0, n_speakers)
    am = np.linspace(1.8, 7.5, n_speakers)
    return list(zip(cf, am))


def synth_voice(center_hz: float, am_hz: float, duration_s: float,
                rng: np.random.Generator,
                sample_rate: int = DEFAULT_SAMPLE_RATE) -> Waveform:
    """One synthetic 'utterance': band-passed noise with a syllabic envelope."""
    n = int(round(duration_s * sample_rate))
    # third-octave band: adjacent voices on the 12-speaker grid stay disjoint
    lo = center_hz * 2.0 ** (-1.0 / 6.0)
    hi = center_hz * 2.0 ** (1.0 / 6.0)
    sos = butter(4, [lo, hi], btype="bandpass", fs=sample_rate, output="sos")
    x = sosfilt(sos, rng.normal(0.0, 1.0, n))
    t = np.arange(n) / sample_rate
    phase = rng.uniform(0, 2 * np.pi)
    env = (0.5 + 0.5 * np.sin(2 * np.pi * am_hz * t + phase)) ** 1.2
    x *= 0.15 + 0.85 * env
    # a couple of short pauses so VAD trimming has something to do
    for _ in range(int(rng.integers(1, 3))):
        gap = int(rng.integers(int(0.08 * sample_rate), int(0.2 * sample_rate)))
        at = int(rng.integers(0, max(1, n - gap)))
        x[at:at + gap] = 0.0
    peak = np.max(np.abs(x))
    if peak > 0:
        x *= 0.5 / peak
    return Waveform(x, sample_rate)


def synth_noise(duration_s: float, rng: np.random.Generator,
                cutoff_hz: float = 3000.0,
                sample_rate: int = DEFAULT_SAMPLE_RATE) -> Waveform:
    """Broadband background noise (low-passed white)."""
    n = int(round(duration_s * sample_rate))
    sos = butter(2, cutoff_hz, btype="lowpass", fs=sample_rate, output="sos")
    x = sosfilt(sos, rng.normal(0.0, 1.0, n))
    x *= 0.3 / np.max(np.abs(x))
    return Waveform(x, sample_rate)


@lru_cache(maxsize=8)
def _fixed_noise_cached(n: int, sample_rate: int) -> tuple:
    rng = np.random.default_rng(_FIXED_NOISE_SEED)
    w = synth_noise(n / sample_rate, rng, sample_rate=sample_rate)
    return tuple(w.samples[0][:n])


def fixed_noise_clip(duration_s: float,
                     sample_rate: int = DEFAULT_SAMPLE_RATE) -> Waveform:
    """The fixed, shipped noise clip used as the pseudo negative enrollment.

    Deterministic across processes: the same duration always yields the
    same samples (longer requests extend the same underlying clip).
    """
    n = int(round(duration_s * sample_rate))
    base = _fixed_noise_cached(max(n, sample_rate * 30), sample_rate)
    return Waveform(np.array(base[:n]), sample_rate)


def build_synthetic_corpus(root: str | Path, n_speakers: int = 12,
                           utterances_per_speaker: int = 4,
                           utterance_s: float = 4.0,
                           n_noise_clips: int = 4, noise_s: float = 20.0,
                           seed: int = 1234,
                           sample_rate: int = DEFAULT_SAMPLE_RATE) -> Corpus:
    """Generate the synthetic mini-corpus under ``root`` and return it."""
    root = Path(root)
    rng = np.random.default_rng(seed)
    speakers: dict[str, list[str]] = {}
    for i, (cf, am) in enumerate(_voice_params(n_speakers)):
        sid = f"spk{i:02d}"
        (root / sid).mkdir(parents=True, exist_ok=True)
        files = []
        for u in range(utterances_per_speaker):
            rel = f"{sid}/utt{u}.wav"
            write_wav(root / rel, synth_voice(cf, am, utterance_s, rng, sample_rate))
            files.append(rel)
        speakers[sid] = files
    noise: dict[str, str] = {}
    (root / "noise").mkdir(parents=True, exist_ok=True)
    for k in range(n_noise_clips):
        rel = f"noise/noise{k}.wav"
        cutoff = float(rng.uniform(1500.0, 5000.0))
        write_wav(root / rel, synth_noise(noise_s, rng, cutoff, sample_rate))
        noise[f"noise{k}"] = rel
    (root / "index.json").write_text(
        json.dumps({"speakers": speakers, "noise": noise}, indent=1, sort_keys=True))
    return Corpus(root)
