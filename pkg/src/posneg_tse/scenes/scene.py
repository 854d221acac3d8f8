"""Scene recipes and their deterministic realization.

A scene is the Eq.-style triple of audio segments: the mixture to extract
from, plus the positive/negative enrollment pair, each built as the sum
of per-speaker stems and one noise stem. ``SceneSpec`` is the declarative
recipe (JSON-serializable, seed included); ``realize_scene`` turns it into
audio bitwise-deterministically.

Default per-role speech lengths follow the simulation policy (for 3 s
enrollments: PI 1-2 s of the positive, NI spans the positive and 1-3 s of
the negative, HI partial in both, NRI 1-3 s of the negative only), scaled
proportionally for other segment lengths.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..audio import (
    ActivityTrack,
    DEFAULT_SAMPLE_RATE,
    Waveform,
    convolve_brir,
    read_wav,
    snr_gain,
    vad_trim,
    write_wav,
)
from .corpus import Corpus
from .roles import SpeakerRole

SEGMENTS = ("mixture", "positive", "negative")


@dataclass(frozen=True)
class BinauralSpec:
    """BRIR WAV paths per speaker plus the frontal pair used for the target
    in the positive segment."""

    assignments: dict[str, tuple[str, str]]
    frontal: tuple[str, str]


@dataclass
class SceneSpec:
    target_id: str
    enroll_interferers: list[tuple[str, SpeakerRole]]
    mixture_interferers: list[str]
    pos_len_s: float = 3.0
    neg_len_s: float = 3.0
    mix_len_s: float = 6.0
    pi_len_s: float | None = None   # PI speech length inside the positive
    ni_len_s: float | None = None   # NI speech length inside the negative
    noise_clip_id: str = ""
    noise_snr_db: float = 0.0
    seed: int = 0
    binaural: BinauralSpec | None = None

    def __post_init__(self):
        roles = [r for _, r in self.enroll_interferers]
        if SpeakerRole.TARGET in roles:
            raise ValueError("target must not be listed as an interferer")
        ids = [s for s, _ in self.enroll_interferers]
        if self.target_id in ids or self.target_id in self.mixture_interferers:
            raise ValueError("target cannot interfere with itself")
        if len(set(ids)) != len(ids) or \
                len(set(self.mixture_interferers)) != len(self.mixture_interferers):
            raise ValueError("duplicate interferer ids")
        if self.pi_len_s is not None and self.pi_len_s > self.pos_len_s:
            raise ValueError("infeasible lengths: pi_len_s exceeds pos_len_s")
        if self.ni_len_s is not None and self.ni_len_s > self.neg_len_s:
            raise ValueError("infeasible lengths: ni_len_s exceeds neg_len_s")
        if min(self.pos_len_s, self.neg_len_s, self.mix_len_s) <= 0:
            raise ValueError("segment lengths must be positive")

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["enroll_interferers"] = [[s, r.value] for s, r in self.enroll_interferers]
        if self.binaural is not None:
            d["binaural"] = {
                "assignments": {k: list(v) for k, v in self.binaural.assignments.items()},
                "frontal": list(self.binaural.frontal),
            }
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SceneSpec":
        d = dict(d)
        d["enroll_interferers"] = [(s, SpeakerRole(r)) for s, r in d["enroll_interferers"]]
        if d.get("binaural"):
            b = d["binaural"]
            d["binaural"] = BinauralSpec(
                {k: tuple(v) for k, v in b["assignments"].items()}, tuple(b["frontal"]))
        return cls(**d)


@dataclass
class Scene:
    """Realized audio plus full ground-truth bookkeeping."""

    mixture: Waveform
    positive: Waveform
    negative: Waveform
    stems: dict[str, dict[str, Waveform]]       # segment -> speaker -> stem
    noise: dict[str, Waveform]                  # segment -> noise stem
    noise_offsets: dict[str, int]               # segment -> sample offset in clip
    ground_truth: Waveform                      # target's stem in the mixture
    clean_target: Waveform                      # target's stem in the positive
    activity: dict[str, dict[str, ActivityTrack]]
    spec: SceneSpec

    def segment(self, name: str) -> Waveform:
        return {"mixture": self.mixture, "positive": self.positive,
                "negative": self.negative}[name]

    def recompiled_segment(self, name: str) -> np.ndarray:
        """Re-sum stems + noise exactly as realization did (additivity check)."""
        parts = [w.samples for w in self.stems[name].values()]
        parts.append(self.noise[name].samples)
        return np.sum(np.stack(parts), axis=0)


def prepare_utterance(raw: Waveform, needed_s: float) -> Waveform:
    """VAD-trim, then tile-and-truncate to exactly ``needed_s`` seconds."""
    trimmed = vad_trim(raw)
    n = int(round(needed_s * raw.sample_rate))
    reps = int(np.ceil(n / trimmed.num_samples))
    tiled = np.tile(trimmed.samples, (1, reps))[:, :n]
    return Waveform(tiled, raw.sample_rate)


def sample_noise_segments(noise_clip: Waveform, lens_s: tuple[float, float, float],
                          rng: np.random.Generator) -> tuple[tuple[Waveform, int], ...]:
    """Cut the (mixture, positive, negative) noise windows from one clip.

    Windows are placed at random offsets; non-overlapping placements are
    preferred (segments placed one by one into the remaining free gaps,
    in random order), falling back to independent offsets when the clip
    cannot hold all three disjointly. Returns (window, offset) triples in
    (mixture, positive, negative) order.
    """
    sr = noise_clip.sample_rate
    lens = [int(round(s * sr)) for s in lens_s]
    total = noise_clip.num_samples
    if max(lens) > total:
        raise ValueError("noise clip too short")

    offsets = [0, 0, 0]
    slack = total - sum(lens)
    if slack >= 0:
        # disjoint layout: random segment order, slack split over the four
        # gaps around them (slack 0 forces a tiling of the clip)
        order = list(rng.permutation(3))
        cuts = np.sort(rng.integers(0, slack + 1, size=3)) if slack else [0, 0, 0]
        gaps = [cuts[0], cuts[1] - cuts[0], cuts[2] - cuts[1]]
        cursor = 0
        for gap, seg in zip(gaps, order):
            cursor += int(gap)
            offsets[seg] = cursor
            cursor += lens[seg]
    else:
        for seg in range(3):
            offsets[seg] = int(rng.integers(0, total - lens[seg] + 1))

    out = []
    for n, off in zip(lens, offsets):
        out.append((Waveform(noise_clip.samples[:, off:off + n], sr), off))
    return tuple(out)


def _sample_len(rng: np.random.Generator, lo_s: float, hi_s: float) -> float:
    return float(rng.uniform(lo_s, hi_s))


def _place(stem: Waveform, seg_len: int, rng: np.random.Generator,
           sr: int) -> tuple[np.ndarray, tuple[float, float]]:
    """Put a stem at a uniform contiguous offset inside a segment buffer."""
    n = stem.num_samples
    if n > seg_len:
        raise ValueError("infeasible lengths: stem longer than segment")
    off = int(rng.integers(0, seg_len - n + 1))
    buf = np.zeros((stem.channels, seg_len))
    buf[:, off:off + n] = stem.samples
    return buf, (off / sr, (off + n) / sr)


def realize_scene(spec: SceneSpec, corpus: Corpus) -> Scene:
    """Render a SceneSpec into audio. Fully determined by (spec, corpus)."""
    sr = DEFAULT_SAMPLE_RATE
    rng = np.random.default_rng(spec.seed)
    n_pos = int(round(spec.pos_len_s * sr))
    n_neg = int(round(spec.neg_len_s * sr))
    n_mix = int(round(spec.mix_len_s * sr))

    stems: dict[str, dict[str, Waveform]] = {s: {} for s in SEGMENTS}
    activity: dict[str, dict[str, ActivityTrack]] = {s: {} for s in SEGMENTS}

    def empty_track(seg: str) -> ActivityTrack:
        dur = {"mixture": spec.mix_len_s, "positive": spec.pos_len_s,
               "negative": spec.neg_len_s}[seg]
        return ActivityTrack((), dur)

    def full_stem(speaker: str, seg: str, n: int, dur: float) -> None:
        u = prepare_utterance(corpus.utterance(speaker, rng), n / sr)
        stems[seg][speaker] = u
        activity[seg][speaker] = ActivityTrack(((0.0, dur),), dur)

    def partial_stem(speaker: str, seg: str, seg_n: int, dur: float, len_s: float) -> None:
        if len_s <= 0:
            activity[seg][speaker] = empty_track(seg)
            return
        u = prepare_utterance(corpus.utterance(speaker, rng), len_s)
        buf, iv = _place(u, seg_n, rng, sr)
        stems[seg][speaker] = Waveform(buf, sr)
        activity[seg][speaker] = ActivityTrack((iv,), dur)

    # target: spans the positive, absent from the negative, spans the mixture
    full_stem(spec.target_id, "positive", n_pos, spec.pos_len_s)
    activity["negative"][spec.target_id] = empty_track("negative")

    for speaker, role in spec.enroll_interferers:
        if role == SpeakerRole.PI:
            l_pos = spec.pi_len_s if spec.pi_len_s is not None else _sample_len(
                rng, spec.pos_len_s / 3.0, 2.0 * spec.pos_len_s / 3.0)
            if l_pos >= spec.pos_len_s:  # full overlap is the degenerate sweep point
                l_pos = spec.pos_len_s
            partial_stem(speaker, "positive", n_pos, spec.pos_len_s, l_pos)
            activity["negative"][speaker] = empty_track("negative")
        elif role == SpeakerRole.NI:
            full_stem(speaker, "positive", n_pos, spec.pos_len_s)
            l_neg = spec.ni_len_s if spec.ni_len_s is not None else _sample_len(
                rng, spec.neg_len_s / 3.0, spec.neg_len_s)
            partial_stem(speaker, "negative", n_neg, spec.neg_len_s, l_neg)
        elif role == SpeakerRole.HI:
            l_pos = _sample_len(rng, spec.pos_len_s / 3.0, 2.0 * spec.pos_len_s / 3.0)
            l_neg = _sample_len(rng, spec.neg_len_s / 3.0, spec.neg_len_s)
            partial_stem(speaker, "positive", n_pos, spec.pos_len_s, l_pos)
            partial_stem(speaker, "negative", n_neg, spec.neg_len_s, l_neg)
        elif role == SpeakerRole.NRI:
            activity["positive"][speaker] = empty_track("positive")
            l_neg = _sample_len(rng, spec.neg_len_s / 3.0, spec.neg_len_s)
            partial_stem(speaker, "negative", n_neg, spec.neg_len_s, l_neg)
        else:
            raise ValueError(f"bad enrollment role {role}")

    # mixture: target plus each mixture interferer talking throughout
    full_stem(spec.target_id, "mixture", n_mix, spec.mix_len_s)
    for speaker in spec.mixture_interferers:
        full_stem(speaker, "mixture", n_mix, spec.mix_len_s)

    # binaural routing before noise: every stem through its BRIR pair,
    # the target's positive-segment stem through the frontal pair
    if spec.binaural is not None:
        bs = spec.binaural

        def load_pair(pair: tuple[str, str]) -> tuple[Waveform, Waveform]:
            return read_wav(corpus.root / pair[0]), read_wav(corpus.root / pair[1])

        for seg in SEGMENTS:
            for speaker, stem in list(stems[seg].items()):
                pair = bs.frontal if (seg == "positive" and speaker == spec.target_id) \
                    else bs.assignments[speaker]
                left, right = load_pair(pair)
                stems[seg][speaker] = convolve_brir(stem, left, right)

    # noise: three windows of the same clip, scaled against the target
    clip = corpus.noise_clip(spec.noise_clip_id)
    (nm, off_m), (np_, off_p), (nn, off_n) = sample_noise_segments(
        clip, (spec.mix_len_s, spec.pos_len_s, spec.neg_len_s), rng)

    tgt_mix_e = float(np.sum(stems["mixture"][spec.target_id].samples ** 2))
    tgt_pos_e = float(np.sum(stems["positive"][spec.target_id].samples ** 2))
    # the negative segment has no target; reference its noise against the
    # positive-segment target *power* so one reference governs the scene
    tgt_pos_pow = tgt_pos_e / n_pos

    def scaled(noise_seg: Waveform, ref_energy: float, channels: int) -> Waveform:
        g = snr_gain(float(np.sum(noise_seg.samples ** 2)), ref_energy,
                     spec.noise_snr_db)
        w = noise_seg.scaled(g)
        if channels == 2:  # binaural scenes carry the noise diotically
            w = Waveform(np.vstack([w.samples, w.samples]), w.sample_rate)
        return w

    ch = 2 if spec.binaural is not None else 1
    noise = {
        "mixture": scaled(nm, tgt_mix_e, ch),
        "positive": scaled(np_, tgt_pos_e, ch),
        "negative": scaled(nn, tgt_pos_pow * n_neg, ch),
    }
    noise_offsets = {"mixture": off_m, "positive": off_p, "negative": off_n}

    def compose(seg: str, n: int) -> Waveform:
        parts = [w.samples for w in stems[seg].values()]
        parts.append(noise[seg].samples)
        return Waveform(np.sum(np.stack(parts), axis=0), sr)

    scene = Scene(
        mixture=compose("mixture", n_mix),
        positive=compose("positive", n_pos),
        negative=compose("negative", n_neg),
        stems=stems,
        noise=noise,
        noise_offsets=noise_offsets,
        ground_truth=stems["mixture"][spec.target_id],
        clean_target=stems["positive"][spec.target_id],
        activity=activity,
        spec=spec,
    )
    return scene


def scene_to_dir(scene: Scene, out_dir: str | Path) -> None:
    """Write segments, stems, noise, and metadata for offline inspection."""
    out = Path(out_dir)
    (out / "stems").mkdir(parents=True, exist_ok=True)
    write_wav(out / "mixture.wav", scene.mixture)
    write_wav(out / "positive.wav", scene.positive)
    write_wav(out / "negative.wav", scene.negative)
    write_wav(out / "ground_truth.wav", scene.ground_truth)
    for seg, spk_map in scene.stems.items():
        for spk, stem in spk_map.items():
            write_wav(out / "stems" / f"{seg}__{spk}.wav", stem)
        write_wav(out / "stems" / f"{seg}__noise.wav", scene.noise[seg])
    meta = {
        "spec": scene.spec.to_dict(),
        "noise_offsets": scene.noise_offsets,
        "activity": {
            seg: {spk: [[a, b] for a, b in tr.intervals]
                  for spk, tr in spk_map.items()}
            for seg, spk_map in scene.activity.items()
        },
    }
    (out / "scene.json").write_text(json.dumps(meta, indent=1, sort_keys=True))


def iou_assumption_report(
        tracks: list[tuple[str, str, ActivityTrack]]) -> dict[str, float]:
    """Cross-conversation speaker-activity IoU summary.

    For each pair of conversations, averages pairwise IoU over all speaker
    pairs drawn one from each conversation; reports mean/std of those
    per-conversation-pair averages. Tracks from conversations of unequal
    length are clipped to the shorter duration before comparison.
    """
    from ..audio import pairwise_iou

    def clipped(tr: ActivityTrack, dur: float) -> ActivityTrack:
        if abs(tr.total_duration_s - dur) < 1e-9:
            return tr
        iv = tuple((a, min(b, dur)) for a, b in tr.intervals if a < dur)
        return ActivityTrack(iv, dur)

    by_conv: dict[str, list[ActivityTrack]] = {}
    for conv, _spk, tr in tracks:
        by_conv.setdefault(conv, []).append(tr)
    convs = sorted(by_conv)
    if len(convs) < 2:
        raise ValueError("need at least two conversations")
    means = []
    for i in range(len(convs)):
        for j in range(i + 1, len(convs)):
            vals = []
            for a in by_conv[convs[i]]:
                for b in by_conv[convs[j]]:
                    dur = min(a.total_duration_s, b.total_duration_s)
                    vals.append(pairwise_iou(clipped(a, dur), clipped(b, dur)))
            means.append(float(np.mean(vals)))
    arr = np.array(means)
    return {
        "mean_iou": float(arr.mean()),
        "std_iou": float(arr.std(ddof=1)) if len(arr) > 1 else 0.0,
        "n_conversation_pairs": len(arr),
    }
