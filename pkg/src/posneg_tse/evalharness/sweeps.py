"""Scenario sweeps: interferer speech length, enrollment length/quality,
and label-noise robustness."""

from __future__ import annotations

import numpy as np

from ..audio import Waveform, improvement, si_snr_db, concatenate
from ..scenes import (
    Corpus,
    Scene,
    ScenePolicy,
    SceneStream,
    SpeakerRole,
    disambiguation_policy,
)
from .matrix import evaluate_stream
from .report import EvalReport, aggregate_row


def _pi_of(scene: Scene) -> str:
    return next(s for s, r in scene.spec.enroll_interferers if r == SpeakerRole.PI)


def _sweep_interferer_length(model, corpus: Corpus, grid: list[float],
                             vary: str, n: int, seed: int,
                             pos_len_s: float, neg_len_s: float,
                             mix_len_s: float) -> EvalReport:
    """Shared engine for the PI-length and NI-length sweeps.

    Each grid point evaluates SI-SNRi of the extraction against the target
    stem and against the PI's mixture stem.
    """
    rows = []
    for gi, value in enumerate(grid):
        policy = disambiguation_policy(
            pos_len_s, neg_len_s, mix_len_s,
            pi_len_s=value if vary == "pi" else None,
            ni_len_s=value if vary == "ni" else None)
        stream = SceneStream(policy, corpus, base_seed=abs(seed) * 65537 + gi)
        scenario = {("l_pos_s" if vary == "pi" else "l_neg_s"): value}
        tgt_vals, pi_vals = [], []
        n_failed = 0
        for i in range(n):
            try:
                scene = stream.scene(i)
                est = model.extract_scene(scene)
                pi_stem = scene.stems["mixture"][_pi_of(scene)]
                tgt_vals.append(improvement(si_snr_db, est, scene.ground_truth,
                                            scene.mixture))
                pi_vals.append(improvement(si_snr_db, est, pi_stem, scene.mixture))
            except (ValueError, KeyError):
                n_failed += 1
        rows.append(aggregate_row(scenario, "si_snr_i_target", tgt_vals, n_failed))
        rows.append(aggregate_row(scenario, "si_snr_i_pi", pi_vals, n_failed))
    manifest = {"sweep": f"{vary}_length", "grid": grid, "n": n, "seed": seed,
                "pos_len_s": pos_len_s, "neg_len_s": neg_len_s,
                "mix_len_s": mix_len_s}
    return EvalReport(rows, manifest, model.model_id)


def sweep_pi_length(model, corpus: Corpus, grid: list[float], n: int = 50,
                    seed: int = 0, pos_len_s: float = 3.0,
                    neg_len_s: float = 3.0, mix_len_s: float = 3.0) -> EvalReport:
    """SI-SNRi (vs target and vs PI) as the PI's positive-segment speech
    length varies; NI length stays randomized."""
    for v in grid:
        if v > pos_len_s:
            raise ValueError("grid value exceeds the positive length")
    return _sweep_interferer_length(model, corpus, grid, "pi", n, seed,
                                    pos_len_s, neg_len_s, mix_len_s)


def sweep_ni_length(model, corpus: Corpus, grid: list[float], n: int = 50,
                    seed: int = 0, pos_len_s: float = 3.0,
                    neg_len_s: float = 3.0, mix_len_s: float = 3.0) -> EvalReport:
    """SI-SNRi (vs target and vs PI) as the NI's negative-segment speech
    length varies; PI length stays randomized."""
    for v in grid:
        if v > neg_len_s:
            raise ValueError("grid value exceeds the negative length")
    return _sweep_interferer_length(model, corpus, grid, "ni", n, seed,
                                    pos_len_s, neg_len_s, mix_len_s)


def sweep_enroll_length(model, corpus: Corpus, pos_grid: list[float],
                        neg_grid: list[float], n: int = 20, seed: int = 0,
                        mix_len_s: float = 3.0, min_len_s: float = 0.05,
                        metrics: list[str] | None = None) -> EvalReport:
    """Grid over enrollment lengths; interferer length *ratios* stay fixed
    (they scale with the segment). Infeasible cells are skipped with a
    reason rather than failing the report."""
    metrics = metrics or ["si_snr_i"]
    rows = []
    for pos_s in pos_grid:
        for neg_s in neg_grid:
            scenario = {"pos_len_s": pos_s, "neg_len_s": neg_s}
            if pos_s < min_len_s or neg_s < min_len_s:
                for m in metrics:
                    rows.append(_skip_row(
                        scenario, m, "segment shorter than one analysis window"))
                continue
            policy = ScenePolicy(
                pos_len_s=pos_s, neg_len_s=neg_s, mix_len_s=mix_len_s,
                n_enroll_interferers=2, n_mixture_interferers=2,
                role_policy="pi-ni", share_interferers=True)
            stream = SceneStream(policy, corpus,
                                 base_seed=abs(seed) * 31 + len(rows))
            rows.extend(evaluate_stream(model, stream, n, metrics, scenario))
    manifest = {"sweep": "enroll_length", "pos_grid": pos_grid,
                "neg_grid": neg_grid, "n": n, "seed": seed}
    return EvalReport(rows, manifest, model.model_id)


def _skip_row(scenario: dict, metric: str, reason: str):
    from .report import EvalRow
    return EvalRow(scenario, metric, None, None, 0, skipped=reason)


def sweep_enroll_snr(model, corpus: Corpus, snr_grid_db: list[float],
                     n: int = 20, seed: int = 0, pos_len_s: float = 3.0,
                     neg_len_s: float = 3.0, mix_len_s: float = 3.0) -> EvalReport:
    """Rescale the target inside the positive enrollment to set its SNR
    against the rest of the segment, then measure extraction SI-SNRi."""
    rows = []
    policy = disambiguation_policy(pos_len_s, neg_len_s, mix_len_s)
    for gi, snr_db_val in enumerate(snr_grid_db):
        stream = SceneStream(policy, corpus, base_seed=abs(seed) * 131 + gi)
        scenario = {"pos_enroll_snr_db": snr_db_val}
        vals = []
        n_failed = 0
        for i in range(n):
            try:
                scene = stream.scene(i)
                tgt_stem = scene.clean_target
                rest = Waveform(scene.positive.samples - tgt_stem.samples,
                                scene.positive.sample_rate)
                tgt_e = float(np.sum(tgt_stem.samples ** 2))
                rest_e = float(np.sum(rest.samples ** 2))
                g = np.sqrt(rest_e / tgt_e * 10.0 ** (snr_db_val / 10.0))
                scaled_pos = Waveform(g * tgt_stem.samples + rest.samples,
                                      scene.positive.sample_rate)
                rescaled = _with_positive(scene, scaled_pos)
                est = model.extract_scene(rescaled)
                vals.append(improvement(si_snr_db, est, scene.ground_truth,
                                        scene.mixture))
            except (ValueError, KeyError):
                n_failed += 1
        rows.append(aggregate_row(scenario, "si_snr_i", vals, n_failed))
    manifest = {"sweep": "enroll_snr", "grid_db": snr_grid_db, "n": n, "seed": seed}
    return EvalReport(rows, manifest, model.model_id)


def _with_positive(scene: Scene, positive: Waveform) -> Scene:
    import copy
    clone = copy.copy(scene)
    clone.positive = positive
    return clone


def label_noise_eval(model, corpus: Corpus, jitter_grid_s: list[float],
                     n: int = 20, seed: int = 0, pos_len_s: float = 3.0,
                     neg_len_s: float = 3.0, mix_len_s: float = 3.0) -> EvalReport:
    """Perturb the positive/negative boundary labels before assembling the
    enrollments from a combined recording, and report the degradation.

    The combined recording is positive followed by negative; exact labels
    are POS=[0, pos_len], NEG=[pos_len, pos_len+neg_len]. Each of the four
    boundary timestamps gets independent uniform jitter in +-jitter_s
    (clamped to the recording); jitter 0 reproduces the exact-label row.
    """
    rows = []
    policy = disambiguation_policy(pos_len_s, neg_len_s, mix_len_s)
    for gi, jitter in enumerate(jitter_grid_s):
        stream = SceneStream(policy, corpus, base_seed=abs(seed) * 17)
        rng = np.random.default_rng([abs(seed), gi, int(round(jitter * 1000))])
        scenario = {"jitter_s": jitter}
        vals = []
        n_failed = 0
        skipped = None
        for i in range(n):
            scene = stream.scene(i)
            rec = concatenate([scene.positive, scene.negative])
            total = rec.duration_s
            j = rng.uniform(-jitter, jitter, size=4) if jitter > 0 else np.zeros(4)
            p0 = float(np.clip(0.0 + j[0], 0.0, total))
            p1 = float(np.clip(pos_len_s + j[1], 0.0, total))
            n0 = float(np.clip(pos_len_s + j[2], 0.0, total))
            n1 = float(np.clip(pos_len_s + neg_len_s + j[3], 0.0, total))
            min_s = 0.05
            if p1 - p0 < min_s:
                skipped = "jitter produced an empty positive segment"
                continue
            if n1 - n0 < min_s:
                skipped = "jitter produced an empty negative segment"
                continue
            jittered = _with_enrollments(scene, rec.slice_s(p0, p1),
                                         rec.slice_s(n0, n1))
            try:
                est = model.extract_scene(jittered)
                vals.append(improvement(si_snr_db, est, scene.ground_truth,
                                        scene.mixture))
            except (ValueError, KeyError):
                n_failed += 1
        row = aggregate_row(scenario, "si_snr_i", vals, n_failed)
        if row.n == 0 and skipped:
            row = _skip_row(scenario, "si_snr_i", skipped)
        rows.append(row)
    manifest = {"sweep": "label_noise", "grid_s": jitter_grid_s, "n": n,
                "seed": seed}
    return EvalReport(rows, manifest, model.model_id)


def _with_enrollments(scene: Scene, positive: Waveform, negative: Waveform) -> Scene:
    import copy
    clone = copy.copy(scene)
    clone.positive = positive
    clone.negative = negative
    return clone
