"""Label validation and the enrollment-assembly/extraction pipeline."""

from __future__ import annotations

import io
import json
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..audio import (
    DEFAULT_SAMPLE_RATE,
    Waveform,
    concatenate,
    improvement,
    read_wav,
    si_snr_db,
    write_wav,
)
from ..models import ModelBundle, checkpoint_hash, condition_from_enrollments, extract, pseudo_negative
from .store import Label, Session, SessionStore


class ServiceError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


@dataclass
class ServiceConfig:
    min_pos_s: float = 0.5
    max_duration_s: float = 120.0
    min_span_s: float = 1.0
    unlabeled_is_negative: bool = False  # the stricter explicit-NEG default


def decode_upload(data: bytes, cfg: ServiceConfig) -> tuple[Waveform, dict]:
    """Parse an uploaded WAV, canonicalize to 16 kHz mono float."""
    if not data:
        raise ServiceError(400, "malformed_wav", "empty upload")
    try:
        w = read_wav(io.BytesIO(data), target_rate=None)
    except Exception as exc:
        raise ServiceError(400, "malformed_wav", f"cannot decode WAV: {exc}") from exc
    original = {"sample_rate": w.sample_rate, "channels": w.channels,
                "duration_s": w.duration_s}
    if w.duration_s > cfg.max_duration_s:
        raise ServiceError(413, "too_long",
                           f"audio exceeds {cfg.max_duration_s} s limit")
    from ..audio import resample
    w = resample(w.to_mono(), DEFAULT_SAMPLE_RATE)
    return w, original


def wav_bytes(w: Waveform) -> bytes:
    buf = io.BytesIO()
    write_wav(buf, w)
    return buf.getvalue()


def validate_labels(raw: list[dict], duration_s: float,
                    cfg: ServiceConfig) -> tuple[list[Label], bool]:
    """Check label invariants; returns (labels, uses_pseudo_negative)."""
    labels = []
    for item in raw:
        try:
            lab = Label(float(item["start_s"]), float(item["end_s"]),
                        str(item["polarity"]).upper())
        except (KeyError, TypeError, ValueError) as exc:
            raise ServiceError(422, "bad_label", f"malformed label entry: {exc}")
        if lab.polarity not in ("POS", "NEG"):
            raise ServiceError(422, "bad_label",
                               f"polarity must be POS or NEG, got {lab.polarity}")
        if not (0.0 <= lab.start_s < lab.end_s <= duration_s + 1e-9):
            raise ServiceError(422, "label_out_of_range",
                               f"[{lab.start_s}, {lab.end_s}] outside audio")
        labels.append(lab)
    pos = sorted([l for l in labels if l.polarity == "POS"],
                 key=lambda l: l.start_s)
    if not pos:
        raise ServiceError(422, "no_positive_enrollment",
                           "at least one POS interval is required")
    for a, b in zip(pos, pos[1:]):
        if b.start_s < a.end_s - 1e-9:
            raise ServiceError(422, "overlapping_positive",
                               "POS intervals must not overlap")
    total_pos = sum(l.end_s - l.start_s for l in pos)
    if total_pos < cfg.min_pos_s:
        raise ServiceError(422, "positive_too_short",
                           f"total POS duration {total_pos:.2f} s "
                           f"< minimum {cfg.min_pos_s} s")
    has_neg = any(l.polarity == "NEG" for l in labels)
    return labels, not has_neg and not cfg.unlabeled_is_negative


def assemble_enrollments(source: Waveform, labels: list[Label],
                         cfg: ServiceConfig) -> tuple[Waveform, Waveform, bool]:
    """Concatenate labeled spans into the positive/negative pair.

    Unlabeled time is ignored unless the service is configured to treat it
    as negative; a missing negative falls back to the fixed pseudo clip.
    """
    pos_parts = [source.slice_s(l.start_s, l.end_s)
                 for l in labels if l.polarity == "POS"]
    neg_parts = [source.slice_s(l.start_s, l.end_s)
                 for l in labels if l.polarity == "NEG"]
    if not neg_parts and cfg.unlabeled_is_negative:
        neg_parts = _complement_spans(source, labels)
    a_pos = concatenate(pos_parts)
    if neg_parts:
        return a_pos, concatenate(neg_parts), False
    return a_pos, pseudo_negative(a_pos.duration_s, source.sample_rate), True


def _complement_spans(source: Waveform, labels: list[Label]) -> list[Waveform]:
    marks = sorted((l.start_s, l.end_s) for l in labels)
    parts = []
    cursor = 0.0
    for start, end in marks:
        if start - cursor > 0.01:
            parts.append(source.slice_s(cursor, start))
        cursor = max(cursor, end)
    if source.duration_s - cursor > 0.01:
        parts.append(source.slice_s(cursor, source.duration_s))
    return parts


class ModelRegistry:
    """Directory of checkpoints; a model id is its content-hash prefix."""

    def __init__(self, model_dir: str | Path):
        self.model_dir = Path(model_dir)
        self._bundles: dict[str, ModelBundle] = {}
        self._index: dict[str, Path] = {}
        self.refresh()

    def refresh(self) -> None:
        self._index.clear()
        for path in sorted(self.model_dir.glob("*.ckpt")):
            self._index[checkpoint_hash(path)[:12]] = path

    def list_models(self) -> list[dict]:
        out = []
        for model_id, path in self._index.items():
            bundle = self.get(model_id)
            out.append({"id": model_id, "file": path.name, "stage": bundle.stage,
                        "channel_mode": bundle.hp.channel_mode})
        return out

    @property
    def default_id(self) -> str:
        if not self._index:
            raise ServiceError(503, "no_models", "no checkpoints available")
        return next(iter(self._index))

    def get(self, model_id: str | None) -> ModelBundle:
        mid = model_id or self.default_id
        if mid not in self._index:
            raise ServiceError(404, "unknown_model", f"no model {mid!r}")
        if mid not in self._bundles:
            self._bundles[mid] = ModelBundle.load(self._index[mid])
        return self._bundles[mid]


def run_extraction(store: SessionStore, registry: ModelRegistry,
                   session: Session, span: tuple[float, float] | None,
                   model_id: str | None, mixture_session_id: str | None,
                   cfg: ServiceConfig) -> Session:
    """Assemble enrollments, run the model, persist the result."""
    source = read_wav(store.blob_path(session.source_blob))
    if mixture_session_id is not None:
        mix_session = store.get(mixture_session_id)
        mixture = read_wav(store.blob_path(mix_session.source_blob))
        gt_key = mixture_session_id
    else:
        mixture = source
        gt_key = session.id
    if span is not None:
        start, end = span
        if end - start < cfg.min_span_s:
            raise ServiceError(422, "span_too_short",
                               f"mixture span must be >= {cfg.min_span_s} s")
        try:
            mixture = mixture.slice_s(start, end)
        except ValueError as exc:
            raise ServiceError(422, "bad_span", str(exc)) from exc

    a_pos, a_neg, _ = assemble_enrollments(source, session.labels, cfg)
    bundle = registry.get(model_id)
    t0 = time.time()
    cond = condition_from_enrollments(a_pos, a_neg, bundle)
    est = extract(mixture, cond, bundle)
    timing_s = time.time() - t0

    session.extract_count += 1
    session.result_blob = store.put_blob(wav_bytes(est))
    session.result_meta = {
        "model": model_id or registry.default_id,
        "duration_s": est.duration_s,
        "timing_s": timing_s,
    }
    truth = store.ground_truth(gt_key)
    if truth is not None and truth.num_samples == est.num_samples:
        session.result_meta["si_snr_i"] = improvement(si_snr_db, est, truth, mixture)
    session.status = "done"
    session.error = None
    return session


def request_fingerprint(span, model_id, mixture_session_id) -> str:
    return json.dumps({"span": span, "model": model_id,
                       "mixture_session": mixture_session_id}, sort_keys=True)
