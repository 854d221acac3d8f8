"""Numpy-facing model operations used by the harness and the service.

Training drives the torch modules directly; everything here runs under
``torch.no_grad`` and converts at the boundary.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
import torch

from ..audio import Waveform
from ..scenes import fixed_noise_clip
from .bundle import ModelBundle
from .networks import pool_time


class Origin(str, Enum):
    POS = "POS"
    NEG = "NEG"
    FUSED = "FUSED"
    FUSED_POOLED = "FUSED_POOLED"
    CLEAN = "CLEAN"


@dataclass(frozen=True)
class EmbeddingSequence:
    """Frame-indexed conditioning features, shape [T, D]."""

    frames: np.ndarray
    origin: Origin

    def __post_init__(self):
        f = np.asarray(self.frames, dtype=np.float32)
        if f.ndim != 2 or f.shape[0] < 1:
            raise ValueError(f"expected [T, D] with T >= 1, got {f.shape}")
        if not np.all(np.isfinite(f)):
            raise ValueError("embedding contains non-finite values")
        object.__setattr__(self, "frames", f)

    @property
    def dim(self) -> int:
        return self.frames.shape[1]


def _wave_tensor(w: Waveform, bundle: ModelBundle) -> torch.Tensor:
    expected = bundle.hp.audio_channels
    if w.channels != expected:
        raise ValueError(
            f"{bundle.hp.channel_mode} bundle expects {expected} channel(s), "
            f"got {w.channels}")
    if w.sample_rate != bundle.hp.sample_rate:
        raise ValueError("sample-rate mismatch with bundle")
    return torch.from_numpy(w.samples.astype(np.float32))[None]  # [1, ch, n]


def encode_enrollment(a: Waveform, bundle: ModelBundle,
                      origin: Origin = Origin.POS) -> EmbeddingSequence:
    """Run one enrollment through the shared Siamese encoder."""
    with torch.no_grad():
        emb = bundle.encoder(_wave_tensor(a, bundle))[0]
    return EmbeddingSequence(emb.numpy(), origin)


def encoder_fusion(e_pos: EmbeddingSequence, e_neg: EmbeddingSequence,
                   bundle: ModelBundle) -> EmbeddingSequence:
    """Fuse positive/negative embeddings; output keeps the positive length."""
    if e_pos.dim != e_neg.dim:
        raise ValueError("embedding dimension mismatch")
    with torch.no_grad():
        fused = bundle.fusion(torch.from_numpy(e_pos.frames)[None],
                              torch.from_numpy(e_neg.frames)[None])[0]
    return EmbeddingSequence(fused.numpy(), Origin.FUSED)


def pool_embedding(e: EmbeddingSequence, k: int = 40) -> EmbeddingSequence:
    """Non-overlapping temporal mean pooling (remainder folds into the last
    window); output length max(1, T//k)."""
    pooled = pool_time(torch.from_numpy(e.frames)[None], k)[0]
    return EmbeddingSequence(pooled.numpy(), Origin.FUSED_POOLED)


def condition_from_enrollments(pos: Waveform, neg: Waveform,
                               bundle: ModelBundle) -> EmbeddingSequence:
    """encode x2 -> fuse -> pool, the full conditioning pipeline."""
    e_pos = encode_enrollment(pos, bundle, Origin.POS)
    e_neg = encode_enrollment(neg, bundle, Origin.NEG)
    return pool_embedding(encoder_fusion(e_pos, e_neg, bundle), bundle.hp.pool_k)


def extract(a_mix: Waveform, cond: EmbeddingSequence,
            bundle: ModelBundle) -> Waveform:
    """Extract the conditioned speaker; same length and channels as input."""
    if cond is None:
        raise ValueError("missing conditioning")
    if cond.dim != bundle.hp.embed_dim:
        raise ValueError("conditioning dimension mismatch with bundle")
    mix = _wave_tensor(a_mix, bundle)
    with torch.no_grad():
        out = bundle.extraction(mix, torch.from_numpy(cond.frames)[None])[0]
    return Waveform(out.numpy().astype(np.float64), a_mix.sample_rate)


def film_fusion_variant(a_mix: Waveform, cond: EmbeddingSequence,
                        bundle_film: ModelBundle) -> Waveform:
    """The ablation path: affine modulation instead of cross-attention."""
    if bundle_film.hp.fusion_mode != "film":
        raise ValueError("bundle was not built in FiLM mode")
    return extract(a_mix, cond, bundle_film)


def pseudo_negative(duration_s: float, sample_rate: int = 16000) -> Waveform:
    """Fixed noise clip standing in for a missing negative enrollment.

    Used when only clean/positive material exists; pairing it with a
    noise-augmented positive keeps the encoder inputs in distribution
    instead of feeding an all-zero segment.
    """
    return fixed_noise_clip(duration_s, sample_rate)


def target_confusion_similarity(e_a: EmbeddingSequence | np.ndarray,
                                e_b: EmbeddingSequence | np.ndarray) -> float:
    """Cosine similarity of flattened, L2-normalized embedding sequences."""
    a = (e_a.frames if isinstance(e_a, EmbeddingSequence) else np.asarray(e_a)).ravel()
    b = (e_b.frames if isinstance(e_b, EmbeddingSequence) else np.asarray(e_b)).ravel()
    if a.shape != b.shape:
        raise ValueError("flattened lengths differ")
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise ValueError("zero embedding")
    return float(np.dot(a / na, b / nb))


def gridnet_block(x: np.ndarray, block) -> np.ndarray:
    """Apply one grid block to [T, F, C] features (test/introspection aid)."""
    t = torch.from_numpy(np.asarray(x, dtype=np.float32))
    t = t.permute(2, 0, 1)[None]  # [1, C, T, F]
    with torch.no_grad():
        out = block(t)[0].permute(1, 2, 0)
    return out.numpy()
