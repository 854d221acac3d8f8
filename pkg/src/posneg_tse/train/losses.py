"""Training losses shared with the metric definitions."""

from __future__ import annotations

import torch

DB_CAP = 60.0
_REL_EPS = 1e-10


def snr_db_t(est: torch.Tensor, ref: torch.Tensor) -> torch.Tensor:
    """Per-item capped SNR in dB; [B, ch, n] -> [B]. Multi-channel items
    average the per-channel value (binaural training loss convention)."""
    ref_e = (ref ** 2).sum(dim=-1)
    err_e = ((ref - est) ** 2).sum(dim=-1)
    db = 10.0 * torch.log10(ref_e / (err_e + _REL_EPS * ref_e))
    return db.clamp(-DB_CAP, DB_CAP).mean(dim=-1)


def negative_snr_loss(est: torch.Tensor, ref: torch.Tensor) -> torch.Tensor:
    """Waveform-stage loss: the negative SNR of the extraction."""
    return -snr_db_t(est, ref).mean()


def embedding_distill_loss(e_clean: torch.Tensor, e_fused: torch.Tensor) -> torch.Tensor:
    """Distillation loss: mean squared elementwise difference."""
    if e_clean.shape != e_fused.shape:
        raise ValueError(f"embedding shape mismatch {e_clean.shape} vs {e_fused.shape}")
    return ((e_clean - e_fused) ** 2).mean()
