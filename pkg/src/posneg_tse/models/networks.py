"""Siamese enrollment encoder, encoder fusion, and causal extraction branch."""

from __future__ import annotations

import torch
import torch.nn as nn

from .blocks import (
    ChannelLayerNorm,
    CrossAttentionFusion,
    FiLMFusion,
    GridBlock,
    SelfAttentionLayer,
)
from .spectral_torch import istft_t, stft_t


def _wave_to_features(x: torch.Tensor, window: int, hop: int) -> torch.Tensor:
    """[B, ch, n] -> [B, 2*ch, T, F] by stacking real/imag per channel."""
    spec = stft_t(x, window, hop)  # [B, ch, T, F] complex
    return torch.cat([spec.real, spec.imag], dim=1)


class EnrollmentEncoder(nn.Module):
    """Shared-weight encoder applied to both enrollments.

    Input is RMS-normalized per segment (epsilon-guarded so an all-zero
    segment stays finite); output is one D = C*F vector per STFT frame.
    """

    def __init__(self, in_audio_channels: int, window: int, hop: int,
                 channels: int, hidden: int, heads: int, n_blocks: int,
                 qk_channels: int):
        super().__init__()
        self.window = window
        self.hop = hop
        n_freq = window // 2 + 1
        self.conv = nn.Sequential(
            nn.Conv2d(2 * in_audio_channels, channels, 3, padding=1),
            nn.GroupNorm(1, channels),
        )
        self.blocks = nn.ModuleList([
            GridBlock(channels, hidden, heads, n_freq, qk_channels, causal=False)
            for _ in range(n_blocks)
        ])

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        """[B, ch, n] -> [B, T, D]."""
        rms = torch.sqrt(torch.mean(x ** 2, dim=(1, 2), keepdim=True) + 1e-8)
        x = x / rms
        feats = _wave_to_features(x, self.window, self.hop)
        feats = self.conv(feats)
        for block in self.blocks:
            feats = block(feats)
        B, C, T, Fq = feats.shape
        return feats.permute(0, 2, 1, 3).reshape(B, T, C * Fq)


class EncoderFusion(nn.Module):
    """Contrast the positive/negative embeddings into one target embedding.

    Segment embeddings are broadcast-added, the sequences concatenated
    along time, passed through two full-band self-attention layers, and
    the result truncated back to the positive timeline.
    """

    def __init__(self, dim: int, heads: int, head_dim: int, n_layers: int = 2):
        super().__init__()
        self.seg_pos = nn.Parameter(torch.randn(1, dim) * 0.02)
        self.seg_neg = nn.Parameter(torch.randn(1, dim) * 0.02)
        self.layers = nn.ModuleList(
            [SelfAttentionLayer(dim, heads, head_dim) for _ in range(n_layers)])

    def forward(self, e_pos: torch.Tensor, e_neg: torch.Tensor) -> torch.Tensor:
        if e_pos.shape[-1] != e_neg.shape[-1]:
            raise ValueError("embedding dimension mismatch")
        t_pos = e_pos.shape[1]
        x = torch.cat([e_pos + self.seg_pos, e_neg + self.seg_neg], dim=1)
        for layer in self.layers:
            x = layer(x)
        return x[:, :t_pos]


def pool_time(x: torch.Tensor, k: int) -> torch.Tensor:
    """Non-overlapping mean pooling over time; the remainder folds into the
    final window. [B, T, D] -> [B, max(1, T//k), D]."""
    B, T, D = x.shape
    n_out = max(1, T // k)
    if n_out == 1:
        return x.mean(dim=1, keepdim=True)
    head = x[:, :(n_out - 1) * k].reshape(B, n_out - 1, k, D).mean(dim=2)
    tail = x[:, (n_out - 1) * k:].mean(dim=1, keepdim=True)
    return torch.cat([head, tail], dim=1)


class ExtractionBranch(nn.Module):
    """Causal extraction network conditioned on pooled enrollment embeddings.

    STFT -> 1x1 conv -> causal grid blocks with fusion sites after the
    first two -> 1x1 transposed conv -> ISTFT. Output samples up to t
    depend on input samples below t + window (one-window lookahead); the
    conditioning is fixed ahead of extraction and attends globally.
    """

    def __init__(self, in_audio_channels: int, window: int, hop: int,
                 channels: int, hidden: int, heads: int, n_blocks: int,
                 qk_channels: int, cond_dim: int, cross_head_dim: int,
                 fusion_mode: str = "cross_attn"):
        super().__init__()
        if fusion_mode not in ("cross_attn", "film"):
            raise ValueError(f"unknown fusion mode {fusion_mode!r}")
        self.window = window
        self.hop = hop
        self.audio_channels = in_audio_channels
        self.fusion_mode = fusion_mode
        n_freq = window // 2 + 1
        self.conv = nn.Sequential(
            nn.Conv2d(2 * in_audio_channels, channels, 1),
            ChannelLayerNorm(channels),  # per-position: keeps the branch causal
        )
        self.blocks = nn.ModuleList([
            GridBlock(channels, hidden, heads, n_freq, qk_channels, causal=True)
            for _ in range(n_blocks)
        ])
        n_fusion = min(2, n_blocks)
        if fusion_mode == "cross_attn":
            self.fusions = nn.ModuleList([
                CrossAttentionFusion(channels, n_freq, cond_dim, heads, cross_head_dim)
                for _ in range(n_fusion)
            ])
        else:
            self.fusions = nn.ModuleList(
                [FiLMFusion(channels, cond_dim) for _ in range(n_fusion)])
        self.deconv = nn.ConvTranspose2d(channels, 2 * in_audio_channels, 1)

    def forward(self, mix: torch.Tensor, cond: torch.Tensor) -> torch.Tensor:
        """[B, ch, n], [B, Tc, D] -> [B, ch, n]."""
        n = mix.shape[-1]
        feats = _wave_to_features(mix, self.window, self.hop)
        feats = self.conv(feats)
        for i, block in enumerate(self.blocks):
            feats = block(feats)
            if i < len(self.fusions):
                feats = self.fusions[i](feats, cond)
        out = self.deconv(feats)  # [B, 2*ch, T, F]
        B, _, T, Fq = out.shape
        out = out.reshape(B, 2, self.audio_channels, T, Fq)
        spec = torch.complex(out[:, 0], out[:, 1])
        wave = istft_t(spec, self.window, self.hop)
        if wave.shape[-1] < n:
            wave = nn.functional.pad(wave, (0, n - wave.shape[-1]))
        return wave[..., :n]
